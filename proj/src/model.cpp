#include "hwave/model.hpp"

#include <cmath>
#include <string>

#include "hwave/errors.hpp"
#include "hwave/hermite.hpp"

namespace hwave {

void validate(const ModelParams& p) {
  if (p.n < 1 || p.n > kMaxDim) throw DomainError("model: n must be in 1..3");
  if (!(p.b > 0.0) || !std::isfinite(p.b)) throw DomainError("model: damping b must be positive");
  if (!(p.m >= 0.0) || !std::isfinite(p.m)) throw DomainError("model: mass m must be nonnegative");
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
    throw DomainError("model: fractional order alpha must be positive");
  if (!(p.b * p.b > 4.0 * p.m))
    throw DomainError("model: linear decay hypothesis b^2 > 4m violated (b=" + std::to_string(p.b) +
                      ", m=" + std::to_string(p.m) + ")");
}

}  // namespace hwave
