#pragma once

namespace hwave {

struct ModelParams {
  int n = 1;
  double b = 2.0;
  double m = 0.0;
  double alpha = 1.0;

  int Q() const { return 2 * n + 2; }
  // b^2/4 - m, positive for admissible parameters
  double gap() const { return 0.25 * b * b - m; }
};

// Throws DomainError naming the violated hypothesis.
void validate(const ModelParams& p);

}  // namespace hwave
