#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "hwave/config.hpp"

namespace hwave {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

// Runs the configured experiment, writing CSV/JSON artifacts into out_dir.
// Returns 0 when every verdict passes, 1 otherwise, 2 on configuration errors.
int run(const RunConfig& config, const std::string& out_dir, std::uint64_t seed, std::ostream& log);

}  // namespace hwave
