#pragma once

#include <json.hpp>
#include <string>

#include "hwave/decay.hpp"
#include "hwave/duhamel.hpp"
#include "hwave/oracle.hpp"

namespace hwave {

using json = nlohmann::ordered_json;

// Doubles are written with %.17g so reruns are byte-identical.
std::string format_double(double v);

// t,measured,envelope,ratio
void write_decay_csv(const std::string& path, const DecayReport& r);
// iter,x_diff,ratio
void write_convergence_csv(const std::string& path, const ConvergenceReport& r);
// t,L2,Halpha,dtL2
void write_trajectory_csv(const std::string& path, const Trajectory& tr, double alpha);

json to_json(const DecayReport& r, bool with_series = false);
json to_json(const ConvergenceReport& r);
json to_json(const RatioReport& r);
json to_json(const DataNorms& n);

void write_json(const std::string& path, const json& j);

}  // namespace hwave
