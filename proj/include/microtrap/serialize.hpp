#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "microtrap/array.hpp"
#include "microtrap/montecarlo.hpp"
#include "microtrap/optics.hpp"
#include "microtrap/register.hpp"
#include "microtrap/trapfield.hpp"

namespace microtrap {

// JSON field names carry explicit SI units; depth is also emitted in
// mK * kB for reading against the usual lab numbers.
nlohmann::json to_json(const TrapSite& site);
nlohmann::json to_json(const TrapArray& array);
nlohmann::json to_json(const QubitRegister& reg);
nlohmann::json to_json(const McResult& result);
nlohmann::json to_json(const ScheduleResult& result);

// site_row,site_col,x_m,y_m,power_W: the lattice/power map export.
std::string power_map_csv(const MicrolensArray& array, const std::vector<double>& shares);

// Per-site summary of a built trap array.
std::string trap_array_csv(const TrapArray& array);

// time_s,count survival series.
std::string survival_csv(const McResult& result);

// Deterministic shortest-exact double formatting used by every CSV writer.
std::string format_double(double value);

}  // namespace microtrap
