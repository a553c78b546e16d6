#include "ecofire/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace ecofire {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,f,v,w\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const State& s = traj.states[i];
    os << format_double(traj.times[i]) << ',' << format_double(s.f) << ',' << format_double(s.v)
       << ',' << format_double(s.w) << '\n';
  }
}

void write_fields_csv(std::ostream& os, std::span<const FieldState> snapshots) {
  os << "t,x,f,v,w\n";
  for (const FieldState& s : snapshots) {
    const std::string t = format_double(s.time);
    for (std::size_t i = 0; i < s.grid_points; ++i) {
      os << t << ',' << format_double(s.x(i)) << ',' << format_double(s.f[i]) << ','
         << format_double(s.v[i]) << ',' << format_double(s.w[i]) << '\n';
    }
  }
}

}  // namespace ecofire
