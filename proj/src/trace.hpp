#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace preimpact {

/// Uniform-grid record of every signal in a run. Column order is pinned:
///   t, x_d, v_d, a_d, x_v1, v_v1, ..., x_vN, v_vN, x, v, a,
///   x_obs, v_obs, gap, xi, f_p, f_c, u
/// Forces are world-frame signed values; `gap` is positive when separated.
struct SimTrace {
  double dt = 0.0;
  std::size_t stage_count = 1;

  std::vector<double> t, x_d, v_d, a_d;
  std::vector<std::vector<double>> x_v, v_v;  // one series per stage
  std::vector<double> x, v, a;
  std::vector<double> x_obs, v_obs;
  std::vector<double> gap, xi, f_p, f_c, u;

  std::size_t size() const { return t.size(); }

  void reserve(std::size_t n);
  /// Equal column lengths, strictly increasing constant-step grid.
  void validate() const;

  std::vector<std::string> column_names() const;
  /// Throws ConfigError for unknown names.
  std::span<const double> column(std::string_view name) const;

  /// Floats serialized with 17 significant digits (value round-trip).
  void write_csv(const std::string& path) const;
  static SimTrace read_csv(const std::string& path);
};

}  // namespace preimpact
