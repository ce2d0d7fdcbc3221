#include "trace.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace preimpact {

namespace {

std::vector<const std::vector<double>*> ordered_columns(const SimTrace& tr) {
  std::vector<const std::vector<double>*> cols;
  cols.push_back(&tr.t);
  cols.push_back(&tr.x_d);
  cols.push_back(&tr.v_d);
  cols.push_back(&tr.a_d);
  for (std::size_t s = 0; s < tr.stage_count; ++s) {
    cols.push_back(&tr.x_v[s]);
    cols.push_back(&tr.v_v[s]);
  }
  cols.push_back(&tr.x);
  cols.push_back(&tr.v);
  cols.push_back(&tr.a);
  cols.push_back(&tr.x_obs);
  cols.push_back(&tr.v_obs);
  cols.push_back(&tr.gap);
  cols.push_back(&tr.xi);
  cols.push_back(&tr.f_p);
  cols.push_back(&tr.f_c);
  cols.push_back(&tr.u);
  return cols;
}

}  // namespace

void SimTrace::reserve(std::size_t n) {
  x_v.resize(stage_count);
  v_v.resize(stage_count);
  for (auto* vec : {&t, &x_d, &v_d, &a_d, &x, &v, &a, &x_obs, &v_obs, &gap, &xi, &f_p,
                    &f_c, &u}) {
    vec->reserve(n);
  }
  for (std::size_t s = 0; s < stage_count; ++s) {
    x_v[s].reserve(n);
    v_v[s].reserve(n);
  }
}

void SimTrace::validate() const {
  if (x_v.size() != stage_count || v_v.size() != stage_count) {
    throw ConfigError("trace stage series count does not match stage_count");
  }
  const std::size_t n = t.size();
  for (const auto* col : ordered_columns(*this)) {
    if (col->size() != n) throw ConfigError("trace columns have unequal lengths");
  }
  if (n >= 2) {
    if (!(dt > 0.0)) throw ConfigError("trace dt must be > 0");
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double step = t[k + 1] - t[k];
      if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * std::max(1.0, dt)) {
        throw ConfigError("trace time grid must increase with constant step");
      }
    }
  }
}

std::vector<std::string> SimTrace::column_names() const {
  std::vector<std::string> names{"t", "x_d", "v_d", "a_d"};
  for (std::size_t s = 0; s < stage_count; ++s) {
    names.push_back("x_v" + std::to_string(s + 1));
    names.push_back("v_v" + std::to_string(s + 1));
  }
  for (const char* n : {"x", "v", "a", "x_obs", "v_obs", "gap", "xi", "f_p", "f_c", "u"}) {
    names.emplace_back(n);
  }
  return names;
}

std::span<const double> SimTrace::column(std::string_view name) const {
  const auto names = column_names();
  const auto cols = ordered_columns(*this);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return *cols[i];
  }
  throw ConfigError("unknown trace column: " + std::string(name));
}

void SimTrace::write_csv(const std::string& path) const {
  validate();
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open trace file for writing: " + path);
  const auto names = column_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::fprintf(f, "%s%s", names[i].c_str(), i + 1 < names.size() ? "," : "\n");
  }
  const auto cols = ordered_columns(*this);
  const std::size_t n = size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      std::fprintf(f, "%.17g%s", (*cols[i])[k], i + 1 < cols.size() ? "," : "\n");
    }
  }
  if (std::fclose(f) != 0) throw ConfigError("failed to write trace file: " + path);
}

SimTrace SimTrace::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("empty trace file: " + path);

  std::vector<std::string> names;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  std::size_t stages = 0;
  while (stages * 2 + 4 < names.size() &&
         names[4 + stages * 2] == "x_v" + std::to_string(stages + 1)) {
    ++stages;
  }
  SimTrace tr;
  tr.stage_count = std::max<std::size_t>(stages, 1);
  tr.x_v.resize(tr.stage_count);
  tr.v_v.resize(tr.stage_count);
  SimTrace expect = tr;
  if (names != expect.column_names()) {
    throw ConfigError("unexpected trace header in " + path);
  }

  std::vector<std::vector<double>*> cols;
  cols.push_back(&tr.t);
  cols.push_back(&tr.x_d);
  cols.push_back(&tr.v_d);
  cols.push_back(&tr.a_d);
  for (std::size_t s = 0; s < tr.stage_count; ++s) {
    cols.push_back(&tr.x_v[s]);
    cols.push_back(&tr.v_v[s]);
  }
  for (auto* vec : {&tr.x, &tr.v, &tr.a, &tr.x_obs, &tr.v_obs, &tr.gap, &tr.xi, &tr.f_p,
                    &tr.f_c, &tr.u}) {
    cols.push_back(vec);
  }

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t start = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      std::size_t end = line.find(',', start);
      if (i + 1 == cols.size()) {
        end = line.size();
      } else if (end == std::string::npos) {
        throw ConfigError("short row in trace CSV", static_cast<int>(line_no));
      }
      double value = 0.0;
      const char* first = line.data() + start;
      const char* last = line.data() + end;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last) {
        throw ConfigError("bad number in trace CSV", static_cast<int>(line_no));
      }
      cols[i]->push_back(value);
      start = end + 1;
    }
  }
  if (tr.size() >= 2) tr.dt = tr.t[1] - tr.t[0];
  tr.validate();
  return tr;
}

}  // namespace preimpact
