#include "configdoc.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace preimpact {

ConfigSection ConfigDoc::empty_{};

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

double parse_number(std::string_view s, int line) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("expected a number, got '" + std::string(s) + "'", line);
  }
  return value;
}

ConfigValue parse_scalar(std::string_view raw, int line) {
  ConfigValue v;
  v.line = line;
  raw = trim(raw);
  if (raw.empty()) throw ConfigError("missing value", line);
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw ConfigError("unterminated string", line);
    }
    v.kind = ConfigValue::Kind::string;
    v.text = std::string(raw.substr(1, raw.size() - 2));
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.boolean = raw == "true";
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError("unterminated array", line);
    v.kind = ConfigValue::Kind::array;
    std::string_view inner = trim(raw.substr(1, raw.size() - 2));
    while (!inner.empty()) {
      const std::size_t comma = inner.find(',');
      std::string_view item =
          comma == std::string_view::npos ? inner : inner.substr(0, comma);
      v.array.push_back(parse_number(trim(item), line));
      if (comma == std::string_view::npos) break;
      inner = trim(inner.substr(comma + 1));
      if (inner.empty()) throw ConfigError("trailing comma in array", line);
    }
    return v;
  }
  v.kind = ConfigValue::Kind::number;
  v.number = parse_number(raw, line);
  return v;
}

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string format_value(const ConfigValue& v) {
  switch (v.kind) {
    case ConfigValue::Kind::string:
      return "\"" + v.text + "\"";
    case ConfigValue::Kind::boolean:
      return v.boolean ? "true" : "false";
    case ConfigValue::Kind::array: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.array.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.array[i]);
        out += buf;
        if (i + 1 < v.array.size()) out += ", ";
      }
      return out + "]";
    }
    case ConfigValue::Kind::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v.number);
      return buf;
    }
  }
  return "";
}

}  // namespace

double ConfigValue::as_number() const {
  if (kind != Kind::number) throw ConfigError("expected a number", line);
  return number;
}

double ConfigValue::as_positive(const std::string& key) const {
  const double v = as_number();
  if (!(v > 0.0)) throw ConfigError(key + " must be > 0", line);
  return v;
}

std::string ConfigValue::as_string() const {
  if (kind != Kind::string) throw ConfigError("expected a string", line);
  return text;
}

bool ConfigValue::as_bool() const {
  if (kind != Kind::boolean) throw ConfigError("expected true or false", line);
  return boolean;
}

const std::vector<double>& ConfigValue::as_array() const {
  if (kind != Kind::array) throw ConfigError("expected an array", line);
  return array;
}

const ConfigValue* ConfigSection::find(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return nullptr;
  consumed[key] = true;
  return &it->second;
}

double ConfigSection::number_or(const std::string& key, double fallback) const {
  const ConfigValue* v = find(key);
  return v ? v->as_number() : fallback;
}

std::string ConfigSection::string_or(const std::string& key,
                                     const std::string& fallback) const {
  const ConfigValue* v = find(key);
  return v ? v->as_string() : fallback;
}

bool ConfigSection::bool_or(const std::string& key, bool fallback) const {
  const ConfigValue* v = find(key);
  return v ? v->as_bool() : fallback;
}

const ConfigValue& ConfigSection::require(const std::string& key) const {
  const ConfigValue* v = find(key);
  if (!v) {
    throw ConfigError("missing required key '" + key + "'" +
                          (name.empty() ? "" : " in [" + name + "]"),
                      line);
  }
  return *v;
}

void ConfigSection::reject_unconsumed() const {
  for (const auto& [key, value] : entries) {
    const auto it = consumed.find(key);
    if (it == consumed.end() || !it->second) {
      throw ConfigError("unknown key '" + key + "'" +
                            (name.empty() ? "" : " in [" + name + "]"),
                        value.line);
    }
  }
}

ConfigDoc ConfigDoc::parse(std::string_view text) {
  ConfigDoc doc;
  ConfigSection* current = &doc.root_;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    line = trim(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      const std::string name{trim(line.substr(1, line.size() - 2))};
      if (!valid_identifier(name)) {
        throw ConfigError("invalid section name '" + name + "'", line_no);
      }
      if (name == "stage") {
        doc.stages_.emplace_back();
        doc.stages_.back().name = "stage";
        doc.stages_.back().line = line_no;
        current = &doc.stages_.back();
      } else {
        if (doc.sections_.count(name)) {
          throw ConfigError("duplicate section [" + name + "]", line_no);
        }
        ConfigSection& s = doc.sections_[name];
        s.name = name;
        s.line = line_no;
        doc.section_order_.push_back(name);
        current = &s;
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value'", line_no);
    }
    const std::string key{trim(line.substr(0, eq))};
    if (!valid_identifier(key)) {
      throw ConfigError("invalid key '" + key + "'", line_no);
    }
    if (current->entries.count(key)) {
      throw ConfigError("duplicate key '" + key + "'", line_no);
    }
    current->entries[key] = parse_scalar(line.substr(eq + 1), line_no);
  }
  return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool ConfigDoc::has_section(const std::string& name) const {
  return sections_.count(name) != 0;
}

const ConfigSection& ConfigDoc::section(const std::string& name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty_ : it->second;
}

ConfigSection& ConfigDoc::mutable_section(const std::string& name) {
  auto it = sections_.find(name);
  if (it == sections_.end()) {
    ConfigSection& s = sections_[name];
    s.name = name;
    section_order_.push_back(name);
    return s;
  }
  return it->second;
}

void ConfigDoc::set(const std::string& dotted_key, const std::string& value) {
  const ConfigValue parsed = parse_scalar(value, 0);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    parts.push_back(dotted_key.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (parts.size() == 1) {
    root_.entries[parts[0]] = parsed;
    return;
  }
  if (parts.size() == 2) {
    if (parts[0] == "stage") {
      throw ConfigError("stage overrides use stage.<index>.<key>");
    }
    mutable_section(parts[0]).entries[parts[1]] = parsed;
    return;
  }
  if (parts.size() == 3 && parts[0] == "stage") {
    std::size_t idx = 0;
    try {
      idx = static_cast<std::size_t>(std::stoul(parts[1]));
    } catch (const std::exception&) {
      throw ConfigError("bad stage index '" + parts[1] + "'");
    }
    if (idx < 1 || idx > stages_.size()) {
      throw ConfigError("stage index " + parts[1] + " out of range");
    }
    stages_[idx - 1].entries[parts[2]] = parsed;
    return;
  }
  throw ConfigError("bad override key '" + dotted_key + "'");
}

void ConfigDoc::reject_unconsumed() const {
  root_.reject_unconsumed();
  for (const auto& name : section_order_) sections_.at(name).reject_unconsumed();
  for (const auto& stage : stages_) stage.reject_unconsumed();
}

std::string ConfigDoc::to_text() const {
  std::string out;
  auto emit = [&out](const ConfigSection& s) {
    for (const auto& [key, value] : s.entries) {
      out += key + " = " + format_value(value) + "\n";
    }
  };
  emit(root_);
  for (const auto& name : section_order_) {
    out += "\n[" + name + "]\n";
    emit(sections_.at(name));
  }
  for (const auto& stage : stages_) {
    out += "\n[stage]\n";
    emit(stage);
  }
  return out;
}

}  // namespace preimpact
