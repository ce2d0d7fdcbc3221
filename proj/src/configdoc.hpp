#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace preimpact {

/// Parsed value of one `key = value` entry with its source line for
/// diagnostics.
struct ConfigValue {
  enum class Kind { number, string, boolean, array };
  Kind kind = Kind::number;
  double number = 0.0;
  std::string text;
  bool boolean = false;
  std::vector<double> array;
  int line = 0;

  double as_number() const;
  double as_positive(const std::string& key) const;
  std::string as_string() const;
  bool as_bool() const;
  const std::vector<double>& as_array() const;
};

/// One `[section]` table. Keys are tracked as consumed so schema mapping can
/// reject unknown entries with their line numbers.
struct ConfigSection {
  std::string name;
  int line = 0;
  std::map<std::string, ConfigValue> entries;
  mutable std::map<std::string, bool> consumed;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  const ConfigValue* find(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
  /// Throws ConfigError naming the section and key when absent.
  const ConfigValue& require(const std::string& key) const;
  /// Every entry must have been consumed; otherwise errors on the first
  /// unknown key with its line.
  void reject_unconsumed() const;
};

/// Strict flat key-value document: `[section]` headers, `key = value` lines,
/// `#` comments. Values are numbers, quoted strings, booleans, or arrays of
/// numbers. A repeated `[stage]` header appends a new table (used for chain
/// stages); any other repeated section is an error.
class ConfigDoc {
 public:
  static ConfigDoc parse(std::string_view text);
  static ConfigDoc parse_file(const std::string& path);

  /// Top-level entries appearing before the first section header.
  const ConfigSection& root() const { return root_; }
  ConfigSection& root() { return root_; }

  bool has_section(const std::string& name) const;
  /// Non-repeatable section; a synthetic empty table when absent.
  const ConfigSection& section(const std::string& name) const;
  ConfigSection& mutable_section(const std::string& name);
  const std::vector<ConfigSection>& stages() const { return stages_; }
  std::vector<ConfigSection>& mutable_stages() { return stages_; }

  /// Applies a dotted `section.key=value` (or `key=value` for root, or
  /// `stage.<i>.key=value`) override; the value is parsed with the same
  /// scalar rules as the document.
  void set(const std::string& dotted_key, const std::string& value);

  /// Errors if any entry anywhere was not consumed by the schema mapping.
  void reject_unconsumed() const;

  /// Serializes back to document text (resolved-config echo).
  std::string to_text() const;

 private:
  ConfigSection root_;
  std::map<std::string, ConfigSection> sections_;
  std::vector<ConfigSection> stages_;
  std::vector<std::string> section_order_;
  static ConfigSection empty_;
};

}  // namespace preimpact
