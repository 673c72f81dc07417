#pragma once

// Plain-text run configuration: INI sections with key = value lines, addressed
// as "section.key". Command-line overrides use the same dotted form.
//
// Every get() records the effective value, so the file written by
// write_effective() reproduces the run.

#include "nsgvd/error.hpp"

#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace nsgvd {

class Config {
 public:
  Config() = default;

  /// Loads `file` (if given) and applies "section.key=value" overrides in order.
  static Config load(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides);

  template <class T>
  T get(const std::string& key, const T& fallback) {
    used_.insert(key);
    T value = fallback;
    if (const auto raw = tree_.get_optional<std::string>(key); raw && !raw->empty()) {
      const auto parsed = tree_.get_optional<T>(key);
      if (!parsed) throw ValidationError("config key '" + key + "' has invalid value '" + *raw + "'");
      value = *parsed;
    }
    if constexpr (std::is_floating_point_v<T>) {
      std::ostringstream os;
      os.precision(17);
      os << value;
      effective_.put(key, os.str());
    } else {
      effective_.put(key, value);
    }
    return value;
  }

  std::string get_string(const std::string& key, const std::string& fallback);
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback);
  std::vector<long long> get_ints(const std::string& key, const std::vector<long long>& fallback);

  bool has(const std::string& key) const;

  /// Throws ValidationError naming any key in `sections` that no get() asked for.
  /// Other sections are left alone so one file can serve several commands.
  void reject_unknown(const std::vector<std::string>& sections) const;

  void write_effective(const std::filesystem::path& path) const;
  const boost::property_tree::ptree& effective() const noexcept { return effective_; }

 private:
  boost::property_tree::ptree tree_;
  boost::property_tree::ptree effective_;
  std::set<std::string> used_;
};

std::vector<double> parse_double_list(const std::string& text);

}  // namespace nsgvd
