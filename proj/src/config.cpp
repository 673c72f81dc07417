#include "nsgvd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <algorithm>
#include <sstream>

namespace nsgvd {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

void check_key(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() || key.find('.', dot + 1) != std::string::npos) {
    throw ValidationError("config key '" + key + "' must have the form section.key");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::load(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
  Config c;
  if (file) {
    try {
      boost::property_tree::ini_parser::read_ini(file->string(), c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ValidationError("cannot read config '" + file->string() + "': " + e.message());
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + o + "' must have the form section.key=value");
    const std::string key = trim(o.substr(0, eq));
    check_key(key);
    c.tree_.put(key, trim(o.substr(eq + 1)));
  }
  return c;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  const std::string value = tree_.get<std::string>(key, fallback);
  effective_.put(key, value);
  return value;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size()) throw ValidationError("'" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) {
  std::ostringstream def;
  def.precision(17);
  for (std::size_t i = 0; i < fallback.size(); ++i) def << (i ? "," : "") << fallback[i];
  const std::string text = get_string(key, def.str());
  try {
    return parse_double_list(text);
  } catch (const ValidationError& e) {
    throw ValidationError("config key '" + key + "': " + e.what());
  }
}

std::vector<long long> Config::get_ints(const std::string& key, const std::vector<long long>& fallback) {
  std::string def;
  for (std::size_t i = 0; i < fallback.size(); ++i) def += (i ? "," : "") + std::to_string(fallback[i]);
  const std::string text = get_string(key, def);
  std::vector<long long> out;
  for (const auto& item : split_list(text)) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size()) throw ValidationError("config key '" + key + "': '" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

bool Config::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

void Config::reject_unknown(const std::vector<std::string>& sections) const {
  std::string unknown;
  for (const auto& [section, keys] : tree_) {
    if (std::find(sections.begin(), sections.end(), section) == sections.end()) continue;
    for (const auto& [name, value] : keys) {
      const std::string key = section + "." + name;
      if (!used_.contains(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    }
  }
  if (!unknown.empty()) throw ValidationError("unknown config keys: " + unknown);
}

void Config::write_effective(const std::filesystem::path& path) const {
  try {
    boost::property_tree::ini_parser::write_ini(path.string(), effective_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DataError("cannot write effective config '" + path.string() + "': " + e.message());
  }
}

}  // namespace nsgvd
