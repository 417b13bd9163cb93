#include "hypererg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hypererg/errors.hpp"

namespace hypererg {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
    return v.substr(1, v.size() - 2);
  return v;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (trim(std::string_view(v).substr(used)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw InputError("config field '" + key + "' is not a number: '" + v + "'");
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto where = origin + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw InputError(where + ": unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError(where + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw InputError(where + ": empty key");
    if (!section.empty()) key = section + "." + key;
    c.values_[key] = unquote(trim(std::string_view(t).substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InputError("config is missing required field '" + key + "'");
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::real(const std::string& key) const { return to_real(key, str(key)); }

double Config::real(const std::string& key, double fallback) const {
  return has(key) ? to_real(key, str(key)) : fallback;
}

long long Config::integer(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const std::string v = str(key);
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw InputError("config field '" + key + "' is not an integer: '" + v + "'");
  return x;
}

std::uint64_t Config::u64(const std::string& key) const {
  const std::string v = str(key);
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw InputError("config field '" + key + "' is not a 64-bit unsigned integer: '" + v + "'");
  return x;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = str(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InputError("config field '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::list(const std::string& key, const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::string> out;
  std::string v = str(key);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::istringstream in(v);
  for (std::string item; std::getline(in, item, ',');) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::reals(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : list(key)) out.push_back(to_real(key, item));
  return out;
}

ExperimentConfig ExperimentConfig::from(const Config& raw, std::optional<std::uint64_t> seed_override) {
  ExperimentConfig c;
  c.raw = raw;
  if (seed_override) {
    c.seed = *seed_override;
    c.raw.set("seed", std::to_string(*seed_override));
  } else {
    c.seed = raw.u64("seed");
  }
  c.rank = static_cast<int>(raw.integer("group.rank", 2));
  if (c.rank < 2) throw InputError("config field 'group.rank' must be at least 2");
  auto positive = [&](const std::string& key, double fallback) {
    const double v = raw.real(key, fallback);
    if (!(v > 0)) throw InputError("config field '" + key + "' must be positive");
    return v;
  };
  auto positive_int = [&](const std::string& key, std::size_t fallback) {
    const long long v = raw.integer(key, static_cast<long long>(fallback));
    if (v <= 0) throw InputError("config field '" + key + "' must be positive");
    return static_cast<std::size_t>(v);
  };
  c.depths.boundary_depth = positive_int("depths.boundary_depth", c.depths.boundary_depth);
  c.depths.pair_resolution = positive_int("depths.pair_resolution", c.depths.pair_resolution);
  c.depths.R_max = positive("depths.R_max", c.depths.R_max);
  c.depths.T_max = positive("depths.T_max", c.depths.T_max);
  c.depths.word_bound = positive_int("depths.word_bound", c.depths.word_bound);
  c.element_cap = positive_int("caps.elements", c.element_cap);
  c.T_cap = positive("caps.T_max", c.T_cap);
  for (const auto& [k, v] : raw.entries())
    if (k.rfind("tolerances.", 0) == 0) c.tolerances[k.substr(11)] = raw.real(k);
  return c;
}

Metric ExperimentConfig::metric() const {
  const std::string kind = raw.str("metric.kind", "word");
  if (kind == "word") return Metric::word(rank);
  if (kind == "weighted") return Metric::weighted(rank, raw.reals("metric.weights"));
  if (kind == "green") return Metric::green(rank, raw.reals("metric.probs"), raw.real("metric.tol", 1e-12));
  if (kind == "altgen") {
    const Alphabet A(rank);
    std::vector<Word> gens;
    for (const auto& s : raw.list("metric.generators")) gens.push_back(A.parse(s));
    return Metric::alt_generators(A, gens, static_cast<int>(raw.integer("metric.table_radius", 6)));
  }
  throw InputError("config field 'metric.kind' must be word, weighted, green or altgen (got '" + kind + "')");
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

BoundaryPoint ExperimentConfig::point(const std::string& key, const std::string& fallback) const {
  return BoundaryPoint::parse(alphabet(), raw.str(key, fallback));
}

Word ExperimentConfig::word(const std::string& key, const std::string& fallback) const {
  return alphabet().parse(raw.str(key, fallback));
}

std::vector<Word> ExperimentConfig::words(const std::string& key, const std::vector<std::string>& fallback) const {
  std::vector<Word> out;
  for (const auto& s : raw.list(key, fallback)) out.push_back(alphabet().parse(s));
  return out;
}

}  // namespace hypererg
