#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypererg/boundary_point.hpp"
#include "hypererg/metric.hpp"

namespace hypererg {

// key = value lines; "[section]" prefixes later keys with "section."; '#' starts a comment.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::string& origin() const { return origin_; }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key, bool fallback) const;
  // Comma separated.
  std::vector<std::string> list(const std::string& key, const std::vector<std::string>& fallback = {}) const;
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback = {}) const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

struct Depths {
  std::size_t boundary_depth = 24;
  std::size_t pair_resolution = 3;
  double R_max = 12.0;
  double T_max = 12.0;
  std::size_t word_bound = 3;
};

struct ExperimentConfig {
  Config raw;
  int rank = 2;
  std::uint64_t seed = 0;
  Depths depths;
  std::map<std::string, double> tolerances;
  std::size_t element_cap = 5'000'000;
  double T_cap = 100000.0;

  // Validates the required fields; a missing seed is an input error naming it.
  static ExperimentConfig from(const Config& raw, std::optional<std::uint64_t> seed_override = std::nullopt);

  Alphabet alphabet() const { return Alphabet(rank); }
  Metric metric() const;
  double tolerance(const std::string& name, double fallback) const;
  BoundaryPoint point(const std::string& key, const std::string& fallback) const;
  Word word(const std::string& key, const std::string& fallback) const;
  std::vector<Word> words(const std::string& key, const std::vector<std::string>& fallback) const;
};

}  // namespace hypererg
