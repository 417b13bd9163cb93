#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "hypererg/group.hpp"
#include "hypererg/metric.hpp"

namespace hypererg {

inline constexpr std::size_t kDefaultElementCap = 5'000'000;
inline constexpr double kLengthTol = 1e-9;

struct BallEntry {
  Word g;
  double length = 0.0;
};

struct BallIndex {
  double radius = 0.0;
  std::vector<BallEntry> elements;                          // sorted by (length, shortlex)
  std::vector<std::pair<double, std::size_t>> sphere_counts;  // distinct lengths with multiplicities

  bool contains(const Word& g) const;
};

// All g with d(e, g) <= R (tolerance kLengthTol).
BallIndex enumerate_ball(const Metric& metric, double R, std::size_t cap = kDefaultElementCap);

// Sorted lengths of all ball elements, without materializing the words (tree metrics walk the tree).
std::vector<double> ball_lengths(const Metric& metric, double R, std::size_t cap = kDefaultElementCap);

// Depth-first visit of the tree ball; visitor sees (word, length). Tree metrics only.
void for_each_tree_ball(const Metric& metric, double R, std::size_t cap,
                        const std::function<void(const Word&, double)>& visit);

}  // namespace hypererg
