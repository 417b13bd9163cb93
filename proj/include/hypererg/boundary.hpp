#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hypererg/boundary_point.hpp"
#include "hypererg/metric.hpp"

namespace hypererg {

inline constexpr double kInfiniteProduct = std::numeric_limits<double>::infinity();

// The boundary ball of rays extending a nonempty reduced word.
struct Cylinder {
  Word word;

  Cylinder() = default;
  explicit Cylinder(Word w);
  bool contains(const BoundaryPoint& p) const { return has_prefix(p.prefix(word.size()), word); }
};

// Disjoint cylinders whose union is g . C_u (or g . (whole boundary) when u is empty).
std::vector<Word> image_cylinders(const Word& g, const Word& u, int rank);
std::vector<Word> image_cylinders(const Word& g, const std::vector<Word>& set, int rank);
// All length-1 cylinders.
std::vector<Word> whole_boundary(int rank);

// Tree metrics return the exact limit (weighted common prefix of base^-1 xi and base^-1 eta);
// otherwise the minimum over prefix pairs in the tail window [depth/2, depth]. +inf when the
// points agree to depth.
double boundary_gromov_product(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta,
                               const Word& base, std::size_t depth);
// Window definition for every metric; used to cross-check the tree shortcut.
double boundary_gromov_product_window(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta,
                                      const Word& base, std::size_t depth);

// alpha^<xi,eta>_e with the word-metric product; 0 when coincident to depth.
double visual_distance(const BoundaryPoint& xi, const BoundaryPoint& eta, double alpha, std::size_t depth);
// Same with the product of the given metric.
double visual_distance(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta, double alpha,
                       std::size_t depth);

enum class BusemannMode { Upper, Lower };

struct BusemannValue {
  double value = 0.0;
  bool stable = true;  // window extremum at depth equals the one at depth - 1
};

BusemannValue busemann(const Metric& metric, const Word& x, const Word& y, const BoundaryPoint& zeta,
                       std::size_t depth, BusemannMode mode = BusemannMode::Upper);

struct SigmaEstimate {
  double value = 0.0;
  std::size_t stabilized_at = 0;  // first index from which d(g^-1, z_n) - d(e, z_n) stays constant
  double defect_bound = 0.0;      // spread of the tail window
};

// Upper Busemann value beta(g^-1, e; xi). Tree metrics use the closed form
// |g| - 2 |common prefix of g^-1 and xi| (weighted).
SigmaEstimate sigma(const Metric& metric, const Word& g, const BoundaryPoint& xi, std::size_t depth);
SigmaEstimate sigma_window(const Metric& metric, const Word& g, const BoundaryPoint& xi, std::size_t depth);

double cocycle_defect(const Metric& metric, const Word& g, const Word& h, const BoundaryPoint& xi, std::size_t depth);

}  // namespace hypererg
