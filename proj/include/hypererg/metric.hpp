#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hypererg/boundary_point.hpp"
#include "hypererg/group.hpp"

namespace hypererg {

enum class MetricKind { Word, Weighted, AltGen, Green };

std::string to_string(MetricKind kind);

struct FirstPassage {
  std::vector<double> F;        // per letter, in (0,1)
  std::vector<double> weights;  // -log F
  int iterations = 0;
};

// Nearest-neighbour walk with per-letter step probabilities p (p(s) = p(s^-1), sum 1).
FirstPassage green_first_passage(const Alphabet& alphabet, const std::vector<double>& letter_probs, double tol,
                                 int max_iterations = 1'000'000);

struct AltGenData {
  std::vector<Word> gens;
  std::size_t max_len = 1;
  int table_radius = 0;
  std::size_t search_cap = 0;
  std::unordered_map<Word, int, WordHash> table;  // exact lengths inside the cached ball
  mutable std::mutex memo_mutex;
  mutable std::unordered_map<Word, int, WordHash> memo;  // lengths found by search
};

// Left-invariant metric on F_k. Word, Weighted and Green are weighted word metrics on the tree.
class Metric {
 public:
  static Metric word(int rank);
  static Metric weighted(int rank, std::vector<double> generator_weights);
  static Metric green(int rank, std::vector<double> generator_probs, double tol = 1e-12);
  static Metric alt_generators(const Alphabet& alphabet, std::vector<Word> gens, int table_radius = 6,
                               std::size_t search_cap = 4'000'000);

  MetricKind kind() const { return kind_; }
  int rank() const { return alphabet_.rank(); }
  const Alphabet& alphabet() const { return alphabet_; }
  bool is_tree() const { return kind_ != MetricKind::AltGen; }

  // Tree metrics only.
  const std::vector<double>& letter_weights() const;
  double letter_weight(Letter x) const { return weights_[x]; }
  double tree_length(std::span<const Letter> w) const;

  // Smallest positive value a word length can step by (1 for AltGen).
  double min_step() const;
  double max_step() const;

  double length(const Word& g) const;  // d(e, g)
  double distance(const Word& g, const Word& h) const;

  const AltGenData& altgen() const;
  const FirstPassage& first_passage() const;
  std::string describe() const;

 private:
  Metric(MetricKind kind, Alphabet alphabet) : kind_(kind), alphabet_(alphabet) {}
  MetricKind kind_;
  Alphabet alphabet_;
  std::vector<double> weights_;
  std::shared_ptr<const AltGenData> alt_;
  std::shared_ptr<const FirstPassage> green_;
};

// Word length with respect to an alternate generating set: cached table, then a search confined to a
// widening tree tube around the tree geodesic.
int altgen_length(const AltGenData& data, const Word& g);

// Breadth-first ball of the Cayley graph for an alternate generating set, radius in steps.
std::unordered_map<Word, int, WordHash> altgen_ball(const AltGenData& data, int radius, std::size_t cap);

double gromov_product(const Metric& metric, const Word& x, const Word& y, const Word& base);

struct HyperbolicityReport {
  double constant_estimate = 0.0;
  double sample_radius = 0.0;
  bool exhaustive = false;
  std::uint64_t tested = 0;  // number of triples evaluated
  std::size_t ball_size = 0;
};

// Four-point defect with base point e over triples from the ball; exhaustive when the triple
// count fits the budget, otherwise seeded random sampling of `samples` triples.
HyperbolicityReport hyperbolicity_constant(const Metric& metric, double radius, std::uint64_t triple_budget = 400'000'000,
                                           std::uint64_t samples = 2'000'000, std::uint64_t seed = 1);

double median_threshold(const HyperbolicityReport& report);  // 2C + 1

using MedianArg = std::variant<Word, BoundaryPoint>;

struct AlmostMedian {
  Word point;
  double D = 0.0;
};

// First candidate in (metric length, shortlex) order whose three pairwise products are below D.
// Candidates: prefixes of the three arguments, thickened by `halo` letters (default 0 on trees, 2 otherwise).
AlmostMedian almost_median(const Metric& metric, const MedianArg& x1, const MedianArg& x2, const MedianArg& x3, double D,
                           std::size_t depth, int halo = -1);

// Vertex at signed arclength t on the geodesic from xi to eta, anchored at the median of (xi, eta, e).
// Floor convention: the last vertex whose parameter is <= t.
Word geodesic_point_pi(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta, double t,
                       std::size_t depth);

// Geodesic data for the tree model: the median prefix and vertices on both sides.
struct TreeGeodesic {
  std::size_t median_len = 0;  // letters shared by xi and eta
  Word median;
};
TreeGeodesic tree_geodesic(const BoundaryPoint& xi, const BoundaryPoint& eta, std::size_t depth);

}  // namespace hypererg
