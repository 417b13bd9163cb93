#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypererg/ball.hpp"
#include "hypererg/boundary.hpp"
#include "hypererg/metric.hpp"

namespace hypererg {

struct GrowthEstimate {
  double delta = 0.0;
  double band = 0.0;  // |slope(first half) - slope(second half)|
  double first_half_slope = 0.0;
  double second_half_slope = 0.0;
  double R_max = 0.0;
  std::size_t ball_size = 0;
  std::vector<std::pair<double, double>> points;  // (R, log #Ball(R))
};

// Least-squares slope of log #Ball(R) over R in [R_max/2, R_max] on a grid of step min_step/2.
GrowthEstimate growth_exponent(const Metric& metric, double R_max, std::size_t cap = kDefaultElementCap);

// Spectral radius of the non-backtracking transfer matrix M_s[x][y] = e^{-s w(y)} (y != x^-1).
double transfer_spectral_radius(const Metric& metric, double s);
// The s where that radius equals 1 (tree metrics).
double perron_exponent(const Metric& metric);

// Markov measure on the boundary whose cylinder masses are c e^{-delta W(w)} h(last letter).
struct MarkovModel {
  double delta = 0.0;
  std::vector<double> h;        // right Perron vector at delta
  std::vector<double> initial;  // nu(C_x)
  std::vector<std::vector<double>> P;

  static MarkovModel of(const Metric& metric);
  double cylinder_mass(const Word& w) const;
  MarkovKernel kernel(int rank) const;
};

// Normalized atoms e^{-s d(e,g)} on Ball(R).
struct MuS {
  double s = 0.0;
  double R = 0.0;
  std::vector<BallEntry> atoms;
  std::vector<double> weights;

  double total() const;
  // Mass of {g : g has prefix w, |g| >= min_letters} relative to {g : |g| >= min_letters}.
  double prefix_mass(const Word& w, std::size_t min_letters = 0) const;
};

MuS mu_s(const Metric& metric, double s, double R, double delta_hat, std::size_t cap = kDefaultElementCap);

enum class PSMethod { ExactMarkov, WeakStar };

struct PSOptions {
  PSMethod method = PSMethod::ExactMarkov;
  std::vector<double> s_offsets{0.2, 0.1, 0.05};
  double R = 12.0;
  double delta_hat = -1.0;         // negative: Perron root on trees, growth estimate otherwise
  double consistency_tol = 0.02;   // relative, weak-* against the Markov masses (tree metrics)
  std::size_t cap = kDefaultElementCap;
};

// Conditioned weak-* masses {prefix w, |g| >= n} / {|g| >= n} at a single s, all words of length n.
std::map<Word, double> weakstar_masses(const Metric& metric, std::size_t n, double s, double R,
                                       std::size_t cap = kDefaultElementCap);

class PSMeasure {
 public:
  PSMeasure() = default;
  PSMeasure(int rank, double delta, std::size_t resolution, std::map<Word, double> masses, std::string provenance);

  int rank() const { return rank_; }
  double delta() const { return delta_; }
  std::size_t resolution() const { return resolution_; }
  const std::map<Word, double>& masses() const { return masses_; }
  const std::string& provenance() const { return provenance_; }

  // nu(C_w); deeper than the resolution the masses continue with the two-letter conditional kernel.
  double mass(const Word& w) const;
  double mass(const std::vector<Word>& disjoint) const;
  // First-letter masses and two-letter conditionals, for drawing nu-typical rays.
  MarkovKernel kernel() const;

  std::string to_json(const Alphabet& alphabet) const;
  static PSMeasure from_json(const std::string& text);

 private:
  int rank_ = 2;
  double delta_ = 0.0;
  std::size_t resolution_ = 0;
  std::map<Word, double> masses_;
  std::string provenance_;
  std::unordered_map<Word, double, WordHash> levels_;
  std::vector<std::vector<double>> continuation_;
};

PSMeasure ps_cylinder_masses(const Metric& metric, std::size_t resolution, const PSOptions& options = {});

// All reduced words of length n in shortlex order.
std::vector<Word> words_of_length(int rank, std::size_t n);

struct RNRecord {
  double ratio = 0.0;
  double predicted = 0.0;
  double log_gap = 0.0;
  double sigma = 0.0;
};

enum class RNOrientation {
  Image,     // nu(C) / nu(gC) against e^{delta sigma(g, xi)}, xi in C
  Preimage,  // nu(g^-1 C) / nu(C); rejected by the tree oracle
};

RNRecord rn_derivative_check(const PSMeasure& ps, const Metric& metric, const Word& g, const Cylinder& cyl,
                             RNOrientation orientation = RNOrientation::Image);

struct AhlforsRow {
  int t = 0;
  double mass = 0.0;
  double reference = 0.0;  // e^{-delta t}
  double log_gap = 0.0;
};

std::vector<AhlforsRow> ahlfors_check(const PSMeasure& ps, const BoundaryPoint& xi, const std::vector<int>& t_values);

// Finite linear combination of cylinder indicators on the boundary.
struct CylinderFunction {
  std::vector<std::pair<Word, double>> terms;

  double at_prefix(const Word& long_prefix) const;  // long_prefix at least as deep as every term
  std::size_t depth() const;
};

std::vector<double> lebesgue_differentiation_probe(const PSMeasure& ps, const CylinderFunction& f, const BoundaryPoint& xi,
                                                   const std::vector<int>& n_values);

}  // namespace hypererg
