#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypererg/bms.hpp"

namespace hypererg {

enum class Variant { Tau, SigmaXi, SigmaEta, HalfDifference };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
const std::vector<Variant>& all_variants();

// Flow-time parameter of g for the pair (xi, eta): -tau, sigma(g,xi), -sigma(g,eta), (sigma(g,xi) - sigma(g,eta))/2.
double variant_parameter(const Metric& metric, const PSMeasure& ps, Variant v, const Word& g, const BoundaryPoint& xi,
                         const BoundaryPoint& eta, std::size_t depth);

struct Window {
  double a = 0.0;
  double b = 0.0;
  bool half_open = false;  // [a, b) instead of [a, b]

  bool contains(double p) const;
};

struct WindowElement {
  Word g;
  double parameter = 0.0;
  double product = 0.0;  // <g xi, g eta>_e
};

// All g whose parameter lies in the window and whose translated pair has product <= support_radius.
// Candidates come from balls around the geodesic vertices; tree metrics only.
std::vector<WindowElement> enumerate_window_elements(const Metric& metric, const PSMeasure& ps, const BoundaryPoint& xi,
                                                     const BoundaryPoint& eta, Variant variant, const Window& window,
                                                     double support_radius, std::size_t depth,
                                                     std::size_t cap = 5'000'000);

// Brute-force reference: scans the ball of the given radius.
std::vector<WindowElement> enumerate_window_elements_brute(const Metric& metric, const PSMeasure& ps,
                                                           const BoundaryPoint& xi, const BoundaryPoint& eta,
                                                           Variant variant, const Window& window, double support_radius,
                                                           double ball_radius, std::size_t depth);

// Finite combination of indicators of cylinder pairs C_u x C_v (u, v not nested).
struct PairStepFunction {
  struct Term {
    Word u, v;
    double coef = 1.0;
  };
  std::vector<Term> terms;
  std::string name = "custom";

  double operator()(const BoundaryPoint& xi, const BoundaryPoint& eta) const;
  std::size_t depth() const;
  double support_radius(const Metric& metric) const;  // largest product on the support
  double integral(const BMSMeasure& bms, const Metric& metric) const;

  // 1 on pairs with <xi,eta>_e <= K (K = 0: first letters differ).
  static PairStepFunction product_at_most(const Metric& metric, double K);
  PairStepFunction flipped() const;
};

struct ErgodicAverageReport {
  Variant variant = Variant::Tau;
  std::vector<double> T_grid;
  std::vector<double> values;
  double target = 0.0;
  std::string f_descriptor;
  double parameter_gap = 0.0;  // max |parameter - tau parameter| over the contributing elements
};

struct ErgodicOptions {
  double max_T = 100000.0;
  std::size_t cap = 5'000'000;
};

// I_0^T f = (1/T) sum over g with parameter in [0, T) of f(g xi, g eta).
ErgodicAverageReport ergodic_average(const Metric& metric, const BMSMeasure& bms, const PairStepFunction& f,
                                     const BoundaryPoint& xi, const BoundaryPoint& eta, Variant variant,
                                     const std::vector<double>& T_grid, std::size_t depth, const ErgodicOptions& opt = {});

// I_a^b f = (1/(b-a)) sum over parameter in [a, b).
double window_average(const Metric& metric, const PSMeasure& ps, const PairStepFunction& f, const BoundaryPoint& xi,
                      const BoundaryPoint& eta, Variant variant, double a, double b, std::size_t depth);

struct ConcentrationReport {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;
};

// I_0^T f over seeded PS-typical pairs.
ConcentrationReport concentration_check(const Metric& metric, const BMSMeasure& bms, const PairStepFunction& f,
                                        Variant variant, double T, std::size_t pairs, std::uint64_t seed,
                                        std::size_t depth);

class KernelSpec {
 public:
  enum class Shape { Box, BoxConvUnit, Steps };

  static KernelSpec box(double a, double b);
  static KernelSpec box_conv_unit(double a, double b);  // (1/(b-a)) 1_[a,b] * 1_[0,1]
  // Piecewise constant: heights[i] on [breaks[i], breaks[i+1]).
  static KernelSpec steps(std::vector<double> breaks, std::vector<double> heights);

  Shape shape() const { return shape_; }
  double lo() const;
  double hi() const;
  double operator()(double t) const;
  double integral() const;

 private:
  Shape shape_ = Shape::Box;
  double a_ = 0, b_ = 1;
  std::vector<double> breaks_, heights_;
};

struct SuspensionReport {
  double q_error = 0.0;  // |Q(f x theta) - f| at the sample
  double smoothed = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double C = 1.0;
  bool bracketed = false;
};

// Smoothed sum over g of theta_0^T(parameter) f(g xi, g eta) against the averages I_C^{T-C}, I_{-C}^{T+C}.
SuspensionReport suspension_operators_check(const Metric& metric, const BMSMeasure& bms, const PairStepFunction& f,
                                            const KernelSpec& theta, const BoundaryPoint& xi, const BoundaryPoint& eta,
                                            double T, std::size_t depth);

struct SliceRow {
  int k = 0;  // 0 = B^-, n = B_n^+
  double mass = 0.0;
  std::optional<double> sigma;  // sigma(gamma_n, representative); empty slice has none
};

struct SlicePartitionReport {
  int n = 0;
  Word gamma;
  std::vector<SliceRow> rows;
};

// Partition of the boundary by floor(<x_plus, zeta>_e), capped at n.
SlicePartitionReport slice_partition(const Metric& metric, const PSMeasure& ps, const BoundaryPoint& x_plus, int n);

// Vertex of the ray to x_plus at the last arclength <= n, inverted.
Word ray_element(const Metric& metric, const BoundaryPoint& x_plus, double n);

// nu(gamma_n E) for each n; E given as a disjoint union of cylinders (an empty word means the whole boundary).
std::vector<double> lebesgue_pushforward_probe(const Metric& metric, const PSMeasure& ps, const std::vector<Word>& E,
                                               const BoundaryPoint& x_plus, const std::vector<int>& n_values);

struct ContractionRecord {
  double t = 0.0;
  double sigma_eta = 0.0;
  double sigma_eta_prime = 0.0;
  double visual_dist = 0.0;
  double bound = 0.0;
  double C = 0.0;
  bool ok = false;
};

ContractionRecord contraction_check(const Metric& metric, double K, const Word& g, const BoundaryPoint& xi,
                                    const BoundaryPoint& eta, const BoundaryPoint& eta_prime, std::size_t depth,
                                    double alpha = 0.36787944117144233);

struct ContractionSampleReport {
  std::size_t admissible = 0;
  std::size_t violations = 0;
  std::size_t attempts = 0;
  double C = 0.0;
};

ContractionSampleReport contraction_sample(const Metric& metric, const PSMeasure& ps, double K, std::size_t count,
                                           std::uint64_t seed, std::size_t depth, double alpha = 0.36787944117144233,
                                           std::size_t max_shift = 8);

struct SatResult {
  bool found = false;
  Word g;
  double mass = 0.0;
  std::size_t scanned = 0;
};

// First g = w^-1, w in (length, shortlex) order, with |g| <= candidate_bound and nu(gA) > 1 - epsilon.
SatResult sat_search(const PSMeasure& ps, const std::vector<Word>& A, double epsilon, std::size_t candidate_bound);

}  // namespace hypererg
