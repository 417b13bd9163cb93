#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hypererg/boundary.hpp"
#include "hypererg/metric.hpp"
#include "hypererg/patterson_sullivan.hpp"

namespace hypererg {

// (xi, eta, t) with xi the backward and eta the forward endpoint.
struct FlowPoint {
  BoundaryPoint xi;
  BoundaryPoint eta;
  double t = 0.0;
};

FlowPoint flip(const FlowPoint& p);
FlowPoint flow(const FlowPoint& p, double s);

struct BMSMeasure {
  PSMeasure ps;
  double c_F = 2.0;           // density e^{c_F delta <xi,eta>_e}
  double normalization = 1.0;
  std::size_t pair_resolution = 3;

  std::string to_json() const;
  static BMSMeasure from_json(const std::string& text, PSMeasure ps);
};

// <xi,eta>_e for xi in C_u, eta in C_v; nested or equal words are rejected.
double pair_product(const Metric& metric, const Word& u, const Word& v);

// Unnormalized reference mass e^{c_F delta <u,v>} nu(u) nu(v), summed over the pairs of two disjoint unions.
double pair_reference_mass(const Metric& metric, const PSMeasure& ps, double c_F, const std::vector<Word>& U,
                           const std::vector<Word>& V);

double bms_pair_mass(const BMSMeasure& bms, const Metric& metric, const Cylinder& u, const Cylinder& v);

// Largest |log m(gU x gV) - log m(U x V)| over |g| <= max_len and distinct pairs at the given resolution.
double bms_invariance_defect(const Metric& metric, const PSMeasure& ps, double c_F, std::size_t resolution,
                             std::size_t max_len);

struct CoboundReport {
  std::map<std::pair<Word, Word>, double> phi;
  std::vector<double> sup_by_bound;  // M_b = max |c(h, pair)| over |h| <= b, b = 0..word_bound
};

// phi(u,v) = -max_{|h| <= word_bound} c(h,(u,v)), c the logarithmic cocycle of the reference density.
// Throws BoundednessViolation when M_b keeps climbing by more than a quarter of delta * min_step per step.
CoboundReport cobound_phi(const Metric& metric, const PSMeasure& ps, double c_F, std::size_t pair_resolution,
                          std::size_t word_bound);

enum class RhoSource { Sigma, RNRatio };

// Cocycle rho(g, xi) in distance units: sigma(g, xi) on trees, or log(nu(C)/nu(gC)) / delta from cylinders.
double rho(const Metric& metric, const PSMeasure& ps, const Word& g, const BoundaryPoint& xi, std::size_t depth,
           RhoSource source = RhoSource::Sigma);

// (rho(g, eta) - rho(g, xi)) / 2
double tau(const Metric& metric, const PSMeasure& ps, const Word& g, const BoundaryPoint& xi, const BoundaryPoint& eta,
           std::size_t depth, RhoSource source = RhoSource::Sigma);

FlowPoint gamma_act(const Metric& metric, const PSMeasure& ps, const Word& g, const FlowPoint& p, std::size_t depth,
                    RhoSource source = RhoSource::Sigma);

// Domain: first letters of xi and eta differ (median at e) and t in [0, t_span * w(eta_1)).
bool in_fundamental_domain(const Metric& metric, const FlowPoint& p, double t_span = 1.0);

struct FundamentalDomainOptions {
  double t_span = 1.0;
  std::size_t overlap_samples = 256;
  std::uint64_t seed = 1;
  std::size_t depth = 24;
};

struct FundamentalDomainReport {
  double raw_mass = 0.0;
  double scale = 0.0;
  std::size_t samples_checked = 0;
};

FundamentalDomainReport fundamental_domain_mass(const BMSMeasure& bms, const Metric& metric,
                                                const FundamentalDomainOptions& options = {});
// Copy of bms with normalization = 1 / raw mass.
BMSMeasure normalize(const BMSMeasure& bms, const Metric& metric, const FundamentalDomainOptions& options = {});

struct FlowCocycleSample {
  double t = 0.0;
  FlowPoint x;
  Word gamma;
  FlowPoint landed;  // gamma . Phi^t x, back in the domain
};

FlowCocycleSample flow_cocycle(const Metric& metric, const PSMeasure& ps, const FlowPoint& x, double t, std::size_t depth);

struct RotationReport {
  bool all_integral = true;
  double max_fractional_part = 0.0;
  std::size_t samples = 0;
  Word witness_g;
  std::string witness_xi, witness_eta;
  double witness_tau = 0.0;
};

RotationReport rotation_factor_check(const Metric& metric, const PSMeasure& ps, std::size_t samples, std::uint64_t seed,
                                     std::size_t max_word_len = 6, std::size_t depth = 32);

// Ray drawn from the PS kernel; draws with equal (seed, index) coincide.
BoundaryPoint sample_ray(const std::shared_ptr<const MarkovKernel>& kernel, std::uint64_t seed, std::uint64_t index);
// Uniform length in [0, max_len] then uniform letters, from counter-based draws.
Word sample_word(int rank, std::size_t max_len, std::uint64_t seed, std::uint64_t index);

}  // namespace hypererg
