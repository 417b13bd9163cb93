#include <gtest/gtest.h>

#include <cmath>

#include "hypererg/bms.hpp"
#include "hypererg/boundary.hpp"
#include "hypererg/errors.hpp"
#include "hypererg/metric.hpp"
#include "hypererg/patterson_sullivan.hpp"
#include "test_support.hpp"

using namespace hypererg;
using testing_support::Gen;

namespace {

const Alphabet F2(2);

Word w(const char* s) { return F2.parse(s); }
BoundaryPoint ray(const char* s) { return BoundaryPoint::parse(F2, s); }

BMSMeasure bms_for(const Metric& m, double c_F = 2.0) {
  BMSMeasure b;
  b.ps = ps_cylinder_masses(m, 3);
  b.c_F = c_F;
  return b;
}

// Random point of the fundamental domain: distinct first letters, t in [0, w(eta_1)).
FlowPoint domain_point(Gen& gen, const Metric& m) {
  for (;;) {
    FlowPoint p{gen.ray(2), gen.ray(2), 0.0};
    if (p.xi.prefix(1) == p.eta.prefix(1)) continue;
    p.t = gen.unit() * m.letter_weight(p.eta.prefix(1)[0]);
    return p;
  }
}

void expect_same_point(const FlowPoint& a, const FlowPoint& b) {
  EXPECT_TRUE(a.xi.same_to_depth(b.xi, 24));
  EXPECT_TRUE(a.eta.same_to_depth(b.eta, 24));
  EXPECT_NEAR(a.t, b.t, 1e-9);
}

}  // namespace

TEST(PairMass, WordExamples) {
  const Metric m = Metric::word(2);
  BMSMeasure b = bms_for(m);
  b.normalization = 4.0 / 3.0;
  EXPECT_NEAR(bms_pair_mass(b, m, Cylinder(w("a")), Cylinder(w("b"))), b.normalization / 16, 1e-15);
  // Product 1 doubles the exponent: 9 * (1/12)^2.
  EXPECT_NEAR(bms_pair_mass(b, m, Cylinder(w("aa")), Cylinder(w("ab"))), b.normalization * 9.0 / 144.0, 1e-15);
  EXPECT_EQ(pair_product(m, w("aab"), w("aaB")), 2.0);
}

TEST(PairMass, DiagonalIsADomainError) {
  const Metric m = Metric::word(2);
  EXPECT_THROW(pair_product(m, w("a"), w("ab")), DomainError);
  EXPECT_THROW(pair_product(m, w("ab"), w("ab")), DomainError);
}

TEST(PairMass, SymmetricInThePair) {
  const Metric m = Metric::weighted(2, {1.0, 1.5});
  const BMSMeasure b = bms_for(m);
  for (const Word& u : words_of_length(2, 2))
    for (const Word& v : words_of_length(2, 2))
      if (u != v)
        EXPECT_DOUBLE_EQ(bms_pair_mass(b, m, Cylinder(u), Cylinder(v)), bms_pair_mass(b, m, Cylinder(v), Cylinder(u)));
}

TEST(Invariance, ExactWhenTheExponentIsDoubled) {
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const PSMeasure ps = ps_cylinder_masses(m, 3);
    EXPECT_LE(bms_invariance_defect(m, ps, 2.0, 3, 3), 1e-12) << m.describe();
  }
}

TEST(Invariance, SingleExponentIsNotInvariant) {
  const Metric m = Metric::word(2);
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  EXPECT_GT(bms_invariance_defect(m, ps, 1.0, 3, 2), 0.5);
}

TEST(Cobound, BoundedForTheInvariantDensity) {
  const Metric m = Metric::word(2);
  const auto r = cobound_phi(m, ps_cylinder_masses(m, 3), 2.0, 2, 3);
  ASSERT_EQ(r.sup_by_bound.size(), 4u);
  for (double s : r.sup_by_bound) EXPECT_LE(s, 1e-12);
  for (const auto& [pair, phi] : r.phi) EXPECT_LE(std::abs(phi), 1e-12);
}

TEST(Cobound, SingleExponentRaisesBoundednessViolation) {
  const Metric m = Metric::word(2);
  EXPECT_THROW(cobound_phi(m, ps_cylinder_masses(m, 3), 1.0, 2, 3), BoundednessViolation);
}

TEST(Tau, Examples) {
  const Metric m = Metric::word(2);
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  EXPECT_EQ(tau(m, ps, w("A"), ray("(b)"), ray("(a)"), 24), -1.0);
  EXPECT_EQ(tau(m, ps, w("AAA"), ray("(b)"), ray("(a)"), 24), -3.0);
  EXPECT_EQ(tau(m, ps, w("B"), ray("(b)"), ray("(a)"), 24), 1.0);
  EXPECT_EQ(tau(m, ps, Word{}, ray("(b)"), ray("(a)"), 24), 0.0);
  EXPECT_THROW(tau(m, ps, w("a"), ray("(a)"), ray("(a)"), 24), DomainError);
}

TEST(Tau, AntisymmetricAndACocycle) {
  Gen gen(51);
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const PSMeasure ps = ps_cylinder_masses(m, 3);
    for (int i = 0; i < 300; ++i) {
      const BoundaryPoint x = gen.ray(2), y = gen.ray(2);
      if (x.same_to_depth(y, 24)) continue;
      const Word g = gen.reduced_upto(2, 4), h = gen.reduced_upto(2, 4);
      EXPECT_NEAR(tau(m, ps, g, x, y, 24), -tau(m, ps, g, y, x, 24), 1e-12);
      const double whole = tau(m, ps, mul(g, h), x, y, 32);
      const double parts = tau(m, ps, g, x.translated(h), y.translated(h), 32) + tau(m, ps, h, x, y, 32);
      EXPECT_NEAR(whole, parts, 1e-12);
    }
  }
}

TEST(Tau, RadonNikodymSourceAgreesWithSigma) {
  Gen gen(52);
  const Metric m = Metric::weighted(2, {1.0, 1.5});
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  for (int i = 0; i < 200; ++i) {
    const BoundaryPoint x = gen.ray(2), y = gen.ray(2);
    if (x.same_to_depth(y, 24)) continue;
    const Word g = gen.reduced_upto(2, 4);
    EXPECT_NEAR(tau(m, ps, g, x, y, 24, RhoSource::RNRatio), tau(m, ps, g, x, y, 24), 1e-9);
  }
}

TEST(GammaAction, IsAnActionCommutingWithFlowAndFlip) {
  Gen gen(53);
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const PSMeasure ps = ps_cylinder_masses(m, 3);
    for (int i = 0; i < 200; ++i) {
      const FlowPoint p = domain_point(gen, m);
      const Word g = gen.reduced_upto(2, 4), h = gen.reduced_upto(2, 4);
      const double s = 4 * gen.unit() - 2;
      expect_same_point(gamma_act(m, ps, g, gamma_act(m, ps, h, p, 32), 32), gamma_act(m, ps, mul(g, h), p, 32));
      expect_same_point(gamma_act(m, ps, g, flow(p, s), 32), flow(gamma_act(m, ps, g, p, 32), s));
      expect_same_point(gamma_act(m, ps, g, flip(p), 32), flip(gamma_act(m, ps, g, p, 32)));
    }
  }
}

TEST(FundamentalDomain, WordMassAndScale) {
  const Metric m = Metric::word(2);
  const auto r = fundamental_domain_mass(bms_for(m), m);
  EXPECT_NEAR(r.raw_mass, 0.75, 1e-15);
  EXPECT_NEAR(r.scale, 4.0 / 3.0, 1e-14);
  EXPECT_EQ(r.samples_checked, 256u);
  FundamentalDomainOptions wide;
  wide.t_span = 2.0;
  wide.overlap_samples = 0;
  EXPECT_NEAR(fundamental_domain_mass(bms_for(m), m, wide).raw_mass, 1.5, 1e-15);
}

TEST(FundamentalDomain, TranslatesOverlapWhenTheSpanIsTooLong) {
  const Metric m = Metric::word(2);
  FundamentalDomainOptions wide;
  wide.t_span = 2.0;
  wide.overlap_samples = 64;
  EXPECT_THROW(fundamental_domain_mass(bms_for(m), m, wide), FundamentalDomainViolation);
}

TEST(FundamentalDomain, NormalizeSetsTheScale) {
  const Metric m = Metric::weighted(2, {1.0, 1.5});
  const BMSMeasure b = normalize(bms_for(m), m);
  double raw = 0;
  for (Letter x = 0; x < 4; ++x)
    for (Letter y = 0; y < 4; ++y)
      if (x != y) raw += b.ps.mass(Word{x}) * b.ps.mass(Word{y}) * m.letter_weight(y);
  EXPECT_NEAR(b.normalization * raw, 1.0, 1e-12);
}

TEST(FlowCocycle, Example) {
  const Metric m = Metric::word(2);
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  const auto s = flow_cocycle(m, ps, FlowPoint{ray("(b)"), ray("(a)"), 0.0}, 3.0, 32);
  EXPECT_EQ(s.gamma, w("AAA"));
  EXPECT_NEAR(s.landed.t, 0.0, 1e-12);
  EXPECT_TRUE(in_fundamental_domain(m, s.landed));
  EXPECT_THROW(flow_cocycle(m, ps, FlowPoint{ray("(a)"), ray("a(b)"), 0.0}, 1.0, 32), DomainError);
}

TEST(FlowCocycle, ChainLaw) {
  Gen gen(54);
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const PSMeasure ps = ps_cylinder_masses(m, 3);
    for (int i = 0; i < 200; ++i) {
      const FlowPoint x = domain_point(gen, m);
      const double s = 6 * gen.unit() - 3, t = 6 * gen.unit() - 3;
      const auto first = flow_cocycle(m, ps, x, s, 48);
      const auto second = flow_cocycle(m, ps, first.landed, t, 48);
      EXPECT_EQ(flow_cocycle(m, ps, x, s + t, 48).gamma, mul(second.gamma, first.gamma)) << m.describe();
    }
  }
}

TEST(Rotation, IntegralForWordMetricOnly) {
  const Metric word = Metric::word(2);
  const auto r = rotation_factor_check(word, ps_cylinder_masses(word, 3), 2000, 7);
  EXPECT_TRUE(r.all_integral);
  EXPECT_EQ(r.samples, 2000u);
  const Metric weighted = Metric::weighted(2, {1.0, 1.5});
  const auto q = rotation_factor_check(weighted, ps_cylinder_masses(weighted, 3), 2000, 7);
  EXPECT_FALSE(q.all_integral);
  EXPECT_GT(q.max_fractional_part, 0.1);
  EXPECT_NEAR(std::abs(q.witness_tau - std::round(q.witness_tau)), q.max_fractional_part, 1e-12);
}

TEST(BMSJson, RoundTrip) {
  const Metric m = Metric::word(2);
  const BMSMeasure b = normalize(bms_for(m), m);
  const BMSMeasure back = BMSMeasure::from_json(b.to_json(), b.ps);
  EXPECT_EQ(back.c_F, b.c_F);
  EXPECT_EQ(back.normalization, b.normalization);
  EXPECT_EQ(back.pair_resolution, b.pair_resolution);
  EXPECT_EQ(back.to_json(), b.to_json());
  EXPECT_THROW(BMSMeasure::from_json("[1]", b.ps), InputError);
}
