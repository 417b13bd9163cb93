#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hypererg/bms.hpp"
#include "hypererg/boundary.hpp"
#include "hypererg/ergodic.hpp"
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

BMSMeasure normalized(const Metric& m) {
  BMSMeasure b;
  b.ps = ps_cylinder_masses(m, 3);
  return normalize(b, m);
}

std::vector<std::string> formatted(const std::vector<WindowElement>& v) {
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(F2.format(e.g));
  return out;
}

}  // namespace

TEST(Window, ExampleForOppositeAxes) {
  const Metric m = Metric::word(2);
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  const auto elems = enumerate_window_elements(m, ps, ray("(b)"), ray("(a)"), Variant::Tau, {0, 3}, 0, 24);
  EXPECT_EQ(formatted(elems), (std::vector<std::string>{"e", "A", "AA", "AAA"}));
  for (std::size_t i = 0; i < elems.size(); ++i) {
    EXPECT_EQ(elems[i].parameter, static_cast<double>(i));
    EXPECT_EQ(elems[i].product, 0.0);
  }
  const auto half_open = enumerate_window_elements(m, ps, ray("(b)"), ray("(a)"), Variant::Tau, {0, 3, true}, 0, 24);
  EXPECT_EQ(half_open.size(), 3u);
}

TEST(Window, RejectsBadInput) {
  const Metric m = Metric::word(2);
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  EXPECT_THROW(enumerate_window_elements(m, ps, ray("(b)"), ray("(a)"), Variant::Tau, {3, 0}, 0, 24), InputError);
  EXPECT_THROW(enumerate_window_elements(m, ps, ray("(a)"), ray("(a)"), Variant::Tau, {0, 3}, 0, 24), DomainError);
  const Metric alt = Metric::alt_generators(F2, {w("a"), w("A"), w("b"), w("B"), w("ab"), w("BA")}, 3);
  EXPECT_THROW(enumerate_window_elements(alt, ps, ray("(b)"), ray("(a)"), Variant::Tau, {0, 3}, 0, 8), InputError);
  EXPECT_THROW(parse_variant("sideways"), InputError);
}

TEST(Window, MarchingMatchesBruteForce) {
  Gen gen(61);
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const PSMeasure ps = ps_cylinder_masses(m, 3);
    int compared = 0;
    while (compared < 4) {
      const BoundaryPoint x = gen.ray(2, 1), y = gen.ray(2, 1);
      if (x.same_to_depth(y, 24) || common_prefix(x.prefix(4).letters, y.prefix(4).letters) > 1) continue;
      const double K = static_cast<double>(gen.below(2));
      const double T = 2 + static_cast<double>(gen.below(4));
      for (Variant v : all_variants()) {
        const Window win{-1, T};
        const auto fast = enumerate_window_elements(m, ps, x, y, v, win, K, 24);
        const auto slow = enumerate_window_elements_brute(m, ps, x, y, v, win, K, 10.5, 24);
        EXPECT_EQ(formatted(fast), formatted(slow)) << m.describe() << " " << to_string(v);
      }
      ++compared;
    }
  }
}

TEST(ErgodicAverage, CountsOnTheWordMetric) {
  const Metric m = Metric::word(2);
  const BMSMeasure b = normalized(m);
  const auto f0 = PairStepFunction::product_at_most(m, 0);
  const auto f1 = PairStepFunction::product_at_most(m, 1);
  EXPECT_NEAR(f0.integral(b, m), 1.0, 1e-12);
  EXPECT_NEAR(f1.integral(b, m), 3.0, 1e-12);
  for (Variant v : all_variants()) {
    const auto r0 = ergodic_average(m, b, f0, ray("(b)"), ray("(a)"), v, {12}, 24);
    const auto r1 = ergodic_average(m, b, f1, ray("(b)"), ray("(a)"), v, {12}, 24);
    EXPECT_NEAR(r0.values[0], 1.0, 1e-12) << to_string(v);
    EXPECT_NEAR(r1.values[0], 3.0, 1e-12) << to_string(v);
  }
}

TEST(ErgodicAverage, WithinTheBoundaryBandOfTheTarget) {
  Gen gen(62);
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const BMSMeasure b = normalized(m);
    const auto f = PairStepFunction::product_at_most(m, 1);
    const auto kernel = std::make_shared<const MarkovKernel>(b.ps.kernel());
    for (int i = 0; i < 3; ++i) {
      const BoundaryPoint x = sample_ray(kernel, 62, 2 * i), y = sample_ray(kernel, 62, 2 * i + 1);
      if (x.same_to_depth(y, 24)) continue;
      const auto tau = ergodic_average(m, b, f, x, y, Variant::Tau, {4, 8, 12, 16}, 32);
      for (Variant v : all_variants()) {
        const auto r = ergodic_average(m, b, f, x, y, v, {4, 8, 12, 16}, 32);
        const double C = std::max(1.0, r.parameter_gap);
        for (std::size_t k = 0; k < r.T_grid.size(); ++k)
          EXPECT_LE(std::abs(r.values[k] - tau.values[k]), 2 * C / r.T_grid[k] * r.target + 1e-12)
              << m.describe() << " " << to_string(v) << " T=" << r.T_grid[k];
      }
    }
  }
}

TEST(ErgodicAverage, RejectsBadGridsAndCaps) {
  const Metric m = Metric::word(2);
  const BMSMeasure b = normalized(m);
  const auto f = PairStepFunction::product_at_most(m, 0);
  EXPECT_THROW(ergodic_average(m, b, f, ray("(b)"), ray("(a)"), Variant::Tau, {}, 24), InputError);
  EXPECT_THROW(ergodic_average(m, b, f, ray("(b)"), ray("(a)"), Variant::Tau, {8, 4}, 24), InputError);
  EXPECT_THROW(ergodic_average(m, b, f, ray("(b)"), ray("(a)"), Variant::Tau, {-1}, 24), InputError);
  ErgodicOptions opt;
  opt.max_T = 10;
  EXPECT_THROW(ergodic_average(m, b, f, ray("(b)"), ray("(a)"), Variant::Tau, {12}, 24, opt), ResourceError);
}

TEST(StepFunction, FlipSwapsTheArguments) {
  Gen gen(63);
  const Metric m = Metric::weighted(2, {1.0, 1.5});
  const BMSMeasure b = normalized(m);
  PairStepFunction f;
  f.terms = {{w("a"), w("b"), 1.0}, {w("ab"), w("aB"), 2.0}, {w("B"), w("A"), -0.5}};
  const auto g = f.flipped();
  EXPECT_NEAR(g.integral(b, m), f.integral(b, m), 1e-12);
  for (int i = 0; i < 200; ++i) {
    const BoundaryPoint x = gen.ray(2), y = gen.ray(2);
    EXPECT_EQ(g(y, x), f(x, y));
  }
  EXPECT_EQ(f.support_radius(m), 1.0);
}

TEST(ErgodicAverage, FlipMapsTheForwardWindowToTheBackwardOne) {
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const BMSMeasure b = normalized(m);
    PairStepFunction f;
    f.terms = {{w("a"), w("b"), 1.0}, {w("ab"), w("aB"), 2.0}, {w("B"), w("a"), 1.0}};
    const double sup = 2.0;
    const auto kernel = std::make_shared<const MarkovKernel>(b.ps.kernel());
    for (int i = 0; i < 6; ++i) {
      const BoundaryPoint x = sample_ray(kernel, 3, 2 * i), y = sample_ray(kernel, 3, 2 * i + 1);
      if (x.same_to_depth(y, 24)) continue;
      for (double T : {6.0, 12.0}) {
        const double forward = ergodic_average(m, b, f, x, y, Variant::SigmaEta, {T}, 32).values[0];
        const double backward = window_average(m, b.ps, f.flipped(), y, x, Variant::SigmaXi, -T, 0, 32);
        EXPECT_LE(std::abs(forward - backward), 2 / T * sup + 1e-12) << m.describe() << " T=" << T;
      }
    }
  }
}

TEST(Concentration, SpreadIsSmallOnTheWordMetric) {
  const Metric m = Metric::word(2);
  const BMSMeasure b = normalized(m);
  const auto r = concentration_check(m, b, PairStepFunction::product_at_most(m, 0), Variant::Tau, 12, 30, 5, 32);
  ASSERT_EQ(r.values.size(), 30u);
  EXPECT_LE(r.sd, 0.10 * r.mean);
  EXPECT_THROW(concentration_check(m, b, PairStepFunction::product_at_most(m, 0), Variant::Tau, 12, 1, 5, 32),
               InputError);
}

TEST(Kernel, ShapesAndValidation) {
  const auto box = KernelSpec::box(0, 4);
  EXPECT_EQ(box(0), 0.25);
  EXPECT_EQ(box(4), 0.0);
  EXPECT_EQ(box.integral(), 1.0);
  const auto conv = KernelSpec::box_conv_unit(0, 4);
  EXPECT_EQ(conv.hi(), 5.0);
  EXPECT_NEAR(conv(0.5), 0.125, 1e-15);
  EXPECT_NEAR(conv(2.0), 0.25, 1e-15);
  EXPECT_NEAR(conv(4.5), 0.125, 1e-15);
  // Trapezoid rule on a fine grid recovers the unit mass.
  double total = 0;
  for (int i = 0; i < 50000; ++i) total += conv((i + 0.5) * 1e-4) * 1e-4;
  EXPECT_NEAR(total, 1.0, 1e-9);
  const auto steps = KernelSpec::steps({0, 1, 3}, {0.5, 0.25});
  EXPECT_EQ(steps(2), 0.25);
  EXPECT_EQ(steps.integral(), 1.0);
  EXPECT_THROW(KernelSpec::box(1, 1), InputError);
  EXPECT_THROW(KernelSpec::steps({0, 1}, {0.5}), InputError);
  EXPECT_THROW(KernelSpec::steps({0, 1, 2}, {0.5}), InputError);
  EXPECT_THROW(KernelSpec::steps({0, 2, 1}, {0.5, 0.5}), InputError);
}

TEST(Suspension, BoxKernelIsBracketed) {
  Gen gen(64);
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const BMSMeasure b = normalized(m);
    const auto f = PairStepFunction::product_at_most(m, 1);
    for (int i = 0; i < 4; ++i) {
      const BoundaryPoint x = gen.ray(2), y = gen.ray(2);
      if (x.same_to_depth(y, 24)) continue;
      const double T = 6 + 2 * i;
      const auto r = suspension_operators_check(m, b, f, KernelSpec::box(0, T), x, y, T, 32);
      EXPECT_TRUE(r.bracketed) << m.describe() << " " << r.lower << " " << r.smoothed << " " << r.upper;
      EXPECT_EQ(r.q_error, 0.0);
    }
  }
  const Metric m = Metric::word(2);
  EXPECT_THROW(suspension_operators_check(m, normalized(m), PairStepFunction::product_at_most(m, 0),
                                          KernelSpec::box(0, 2), ray("(b)"), ray("(a)"), 2, 24),
               InputError);
}

TEST(Slices, MassesAndSigmaForThreeLayers) {
  const Metric m = Metric::word(2);
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  const auto r = slice_partition(m, ps, ray("(a)"), 3);
  EXPECT_EQ(r.gamma, w("AAA"));
  ASSERT_EQ(r.rows.size(), 4u);
  const double mass[] = {3.0 / 4, 1.0 / 6, 1.0 / 18, 1.0 / 36};
  const double sig[] = {3, 1, -1, -3};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(r.rows[k].k, k);
    EXPECT_NEAR(r.rows[k].mass, mass[k], 1e-15);
    ASSERT_TRUE(r.rows[k].sigma.has_value());
    EXPECT_EQ(*r.rows[k].sigma, sig[k]);
  }
  const auto two = slice_partition(m, ps, ray("(a)"), 2);
  EXPECT_NEAR(two.rows[0].mass, 0.75, 1e-15);
  EXPECT_NEAR(two.rows[1].mass, 1.0 / 6, 1e-15);
  EXPECT_NEAR(two.rows[2].mass, 1.0 / 12, 1e-15);
  EXPECT_THROW(slice_partition(m, ps, ray("(a)"), 1), InputError);
}

TEST(Slices, MassesSumToOne) {
  Gen gen(65);
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const PSMeasure ps = ps_cylinder_masses(m, 3);
    for (int i = 0; i < 20; ++i) {
      const auto r = slice_partition(m, ps, gen.ray(2), 2 + static_cast<int>(gen.below(7)));
      double total = 0;
      for (const auto& row : r.rows) total += row.mass;
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Pushforward, Examples) {
  const Metric m = Metric::word(2);
  const PSMeasure ps = ps_cylinder_masses(m, 3);
  EXPECT_EQ(ray_element(m, ray("(a)"), 3), w("AAA"));
  EXPECT_NEAR(lebesgue_pushforward_probe(m, ps, {w("a")}, ray("(a)"), {3})[0], 35.0 / 36, 1e-15);
  EXPECT_NEAR(lebesgue_pushforward_probe(m, ps, {w("A")}, ray("(a)"), {3})[0], 1.0 / 108, 1e-15);
  EXPECT_NEAR(lebesgue_pushforward_probe(m, ps, {Word{}}, ray("(a)"), {3})[0], 1.0, 1e-15);
  // Pushing a cylinder on the ray out along it fills the boundary monotonically.
  const auto v = lebesgue_pushforward_probe(m, ps, {w("a")}, ray("(a)"), {1, 2, 3, 4, 5, 6, 7, 8});
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]);
}

TEST(Contraction, Example) {
  const Metric m = Metric::word(2);
  const auto r = contraction_check(m, 0, w("AAA"), ray("(a)"), ray("(b)"), ray("(B)"), 24);
  EXPECT_EQ(r.t, 3.0);
  EXPECT_EQ(r.C, 1.0);
  EXPECT_EQ(r.sigma_eta, 3.0);
  EXPECT_EQ(r.sigma_eta_prime, 3.0);
  EXPECT_NEAR(r.visual_dist, std::exp(-3.0), 1e-15);
  EXPECT_TRUE(r.ok);
  EXPECT_THROW(contraction_check(m, 0, Word{}, ray("(a)"), ray("(b)"), ray("(B)"), 24), DomainError);
  EXPECT_THROW(contraction_check(m, 0, w("AAA"), ray("(a)"), ray("a(b)"), ray("(B)"), 24), DomainError);
}

TEST(Contraction, SampledPairsHaveNoViolations) {
  for (const Metric& m : {Metric::word(2), Metric::weighted(2, {1.0, 1.5})}) {
    const auto r = contraction_sample(m, ps_cylinder_masses(m, 3), 1.0, 200, 9, 32);
    EXPECT_EQ(r.admissible, 200u) << m.describe();
    EXPECT_EQ(r.violations, 0u) << m.describe();
  }
}

TEST(Sat, FindsTheShortestTranslate) {
  const PSMeasure ps = ps_cylinder_masses(Metric::word(2), 3);
  const auto r = sat_search(ps, {w("a")}, 0.05, 6);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.g, w("AAA"));
  EXPECT_NEAR(r.mass, 35.0 / 36, 1e-15);
  EXPECT_EQ(sat_search(ps, {w("a")}, 0.3, 6).g, w("A"));
  EXPECT_EQ(sat_search(ps, whole_boundary(2), 0.05, 6).g, Word{});
  EXPECT_FALSE(sat_search(ps, {w("a")}, 0.001, 3).found);
  EXPECT_THROW(sat_search(ps, {w("a")}, 0.0, 3), InputError);
  EXPECT_THROW(sat_search(ps, {}, 0.1, 3), DomainError);
}
