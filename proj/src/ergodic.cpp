#include "hypererg/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hypererg/ball.hpp"
#include "hypererg/errors.hpp"
#include "hypererg/parallel.hpp"

namespace hypererg {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Tau: return "tau";
    case Variant::SigmaXi: return "sigma_xi";
    case Variant::SigmaEta: return "sigma_eta";
    case Variant::HalfDifference: return "half_difference";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : all_variants())
    if (to_string(v) == name) return v;
  throw InputError("unknown variant '" + name + "' (tau, sigma_xi, sigma_eta, half_difference)");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{Variant::Tau, Variant::SigmaXi, Variant::SigmaEta, Variant::HalfDifference};
  return v;
}

double variant_parameter(const Metric& metric, const PSMeasure& ps, Variant v, const Word& g, const BoundaryPoint& xi,
                         const BoundaryPoint& eta, std::size_t depth) {
  switch (v) {
    case Variant::Tau: return -tau(metric, ps, g, xi, eta, depth);
    case Variant::SigmaXi: return sigma(metric, g, xi, depth).value;
    case Variant::SigmaEta: return -sigma(metric, g, eta, depth).value;
    case Variant::HalfDifference:
      return 0.5 * (sigma(metric, g, xi, depth).value - sigma(metric, g, eta, depth).value);
  }
  return 0;
}

bool Window::contains(double p) const {
  if (p < a - kLengthTol) return false;
  return half_open ? p < b - kLengthTol : p <= b + kLengthTol;
}

namespace {

void check_window(const Window& w) {
  if (!std::isfinite(w.a) || !std::isfinite(w.b) || w.a > w.b)
    throw InputError("malformed window [" + std::to_string(w.a) + ", " + std::to_string(w.b) + "]");
}

void require_tree(const Metric& metric, const char* what) {
  if (!metric.is_tree()) throw InputError(std::string(what) + " is implemented for tree metrics only");
}

bool admit(const Metric& metric, const PSMeasure& ps, const Word& g, const BoundaryPoint& xi, const BoundaryPoint& eta,
           Variant variant, const Window& window, double K, std::size_t depth, WindowElement& out) {
  const std::size_t d = depth + g.size();
  const double prod = boundary_gromov_product(metric, xi.translated(g), eta.translated(g), Word{}, d);
  if (prod > K + kLengthTol) return false;
  const double p = variant_parameter(metric, ps, variant, g, xi, eta, d);
  if (!window.contains(p)) return false;
  out = {g, p, prod};
  return true;
}

void sort_elements(std::vector<WindowElement>& v) {
  std::sort(v.begin(), v.end(), [](const WindowElement& x, const WindowElement& y) {
    if (std::abs(x.parameter - y.parameter) > kLengthTol) return x.parameter < y.parameter;
    return x.g < y.g;
  });
}

// Geodesic vertices with parameter in [lo, hi], parameter measured from the median of (xi, eta, e).
std::vector<Word> geodesic_vertices(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta, double lo,
                                    double hi, std::size_t depth, std::size_t cap) {
  const TreeGeodesic geo = tree_geodesic(xi, eta, depth);
  std::vector<Word> out;
  auto walk = [&](const BoundaryPoint& ray, double sign) {
    std::size_t want = geo.median_len + 16;
    Word r = ray.prefix(want);
    double p = 0;
    for (std::size_t j = geo.median_len;; ++j) {
      if (j > geo.median_len) p += sign * metric.letter_weight(r[j - 1]);
      if (sign > 0 ? p > hi + kLengthTol : p < lo - kLengthTol) break;
      if ((sign > 0 || j > geo.median_len) && p >= lo - kLengthTol && p <= hi + kLengthTol) out.push_back(truncate(r, j));
      if (out.size() > cap) throw ResourceError("window enumeration exceeds the element cap of " + std::to_string(cap));
      if (j + 1 > r.size()) r = ray.prefix(want *= 2);
    }
  };
  walk(eta, 1.0);
  walk(xi, -1.0);
  return out;
}

}  // namespace

std::vector<WindowElement> enumerate_window_elements(const Metric& metric, const PSMeasure& ps, const BoundaryPoint& xi,
                                                     const BoundaryPoint& eta, Variant variant, const Window& window,
                                                     double support_radius, std::size_t depth, std::size_t cap) {
  require_tree(metric, "window enumeration");
  check_window(window);
  if (!(support_radius >= 0)) throw InputError("support radius must be nonnegative");
  if (xi.same_to_depth(eta, depth)) throw DomainError("endpoints coincide to depth " + std::to_string(depth));
  // Parameters of the sigma variants differ from -tau by at most the distance to the geodesic plus
  // the median offset; widen the vertex range by that much.
  const double median_len = metric.tree_length(tree_geodesic(xi, eta, depth).median.letters);
  const double margin = support_radius + median_len + metric.max_step();
  const auto verts = geodesic_vertices(metric, xi, eta, window.a - margin, window.b + margin, depth, cap);
  std::vector<Word> halo;
  for_each_tree_ball(metric, support_radius, cap, [&](const Word& w, double) { halo.push_back(w); });
  std::set<Word> seen;
  std::vector<WindowElement> out;
  for (const Word& v : verts)
    for (const Word& y : halo) {
      Word g = inverse(mul(v, y));
      if (!seen.insert(g).second) continue;
      if (seen.size() > cap) throw ResourceError("window enumeration exceeds the element cap of " + std::to_string(cap));
      WindowElement e;
      if (admit(metric, ps, g, xi, eta, variant, window, support_radius, depth, e)) out.push_back(std::move(e));
    }
  sort_elements(out);
  return out;
}

std::vector<WindowElement> enumerate_window_elements_brute(const Metric& metric, const PSMeasure& ps,
                                                           const BoundaryPoint& xi, const BoundaryPoint& eta,
                                                           Variant variant, const Window& window, double support_radius,
                                                           double ball_radius, std::size_t depth) {
  check_window(window);
  std::vector<WindowElement> out;
  for (const auto& b : enumerate_ball(metric, ball_radius).elements) {
    WindowElement e;
    if (admit(metric, ps, b.g, xi, eta, variant, window, support_radius, depth, e)) out.push_back(std::move(e));
  }
  sort_elements(out);
  return out;
}

double PairStepFunction::operator()(const BoundaryPoint& xi, const BoundaryPoint& eta) const {
  const std::size_t d = depth();
  const Word p = xi.prefix(d), q = eta.prefix(d);
  double v = 0;
  for (const Term& t : terms)
    if (has_prefix(p, t.u) && has_prefix(q, t.v)) v += t.coef;
  return v;
}

std::size_t PairStepFunction::depth() const {
  std::size_t d = 0;
  for (const Term& t : terms) d = std::max({d, t.u.size(), t.v.size()});
  return d;
}

double PairStepFunction::support_radius(const Metric& metric) const {
  double r = 0;
  for (const Term& t : terms)
    if (t.coef != 0) r = std::max(r, pair_product(metric, t.u, t.v));
  return r;
}

double PairStepFunction::integral(const BMSMeasure& bms, const Metric& metric) const {
  double s = 0;
  for (const Term& t : terms) s += t.coef * pair_reference_mass(metric, bms.ps, bms.c_F, {t.u}, {t.v});
  return bms.normalization * s;
}

PairStepFunction PairStepFunction::product_at_most(const Metric& metric, double K) {
  require_tree(metric, "pair step functions");
  if (!(K >= 0)) throw InputError("product bound must be nonnegative");
  PairStepFunction f;
  std::vector<Word> stems;
  for_each_tree_ball(metric, K, kDefaultElementCap, [&](const Word& w, double) { stems.push_back(w); });
  std::sort(stems.begin(), stems.end());
  for (const Word& c : stems) {
    const auto next = successors(c, metric.rank());
    for (Letter x : next)
      for (Letter y : next)
        if (x != y) {
          Word u = c, v = c;
          u.letters.push_back(x);
          v.letters.push_back(y);
          f.terms.push_back({std::move(u), std::move(v), 1.0});
        }
  }
  std::ostringstream os;
  os << "product_le_" << K;
  f.name = os.str();
  return f;
}

PairStepFunction PairStepFunction::flipped() const {
  PairStepFunction f;
  f.name = name + "_flipped";
  for (const Term& t : terms) f.terms.push_back({t.v, t.u, t.coef});
  return f;
}

ErgodicAverageReport ergodic_average(const Metric& metric, const BMSMeasure& bms, const PairStepFunction& f,
                                     const BoundaryPoint& xi, const BoundaryPoint& eta, Variant variant,
                                     const std::vector<double>& T_grid, std::size_t depth, const ErgodicOptions& opt) {
  if (T_grid.empty()) throw InputError("T grid is empty");
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (!(T_grid[i] > 0) || !std::isfinite(T_grid[i])) throw InputError("T values must be positive");
    if (i && T_grid[i] <= T_grid[i - 1]) throw InputError("T grid must be increasing");
  }
  const double T_max = T_grid.back();
  if (T_max > opt.max_T)
    throw ResourceError("T = " + std::to_string(T_max) + " exceeds the cap caps.T_max = " + std::to_string(opt.max_T));
  ErgodicAverageReport r;
  r.variant = variant;
  r.T_grid = T_grid;
  r.f_descriptor = f.name;
  r.target = f.integral(bms, metric);
  const double K = f.support_radius(metric);
  const auto elems = enumerate_window_elements(metric, bms.ps, xi, eta, variant, {0.0, T_max, true}, K, depth, opt.cap);
  std::vector<std::pair<double, double>> contrib;
  for (const auto& e : elems) {
    const double fv = f(xi.translated(e.g), eta.translated(e.g));
    if (fv == 0) continue;
    contrib.emplace_back(e.parameter, fv);
    const double tp = variant_parameter(metric, bms.ps, Variant::Tau, e.g, xi, eta, depth + e.g.size());
    r.parameter_gap = std::max(r.parameter_gap, std::abs(e.parameter - tp));
  }
  for (double T : T_grid) {
    double s = 0;
    for (const auto& [p, v] : contrib)
      if (p < T - kLengthTol) s += v;
    r.values.push_back(s / T);
  }
  return r;
}

double window_average(const Metric& metric, const PSMeasure& ps, const PairStepFunction& f, const BoundaryPoint& xi,
                      const BoundaryPoint& eta, Variant variant, double a, double b, std::size_t depth) {
  if (!(b > a)) throw InputError("window average needs b > a");
  double s = 0;
  for (const auto& e :
       enumerate_window_elements(metric, ps, xi, eta, variant, {a, b, true}, f.support_radius(metric), depth))
    s += f(xi.translated(e.g), eta.translated(e.g));
  return s / (b - a);
}

ConcentrationReport concentration_check(const Metric& metric, const BMSMeasure& bms, const PairStepFunction& f,
                                        Variant variant, double T, std::size_t pairs, std::uint64_t seed,
                                        std::size_t depth) {
  if (pairs < 2) throw InputError("concentration check needs at least two pairs");
  auto kernel = std::make_shared<const MarkovKernel>(bms.ps.kernel());
  ConcentrationReport r;
  std::vector<std::pair<BoundaryPoint, BoundaryPoint>> samples;
  std::uint64_t index = 0;
  while (samples.size() < pairs) {
    BoundaryPoint xi = sample_ray(kernel, seed, index++);
    BoundaryPoint eta = sample_ray(kernel, seed, index++);
    if (!xi.same_to_depth(eta, depth)) samples.emplace_back(std::move(xi), std::move(eta));
  }
  r.values.assign(pairs, 0.0);
  parallel_for(pairs, [&](std::size_t i) {
    r.values[i] = ergodic_average(metric, bms, f, samples[i].first, samples[i].second, variant, {T}, depth).values[0];
  });
  for (double v : r.values) r.mean += v;
  r.mean /= r.values.size();
  double ss = 0;
  for (double v : r.values) ss += (v - r.mean) * (v - r.mean);
  r.sd = std::sqrt(ss / (r.values.size() - 1));
  return r;
}

KernelSpec KernelSpec::box(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw InputError("kernel needs a < b");
  KernelSpec k;
  k.shape_ = Shape::Box;
  k.a_ = a;
  k.b_ = b;
  return k;
}

KernelSpec KernelSpec::box_conv_unit(double a, double b) {
  KernelSpec k = box(a, b);
  k.shape_ = Shape::BoxConvUnit;
  return k;
}

KernelSpec KernelSpec::steps(std::vector<double> breaks, std::vector<double> heights) {
  if (breaks.size() != heights.size() + 1 || heights.empty())
    throw InputError("step kernel needs one more breakpoint than heights");
  double total = 0;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) throw InputError("step kernel breakpoints must increase");
    if (!(heights[i] >= 0) || !std::isfinite(heights[i])) throw InputError("kernel must be nonnegative");
    total += heights[i] * (breaks[i + 1] - breaks[i]);
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("kernel must integrate to 1 (got " + std::to_string(total) + ")");
  KernelSpec k;
  k.shape_ = Shape::Steps;
  k.breaks_ = std::move(breaks);
  k.heights_ = std::move(heights);
  return k;
}

double KernelSpec::lo() const { return shape_ == Shape::Steps ? breaks_.front() : a_; }

double KernelSpec::hi() const {
  switch (shape_) {
    case Shape::Box: return b_;
    case Shape::BoxConvUnit: return b_ + 1.0;
    case Shape::Steps: return breaks_.back();
  }
  return b_;
}

double KernelSpec::operator()(double t) const {
  switch (shape_) {
    case Shape::Box: return (t >= a_ && t < b_) ? 1.0 / (b_ - a_) : 0.0;
    case Shape::BoxConvUnit: {
      const double overlap = std::min(b_, t) - std::max(a_, t - 1.0);
      return overlap > 0 ? overlap / (b_ - a_) : 0.0;
    }
    case Shape::Steps:
      for (std::size_t i = 0; i < heights_.size(); ++i)
        if (t >= breaks_[i] && t < breaks_[i + 1]) return heights_[i];
      return 0.0;
  }
  return 0.0;
}

double KernelSpec::integral() const {
  if (shape_ != Shape::Steps) return 1.0;  // box: (b-a)/(b-a); convolution with a unit box keeps the mass
  double total = 0;
  for (std::size_t i = 0; i < heights_.size(); ++i) total += heights_[i] * (breaks_[i + 1] - breaks_[i]);
  return total;
}

SuspensionReport suspension_operators_check(const Metric& metric, const BMSMeasure& bms, const PairStepFunction& f,
                                            const KernelSpec& theta, const BoundaryPoint& xi, const BoundaryPoint& eta,
                                            double T, std::size_t depth) {
  SuspensionReport r;
  r.C = 1.0;
  if (!(T > 2 * r.C)) throw InputError("suspension check needs T > 2C");
  const double f0 = f(xi, eta);
  r.q_error = std::abs(f0 * theta.integral() - f0);
  const double lo = std::min(theta.lo(), -r.C), hi = std::max(theta.hi(), T + r.C);
  const auto elems =
      enumerate_window_elements(metric, bms.ps, xi, eta, Variant::Tau, {lo, hi, false}, f.support_radius(metric), depth);
  double inner = 0, outer = 0;
  for (const auto& e : elems) {
    const double fv = f(xi.translated(e.g), eta.translated(e.g));
    if (fv == 0) continue;
    r.smoothed += theta(e.parameter) * fv;
    if (Window{r.C, T - r.C, true}.contains(e.parameter)) inner += fv;
    if (Window{-r.C, T + r.C, true}.contains(e.parameter)) outer += fv;
  }
  r.lower = (1 - 2 * r.C / T) * inner / (T - 2 * r.C);
  r.upper = ((T + 2 * r.C) / T) * outer / (T + 2 * r.C);
  r.bracketed = r.lower <= r.smoothed + 1e-12 && r.smoothed <= r.upper + 1e-12;
  return r;
}

Word ray_element(const Metric& metric, const BoundaryPoint& x_plus, double n) {
  require_tree(metric, "ray elements");
  std::size_t want = static_cast<std::size_t>(std::ceil(n / metric.min_step())) + 2;
  const Word r = x_plus.prefix(want);
  double len = 0;
  std::size_t j = 0;
  while (j < r.size() && len + metric.letter_weight(r[j]) <= n + kLengthTol) len += metric.letter_weight(r[j++]);
  return inverse(truncate(r, j));
}

SlicePartitionReport slice_partition(const Metric& metric, const PSMeasure& ps, const BoundaryPoint& x_plus, int n) {
  require_tree(metric, "slice partition");
  if (n < 2) throw InputError("slice partition needs n >= 2");
  SlicePartitionReport rep;
  rep.n = n;
  rep.gamma = ray_element(metric, x_plus, n);
  rep.rows.resize(n + 1);
  for (int k = 0; k <= n; ++k) rep.rows[k].k = k;
  const std::size_t depth = static_cast<std::size_t>(std::ceil(n / metric.min_step())) + 4;
  const Word x = x_plus.prefix(depth);
  const std::size_t sd = depth + rep.gamma.size() + 2;
  std::size_t j = 0;
  double prod = 0;
  for (; prod < n - kLengthTol; prod += metric.letter_weight(x[j++])) {
    const Word stem = truncate(x, j);
    const double m = ps.mass(stem) - ps.mass(truncate(x, j + 1));
    const int k = std::min(n - 1, static_cast<int>(std::floor(prod + kLengthTol)));
    SliceRow& row = rep.rows[k];
    row.mass += m;
    if (!row.sigma) {
      Letter y = 0;
      for (Letter c : successors(stem, metric.rank()))
        if (c != x[j]) {
          y = c;
          break;
        }
      Word w = stem;
      w.letters.push_back(y);
      row.sigma = sigma(metric, rep.gamma, cylinder_point(metric.alphabet(), w), sd).value;
    }
  }
  rep.rows[n].mass = ps.mass(truncate(x, j));
  rep.rows[n].sigma = sigma(metric, rep.gamma, x_plus, sd).value;
  return rep;
}

std::vector<double> lebesgue_pushforward_probe(const Metric& metric, const PSMeasure& ps, const std::vector<Word>& E,
                                               const BoundaryPoint& x_plus, const std::vector<int>& n_values) {
  std::vector<double> out;
  for (int n : n_values) {
    if (n < 0) throw InputError("n must be >= 0");
    out.push_back(ps.mass(image_cylinders(ray_element(metric, x_plus, n), E, metric.rank())));
  }
  return out;
}

ContractionRecord contraction_check(const Metric& metric, double K, const Word& g, const BoundaryPoint& xi,
                                    const BoundaryPoint& eta, const BoundaryPoint& eta_prime, std::size_t depth,
                                    double alpha) {
  require_tree(metric, "contraction check");
  const std::size_t d = depth + g.size();
  if (boundary_gromov_product(metric, xi, eta, Word{}, d) > K + kLengthTol ||
      boundary_gromov_product(metric, xi, eta_prime, Word{}, d) > K + kLengthTol ||
      boundary_gromov_product(metric, xi.translated(g), eta.translated(g), Word{}, d) > K + kLengthTol)
    throw DomainError("contraction precondition: a Gromov product exceeds K = " + std::to_string(K));
  const double s_xi = sigma(metric, g, xi, d).value;
  if (!(s_xi < 0)) throw DomainError("contraction precondition: sigma(g, xi) must be negative");
  ContractionRecord r;
  r.t = -s_xi;
  r.C = 4 * K + metric.max_step();
  r.sigma_eta = sigma(metric, g, eta, d).value;
  r.sigma_eta_prime = sigma(metric, g, eta_prime, d).value;
  r.visual_dist = visual_distance(metric, eta.translated(g), eta_prime.translated(g), alpha, d);
  r.bound = std::pow(alpha, r.t - r.C);
  auto in_band = [&](double s) { return s >= r.t - r.C - kLengthTol && s <= r.t + r.C + kLengthTol; };
  r.ok = in_band(r.sigma_eta) && in_band(r.sigma_eta_prime) && r.visual_dist < r.bound;
  return r;
}

ContractionSampleReport contraction_sample(const Metric& metric, const PSMeasure& ps, double K, std::size_t count,
                                           std::uint64_t seed, std::size_t depth, double alpha, std::size_t max_shift) {
  auto kernel = std::make_shared<const MarkovKernel>(ps.kernel());
  ContractionSampleReport rep;
  rep.C = 4 * K + metric.max_step();
  const std::size_t max_attempts = 100 * count + 100;
  std::uint64_t index = 0;
  while (rep.admissible < count && rep.attempts < max_attempts) {
    const std::uint64_t a = rep.attempts++;
    const BoundaryPoint xi = sample_ray(kernel, seed, index++);
    const BoundaryPoint eta = sample_ray(kernel, seed, index++);
    const BoundaryPoint eta_prime = sample_ray(kernel, seed, index++);
    const auto L = 1 + static_cast<std::size_t>(unit_draw(seed ^ 0xc0ffeeULL, a) * max_shift);
    Word u = sample_word(metric.rank(), static_cast<std::size_t>(std::floor(K / metric.min_step())), seed ^ 0xbeefULL, a);
    while (metric.tree_length(u.letters) > K + kLengthTol) u.letters.pop_back();
    const Word g = inverse(mul(xi.prefix(std::min(L, depth)), u));
    try {
      const auto r = contraction_check(metric, K, g, xi, eta, eta_prime, depth, alpha);
      ++rep.admissible;
      if (!r.ok) ++rep.violations;
    } catch (const DomainError&) {
    }
  }
  return rep;
}

SatResult sat_search(const PSMeasure& ps, const std::vector<Word>& A, double epsilon, std::size_t candidate_bound) {
  if (!(epsilon > 0 && epsilon < 1)) throw InputError("epsilon must lie in (0,1)");
  if (A.empty() || !(ps.mass(A) > 0)) throw DomainError("SAT search needs a set of positive measure");
  SatResult r;
  for (std::size_t L = 0; L <= candidate_bound; ++L)
    for (const Word& w : words_of_length(ps.rank(), L)) {
      const Word g = inverse(w);
      ++r.scanned;
      const double m = ps.mass(image_cylinders(g, A, ps.rank()));
      if (m > 1 - epsilon) {
        r.found = true;
        r.g = g;
        r.mass = m;
        return r;
      }
    }
  return r;
}

}  // namespace hypererg
