#include "hypererg/boundary.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <sstream>

#include "hypererg/ball.hpp"
#include "hypererg/errors.hpp"

namespace hypererg {

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_draw(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t z = splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

MarkovKernel MarkovKernel::uniform(int rank) {
  if (rank < 2) throw InputError("rank must be at least 2");
  MarkovKernel k;
  k.rank = rank;
  const int n = 2 * rank;
  k.initial.assign(n, 1.0 / n);
  k.transition.assign(n, std::vector<double>(n, 1.0 / (n - 1)));
  for (int x = 0; x < n; ++x) k.transition[x][inv(static_cast<Letter>(x))] = 0.0;
  return k;
}

void MarkovKernel::validate() const {
  const std::size_t n = 2 * static_cast<std::size_t>(rank);
  auto check_row = [&](const std::vector<double>& row, const char* what) {
    if (row.size() != n) throw InputError(std::string(what) + " has the wrong size");
    double s = 0.0;
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw InputError(std::string(what) + " has a negative entry");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InputError(std::string(what) + " does not sum to 1");
  };
  check_row(initial, "initial distribution");
  if (transition.size() != n) throw InputError("transition matrix has the wrong size");
  for (std::size_t x = 0; x < n; ++x) {
    check_row(transition[x], "transition row");
    if (transition[x][inv(static_cast<Letter>(x))] != 0.0) throw InputError("transition allows backtracking");
  }
}

struct BoundaryPoint::Ray {
  // periodic
  Word pre, per;
  // markov
  bool markov = false;
  std::uint64_t seed = 0;
  std::shared_ptr<const MarkovKernel> kernel;
  mutable std::mutex mu;
  mutable std::vector<Letter> cache;

  void fill(std::size_t n, std::vector<Letter>& out) const {
    out.resize(n);
    if (!markov) {
      for (std::size_t i = 0; i < n; ++i)
        out[i] = i < pre.size() ? pre[i] : per[(i - pre.size()) % per.size()];
      return;
    }
    std::lock_guard lock(mu);
    while (cache.size() < n) {
      const std::size_t i = cache.size();
      const std::vector<double>& p = i == 0 ? kernel->initial : kernel->transition[cache.back()];
      const double u = unit_draw(seed, i);
      double c = 0.0;
      Letter pick = 0;  // roundoff at the top end keeps the last admissible letter
      for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] <= 0.0) continue;
        pick = static_cast<Letter>(x);
        c += p[x];
        if (u < c) break;
      }
      cache.push_back(pick);
    }
    std::copy_n(cache.begin(), n, out.begin());
  }
};

BoundaryPoint::BoundaryPoint() {
  auto r = std::make_shared<Ray>();
  r->per = Word{0};
  core_ = r;
}

BoundaryPoint::BoundaryPoint(std::shared_ptr<const Ray> core, Word shift) : core_(std::move(core)), shift_(std::move(shift)) {}

BoundaryPoint BoundaryPoint::periodic(const Alphabet& alphabet, Word preamble, Word period) {
  alphabet.check(preamble);
  alphabet.check(period);
  if (period.empty()) throw InputError("boundary point needs a nonempty period");
  if (!is_reduced(preamble.letters) || !is_reduced(period.letters))
    throw InputError("preamble and period must be reduced words");
  if (period.size() > 0 && period.back() == inv(period[0]))
    throw InputError("period must be cyclically reduced");
  if (!preamble.empty() && preamble.back() == inv(period[0]))
    throw InputError("preamble followed by the period is not reduced");
  auto r = std::make_shared<Ray>();
  r->pre = std::move(preamble);
  r->per = std::move(period);
  return BoundaryPoint(r, Word{});
}

BoundaryPoint BoundaryPoint::parse(const Alphabet& alphabet, std::string_view text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open)
    throw InputError("boundary point '" + std::string(text) + "' must look like pre(per)");
  for (char c : text.substr(close + 1))
    if (!std::isspace(static_cast<unsigned char>(c)))
      throw InputError("trailing characters after ')' in boundary point '" + std::string(text) + "'");
  const auto pre_text = text.substr(0, open);
  const auto per_text = text.substr(open + 1, close - open - 1);
  Word pre{alphabet.parse_letters(pre_text)};
  Word per{alphabet.parse_letters(per_text)};
  return periodic(alphabet, std::move(pre), std::move(per));
}

BoundaryPoint BoundaryPoint::markov(std::uint64_t seed, std::shared_ptr<const MarkovKernel> kernel) {
  if (!kernel) throw InputError("markov ray needs a kernel");
  kernel->validate();
  auto r = std::make_shared<Ray>();
  r->markov = true;
  r->seed = seed;
  r->kernel = std::move(kernel);
  return BoundaryPoint(r, Word{});
}

Word BoundaryPoint::prefix(std::size_t n) const {
  Word out;
  if (shift_.empty()) {
    core_->fill(n, out.letters);
    return out;
  }
  std::vector<Letter> raw;
  core_->fill(n + shift_.size(), raw);
  std::vector<Letter> all = shift_.letters;
  all.insert(all.end(), raw.begin(), raw.end());
  out = reduce(all);
  out.letters.resize(n);
  return out;
}

BoundaryPoint BoundaryPoint::translated(const Word& g) const { return BoundaryPoint(core_, mul(g, shift_)); }

bool BoundaryPoint::same_to_depth(const BoundaryPoint& other, std::size_t depth) const {
  return prefix(depth) == other.prefix(depth);
}

std::string BoundaryPoint::describe(const Alphabet& alphabet, std::size_t digits) const {
  if (!core_->markov && shift_.empty())
    return alphabet.format(core_->pre) + "(" + alphabet.format(core_->per) + ")";
  return alphabet.format(prefix(digits)) + "...";
}

BoundaryPoint cylinder_point(const Alphabet& alphabet, const Word& w) {
  if (w.empty()) throw InputError("cylinder word must be nonempty");
  return BoundaryPoint::periodic(alphabet, truncate(w, w.size() - 1), Word{w.back()});
}

Cylinder::Cylinder(Word w) : word(std::move(w)) {
  if (word.empty()) throw InputError("cylinder word must be nonempty");
  if (!is_reduced(word.letters)) throw InputError("cylinder word must be reduced");
}

std::vector<Word> whole_boundary(int rank) {
  std::vector<Word> out;
  for (int x = 0; x < 2 * rank; ++x) out.push_back(Word{static_cast<Letter>(x)});
  return out;
}

namespace {

void push_image(const Word& g, const Word& u, int rank, std::vector<Word>& out) {
  const Word ginv = inverse(g);
  const std::size_t k = common_prefix(ginv.letters, u.letters);
  if (k < u.size()) {
    out.push_back(mul(g, u));
    return;
  }
  // g cancels all of u: g.C_u = g'.(boundary minus C_{u_last^-1}) with g' = g u.
  const Word rest = mul(g, u);
  const Letter banned = inv(u.back());
  for (int x = 0; x < 2 * rank; ++x)
    if (x != banned) push_image(rest, Word{static_cast<Letter>(x)}, rank, out);
}

}  // namespace

std::vector<Word> image_cylinders(const Word& g, const Word& u, int rank) {
  std::vector<Word> out;
  if (u.empty()) return whole_boundary(rank);
  push_image(g, u, rank, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Word> image_cylinders(const Word& g, const std::vector<Word>& set, int rank) {
  std::vector<Word> out;
  for (const Word& u : set) {
    if (u.empty()) return whole_boundary(rank);
    push_image(g, u, rank, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double boundary_gromov_product(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta,
                               const Word& base, std::size_t depth) {
  if (depth < 1) throw InputError("depth must be at least 1");
  if (!metric.is_tree()) return boundary_gromov_product_window(metric, xi, eta, base, depth);
  const Word binv = inverse(base);
  const Word x = xi.translated(binv).prefix(depth), y = eta.translated(binv).prefix(depth);
  const std::size_t k = common_prefix(x.letters, y.letters);
  if (k >= depth) return kInfiniteProduct;
  return metric.tree_length(std::span(x.letters).first(k));
}

double boundary_gromov_product_window(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta,
                                      const Word& base, std::size_t depth) {
  if (depth < 1) throw InputError("depth must be at least 1");
  const Word x = xi.prefix(depth), y = eta.prefix(depth);
  if (x == y) return kInfiniteProduct;
  const std::size_t lo = std::max<std::size_t>(1, depth / 2);
  double best = kInfiniteProduct;
  for (std::size_t i = lo; i <= depth; ++i) {
    const Word xi_i = truncate(x, i);
    for (std::size_t j = lo; j <= depth; ++j) best = std::min(best, gromov_product(metric, xi_i, truncate(y, j), base));
  }
  return best;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("visual parameter alpha must lie in (0,1)");
}

}  // namespace

double visual_distance(const BoundaryPoint& xi, const BoundaryPoint& eta, double alpha, std::size_t depth) {
  check_alpha(alpha);
  const Word x = xi.prefix(depth), y = eta.prefix(depth);
  const std::size_t k = common_prefix(x.letters, y.letters);
  if (k >= depth) return 0.0;
  return std::pow(alpha, static_cast<double>(k));
}

double visual_distance(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta, double alpha,
                       std::size_t depth) {
  check_alpha(alpha);
  const double p = boundary_gromov_product(metric, xi, eta, Word{}, depth);
  if (std::isinf(p)) return 0.0;
  return std::pow(alpha, p);
}

namespace {

// v_n = d(x, z_n) - d(y, z_n) for n = 0..depth.
std::vector<double> busemann_terms(const Metric& metric, const Word& x, const Word& y, const BoundaryPoint& zeta,
                                   std::size_t depth) {
  const Word z = zeta.prefix(depth);
  std::vector<double> v(depth + 1);
  for (std::size_t n = 0; n <= depth; ++n) {
    const Word zn = truncate(z, n);
    v[n] = metric.distance(x, zn) - metric.distance(y, zn);
  }
  return v;
}

double window_extremum(const std::vector<double>& v, std::size_t depth, BusemannMode mode) {
  const std::size_t lo = std::max<std::size_t>(1, depth / 2);
  double e = v[std::min(lo, depth)];
  for (std::size_t n = lo; n <= depth; ++n) e = mode == BusemannMode::Upper ? std::max(e, v[n]) : std::min(e, v[n]);
  return e;
}

}  // namespace

BusemannValue busemann(const Metric& metric, const Word& x, const Word& y, const BoundaryPoint& zeta,
                       std::size_t depth, BusemannMode mode) {
  if (depth < 1) throw InputError("depth must be at least 1");
  const auto v = busemann_terms(metric, x, y, zeta, depth);
  BusemannValue out;
  out.value = window_extremum(v, depth, mode);
  if (depth >= 2) out.stable = std::abs(out.value - window_extremum(v, depth - 1, mode)) <= kLengthTol;
  return out;
}

SigmaEstimate sigma(const Metric& metric, const Word& g, const BoundaryPoint& xi, std::size_t depth) {
  if (!metric.is_tree()) return sigma_window(metric, g, xi, depth);
  const Word ginv = inverse(g);
  const Word x = xi.prefix(g.size());
  const std::size_t k = common_prefix(ginv.letters, x.letters);
  SigmaEstimate out;
  out.value = metric.tree_length(g.letters) - 2.0 * metric.tree_length(std::span(x.letters).first(k));
  out.stabilized_at = k;
  out.defect_bound = 0.0;
  return out;
}

SigmaEstimate sigma_window(const Metric& metric, const Word& g, const BoundaryPoint& xi, std::size_t depth) {
  if (depth < 1) throw InputError("depth must be at least 1");
  const auto v = busemann_terms(metric, inverse(g), Word{}, xi, depth);
  SigmaEstimate out;
  out.value = window_extremum(v, depth, BusemannMode::Upper);
  const double lower = window_extremum(v, depth, BusemannMode::Lower);
  out.defect_bound = out.value - lower;
  std::size_t n = depth;
  while (n > 0 && std::abs(v[n - 1] - v[depth]) <= kLengthTol) --n;
  out.stabilized_at = n;
  return out;
}

double cocycle_defect(const Metric& metric, const Word& g, const Word& h, const BoundaryPoint& xi, std::size_t depth) {
  const double gh = sigma(metric, mul(g, h), xi, depth).value;
  const double g_hxi = sigma(metric, g, xi.translated(h), depth).value;
  const double h_xi = sigma(metric, h, xi, depth).value;
  return std::abs(gh - g_hxi - h_xi);
}

}  // namespace hypererg
