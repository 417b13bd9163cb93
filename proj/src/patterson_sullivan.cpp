#include "hypererg/patterson_sullivan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypererg/errors.hpp"
#include "json.hpp"

namespace hypererg {

namespace {

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
};

Fit least_squares(const std::vector<std::pair<double, double>>& pts, std::size_t lo, std::size_t hi) {
  const double m = static_cast<double>(hi - lo);
  double sx = 0, sy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sxx += (pts[i].first - mx) * (pts[i].first - mx);
    sxy += (pts[i].first - mx) * (pts[i].second - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace

GrowthEstimate growth_exponent(const Metric& metric, double R_max, std::size_t cap) {
  if (!(R_max > 0.0) || !std::isfinite(R_max)) throw InputError("growth exponent needs R_max > 0 (slope undefined)");
  const std::vector<double> lengths = ball_lengths(metric, R_max, cap);
  GrowthEstimate g;
  g.R_max = R_max;
  g.ball_size = lengths.size();
  const double step = metric.min_step() / 2.0;
  for (double R = R_max / 2.0; R <= R_max + kLengthTol; R += step) {
    const auto count = std::upper_bound(lengths.begin(), lengths.end(), R + kLengthTol) - lengths.begin();
    g.points.emplace_back(R, std::log(static_cast<double>(count)));
  }
  const std::size_t m = g.points.size();
  if (m < 2) throw InputError("growth exponent range too short for a slope (raise R_max)");
  g.delta = least_squares(g.points, 0, m).slope;
  if (m >= 4) {
    g.first_half_slope = least_squares(g.points, 0, m / 2).slope;
    g.second_half_slope = least_squares(g.points, m / 2, m).slope;
  } else {
    g.first_half_slope = g.second_half_slope = g.delta;
  }
  g.band = std::abs(g.first_half_slope - g.second_half_slope);
  return g;
}

namespace {

std::vector<std::vector<double>> transfer_matrix(const Metric& metric, double s) {
  const int n = metric.alphabet().size();
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (y != inv(static_cast<Letter>(x))) M[x][y] = std::exp(-s * metric.letter_weight(static_cast<Letter>(y)));
  return M;
}

// Power iteration with Collatz-Wielandt bounds; returns (radius, right eigenvector normalized to max 1).
std::pair<double, std::vector<double>> perron(const std::vector<std::vector<double>>& M) {
  const std::size_t n = M.size();
  std::vector<double> v(n, 1.0), w(n);
  double lo = 0, hi = 0;
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += M[i][j] * v[j];
      w[i] = s;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, w[i] / v[i]);
      hi = std::max(hi, w[i] / v[i]);
    }
    const double top = *std::max_element(w.begin(), w.end());
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / top;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return {0.5 * (lo + hi), v};
}

void require_tree(const Metric& metric, const char* what) {
  if (!metric.is_tree()) throw InputError(std::string(what) + " needs a tree metric (word, weighted or green)");
}

}  // namespace

double transfer_spectral_radius(const Metric& metric, double s) {
  require_tree(metric, "transfer operator");
  return perron(transfer_matrix(metric, s)).first;
}

double perron_exponent(const Metric& metric) {
  require_tree(metric, "Perron exponent");
  double lo = 0.0, hi = std::log(2.0 * metric.rank() - 1.0) / metric.min_step();
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (transfer_spectral_radius(metric, mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

MarkovModel MarkovModel::of(const Metric& metric) {
  require_tree(metric, "exact Markov measure");
  MarkovModel m;
  m.delta = perron_exponent(metric);
  const auto M = transfer_matrix(metric, m.delta);
  m.h = perron(M).second;
  const std::size_t n = M.size();
  double z = 0;
  m.initial.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    m.initial[x] = std::exp(-m.delta * metric.letter_weight(static_cast<Letter>(x))) * m.h[x];
    z += m.initial[x];
  }
  for (double& p : m.initial) p /= z;
  m.P.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    double row = 0;
    for (std::size_t y = 0; y < n; ++y) {
      m.P[x][y] = M[x][y] * m.h[y] / m.h[x];
      row += m.P[x][y];
    }
    for (double& p : m.P[x]) p /= row;
  }
  return m;
}

double MarkovModel::cylinder_mass(const Word& w) const {
  if (w.empty()) return 1.0;
  double m = initial[w[0]];
  for (std::size_t i = 1; i < w.size(); ++i) m *= P[w[i - 1]][w[i]];
  return m;
}

MarkovKernel MarkovModel::kernel(int rank) const {
  MarkovKernel k;
  k.rank = rank;
  k.initial = initial;
  k.transition = P;
  return k;
}

double MuS::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double MuS::prefix_mass(const Word& w, std::size_t min_letters) const {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].g.size() < min_letters) continue;
    den += weights[i];
    if (has_prefix(atoms[i].g, w)) num += weights[i];
  }
  if (!(den > 0)) throw DomainError("no ball elements with at least " + std::to_string(min_letters) + " letters");
  return num / den;
}

MuS mu_s(const Metric& metric, double s, double R, double delta_hat, std::size_t cap) {
  if (!(s > delta_hat))
    throw DomainError("s = " + std::to_string(s) + " does not exceed the growth exponent estimate " +
                      std::to_string(delta_hat) + "; the Poincare series diverges");
  MuS mu;
  mu.s = s;
  mu.R = R;
  mu.atoms = enumerate_ball(metric, R, cap).elements;
  mu.weights.reserve(mu.atoms.size());
  for (const auto& a : mu.atoms) mu.weights.push_back(std::exp(-s * a.length));
  const double z = mu.total();
  for (double& w : mu.weights) w /= z;
  return mu;
}

std::vector<Word> words_of_length(int rank, std::size_t n) {
  std::vector<Word> layer{Word{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (Letter x : successors(w, rank)) {
        Word v = w;
        v.letters.push_back(x);
        next.push_back(std::move(v));
      }
    layer.swap(next);
  }
  return layer;
}

namespace {

// Sums of e^{-s W(v)} over nonempty reduced words v with a given first letter and W(v) <= r, for all r,
// via dynamic programming over generator count vectors (W depends only on the counts).
class TailSums {
 public:
  TailSums(const Metric& metric, double s, double R, std::size_t cap) : n_(metric.alphabet().size()) {
    const int k = metric.rank();
    std::vector<std::size_t> radix(k), stride(k);
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) {
      radix[i] = static_cast<std::size_t>(std::floor(R / metric.letter_weight(2 * i) + kLengthTol)) + 1;
      stride[i] = total;
      if (total > cap / radix[i]) throw ResourceError("weak-* count table exceeds the cap of " + std::to_string(cap));
      total *= radix[i];
    }
    if (total * n_ > 8 * cap) throw ResourceError("weak-* count table exceeds the cap of " + std::to_string(cap));
    std::vector<double> W(total, 0.0);
    std::vector<std::vector<std::size_t>> digits(total, std::vector<std::size_t>(k));
    for (std::size_t c = 0; c < total; ++c) {
      std::size_t rem = c;
      for (int i = 0; i < k; ++i) {
        digits[c][i] = rem % radix[i];
        rem /= radix[i];
        W[c] += digits[c][i] * metric.letter_weight(2 * i);
      }
    }
    std::vector<double> step(n_);
    for (int y = 0; y < n_; ++y) step[y] = std::exp(-s * metric.letter_weight(y));
    table_.resize(n_);
    std::vector<double> B(n_ * total);
    for (int y0 = 0; y0 < n_; ++y0) {
      std::fill(B.begin(), B.end(), 0.0);
      std::vector<std::pair<double, double>> pts;
      for (std::size_t c = 1; c < total; ++c) {
        if (W[c] > R + kLengthTol) continue;
        double sum = 0;
        for (int y = 0; y < n_; ++y) {
          const int gi = y / 2;
          if (digits[c][gi] == 0) continue;
          const std::size_t pred = c - stride[gi];
          double acc = (pred == 0 && y == y0) ? 1.0 : 0.0;
          if (pred != 0)
            for (int z = 0; z < n_; ++z)
              if (z != inv(static_cast<Letter>(y))) acc += B[z * total + pred];
          B[y * total + c] = acc * step[y];
          sum += B[y * total + c];
        }
        if (sum > 0) pts.emplace_back(W[c], sum);
      }
      std::sort(pts.begin(), pts.end());
      double run = 0;
      for (auto& p : pts) {
        run += p.second;
        p.second = run;
      }
      table_[y0] = std::move(pts);
    }
  }

  // Sum over words starting with y0 of weight <= r.
  double first(int y0, double r) const {
    const auto& t = table_[y0];
    auto it = std::upper_bound(t.begin(), t.end(), std::make_pair(r + kLengthTol, std::numeric_limits<double>::infinity()));
    return it == t.begin() ? 0.0 : std::prev(it)->second;
  }

  // 1 + sum over nonempty continuations allowed after letter x.
  double after(Letter x, double r) const {
    if (r < -kLengthTol) return 0.0;
    double s = 1.0;
    for (int y0 = 0; y0 < n_; ++y0)
      if (y0 != inv(x)) s += first(y0, r);
    return s;
  }

 private:
  int n_;
  std::vector<std::vector<std::pair<double, double>>> table_;
};

}  // namespace

std::map<Word, double> weakstar_masses(const Metric& metric, std::size_t n, double s, double R, std::size_t cap) {
  if (n < 1) throw InputError("resolution must be at least 1");
  const auto words = words_of_length(metric.rank(), n);
  std::map<Word, double> out;
  double z = 0;
  if (metric.is_tree()) {
    const TailSums tails(metric, s, R, cap);
    for (const Word& w : words) {
      const double Ww = metric.tree_length(w.letters);
      const double v = Ww <= R + kLengthTol ? std::exp(-s * Ww) * tails.after(w.back(), R - Ww) : 0.0;
      out[w] = v;
      z += v;
    }
  } else {
    const BallIndex ball = enumerate_ball(metric, R, cap);
    for (const Word& w : words) out[w] = 0.0;
    for (const auto& e : ball.elements) {
      if (e.g.size() < n) continue;
      const double v = std::exp(-s * e.length);
      out[truncate(e.g, n)] += v;
      z += v;
    }
  }
  if (!(z > 0)) throw DomainError("ball radius too small for resolution " + std::to_string(n));
  for (auto& [w, m] : out) m /= z;
  return out;
}

PSMeasure ps_cylinder_masses(const Metric& metric, std::size_t resolution, const PSOptions& opt) {
  if (resolution < 1) throw InputError("resolution must be at least 1");
  const int rank = metric.rank();
  if (opt.method == PSMethod::ExactMarkov) {
    const MarkovModel mm = MarkovModel::of(metric);
    std::map<Word, double> masses;
    for (const Word& w : words_of_length(rank, resolution)) masses[w] = mm.cylinder_mass(w);
    return PSMeasure(rank, mm.delta, resolution, std::move(masses), "exact-markov");
  }
  if (opt.s_offsets.size() < 2) throw InputError("weak-* extrapolation needs at least two s offsets");
  for (double d : opt.s_offsets)
    if (!(d > 0)) throw InputError("weak-* s offsets must be positive");
  double delta_hat = opt.delta_hat;
  if (delta_hat < 0) delta_hat = metric.is_tree() ? perron_exponent(metric) : growth_exponent(metric, opt.R, opt.cap).delta;

  std::vector<std::map<Word, double>> runs;
  for (double d : opt.s_offsets) runs.push_back(weakstar_masses(metric, resolution, delta_hat + d, opt.R, opt.cap));
  std::map<Word, double> masses;
  double z = 0;
  for (const auto& [w, unused] : runs.front()) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < runs.size(); ++j) pts.emplace_back(opt.s_offsets[j], runs[j].at(w));
    const double v = std::max(0.0, least_squares(pts, 0, pts.size()).intercept);
    masses[w] = v;
    z += v;
  }
  if (!(z > 0)) throw NumericError("weak-* extrapolation produced no mass");
  for (auto& [w, m] : masses) m /= z;

  if (metric.is_tree()) {
    const MarkovModel mm = MarkovModel::of(metric);
    double worst = 0;
    std::string where;
    for (const auto& [w, m] : masses) {
      const double ref = mm.cylinder_mass(w);
      const double rel = std::abs(m - ref) / ref;
      if (rel > worst) {
        worst = rel;
        where = metric.alphabet().format(w);
      }
    }
    if (worst > opt.consistency_tol)
      throw ConsistencyError("weak-* and exact Markov masses disagree: relative error " + std::to_string(worst) +
                             " at cylinder " + where + " exceeds " + std::to_string(opt.consistency_tol));
  }
  std::string prov = "weakstar(R=" + std::to_string(opt.R) + ", s=delta+{";
  for (std::size_t j = 0; j < opt.s_offsets.size(); ++j) prov += (j ? "," : "") + std::to_string(opt.s_offsets[j]);
  prov += "})";
  return PSMeasure(rank, delta_hat, resolution, std::move(masses), prov);
}

PSMeasure::PSMeasure(int rank, double delta, std::size_t resolution, std::map<Word, double> masses,
                     std::string provenance)
    : rank_(rank), delta_(delta), resolution_(resolution), masses_(std::move(masses)), provenance_(std::move(provenance)) {
  if (resolution_ < 1) throw InputError("resolution must be at least 1");
  if (!(delta_ > 0) || !std::isfinite(delta_)) throw InputError("growth exponent must be positive");
  const auto words = words_of_length(rank_, resolution_);
  if (masses_.size() != words.size())
    throw InputError("PS measure needs one mass per reduced word of length " + std::to_string(resolution_));
  double total = 0;
  for (const Word& w : words) {
    auto it = masses_.find(w);
    if (it == masses_.end()) throw InputError("PS measure is missing a cylinder mass");
    if (!(it->second >= 0) || !std::isfinite(it->second)) throw InputError("PS masses must be nonnegative");
    levels_[w] = it->second;
    total += it->second;
  }
  if (std::abs(total - 1.0) > 1e-9) throw NumericError("PS masses sum to " + std::to_string(total) + ", not 1");
  for (std::size_t L = resolution_; L-- > 1;) {
    for (const Word& w : words_of_length(rank_, L)) {
      double s = 0;
      Word v = w;
      v.letters.push_back(0);
      for (Letter x : successors(w, rank_)) {
        v.letters.back() = x;
        s += levels_.at(v);
      }
      levels_[w] = s;
    }
  }
  if (resolution_ >= 2) {
    const int n = 2 * rank_;
    continuation_.assign(n, std::vector<double>(n, 0.0));
    for (int x = 0; x < n; ++x) {
      const double mx = levels_.at(Word{static_cast<Letter>(x)});
      if (mx <= 0) continue;
      for (int y = 0; y < n; ++y)
        if (y != inv(static_cast<Letter>(x)))
          continuation_[x][y] = levels_.at(Word{static_cast<Letter>(x), static_cast<Letter>(y)}) / mx;
    }
  }
}

double PSMeasure::mass(const Word& w) const {
  if (w.empty()) return 1.0;
  if (w.size() <= resolution_) return levels_.at(w);
  if (continuation_.empty())
    throw DomainError("cylinder of length " + std::to_string(w.size()) + " is deeper than resolution " +
                      std::to_string(resolution_));
  double m = levels_.at(truncate(w, resolution_));
  for (std::size_t i = resolution_; i < w.size(); ++i) m *= continuation_[w[i - 1]][w[i]];
  return m;
}

double PSMeasure::mass(const std::vector<Word>& disjoint) const {
  double s = 0;
  for (const Word& w : disjoint) s += mass(w);
  return s;
}

MarkovKernel PSMeasure::kernel() const {
  if (continuation_.empty()) throw DomainError("drawing rays needs a PS measure of resolution at least 2");
  MarkovKernel k;
  k.rank = rank_;
  for (int x = 0; x < 2 * rank_; ++x) k.initial.push_back(levels_.at(Word{static_cast<Letter>(x)}));
  k.transition = continuation_;
  for (auto& row : k.transition) {
    double s = std::accumulate(row.begin(), row.end(), 0.0);
    if (s > 0)
      for (double& p : row) p /= s;
  }
  return k;
}

std::string PSMeasure::to_json(const Alphabet& alphabet) const {
  nlohmann::ordered_json j;
  j["delta"] = delta_;
  j["resolution"] = resolution_;
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [w, v] : masses_) m[alphabet.format(w)] = v;
  j["masses"] = m;
  j["rank"] = rank_;
  j["provenance"] = provenance_;
  return j.dump(2);
}

PSMeasure PSMeasure::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("PS measure JSON does not parse: ") + e.what());
  }
  try {
    int rank = j.value("rank", 0);
    const auto& m = j.at("masses");
    if (rank == 0) {  // infer from the letters present
      int top = 0;
      for (auto it = m.begin(); it != m.end(); ++it)
        for (char c : it.key())
          if (std::isalpha(static_cast<unsigned char>(c))) top = std::max(top, std::tolower(c) - 'a' + 1);
      rank = std::max(2, top);
    }
    const Alphabet alphabet(rank);
    std::map<Word, double> masses;
    for (auto it = m.begin(); it != m.end(); ++it) masses[alphabet.parse(it.key())] = it.value().get<double>();
    return PSMeasure(rank, j.at("delta").get<double>(), j.at("resolution").get<std::size_t>(), std::move(masses),
                     j.value("provenance", std::string("json")));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(std::string("PS measure JSON is malformed: ") + e.what());
  }
}

RNRecord rn_derivative_check(const PSMeasure& ps, const Metric& metric, const Word& g, const Cylinder& cyl,
                             RNOrientation orientation) {
  if (cyl.word.size() <= g.size())
    throw DomainError("cylinder too shallow: its length must exceed |g| = " + std::to_string(g.size()));
  const BoundaryPoint xi = cylinder_point(metric.alphabet(), cyl.word);
  const std::size_t depth = 2 * (cyl.word.size() + g.size()) + 2;
  RNRecord r;
  r.sigma = sigma(metric, g, xi, depth).value;
  const int rank = metric.rank();
  if (orientation == RNOrientation::Image)
    r.ratio = ps.mass(cyl.word) / ps.mass(image_cylinders(g, cyl.word, rank));
  else
    r.ratio = ps.mass(image_cylinders(inverse(g), cyl.word, rank)) / ps.mass(cyl.word);
  r.predicted = std::exp(ps.delta() * r.sigma);
  r.log_gap = std::abs(std::log(r.ratio) - ps.delta() * r.sigma);
  return r;
}

std::vector<AhlforsRow> ahlfors_check(const PSMeasure& ps, const BoundaryPoint& xi, const std::vector<int>& t_values) {
  std::vector<AhlforsRow> out;
  for (int t : t_values) {
    if (t < 0) throw InputError("Ahlfors radii need t >= 0");
    AhlforsRow row;
    row.t = t;
    row.mass = ps.mass(xi.prefix(static_cast<std::size_t>(t)));
    row.reference = std::exp(-ps.delta() * t);
    row.log_gap = std::abs(std::log(row.mass) + ps.delta() * t);
    out.push_back(row);
  }
  return out;
}

double CylinderFunction::at_prefix(const Word& p) const {
  double v = 0;
  for (const auto& [w, c] : terms)
    if (has_prefix(p, w)) v += c;
  return v;
}

std::size_t CylinderFunction::depth() const {
  std::size_t d = 0;
  for (const auto& t : terms) d = std::max(d, t.first.size());
  return d;
}

std::vector<double> lebesgue_differentiation_probe(const PSMeasure& ps, const CylinderFunction& f, const BoundaryPoint& xi,
                                                   const std::vector<int>& n_values) {
  const std::size_t fd = f.depth();
  std::vector<double> out;
  for (int n : n_values) {
    if (n < 0) throw InputError("ball index n must be >= 0");
    const std::size_t un = static_cast<std::size_t>(n);
    if (un >= fd) {
      out.push_back(0.0);
      continue;
    }
    const Word center = xi.prefix(un);
    const double f_xi = f.at_prefix(xi.prefix(fd));
    double integral = 0;
    for (const Word& tail : words_of_length(ps.rank(), fd - un)) {
      if (!center.empty() && !tail.empty() && tail[0] == inv(center.back())) continue;
      Word u = center;
      u.letters.insert(u.letters.end(), tail.begin(), tail.end());
      integral += std::abs(f.at_prefix(u) - f_xi) * ps.mass(u);
    }
    out.push_back(integral / ps.mass(center));
  }
  return out;
}

}  // namespace hypererg
