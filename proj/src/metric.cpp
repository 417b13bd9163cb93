#include "hypererg/metric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "hypererg/ball.hpp"
#include "hypererg/errors.hpp"
#include "hypererg/parallel.hpp"

namespace hypererg {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Word: return "word";
    case MetricKind::Weighted: return "weighted";
    case MetricKind::AltGen: return "altgen";
    case MetricKind::Green: return "green";
  }
  return "?";
}

FirstPassage green_first_passage(const Alphabet& alphabet, const std::vector<double>& p, double tol,
                                 int max_iterations) {
  const int n = alphabet.size();
  if (static_cast<int>(p.size()) != n)
    throw InputError("step probabilities need one value per letter (" + std::to_string(n) + ")");
  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    if (!(p[s] > 0.0)) throw InputError("step probabilities must be strictly positive");
    if (std::abs(p[s] - p[inv(static_cast<Letter>(s))]) > 1e-12)
      throw InputError("step probabilities must satisfy p(s) = p(s^-1)");
    total += p[s];
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("step probabilities must sum to 1");
  if (!(tol > 0.0)) throw InputError("fixed-point tolerance must be positive");

  FirstPassage out;
  std::vector<double> F(n, 0.0), next(n);
  for (int it = 1; it <= max_iterations; ++it) {
    double change = 0.0;
    for (int s = 0; s < n; ++s) {
      double back = 0.0;
      for (int t = 0; t < n; ++t)
        if (t != s) back += p[t] * F[inv(static_cast<Letter>(t))];
      next[s] = p[s] + back * F[s];
      change = std::max(change, std::abs(next[s] - F[s]));
    }
    F.swap(next);
    if (change < tol) {
      out.iterations = it;
      for (double f : F)
        if (!(f > 0.0 && f < 1.0)) throw NumericError("first-passage value left (0,1)");
      out.F = F;
      for (double f : F) out.weights.push_back(-std::log(f));
      for (int s = 0; s < n; s += 2) {  // symmetrize roundoff
        const double w = 0.5 * (out.weights[s] + out.weights[s + 1]);
        out.weights[s] = out.weights[s + 1] = w;
      }
      return out;
    }
  }
  throw NumericError("first-passage iteration did not converge within " + std::to_string(max_iterations) +
                     " iterations");
}

Metric Metric::word(int rank) {
  Metric m(MetricKind::Word, Alphabet(rank));
  m.weights_.assign(2 * rank, 1.0);
  return m;
}

Metric Metric::weighted(int rank, std::vector<double> w) {
  Metric m(MetricKind::Weighted, Alphabet(rank));
  if (static_cast<int>(w.size()) != rank)
    throw InputError("weighted metric needs one weight per generator (" + std::to_string(rank) + ")");
  for (double x : w)
    if (!(x > 0.0) || !std::isfinite(x)) throw InputError("generator weights must be finite and strictly positive");
  for (double x : w) {
    m.weights_.push_back(x);
    m.weights_.push_back(x);
  }
  return m;
}

Metric Metric::green(int rank, std::vector<double> probs, double tol) {
  Metric m(MetricKind::Green, Alphabet(rank));
  if (static_cast<int>(probs.size()) != rank)
    throw InputError("Green metric needs one step probability per generator (" + std::to_string(rank) + ")");
  std::vector<double> letter;
  for (double x : probs) {
    letter.push_back(x);
    letter.push_back(x);
  }
  auto fp = std::make_shared<FirstPassage>(green_first_passage(m.alphabet_, letter, tol));
  m.weights_ = fp->weights;
  m.green_ = fp;
  return m;
}

namespace {

// Stallings folding of the bouquet of generator loops; x lies in the generated subgroup iff it reads as a loop at
// the base vertex of the folded graph.
bool folded_graph_reads_letter(const std::vector<Word>& gens, Letter x) {
  struct Edge {
    int from, to;
    Letter label;  // always a positive letter; inverse letters traverse backwards
  };
  std::vector<int> parent{0};
  std::vector<Edge> edges;
  for (const Word& g : gens) {
    int at = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      int next = 0;
      if (i + 1 < g.size()) {
        next = static_cast<int>(parent.size());
        parent.push_back(next);
      }
      const Letter y = g[i];
      if (y % 2 == 0)
        edges.push_back({at, next, y});
      else
        edges.push_back({next, at, inv(y)});
      at = next;
    }
  }
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<int, Letter>, int> out, in;
    for (const Edge& e : edges) {
      const int a = find(e.from), b = find(e.to);
      for (auto [table, key, val] : {std::tuple{&out, a, b}, std::tuple{&in, b, a}}) {
        auto [it, fresh] = table->emplace(std::pair{key, e.label}, val);
        const int other = find(it->second);
        if (!fresh && other != find(val)) {
          parent[other] = find(val);
          changed = true;
        }
      }
    }
  }
  const bool forward = x % 2 == 0;
  const Letter label = forward ? x : inv(x);
  for (const Edge& e : edges) {
    const int from = find(forward ? e.from : e.to), to = find(forward ? e.to : e.from);
    if (e.label == label && from == find(0)) return to == find(0);
  }
  return false;
}

}  // namespace

Metric Metric::alt_generators(const Alphabet& alphabet, std::vector<Word> gens, int table_radius,
                              std::size_t search_cap) {
  Metric m(MetricKind::AltGen, alphabet);
  auto data = std::make_shared<AltGenData>();
  std::set<Word> uniq;
  for (auto& g : gens) {
    alphabet.check(g);
    Word r = reduce(g.letters);
    if (r.empty()) throw InputError("generating set may not contain the identity");
    uniq.insert(r);
  }
  for (auto& g : uniq)
    if (!uniq.count(inverse(g))) throw InputError("generating set must be closed under inverses");
  data->gens.assign(uniq.begin(), uniq.end());
  for (auto& g : data->gens) data->max_len = std::max(data->max_len, g.size());
  data->search_cap = search_cap;
  data->table_radius = table_radius;
  data->table = altgen_ball(*data, table_radius, search_cap);
  for (int x = 0; x < alphabet.size(); x += 2)
    if (!folded_graph_reads_letter(data->gens, static_cast<Letter>(x)))
      throw InputError("generating set does not reach generator '" + std::string(1, alphabet.symbol(x)) + "'");
  m.alt_ = data;
  return m;
}

const std::vector<double>& Metric::letter_weights() const {
  if (!is_tree()) throw InputError("letter weights exist only for tree metrics");
  return weights_;
}

double Metric::tree_length(std::span<const Letter> w) const {
  double s = 0.0;
  for (Letter x : w) s += weights_[x];
  return s;
}

double Metric::min_step() const {
  if (!is_tree()) return 1.0;
  return *std::min_element(weights_.begin(), weights_.end());
}

double Metric::max_step() const {
  if (!is_tree()) return 1.0;
  return *std::max_element(weights_.begin(), weights_.end());
}

double Metric::length(const Word& g) const {
  if (is_tree()) return tree_length(g.letters);
  return altgen_length(*alt_, g);
}

double Metric::distance(const Word& g, const Word& h) const {
  if (is_tree()) {
    const std::size_t k = common_prefix(g.letters, h.letters);
    return tree_length(std::span(g.letters).subspan(k)) + tree_length(std::span(h.letters).subspan(k));
  }
  return altgen_length(*alt_, mul(inverse(g), h));
}

const AltGenData& Metric::altgen() const {
  if (!alt_) throw InputError("metric has no alternate generating set");
  return *alt_;
}

const FirstPassage& Metric::first_passage() const {
  if (!green_) throw InputError("metric is not a Green metric");
  return *green_;
}

std::string Metric::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(rank=" << rank();
  if (kind_ == MetricKind::Weighted || kind_ == MetricKind::Green) {
    os << ", weights=";
    for (int i = 0; i < rank(); ++i) os << (i ? "," : "") << weights_[2 * i];
  }
  if (kind_ == MetricKind::AltGen) {
    os << ", gens=";
    for (std::size_t i = 0; i < alt_->gens.size(); ++i) os << (i ? "," : "") << alphabet_.format(alt_->gens[i]);
  }
  os << ")";
  return os.str();
}

std::unordered_map<Word, int, WordHash> altgen_ball(const AltGenData& data, int radius, std::size_t cap) {
  std::unordered_map<Word, int, WordHash> dist;
  dist.emplace(Word{}, 0);
  std::vector<Word> frontier{Word{}};
  for (int r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Word> next;
    for (const Word& u : frontier)
      for (const Word& s : data.gens) {
        Word v = mul(u, s);
        if (dist.emplace(v, r + 1).second) {
          if (dist.size() > cap)
            throw ResourceError("alternate-generator ball exceeds the element cap of " + std::to_string(cap));
          next.push_back(std::move(v));
        }
      }
    frontier.swap(next);
  }
  return dist;
}

namespace {

// Breadth-first search restricted to words within tree distance `radius` of the tree geodesic [e, g].
int tube_search(const AltGenData& data, const Word& g, std::size_t radius) {
  auto off = [&](const Word& h) { return h.size() - common_prefix(h.letters, g.letters); };
  std::unordered_map<Word, int, WordHash> seen{{Word{}, 0}};
  std::vector<Word> frontier{Word{}};
  for (int d = 0; !frontier.empty(); ++d) {
    std::vector<Word> next;
    for (const Word& u : frontier)
      for (const Word& s : data.gens) {
        Word v = mul(u, s);
        if (v == g) return d + 1;
        if (off(v) > radius || !seen.emplace(v, d + 1).second) continue;
        if (seen.size() > data.search_cap)
          throw ResourceError("alternate-generator distance search exceeds the cap of " +
                              std::to_string(data.search_cap) + " nodes");
        next.push_back(std::move(v));
      }
    frontier.swap(next);
  }
  return -1;
}

}  // namespace

int altgen_length(const AltGenData& data, const Word& g) {
  if (auto it = data.table.find(g); it != data.table.end()) return it->second;
  {
    std::lock_guard lock(data.memo_mutex);
    if (auto it = data.memo.find(g); it != data.memo.end()) return it->second;
  }
  // Widen the tube until two consecutive radii give the same length.
  std::size_t radius = 2 * data.max_len;
  int best = tube_search(data, g, radius);
  for (;;) {
    radius += data.max_len;
    const int wider = tube_search(data, g, radius);
    if (wider == best && best >= 0) break;
    best = wider;
  }
  std::lock_guard lock(data.memo_mutex);
  data.memo.emplace(g, best);
  return best;
}

double gromov_product(const Metric& metric, const Word& x, const Word& y, const Word& base) {
  return 0.5 * (metric.distance(x, base) + metric.distance(y, base) - metric.distance(x, y));
}

HyperbolicityReport hyperbolicity_constant(const Metric& metric, double radius, std::uint64_t triple_budget,
                                           std::uint64_t samples, std::uint64_t seed) {
  const BallIndex ball = enumerate_ball(metric, radius);
  const std::size_t n = ball.elements.size();
  HyperbolicityReport rep;
  rep.sample_radius = radius;
  rep.ball_size = n;

  std::unordered_map<Word, int, WordHash> wide;
  if (!metric.is_tree()) {
    const int steps = static_cast<int>(std::floor(radius + kLengthTol));
    wide = altgen_ball(metric.altgen(), 2 * steps, kDefaultElementCap);
  }
  auto dist = [&](std::size_t i, std::size_t j) -> double {
    const Word& a = ball.elements[i].g;
    const Word& b = ball.elements[j].g;
    if (metric.is_tree()) return metric.distance(a, b);
    return wide.at(mul(inverse(a), b));
  };
  // Index 0 is e: the unique element of length 0.
  std::vector<double> from_e(n);
  for (std::size_t i = 0; i < n; ++i) from_e[i] = ball.elements[i].length;
  auto prod = [&](std::size_t x, std::size_t y) { return 0.5 * (from_e[x] + from_e[y] - dist(x, y)); };

  const double triples = double(n) * double(n) * double(n);
  if (triples <= double(triple_budget) && n <= 8192) {
    rep.exhaustive = true;
    rep.tested = std::uint64_t(n) * n * n;
    std::vector<double> P(n * n);
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j) P[i * n + j] = prod(i, j);
    });
    std::vector<double> best(n, 0.0);
    parallel_for(n, [&](std::size_t x) {
      const double* px = &P[x * n];
      double b = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        const double pxy = px[y];
        const double* py = &P[y * n];
        for (std::size_t z = 0; z < n; ++z) b = std::max(b, std::min(pxy, py[z]) - px[z]);
      }
      best[x] = b;
    });
    rep.constant_estimate = *std::max_element(best.begin(), best.end());
  } else {
    rep.exhaustive = false;
    rep.tested = samples;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    double b = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const std::size_t x = pick(rng), y = pick(rng), z = pick(rng);
      b = std::max(b, std::min(prod(x, y), prod(y, z)) - prod(x, z));
    }
    rep.constant_estimate = b;
  }
  rep.constant_estimate = std::max(0.0, rep.constant_estimate);
  return rep;
}

double median_threshold(const HyperbolicityReport& report) { return 2.0 * report.constant_estimate + 1.0; }

namespace {

Word as_word(const MedianArg& a, std::size_t depth) {
  if (const Word* w = std::get_if<Word>(&a)) return *w;
  return std::get<BoundaryPoint>(a).prefix(depth);
}

void extend_halo(const Word& center, int halo, int rank, std::set<Word>& out) {
  std::vector<Word> layer{Word{}};
  for (int r = 0; r <= halo; ++r) {
    std::vector<Word> next;
    for (const Word& y : layer) {
      out.insert(mul(center, y));
      if (r < halo)
        for (Letter x : successors(y, rank)) {
          Word z = y;
          z.letters.push_back(x);
          next.push_back(std::move(z));
        }
    }
    layer.swap(next);
  }
}

}  // namespace

AlmostMedian almost_median(const Metric& metric, const MedianArg& x1, const MedianArg& x2, const MedianArg& x3, double D,
                           std::size_t depth, int halo) {
  if (!(D > 0.0)) throw InputError("almost-median threshold D must be positive");
  if (halo < 0) halo = metric.is_tree() ? 0 : 2;
  const Word p[3] = {as_word(x1, depth), as_word(x2, depth), as_word(x3, depth)};
  std::set<Word> cand;
  for (const Word& w : p)
    for (std::size_t i = 0; i <= w.size(); ++i) extend_halo(truncate(w, i), halo, metric.rank(), cand);
  std::vector<std::pair<double, Word>> order;
  for (const Word& c : cand) order.emplace_back(metric.length(c), c);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.first - b.first) > kLengthTol) return a.first < b.first;
    return a.second < b.second;
  });
  for (const auto& [len, m] : order) {
    if (gromov_product(metric, p[0], p[1], m) < D && gromov_product(metric, p[1], p[2], m) < D &&
        gromov_product(metric, p[0], p[2], m) < D)
      return {m, D};
  }
  throw DomainError("no almost-median below D=" + std::to_string(D) + " at depth " + std::to_string(depth) +
                    " (depth insufficient)");
}

TreeGeodesic tree_geodesic(const BoundaryPoint& xi, const BoundaryPoint& eta, std::size_t depth) {
  const Word a = xi.prefix(depth), b = eta.prefix(depth);
  const std::size_t c = common_prefix(a.letters, b.letters);
  if (c >= depth) throw DomainError("endpoints coincide to depth " + std::to_string(depth));
  return {c, truncate(a, c)};
}

Word geodesic_point_pi(const Metric& metric, const BoundaryPoint& xi, const BoundaryPoint& eta, double t,
                       std::size_t depth) {
  if (!std::isfinite(t)) throw InputError("geodesic parameter must be finite");
  const TreeGeodesic geo = tree_geodesic(xi, eta, depth);
  const Word& m = geo.median;
  constexpr std::size_t kMaxSteps = 1'000'000;
  if (t >= 0.0) {
    // Walk toward eta while the next vertex's parameter stays <= t.
    Word v = m;
    std::size_t want = geo.median_len + 8;
    Word ray = eta.prefix(want);
    for (std::size_t j = geo.median_len + 1; j < kMaxSteps; ++j) {
      if (j > ray.size()) ray = eta.prefix(want *= 2);
      Word next = truncate(ray, j);
      if (metric.distance(m, next) > t + kLengthTol) return v;
      v = std::move(next);
    }
    throw ResourceError("geodesic walk exceeded step cap");
  }
  std::size_t want = geo.median_len + 8;
  Word ray = xi.prefix(want);
  for (std::size_t j = geo.median_len + 1; j < kMaxSteps; ++j) {
    if (j > ray.size()) ray = xi.prefix(want *= 2);
    Word v = truncate(ray, j);
    if (-metric.distance(m, v) <= t + kLengthTol) return v;
  }
  throw ResourceError("geodesic walk exceeded step cap");
}

}  // namespace hypererg
