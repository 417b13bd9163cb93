#include "hypererg/bms.hpp"

#include <algorithm>
#include <cmath>

#include "hypererg/errors.hpp"
#include "json.hpp"

namespace hypererg {

FlowPoint flip(const FlowPoint& p) { return {p.eta, p.xi, -p.t}; }

FlowPoint flow(const FlowPoint& p, double s) { return {p.xi, p.eta, p.t + s}; }

std::string BMSMeasure::to_json() const {
  nlohmann::ordered_json j;
  j["delta"] = ps.delta();
  j["c_F"] = c_F;
  j["normalization"] = normalization;
  j["pair_resolution"] = pair_resolution;
  return j.dump(2);
}

BMSMeasure BMSMeasure::from_json(const std::string& text, PSMeasure ps) {
  try {
    const auto j = nlohmann::json::parse(text);
    BMSMeasure b;
    b.ps = std::move(ps);
    b.c_F = j.at("c_F").get<double>();
    b.normalization = j.at("normalization").get<double>();
    b.pair_resolution = j.at("pair_resolution").get<std::size_t>();
    if (!(b.normalization > 0)) throw InputError("BMS normalization must be positive");
    return b;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(std::string("BMS JSON is malformed: ") + e.what());
  }
}

double pair_product(const Metric& metric, const Word& u, const Word& v) {
  const std::size_t k = common_prefix(u.letters, v.letters);
  if (k >= u.size() || k >= v.size())
    throw DomainError("cylinder pair overlaps (" + metric.alphabet().format(u) + ", " + metric.alphabet().format(v) +
                      "); the diagonal is excluded");
  if (!metric.is_tree()) throw InputError("cylinder-pair products need a tree metric");
  return metric.tree_length(std::span(u.letters).first(k));
}

double pair_reference_mass(const Metric& metric, const PSMeasure& ps, double c_F, const std::vector<Word>& U,
                           const std::vector<Word>& V) {
  double s = 0;
  for (const Word& u : U) {
    const double mu = ps.mass(u);
    for (const Word& v : V) s += std::exp(c_F * ps.delta() * pair_product(metric, u, v)) * mu * ps.mass(v);
  }
  return s;
}

double bms_pair_mass(const BMSMeasure& bms, const Metric& metric, const Cylinder& u, const Cylinder& v) {
  return bms.normalization * pair_reference_mass(metric, bms.ps, bms.c_F, {u.word}, {v.word});
}

namespace {

std::vector<Word> words_up_to(int rank, std::size_t n) {
  std::vector<Word> out;
  for (std::size_t L = 0; L <= n; ++L)
    for (Word& w : words_of_length(rank, L)) out.push_back(std::move(w));
  return out;
}

// For every h with |h| <= max_len: log m(hU x hV) - log m(U x V) over all ordered distinct pairs.
// visit(h_index, pair_index, value)
template <class Visit>
void scan_cocycle(const Metric& metric, const PSMeasure& ps, double c_F, std::size_t resolution, const std::vector<Word>& hs,
                  Visit&& visit) {
  const int rank = metric.rank();
  const auto words = words_of_length(rank, resolution);
  std::vector<double> base;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < words.size(); ++j)
      if (i != j) {
        pairs.emplace_back(i, j);
        base.push_back(std::log(pair_reference_mass(metric, ps, c_F, {words[i]}, {words[j]})));
      }
  for (std::size_t hi = 0; hi < hs.size(); ++hi) {
    std::vector<std::vector<Word>> images(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) images[i] = image_cylinders(hs[hi], words[i], rank);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      visit(hi, p, std::log(pair_reference_mass(metric, ps, c_F, images[i], images[j])) - base[p]);
    }
  }
}

}  // namespace

double bms_invariance_defect(const Metric& metric, const PSMeasure& ps, double c_F, std::size_t resolution,
                             std::size_t max_len) {
  double worst = 0;
  scan_cocycle(metric, ps, c_F, resolution, words_up_to(metric.rank(), max_len),
               [&](std::size_t, std::size_t, double c) { worst = std::max(worst, std::abs(c)); });
  return worst;
}

CoboundReport cobound_phi(const Metric& metric, const PSMeasure& ps, double c_F, std::size_t pair_resolution,
                          std::size_t word_bound) {
  if (pair_resolution < 1) throw InputError("pair resolution must be at least 1");
  const int rank = metric.rank();
  const auto hs = words_up_to(rank, word_bound);
  const auto words = words_of_length(rank, pair_resolution);
  std::vector<double> sup_pair;
  std::vector<double> by_len(word_bound + 1, 0.0);
  scan_cocycle(metric, ps, c_F, pair_resolution, hs, [&](std::size_t h, std::size_t p, double c) {
    if (p >= sup_pair.size()) sup_pair.resize(p + 1, -std::numeric_limits<double>::infinity());
    sup_pair[p] = std::max(sup_pair[p], c);
    by_len[hs[h].size()] = std::max(by_len[hs[h].size()], std::abs(c));
  });
  CoboundReport r;
  double run = 0;
  for (double m : by_len) r.sup_by_bound.push_back(run = std::max(run, m));
  std::size_t p = 0;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < words.size(); ++j)
      if (i != j) r.phi[{words[i], words[j]}] = -sup_pair[p++];
  if (word_bound >= 2) {
    const double step = 0.25 * ps.delta() * metric.min_step();
    bool climbing = true;
    for (std::size_t b = 1; b <= word_bound; ++b)
      climbing = climbing && r.sup_by_bound[b] - r.sup_by_bound[b - 1] > step;
    if (climbing)
      throw BoundednessViolation("log cocycle of the pair density grows without bound: sup over |h| <= " +
                                 std::to_string(word_bound) + " reaches " + std::to_string(r.sup_by_bound.back()) +
                                 " with every increment above " + std::to_string(step) +
                                 " (exponent coefficient c_F = " + std::to_string(c_F) + ")");
  }
  return r;
}

double rho(const Metric& metric, const PSMeasure& ps, const Word& g, const BoundaryPoint& xi, std::size_t depth,
           RhoSource source) {
  if (source == RhoSource::Sigma) return sigma(metric, g, xi, depth).value;
  const Cylinder c(xi.prefix(g.size() + 1));
  return std::log(rn_derivative_check(ps, metric, g, c).ratio) / ps.delta();
}

double tau(const Metric& metric, const PSMeasure& ps, const Word& g, const BoundaryPoint& xi, const BoundaryPoint& eta,
           std::size_t depth, RhoSource source) {
  if (xi.same_to_depth(eta, depth)) throw DomainError("flow endpoints coincide to depth " + std::to_string(depth));
  return 0.5 * (rho(metric, ps, g, eta, depth, source) - rho(metric, ps, g, xi, depth, source));
}

FlowPoint gamma_act(const Metric& metric, const PSMeasure& ps, const Word& g, const FlowPoint& p, std::size_t depth,
                    RhoSource source) {
  const double shift = tau(metric, ps, g, p.xi, p.eta, depth, source);
  return {p.xi.translated(g), p.eta.translated(g), p.t + shift};
}

bool in_fundamental_domain(const Metric& metric, const FlowPoint& p, double t_span) {
  if (!metric.is_tree()) throw InputError("the fundamental domain is implemented for tree metrics only");
  const Letter x = p.xi.prefix(1)[0], y = p.eta.prefix(1)[0];
  if (x == y) return false;
  return p.t >= 0.0 && p.t < t_span * metric.letter_weight(y);
}

BoundaryPoint sample_ray(const std::shared_ptr<const MarkovKernel>& kernel, std::uint64_t seed, std::uint64_t index) {
  return BoundaryPoint::markov(splitmix64(seed ^ splitmix64(index ^ 0x5bd1e995ULL)), kernel);
}

Word sample_word(int rank, std::size_t max_len, std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t s = splitmix64(seed ^ splitmix64(index + 0x9e37ULL));
  const auto len = std::min<std::size_t>(max_len, static_cast<std::size_t>(unit_draw(s, 0) * (max_len + 1)));
  Word w;
  for (std::size_t i = 0; i < len; ++i) {
    const auto next = successors(w, rank);
    const auto k = std::min<std::size_t>(next.size() - 1, static_cast<std::size_t>(unit_draw(s, i + 1) * next.size()));
    w.letters.push_back(next[k]);
  }
  return w;
}

FundamentalDomainReport fundamental_domain_mass(const BMSMeasure& bms, const Metric& metric,
                                                const FundamentalDomainOptions& opt) {
  if (!metric.is_tree()) throw InputError("the fundamental domain is implemented for tree metrics only");
  if (!(opt.t_span > 0)) throw InputError("t_span must be positive");
  const int n = metric.alphabet().size();
  FundamentalDomainReport r;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y)
        r.raw_mass += bms.ps.mass(Word{static_cast<Letter>(x)}) * bms.ps.mass(Word{static_cast<Letter>(y)}) *
                      metric.letter_weight(static_cast<Letter>(y));
  r.raw_mass *= opt.t_span;
  r.scale = 1.0 / r.raw_mass;

  if (opt.overlap_samples > 0) {
    auto kernel = std::make_shared<const MarkovKernel>(bms.ps.kernel());
    const std::size_t reach = static_cast<std::size_t>(std::ceil(opt.t_span)) + 2;
    std::vector<Word> hs;
    for (std::size_t L = 1; L <= reach; ++L)
      for (Word& w : words_of_length(metric.rank(), L)) hs.push_back(std::move(w));
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < opt.overlap_samples; ++i) {
      FlowPoint p;
      do {
        p.xi = sample_ray(kernel, opt.seed, index++);
        p.eta = sample_ray(kernel, opt.seed, index++);
      } while (p.xi.prefix(1) == p.eta.prefix(1));
      p.t = unit_draw(opt.seed, index++) * opt.t_span * metric.letter_weight(p.eta.prefix(1)[0]);
      for (const Word& h : hs) {
        const FlowPoint q = gamma_act(metric, bms.ps, h, p, opt.depth);
        if (in_fundamental_domain(metric, q, opt.t_span))
          throw FundamentalDomainViolation("domain overlaps its translate by " + metric.alphabet().format(h) +
                                           " at sample " + std::to_string(i));
      }
      ++r.samples_checked;
    }
  }
  return r;
}

BMSMeasure normalize(const BMSMeasure& bms, const Metric& metric, const FundamentalDomainOptions& opt) {
  BMSMeasure out = bms;
  out.normalization = fundamental_domain_mass(bms, metric, opt).scale;
  return out;
}

FlowCocycleSample flow_cocycle(const Metric& metric, const PSMeasure& ps, const FlowPoint& x, double t, std::size_t depth) {
  if (!in_fundamental_domain(metric, x)) throw DomainError("flow cocycle needs a starting point in the fundamental domain");
  FlowCocycleSample s;
  s.t = t;
  s.x = x;
  s.gamma = inverse(geodesic_point_pi(metric, x.xi, x.eta, x.t + t, depth));
  s.landed = gamma_act(metric, ps, s.gamma, flow(x, t), depth);
  if (!in_fundamental_domain(metric, s.landed))
    throw ConsistencyError("flow cocycle element does not return the orbit to the fundamental domain");
  return s;
}

RotationReport rotation_factor_check(const Metric& metric, const PSMeasure& ps, std::size_t samples, std::uint64_t seed,
                                     std::size_t max_word_len, std::size_t depth) {
  auto kernel = std::make_shared<const MarkovKernel>(ps.kernel());
  RotationReport r;
  r.max_fractional_part = -1;
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Word g = sample_word(metric.rank(), max_word_len, seed, i);
    BoundaryPoint xi, eta;
    do {
      xi = sample_ray(kernel, seed, index++);
      eta = sample_ray(kernel, seed, index++);
    } while (xi.same_to_depth(eta, depth));
    const double t = tau(metric, ps, g, xi, eta, depth);
    const double frac = std::abs(t - std::round(t));
    if (frac > r.max_fractional_part) {
      r.max_fractional_part = frac;
      r.witness_g = g;
      r.witness_xi = xi.describe(metric.alphabet());
      r.witness_eta = eta.describe(metric.alphabet());
      r.witness_tau = t;
    }
    ++r.samples;
  }
  r.max_fractional_part = std::max(0.0, r.max_fractional_part);
  r.all_integral = r.max_fractional_part <= 1e-9;
  return r;
}

}  // namespace hypererg
