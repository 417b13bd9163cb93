#include "hypererg/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

#include "hypererg/bms.hpp"
#include "hypererg/ergodic.hpp"
#include "hypererg/errors.hpp"
#include "hypererg/parallel.hpp"
#include "hypererg/patterson_sullivan.hpp"

#ifndef HYPERERG_VERSION
#define HYPERERG_VERSION "dev"
#endif

namespace hypererg {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"growth",  "ps",        "rncheck",     "ahlfors", "bms",
                                              "normalize", "flow",    "ergavg",      "slices",  "lebesgue",
                                              "contraction", "sat",   "rotation",    "hypcheck"};
  return names;
}

namespace {

class Reports {
 public:
  explicit Reports(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write report '" + (dir_ / name).string() + "'");
    f << content;
    outputs_.push_back(name);
  }
  void json(const std::string& name, const ojson& j) { write(name, j.dump(2) + "\n"); }

  const std::vector<std::string>& outputs() const { return outputs_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> outputs_;
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::string num(double x) { return format_number(x); }

// Context shared by the subcommands.
struct Job {
  ExperimentConfig cfg;
  Metric metric;
  Reports& out;

  std::size_t depth() const { return cfg.depths.boundary_depth; }
  std::string fmt(const Word& w) const { return metric.alphabet().format(w); }

  PSMeasure ps() const {
    if (cfg.raw.has("ps.input")) {
      std::ifstream f(cfg.raw.str("ps.input"), std::ios::binary);
      if (!f) throw InputError("cannot read ps.input '" + cfg.raw.str("ps.input") + "'");
      std::ostringstream ss;
      ss << f.rdbuf();
      return PSMeasure::from_json(ss.str());
    }
    PSOptions o;
    const std::string method = cfg.raw.str("ps.method", "markov");
    if (method == "weakstar")
      o.method = PSMethod::WeakStar;
    else if (method != "markov")
      throw InputError("config field 'ps.method' must be markov or weakstar (got '" + method + "')");
    o.R = cfg.raw.real("ps.R", o.R);
    o.s_offsets = cfg.raw.reals("ps.s_offsets", o.s_offsets);
    o.delta_hat = cfg.raw.real("ps.delta_hat", o.delta_hat);
    o.consistency_tol = cfg.tolerance("ps_consistency", o.consistency_tol);
    o.cap = cfg.element_cap;
    const auto resolution = static_cast<std::size_t>(cfg.raw.integer("ps.resolution", cfg.depths.pair_resolution));
    return ps_cylinder_masses(metric, resolution, o);
  }

  BMSMeasure bms(const PSMeasure& ps) const {
    BMSMeasure b;
    b.ps = ps;
    b.c_F = cfg.raw.real("bms.c_F", 2.0);
    b.pair_resolution = cfg.depths.pair_resolution;
    return b;
  }

  FundamentalDomainOptions domain_options() const {
    FundamentalDomainOptions o;
    o.t_span = cfg.raw.real("normalize.t_span", o.t_span);
    o.overlap_samples = static_cast<std::size_t>(cfg.raw.integer("normalize.overlap_samples", 256));
    o.seed = cfg.seed;
    o.depth = depth();
    return o;
  }

  std::vector<int> ints(const std::string& key, std::vector<int> fallback) const {
    if (!cfg.raw.has(key)) return fallback;
    std::vector<int> v;
    for (double x : cfg.raw.reals(key)) {
      if (x != std::floor(x)) throw InputError("config field '" + key + "' must hold integers");
      v.push_back(static_cast<int>(x));
    }
    return v;
  }
};

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

void cmd_growth(Job& job) {
  const auto est = growth_exponent(job.metric, job.cfg.depths.R_max, job.cfg.element_cap);
  ojson j;
  j["metric"] = job.metric.describe();
  j["R_max"] = est.R_max;
  j["delta_hat"] = est.delta;
  j["band"] = est.band;
  j["first_half_slope"] = est.first_half_slope;
  j["second_half_slope"] = est.second_half_slope;
  j["ball_size"] = est.ball_size;
  Csv csv({"R", "log_count"});
  for (const auto& [R, lc] : est.points) csv.row({num(R), num(lc)});
  std::optional<double> perron;
  if (job.metric.is_tree()) {
    perron = perron_exponent(job.metric);
    j["perron_exponent"] = *perron;
    j["abs_error"] = std::abs(est.delta - *perron);
  }
  job.out.json("growth.json", j);
  job.out.write("growth.csv", csv.str());
  const double tol = job.cfg.tolerance("growth", 0.03);
  if (perron && std::abs(est.delta - *perron) > tol)
    throw AssertionFailure("growth estimate " + num(est.delta) + " misses the Perron root " + num(*perron) +
                           " by more than " + num(tol));
}

void cmd_ps(Job& job) {
  const PSMeasure ps = job.ps();
  job.out.write("ps.json", ps.to_json(job.metric.alphabet()) + "\n");
}

void cmd_rncheck(Job& job) {
  const PSMeasure ps = job.ps();
  const auto max_len = static_cast<std::size_t>(job.cfg.raw.integer("rncheck.max_len", 4));
  const auto per_depth = static_cast<std::size_t>(job.cfg.raw.integer("rncheck.samples", 3));
  auto kernel = std::make_shared<const MarkovKernel>(ps.kernel());
  Csv csv({"g", "cylinder", "ratio", "predicted", "log_gap"});
  double worst = 0;
  std::uint64_t index = 0;
  for (std::size_t L = 0; L <= max_len; ++L)
    for (const Word& g : words_of_length(job.metric.rank(), L))
      for (std::size_t d = L + 1; d <= L + 3; ++d)
        for (std::size_t s = 0; s < per_depth; ++s) {
          const Word c = sample_ray(kernel, job.cfg.seed, index++).prefix(d);
          const auto r = rn_derivative_check(ps, job.metric, g, Cylinder(c));
          worst = std::max(worst, std::abs(r.log_gap));
          csv.row({job.fmt(g), job.fmt(c), num(r.ratio), num(r.predicted), num(r.log_gap)});
        }
  job.out.write("rncheck.csv", csv.str());
  const double tol = job.cfg.tolerance("rn", 1e-12);
  if (job.metric.is_tree() && worst > tol)
    throw AssertionFailure("Radon-Nikodym log gap " + num(worst) + " exceeds " + num(tol));
}

void cmd_ahlfors(Job& job) {
  const PSMeasure ps = job.ps();
  const auto rows = ahlfors_check(ps, job.cfg.point("ahlfors.xi", "a(b)"), job.ints("ahlfors.t", range(1, 6)));
  Csv csv({"t", "mass", "reference", "log_gap"});
  double lo = kInfiniteProduct, hi = -kInfiniteProduct;
  for (const auto& r : rows) {
    csv.row({std::to_string(r.t), num(r.mass), num(r.reference), num(r.log_gap)});
    if (r.t == 0) continue;  // the whole boundary
    lo = std::min(lo, r.log_gap);
    hi = std::max(hi, r.log_gap);
  }
  job.out.write("ahlfors.csv", csv.str());
  const double tol = job.cfg.tolerance("ahlfors", 1e-9);
  // Cylinders are cut by letter count, so only the word metric makes the gap exactly constant.
  if (job.metric.kind() == MetricKind::Word && hi - lo > tol)
    throw AssertionFailure("Ahlfors log gap varies by " + num(hi - lo) + " > " + num(tol));
}

void cmd_bms(Job& job) {
  const BMSMeasure b = job.bms(job.ps());
  job.out.write("bms.json", b.to_json() + "\n");
  const double defect = bms_invariance_defect(job.metric, b.ps, b.c_F, b.pair_resolution, job.cfg.depths.word_bound);
  ojson j;
  j["c_F"] = b.c_F;
  j["pair_resolution"] = b.pair_resolution;
  j["word_bound"] = job.cfg.depths.word_bound;
  j["invariance_defect"] = defect;
  job.out.json("bms_invariance.json", j);
  const auto cob = cobound_phi(job.metric, b.ps, b.c_F, b.pair_resolution, job.cfg.depths.word_bound);
  Csv csv({"word_bound", "sup_cocycle"});
  for (std::size_t i = 0; i < cob.sup_by_bound.size(); ++i) csv.row({std::to_string(i), num(cob.sup_by_bound[i])});
  job.out.write("cobound.csv", csv.str());
  const double tol = job.cfg.tolerance("bms", 1e-12);
  if (defect > tol) throw AssertionFailure("BMS invariance defect " + num(defect) + " exceeds " + num(tol));
}

void cmd_normalize(Job& job) {
  const BMSMeasure b = job.bms(job.ps());
  const auto opt = job.domain_options();
  const auto r = fundamental_domain_mass(b, job.metric, opt);
  BMSMeasure n = b;
  n.normalization = r.scale;
  ojson j;
  j["t_span"] = opt.t_span;
  j["raw_mass"] = r.raw_mass;
  j["scale"] = r.scale;
  j["samples_checked"] = r.samples_checked;
  job.out.json("normalize.json", j);
  job.out.write("bms.json", n.to_json() + "\n");
}

void cmd_flow(Job& job) {
  const PSMeasure ps = job.ps();
  FlowPoint x{job.cfg.point("flow.xi", "(b)"), job.cfg.point("flow.eta", "(a)"), job.cfg.raw.real("flow.t0", 0.0)};
  std::vector<double> times = job.cfg.raw.reals("flow.t");
  if (times.empty()) {
    const double step = job.cfg.raw.real("flow.step", 0.5);
    if (!(step > 0)) throw InputError("config field 'flow.step' must be positive");
    for (int i = 0; i * step <= job.cfg.depths.T_max + 1e-12; ++i) times.push_back(i * step);
  }
  const auto prefix_len = static_cast<std::size_t>(job.cfg.raw.integer("flow.prefix_len", 8));
  Csv csv({"t", "gamma_word", "xi_prefix", "eta_prefix"});
  for (double t : times) {
    const auto s = flow_cocycle(job.metric, ps, x, t, job.depth());
    csv.row({num(t), job.fmt(s.gamma), job.fmt(s.landed.xi.prefix(prefix_len)), job.fmt(s.landed.eta.prefix(prefix_len))});
  }
  job.out.write("flow.csv", csv.str());
}

void cmd_ergavg(Job& job) {
  const PSMeasure ps = job.ps();
  const BMSMeasure b = normalize(job.bms(ps), job.metric, job.domain_options());
  const double K = job.cfg.raw.real("ergavg.K", 0.0);
  const PairStepFunction f = PairStepFunction::product_at_most(job.metric, K);
  const auto xi = job.cfg.point("ergavg.xi", "(b)");
  const auto eta = job.cfg.point("ergavg.eta", "(a)");
  const std::vector<double> T = job.cfg.raw.reals("ergavg.T", {job.cfg.depths.T_max});
  std::vector<Variant> variants;
  for (const auto& v : job.cfg.raw.list("ergavg.variants", {"tau", "sigma_xi", "sigma_eta", "half_difference"}))
    variants.push_back(parse_variant(v));
  ErgodicOptions opt;
  opt.max_T = job.cfg.T_cap;
  opt.cap = job.cfg.element_cap;
  const std::string seed = std::to_string(job.cfg.seed);
  Csv csv({"variant", "T", "value", "target", "seed"});
  std::map<Variant, ErgodicAverageReport> reports;
  for (Variant v : variants) {
    auto r = ergodic_average(job.metric, b, f, xi, eta, v, T, job.depth(), opt);
    for (std::size_t i = 0; i < T.size(); ++i) csv.row({to_string(v), num(T[i]), num(r.values[i]), num(r.target), seed});
    reports.emplace(v, std::move(r));
  }
  job.out.write("ergodic.csv", csv.str());

  const auto pairs = static_cast<std::size_t>(job.cfg.raw.integer("ergavg.pairs", 0));
  std::optional<ConcentrationReport> conc;
  if (pairs > 0) {
    conc = concentration_check(job.metric, b, f, Variant::Tau, T.back(), pairs, job.cfg.seed, job.depth());
    Csv c({"pair", "value", "seed"});
    for (std::size_t i = 0; i < conc->values.size(); ++i) c.row({std::to_string(i), num(conc->values[i]), seed});
    job.out.write("concentration.csv", c.str());
    ojson j;
    j["T"] = T.back();
    j["pairs"] = pairs;
    j["mean"] = conc->mean;
    j["sd"] = conc->sd;
    j["relative_sd"] = conc->sd / conc->mean;
    job.out.json("concentration.json", j);
  }

  // Variants against the tau variant: |difference| <= (2C/T) target with C = max(1, parameter gap).
  if (reports.count(Variant::Tau)) {
    const auto& base = reports.at(Variant::Tau);
    for (const auto& [v, r] : reports) {
      const double C = std::max(1.0, r.parameter_gap);
      for (std::size_t i = 0; i < T.size(); ++i) {
        const double band = 2 * C / T[i] * r.target;
        if (std::abs(r.values[i] - base.values[i]) > band + 1e-12)
          throw AssertionFailure("variant " + to_string(v) + " at T = " + num(T[i]) + " differs from tau by " +
                                 num(std::abs(r.values[i] - base.values[i])) + " > " + num(band));
      }
    }
  }
  if (conc) {
    const double tol = job.cfg.tolerance("concentration", 0.10);
    if (conc->sd > tol * conc->mean)
      throw AssertionFailure("concentration sd " + num(conc->sd) + " exceeds " + num(tol) + " of the mean " +
                             num(conc->mean));
  }
}

void cmd_slices(Job& job) {
  const PSMeasure ps = job.ps();
  const auto x_plus = job.cfg.point("slices.x_plus", "(a)");
  Csv csv({"n", "k", "mass", "sigma"});
  for (int n : job.ints("slices.n", {3})) {
    const auto rep = slice_partition(job.metric, ps, x_plus, n);
    for (const auto& r : rep.rows)
      csv.row({std::to_string(n), std::to_string(r.k), num(r.mass), r.sigma ? num(*r.sigma) : "nan"});
  }
  job.out.write("slices.csv", csv.str());
}

void cmd_lebesgue(Job& job) {
  const PSMeasure ps = job.ps();
  const auto E = job.cfg.words("lebesgue.E", {"a"});
  const auto x_plus = job.cfg.point("lebesgue.x_plus", "(a)");
  const auto ns = job.ints("lebesgue.n", range(0, 8));
  std::size_t deepest = 0;
  for (const Word& w : E) deepest = std::max(deepest, w.size());
  const Word xp = x_plus.prefix(deepest);
  double indicator = 0;
  for (const Word& w : E)
    if (has_prefix(xp, w)) indicator = 1;
  const auto masses = lebesgue_pushforward_probe(job.metric, ps, E, x_plus, ns);
  Csv csv({"n", "mass", "indicator"});
  bool monotone = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    csv.row({std::to_string(ns[i]), num(masses[i]), num(indicator)});
    if (i && std::abs(masses[i] - indicator) > std::abs(masses[i - 1] - indicator) + 1e-12) monotone = false;
  }
  job.out.write("lebesgue.csv", csv.str());
  if (!monotone) throw AssertionFailure("nu(gamma_n E) does not approach the indicator monotonically");
}

void cmd_contraction(Job& job) {
  const PSMeasure ps = job.ps();
  const double K = job.cfg.raw.real("contraction.K", 1.0);
  const auto count = static_cast<std::size_t>(job.cfg.raw.integer("contraction.samples", 1000));
  const double alpha = job.cfg.raw.real("contraction.alpha", std::exp(-1.0));
  const auto r = contraction_sample(job.metric, ps, K, count, job.cfg.seed, job.depth(), alpha);
  ojson j;
  j["K"] = K;
  j["alpha"] = alpha;
  j["C"] = r.C;
  j["requested"] = count;
  j["admissible"] = r.admissible;
  j["attempts"] = r.attempts;
  j["violations"] = r.violations;
  job.out.json("contraction.json", j);
  if (r.violations) throw AssertionFailure(std::to_string(r.violations) + " contraction violations");
  if (r.admissible < count)
    throw ResourceError("only " + std::to_string(r.admissible) + " admissible samples within the attempt budget");
}

void cmd_sat(Job& job) {
  const PSMeasure ps = job.ps();
  const auto A = job.cfg.words("sat.A", {"a"});
  const double eps = job.cfg.raw.real("sat.epsilon", 0.05);
  const auto bound = static_cast<std::size_t>(job.cfg.raw.integer("sat.candidate_bound", 6));
  const auto r = sat_search(ps, A, eps, bound);
  std::string a;
  for (const Word& w : A) a += (a.empty() ? "" : ";") + job.fmt(w);
  Csv csv({"A", "epsilon", "g", "mass"});
  csv.row({a, num(eps), r.found ? job.fmt(r.g) : "none", r.found ? num(r.mass) : "nan"});
  job.out.write("sat.csv", csv.str());
  if (!r.found)
    throw AssertionFailure("no g with |g| <= " + std::to_string(bound) + " pushes the set above 1 - " + num(eps));
}

void cmd_rotation(Job& job) {
  const PSMeasure ps = job.ps();
  const auto samples = static_cast<std::size_t>(job.cfg.raw.integer("rotation.samples", 10000));
  const auto max_len = static_cast<std::size_t>(job.cfg.raw.integer("rotation.max_word_len", 6));
  const auto r = rotation_factor_check(job.metric, ps, samples, job.cfg.seed, max_len, job.depth());
  ojson j;
  j["samples"] = r.samples;
  j["all_integral"] = r.all_integral;
  j["max_fractional_part"] = r.max_fractional_part;
  j["witness"] = {{"g", job.fmt(r.witness_g)}, {"xi", r.witness_xi}, {"eta", r.witness_eta}, {"tau", r.witness_tau}};
  job.out.json("rotation.json", j);
  if (job.cfg.raw.has("rotation.expect_integral")) {
    const bool expect = job.cfg.raw.flag("rotation.expect_integral", true);
    if (expect != r.all_integral)
      throw AssertionFailure(expect ? "found a non-integral tau value" : "no non-integral tau witness found");
  }
}

void cmd_hypcheck(Job& job) {
  const double radius = job.cfg.raw.real("hypcheck.radius", 4.0);
  const auto budget = static_cast<std::uint64_t>(job.cfg.raw.integer("hypcheck.triple_budget", 400'000'000));
  const auto samples = static_cast<std::uint64_t>(job.cfg.raw.integer("hypcheck.samples", 2'000'000));
  const auto r = hyperbolicity_constant(job.metric, radius, budget, samples, job.cfg.seed);
  ojson j;
  j["metric"] = job.metric.describe();
  j["radius"] = radius;
  j["ball_size"] = r.ball_size;
  j["exhaustive"] = r.exhaustive;
  j["tested"] = r.tested;
  j["constant_estimate"] = r.constant_estimate;
  j["median_threshold"] = median_threshold(r);
  job.out.json("hypcheck.json", j);
}

const std::map<std::string, std::function<void(Job&)>>& table() {
  static const std::map<std::string, std::function<void(Job&)>> t{
      {"growth", cmd_growth},     {"ps", cmd_ps},           {"rncheck", cmd_rncheck},
      {"ahlfors", cmd_ahlfors},   {"bms", cmd_bms},         {"normalize", cmd_normalize},
      {"flow", cmd_flow},         {"ergavg", cmd_ergavg},   {"slices", cmd_slices},
      {"lebesgue", cmd_lebesgue}, {"contraction", cmd_contraction}, {"sat", cmd_sat},
      {"rotation", cmd_rotation}, {"hypcheck", cmd_hypcheck}};
  return t;
}

const char* status_name(int code) {
  switch (code) {
    case 0: return "ok";
    case 1: return "assertion_failure";
    case 2: return "input_error";
    case 3: return "resource_cap";
  }
  return "unknown";
}

RunResult execute(const std::string& subcommand, const std::function<Config()>& load, const std::string& origin,
                  std::optional<std::uint64_t> seed, const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  std::map<std::string, std::string> echo;
  std::optional<std::uint64_t> used_seed;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  Reports out{fs::path(out_dir)};
  try {
    if (!table().count(subcommand)) throw InputError("unknown subcommand '" + subcommand + "'");
    const Config raw = load();
    echo = raw.entries();
    ExperimentConfig cfg = ExperimentConfig::from(raw, seed);
    echo = cfg.raw.entries();
    used_seed = cfg.seed;
    Job job{cfg, cfg.metric(), out};
    table().at(subcommand)(job);
    res.exit_code = 0;
  } catch (const Error& e) {
    res.exit_code = static_cast<int>(e.tier());
    res.message = e.what();
  } catch (const nlohmann::json::exception& e) {
    res.exit_code = 2;
    res.message = std::string("malformed JSON input: ") + e.what();
  } catch (const std::bad_alloc&) {
    res.exit_code = 3;
    res.message = "out of memory";
  } catch (const std::exception& e) {
    res.exit_code = 1;
    res.message = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ojson m;
  m["tool"] = "hypererg";
  m["subcommand"] = subcommand;
  m["status"] = status_name(res.exit_code);
  m["exit_code"] = res.exit_code;
  m["message"] = res.message;
  m["config_path"] = origin;
  m["config"] = echo;
  m["seed"] = used_seed ? ojson(*used_seed) : ojson(nullptr);
  m["outputs"] = out.outputs();
  m["versions"] = {{"hypererg", HYPERERG_VERSION},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__clang__)
                   {"compiler", std::string("clang ") + __clang_version__},
#elif defined(__GNUC__)
                   {"compiler", std::string("gcc ") + __VERSION__},
#else
                   {"compiler", "unknown"},
#endif
                   {"cxx_standard", static_cast<long>(__cplusplus)}};
  m["threads"] = thread_count();
  m["wall_time_seconds"] = wall;
  res.outputs = out.outputs();
  try {
    out.json("manifest.json", m);
    res.outputs.push_back("manifest.json");
  } catch (const Error& e) {
    if (res.exit_code == 0) res.exit_code = 2;
    res.message += (res.message.empty() ? "" : "; ") + std::string(e.what());
  }
  return res;
}

}  // namespace

RunResult run(const std::string& subcommand, const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  return execute(subcommand, [&] { return Config::load(config_path); }, config_path, seed, out_dir);
}

RunResult run_config(const std::string& subcommand, const Config& config, std::optional<std::uint64_t> seed,
                     const std::string& out_dir) {
  return execute(subcommand, [&] { return config; }, config.origin(), seed, out_dir);
}

}  // namespace hypererg
