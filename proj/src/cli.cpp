#include "hyplab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hyplab/boundary.hpp"
#include "hyplab/boundary_rep.hpp"
#include "hyplab/decay.hpp"
#include "hyplab/density.hpp"
#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/fatou.hpp"
#include "hyplab/group.hpp"
#include "hyplab/poisson.hpp"
#include "hyplab/report.hpp"
#include "hyplab/schwartz.hpp"
#include "hyplab/step_function.hpp"

namespace hyplab {
namespace {

using nlohmann::json;

struct CommonOpts {
  std::string group = "free:2";
  int depth = 4;
  std::uint64_t seed = 7;
  int threads = 1;  // 0 = hardware concurrency; a sizing hint, results never depend on it
  double cap = 2e6;
  std::string out;     // path; the literals csv/json select a stdout format
  std::string format;  // explicit format, wins over --out
  bool timestamp = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--group", o.group, "group model: free:K or zfp:P,Q")->capture_default_str();
  cmd->add_option("--depth", o.depth, "cylinder depth for function inputs")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for every pseudo-random input")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker pool size hint (0 = hardware)")
      ->check(CLI::Range(0, 4096));
  cmd->add_option("--cap", o.cap, "enumeration size guard")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output file, or csv|json to pick a stdout format");
  cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--timestamp", o.timestamp, "stamp the report header with the UTC time");
}

std::string resolved_format(const CommonOpts& o) {
  if (!o.format.empty()) return o.format;
  if (o.out == "csv" || o.out == "json") return o.out;
  if (o.out.size() >= 5 && o.out.substr(o.out.size() - 5) == ".json") return "json";
  return "csv";
}

std::string resolved_path(const CommonOpts& o) {
  return (o.out == "csv" || o.out == "json") ? std::string{} : o.out;
}

int resolved_threads(const CommonOpts& o) {
  if (o.threads > 0) return o.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

ReportMeta make_meta(const std::string& command, const GroupModel& m, const CommonOpts& o) {
  ReportMeta meta;
  meta.command = command;
  meta.model = m.name();
  meta.alpha = m.alpha();
  meta.delta = m.delta();
  meta.c_q = ConformalDensity::exact(m).measure_conformality(2).c_q;
  meta.seed = o.seed;
  meta.threads = resolved_threads(o);
  meta.cap = o.cap;
  if (o.timestamp) meta.timestamp = iso8601_now();
  return meta;
}

int emit(const ReportMeta& meta, const ReportTable& table, const json& payload,
         const CommonOpts& o, bool ok) {
  const std::string text = resolved_format(o) == "json" ? json_document(meta, payload.dump())
                                                        : csv_document(meta, table);
  write_report(text, resolved_path(o));
  return ok ? 0 : 1;
}

Element el(const GroupModel& m, const Word& w) { return Element{m.key(), w}; }

Word random_word(const GroupModel& m, DetRng& rng, int len) {
  Word w;
  while (static_cast<int>(w.size()) < len) {
    const Letter s =
        static_cast<Letter>(rng.next_below(static_cast<std::uint64_t>(m.alphabet_size())));
    if (w.empty() || m.can_follow(w.back(), s)) w.push_back(s);
  }
  return w;
}

StepFunction random_function(const GroupModel& m, DetRng& rng, int depth, bool nonneg) {
  StepFunction f = StepFunction::constant(
      m,
      nonneg ? Complex{rng.next_unit(), 0.0} : Complex{rng.next_unit() - 0.5, rng.next_unit() - 0.5});
  for (int piece = 0; piece < 3; ++piece) {
    const int d = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(depth)));
    const Complex v = nonneg ? Complex{2.0 * rng.next_unit(), 0.0}
                             : Complex{2.0 * rng.next_unit() - 1.0, rng.next_unit() - 0.5};
    f = operator_add(m, f, StepFunction::indicator(m, random_word(m, rng, d), v));
  }
  return f;
}

// const:V | indicator:W | indicator:W:V
StepFunction parse_function(const GroupModel& m, const std::string& spec) {
  const auto bad = [&]() -> StepFunction {
    throw DegenerateInputError("unrecognized function spec '" + spec +
                               "' (use const:V or indicator:W[:V])");
  };
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) return bad();
  const std::string head = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (rest.empty()) return bad();
  if (head == "const") return StepFunction::constant(m, Complex{std::stod(rest), 0.0});
  if (head != "indicator") return bad();
  const std::size_t colon2 = rest.find(':');
  const std::string word = colon2 == std::string::npos ? rest : rest.substr(0, colon2);
  const double value = colon2 == std::string::npos ? 1.0 : std::stod(rest.substr(colon2 + 1));
  return StepFunction::indicator(m, m.word_parse(word), Complex{value, 0.0});
}

// W^inf = the periodic ray W.W.W...; a plain word takes the canonical tail
Direction parse_direction(const GroupModel& m, const std::string& spec) {
  const std::size_t caret = spec.find('^');
  if (caret == std::string::npos) return canonical_direction(m, m.word_parse(spec));
  if (spec.substr(caret + 1) != "inf")
    throw DegenerateInputError("unrecognized direction spec '" + spec + "' (use W or W^inf)");
  return periodic_direction(m, Word{}, m.word_parse(spec.substr(0, caret)));
}

StepFunction unit_l2(const ConformalDensity& mu, const StepFunction& f) {
  const double n = l2_norm(mu, f);
  if (n <= 1e-9) throw DegenerateInputError("cannot normalize a near-zero function");
  return f.map([n](Complex v) { return v / n; });
}

void require(bool cond, const std::string& message) {
  if (!cond) throw DegenerateInputError(message);
}

// ---- hc-function -----------------------------------------------------------

struct HcOpts {
  CommonOpts c;
  int max_n = 20;
  int exterior = 1;
};

int run_hc_function(const HcOpts& o) {
  require(o.exterior >= 1 && o.max_n > o.exterior && o.max_n <= 60,
          "hc-function: need 1 <= exterior < max-n <= 60");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity mu = ConformalDensity::exact(m);
  const HCEstimateFit fit = fit_harish_chandra_estimates(mu, o.exterior, o.max_n);

  ReportTable t;
  t.columns = {"n", "phi", "Q1_bound", "Q2_bound", "ratio_lower", "ratio_upper"};
  json rows = json::array();
  for (const auto& r : fit.rows) {
    t.rows.push_back({format_int(r.n), format_double(r.phi), format_double(r.q1_bound),
                      format_double(r.q2_bound), format_double(r.ratio_lower),
                      format_double(r.ratio_upper)});
    rows.push_back({{"n", r.n},
                    {"phi", r.phi},
                    {"q1_bound", r.q1_bound},
                    {"q2_bound", r.q2_bound},
                    {"ratio_lower", r.ratio_lower},
                    {"ratio_upper", r.ratio_upper}});
  }
  const json payload = {{"b1", fit.b1},       {"c1", fit.c1},
                        {"b2", fit.b2},       {"c2", fit.c2},
                        {"exterior_radius", fit.exterior_radius},
                        {"max_radius", fit.max_radius},
                        {"witness_count", fit.witness_count},
                        {"rows", rows}};
  return emit(make_meta("hc-function", m, o.c), t, payload, o.c, true);
}

// ---- density ---------------------------------------------------------------

struct DensityOpts {
  CommonOpts c;
  std::string kind = "orbit";
  double s = 0.0;  // 0 = alpha + 0.05
  int radius = 16;
};

int run_density(const DensityOpts& o) {
  require(o.c.depth >= 1 && o.c.depth <= 8, "density: need 1 <= depth <= 8");
  require(o.kind == "exact" || o.kind == "orbit", "density: kind must be exact or orbit");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity exact = ConformalDensity::exact(m);

  ReportTable t;
  json payload;
  if (o.kind == "exact") {
    t.columns = {"cylinder", "mass"};
    json rows = json::array();
    for (const auto& [w, mass] : exact.table({}, o.c.depth)) {
      t.rows.push_back({m.word_str(w), format_double(mass)});
      rows.push_back({{"cylinder", m.word_str(w)}, {"mass", mass}});
    }
    payload = {{"kind", "exact"}, {"depth", o.c.depth}, {"rows", rows}};
  } else {
    const double s = o.s > 0.0 ? o.s : m.alpha() + 0.05;
    require(s > m.alpha(), "density: orbit sums need s > alpha");
    const ConformalDensity nu = ConformalDensity::orbit(m, s, o.radius, o.c.depth, o.c.cap);
    t.columns = {"cylinder", "mass", "exact_mass", "abs_error"};
    json rows = json::array();
    double worst = 0.0;
    for (const auto& [w, mass] : nu.table({}, o.c.depth)) {
      const double ref = exact.mass_e(w);
      const double err = std::abs(mass - ref);
      worst = std::max(worst, err);
      t.rows.push_back(
          {m.word_str(w), format_double(mass), format_double(ref), format_double(err)});
      rows.push_back({{"cylinder", m.word_str(w)}, {"mass", mass}, {"exact_mass", ref}});
    }
    const int cq_depth = std::min(o.c.depth, 3);
    payload = {{"kind", "orbit"},
               {"s", s},
               {"ball_radius", o.radius},
               {"depth", o.c.depth},
               {"max_abs_error", worst},
               {"measured_c_q", nu.measure_conformality(cq_depth).c_q},
               {"conformality_depth", cq_depth},
               {"rows", rows}};
  }
  return emit(make_meta("density", m, o.c), t, payload, o.c, true);
}

// ---- fatou -----------------------------------------------------------------

struct FatouOpts {
  CommonOpts c;
  std::string f = "indicator:a";
  std::string v = "a^inf";
  double aperture = 1.0;
  int max_n = 25;
};

int run_fatou(const FatouOpts& o) {
  require(o.aperture > 0.0, "fatou: aperture must be positive");
  require(o.max_n >= 1 && o.max_n <= 60, "fatou: need 1 <= max-n <= 60");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity mu = ConformalDensity::exact(m);
  const StepFunction f = parse_function(m, o.f);
  const Direction dir = parse_direction(m, o.v);
  ApproachDomain dom;
  dom.target = dir;
  dom.aperture = o.aperture;
  dom.params = VisualMetricParams::standard(m);
  dom.validate(m);
  const Complex target = f.value_at(dir);

  ReportTable t;
  t.columns = {"n", "y_word", "in_domain", "P0f", "error"};
  json rows = json::array();
  for (int n = 1; n <= o.max_n; ++n) {
    const Word y = dir.prefix(n);
    const bool member = in_domain(m, dom, y);
    const Complex val = normalized_poisson(mu, f, el(m, y));
    const double err = std::abs(val - target);
    t.rows.push_back({format_int(n), m.word_str(y), format_bool(member),
                      format_double(val.real()), format_double(err)});
    rows.push_back({{"n", n},
                    {"y", m.word_str(y)},
                    {"in_domain", member},
                    {"value", val.real()},
                    {"error", err}});
  }
  const json payload = {{"f", o.f},
                        {"direction", o.v},
                        {"aperture", o.aperture},
                        {"target_value", target.real()},
                        {"rows", rows}};
  return emit(make_meta("fatou", m, o.c), t, payload, o.c, true);
}

// ---- maximal ---------------------------------------------------------------

struct MaximalOpts {
  CommonOpts c;
  int trials = 20;
  int levels = 10;
  double epsilon = 1.0;
};

int run_maximal(const MaximalOpts& o) {
  require(o.epsilon > 0.0 && o.epsilon <= 1.0, "maximal: epsilon must lie in (0, 1]");
  require(o.c.depth >= 1 && o.c.depth <= 8, "maximal: need 1 <= depth <= 8");
  require(o.trials >= 0 && o.trials <= 200, "maximal: need 0 <= trials <= 200");
  require(o.levels >= 1 && o.levels <= 24, "maximal: need 1 <= levels <= 24");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity mu = ConformalDensity::exact(m);
  DetRng rng(o.c.seed);

  std::vector<BoundaryMeasure> inputs;
  inputs.push_back(BoundaryMeasure::density(StepFunction::constant(m, 1.0)));
  inputs.push_back(BoundaryMeasure::density(StepFunction::indicator(m, Word{0}, 1.0)));
  inputs.push_back(BoundaryMeasure::point_mass(canonical_direction(m, Word{0}), 1.0));
  for (int i = 0; i < o.trials; ++i)
    inputs.push_back(BoundaryMeasure::density(StepFunction::indicator(
        m, random_word(m, rng, 1 + static_cast<int>(rng.next_below(o.c.depth))),
        rng.next_unit())));

  std::vector<double> levels;
  for (int i = 0; i < o.levels; ++i) levels.push_back(std::exp2(i - o.levels / 2));

  VisualMetricParams params = VisualMetricParams::standard(m);
  params.epsilon = o.epsilon;
  params.validate(m);
  const MaximalReport rep = check_weak_11(mu, inputs, levels, o.c.depth, params);

  ReportTable t;
  t.columns = {"input",          "level",        "superlevel_mass", "covering_bound",
               "nested_bound",   "covering_ok",  "nested_ok"};
  json rows = json::array();
  for (const auto& r : rep.rows) {
    t.rows.push_back({format_int(r.input), format_double(r.level),
                      format_double(r.superlevel_mass), format_double(r.covering_bound),
                      format_double(r.nested_bound), format_bool(r.covering_ok),
                      format_bool(r.nested_ok)});
    rows.push_back({{"input", r.input},
                    {"level", r.level},
                    {"superlevel_mass", r.superlevel_mass},
                    {"covering_bound", r.covering_bound},
                    {"nested_bound", r.nested_bound},
                    {"covering_ok", r.covering_ok},
                    {"nested_ok", r.nested_ok}});
  }
  const json payload = {{"dimension_d", rep.dimension_d},
                        {"depth", rep.depth},
                        {"inputs", static_cast<int>(inputs.size())},
                        {"all_covering_ok", rep.all_covering_ok},
                        {"all_nested_ok", rep.all_nested_ok},
                        {"rows", rows}};
  const bool ok = rep.all_covering_ok && rep.all_nested_ok;
  return emit(make_meta("maximal", m, o.c), t, payload, o.c, ok);
}

// ---- rd-sum ----------------------------------------------------------------

struct RdOpts {
  CommonOpts c;
  int max_n = 10;
  std::string xi = "flat";
  int trials = 1;
};

int run_rd_sum(const RdOpts& o) {
  require(o.max_n >= 0 && o.max_n <= 12, "rd-sum: need 0 <= max-n <= 12");
  require(o.c.depth >= 1 && o.c.depth <= 6, "rd-sum: need 1 <= depth <= 6");
  require(o.trials >= 1 && o.trials <= 50, "rd-sum: need 1 <= trials <= 50");
  require(o.xi == "flat" || o.xi == "random", "rd-sum: xi must be flat or random");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity mu = ConformalDensity::exact(m);
  DetRng rng(o.c.seed);

  std::vector<StepFunction> blocks;
  if (o.xi == "flat") {
    blocks.push_back(StepFunction::constant(m, 1.0));
  } else {
    while (static_cast<int>(blocks.size()) < o.trials) {
      const StepFunction f = random_function(m, rng, o.c.depth, false);
      if (l2_norm(mu, f) > 1e-6) blocks.push_back(unit_l2(mu, f));
    }
  }

  ReportTable t;
  t.columns = {"xi", "n", "cumulative", "bound", "certified"};
  json jblocks = json::array();
  bool ok = true;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const RdSumReport rep = rd_sum(mu, blocks[b], o.max_n, o.c.cap);
    for (const auto& r : rep.rows)
      t.rows.push_back({format_int(static_cast<long long>(b)), format_int(r.n),
                        format_double(r.cumulative), format_double(r.bound),
                        format_bool(r.certified)});
    jblocks.push_back({{"xi", static_cast<int>(b)},
                       {"uniform_bound", rep.uniform_bound},
                       {"sup_ratio_cubic", rep.sup_ratio_cubic},
                       {"all_certified", rep.all_certified}});
    ok = ok && rep.all_certified;
  }
  const json payload = {{"xi_kind", o.xi}, {"max_n", o.max_n}, {"blocks", jblocks}};
  return emit(make_meta("rd-sum", m, o.c), t, payload, o.c, ok);
}

// ---- annulus-average -------------------------------------------------------

struct AvgOpts {
  CommonOpts c;
  int n = 6;
  double rho = 1.0;
};

int run_annulus_average(const AvgOpts& o) {
  require(o.n >= 0 && o.n <= 12, "annulus-average: need 0 <= n <= 12");
  require(o.rho >= 0.0 && o.rho <= 4.0, "annulus-average: need 0 <= rho <= 4");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity mu = ConformalDensity::exact(m);
  const AnnulusAverage avg = annulus_average(mu, o.n, o.rho, -1, o.c.cap);

  ReportTable t;
  t.columns = {"cylinder", "value"};
  json rows = json::array();
  for (const auto& [w, v] : avg.average.leaves()) {
    t.rows.push_back({m.word_str(w), format_double(v.real())});
    rows.push_back({{"cylinder", m.word_str(w)}, {"value", v.real()}});
  }
  const json payload = {{"n", avg.n},
                        {"rho", avg.rho},
                        {"count", avg.count},
                        {"sup_norm", avg.sup_norm},
                        {"leaf_count", static_cast<int>(avg.average.leaves().size())},
                        {"rows", rows}};
  return emit(make_meta("annulus-average", m, o.c), t, payload, o.c, true);
}

// ---- equidistribution ------------------------------------------------------

struct EqOpts {
  CommonOpts c;
  std::string u = "a";
  std::string w = "b";
  int n_lo = 1;
  int max_n = 8;
};

int run_equidistribution(const EqOpts& o) {
  require(o.n_lo >= 1 && o.n_lo <= o.max_n && o.max_n <= 12,
          "equidistribution: need 1 <= n-lo <= max-n <= 12");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity mu = ConformalDensity::exact(m);
  const EquidistributionTrace trace =
      equidistribution_trace(mu, m.word_parse(o.u), m.word_parse(o.w), o.n_lo, o.max_n, o.c.cap);

  ReportTable t;
  t.columns = {"n", "empirical", "reference", "ratio"};
  json rows = json::array();
  for (const auto& r : trace.rows) {
    t.rows.push_back({format_int(r.n), format_double(r.empirical), format_double(r.reference),
                      format_double(r.ratio)});
    rows.push_back(
        {{"n", r.n}, {"empirical", r.empirical}, {"reference", r.reference}, {"ratio", r.ratio}});
  }
  const json payload = {
      {"u", o.u}, {"w", o.w}, {"caveat", trace.caveat}, {"rows", rows}};
  return emit(make_meta("equidistribution", m, o.c), t, payload, o.c, true);
}

// ---- schwartz --------------------------------------------------------------

struct SchwartzOpts {
  CommonOpts c;
  double t = 4.0;
  int radius = 12;
  int trials = 50;
  int max_len = 6;
};

int run_schwartz(const SchwartzOpts& o) {
  require(o.t >= 0.0, "schwartz: t must be nonnegative");
  require(o.radius >= o.max_len + 2 && o.radius <= 30,
          "schwartz: need max-len + 2 <= radius <= 30");
  require(o.trials >= 0 && o.trials <= 200, "schwartz: need 0 <= trials <= 200");
  require(o.max_len >= 1 && o.max_len <= 8, "schwartz: need 1 <= max-len <= 8");
  const GroupModel m = GroupModel::parse(o.c.group);
  SchwartzSpace space(m);
  DetRng rng(o.c.seed);

  ReportTable t;
  t.columns = {"check", "measured", "bound", "pass"};
  json checks = json::array();
  bool ok = true;
  const auto push = [&](const std::string& name, double measured, double bound, bool pass) {
    t.rows.push_back({name, format_double(measured), format_double(bound), format_bool(pass)});
    checks.push_back({{"check", name}, {"measured", measured}, {"bound", bound}, {"pass", pass}});
    ok = ok && pass;
  };

  // below the weight threshold the kernel series diverges: flag and exit
  if (o.t <= space.t0()) {
    push("kernel_series_convergent", o.t, space.t0(), false);
    const json payload = {{"divergent", true},
                          {"t", o.t},
                          {"threshold", space.t0()},
                          {"count_constant", space.count_constant()},
                          {"checks", checks}};
    return emit(make_meta("schwartz", m, o.c), t, payload, o.c, false);
  }

  const Trick2Report base = trick2_sum(space, Word{}, o.t, o.radius);
  push("kernel_series_convergent", o.t, space.t0(), base.convergent);

  // spread and radius-stability of the truncated ratio S_N(g,t)/phi(g); the
  // certified tail bound stays out of both (it is conservative by design and
  // scales with |g|), it enters only through the uniform kernel constant
  double ratio_lo = 0.0, ratio_hi = 0.0, drift = 0.0;
  bool first = true;
  const bool radial = m.name().rfind("free:", 0) == 0;
  const auto consider = [&](const Word& g) {
    const double r1 = trick2_sum(space, g, o.t, o.radius).ratio;
    const double r2 = trick2_sum(space, g, o.t, o.radius + 2).ratio;
    if (first || r1 < ratio_lo) ratio_lo = r1;
    if (first || r1 > ratio_hi) ratio_hi = r1;
    drift = std::max(drift, std::abs(r2 - r1) / r1);
    first = false;
  };
  if (radial) {
    for (int len = 0; len <= o.max_len; ++len) consider(Word(static_cast<std::size_t>(len), 0));
  } else {
    for (int len = 0; len <= o.max_len; ++len)
      m.for_each_in_annulus(len, 0.0, o.c.cap, consider);
  }
  push("kernel_ratio_spread", ratio_hi / ratio_lo, 3.0, ratio_hi <= 3.0 * ratio_lo);
  push("kernel_ratio_stability", drift, 0.01, drift < 0.01);

  const double ct = empirical_kernel_constant(space, o.t, o.radius, o.max_len);

  const auto random_element = [&](int support_len, int pieces) {
    std::vector<std::pair<Word, Complex>> coeffs;
    for (int i = 0; i < pieces; ++i)
      coeffs.emplace_back(
          random_word(m, rng, static_cast<int>(rng.next_below(support_len + 1))),
          Complex{2.0 * rng.next_unit() - 1.0, rng.next_unit() - 0.5});
    return space.element(o.t, std::move(coeffs));
  };

  double worst_closure = 0.0;
  bool closure_ok = true;
  for (int i = 0; i < o.trials; ++i) {
    const ClosureReport rep =
        check_algebra_closure(space, random_element(5, 6), random_element(5, 6), o.t);
    closure_ok = closure_ok && rep.certified;
    if (rep.norm_f1 > 0.0 && rep.norm_f2 > 0.0)
      worst_closure = std::max(worst_closure, rep.measured_constant / rep.assembled_constant);
  }
  push("closure_certified", worst_closure, 1.0, closure_ok);

  double worst_l2 = 0.0;
  bool l2_ok = true;
  for (int i = 0; i < o.trials; ++i) {
    const SchwartzElement f = random_element(4, 5);
    std::vector<std::pair<Word, Complex>> h;
    for (int j = 0; j < 8; ++j)
      h.emplace_back(random_word(m, rng, static_cast<int>(rng.next_below(7))),
                     Complex{2.0 * rng.next_unit() - 1.0, rng.next_unit() - 0.5});
    const L2BoundReport rep = check_l2_boundedness(space, f, h, o.t);
    l2_ok = l2_ok && rep.certified;
    if (rep.f_norm > 0.0 && rep.h_norm > 0.0)
      worst_l2 = std::max(worst_l2, rep.conv_norm / (rep.constant * rep.f_norm * rep.h_norm));
  }
  push("l2_bound_certified", worst_l2, 1.0, l2_ok);

  const json payload = {{"divergent", false},
                        {"t", o.t},
                        {"threshold", space.t0()},
                        {"count_constant", space.count_constant()},
                        {"kernel_constant", ct},
                        {"assembled_closure_constant", std::exp2(o.t + 1.0) * ct},
                        {"base_partial_sum", base.partial_sum},
                        {"base_tail_bound", base.tail_bound},
                        {"radius", o.radius},
                        {"trials", o.trials},
                        {"checks", checks}};
  return emit(make_meta("schwartz", m, o.c), t, payload, o.c, ok);
}

// ---- cs-lemma --------------------------------------------------------------

struct CsOpts {
  CommonOpts c;
  int trials = 500;
  int max_len = 6;
};

int run_cs_lemma(const CsOpts& o) {
  require(o.trials >= 1 && o.trials <= 2000, "cs-lemma: need 1 <= trials <= 2000");
  require(o.max_len >= 0 && o.max_len <= 8, "cs-lemma: need 0 <= max-len <= 8");
  require(o.c.depth >= 1 && o.c.depth <= 6, "cs-lemma: need 1 <= depth <= 6");
  const GroupModel m = GroupModel::parse(o.c.group);
  const ConformalDensity mu = ConformalDensity::exact(m);
  DetRng rng(o.c.seed);

  ReportTable t;
  t.columns = {"trial", "gamma", "lhs", "rhs", "slack", "holds"};
  json rows = json::array();
  int violations = 0;
  double max_ratio = 0.0;
  for (int i = 0; i < o.trials; ++i) {
    const Word g = random_word(m, rng, static_cast<int>(rng.next_below(o.max_len + 1)));
    const StepFunction xi = random_function(m, rng, o.c.depth, true);
    const StepFunction eta = random_function(m, rng, o.c.depth, true);
    const CsPoissonReport rep = check_cs_poisson(mu, g, xi, eta);
    if (!rep.holds) ++violations;
    if (rep.rhs > 0.0) max_ratio = std::max(max_ratio, rep.lhs / rep.rhs);
    t.rows.push_back({format_int(i), m.word_str(g), format_double(rep.lhs),
                      format_double(rep.rhs), format_double(rep.slack), format_bool(rep.holds)});
    if (!rep.holds)
      rows.push_back({{"trial", i}, {"gamma", m.word_str(g)}, {"lhs", rep.lhs}, {"rhs", rep.rhs}});
  }
  const json payload = {{"trials", o.trials},
                        {"violations", violations},
                        {"max_ratio", max_ratio},
                        {"violating_rows", rows}};
  return emit(make_meta("cs-lemma", m, o.c), t, payload, o.c, violations == 0);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"computational laboratory for boundary representations of hyperbolic groups"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a config file; flags override it");
  app.set_version_flag("--version", "hyplab 0.1.0");

  std::function<int()> action;

  const auto hc = std::make_shared<HcOpts>();
  CLI::App* c_hc = app.add_subcommand("hc-function", "spherical function against its envelopes");
  add_common(c_hc, hc->c);
  c_hc->add_option("--max-n", hc->max_n, "largest radius")->capture_default_str();
  c_hc->add_option("--exterior", hc->exterior, "first radius the envelopes must cover")
      ->capture_default_str();
  c_hc->callback([&action, hc] { action = [hc] { return run_hc_function(*hc); }; });

  const auto de = std::make_shared<DensityOpts>();
  de->c.depth = 3;
  CLI::App* c_de = app.add_subcommand("density", "boundary density tables (exact or orbit sums)");
  add_common(c_de, de->c);
  c_de->add_option("--kind", de->kind, "exact | orbit")->capture_default_str();
  c_de->add_option("--s", de->s, "orbit weight exponent (default alpha + 0.05)");
  c_de->add_option("--radius", de->radius, "orbit ball radius")->capture_default_str();
  c_de->callback([&action, de] { action = [de] { return run_density(*de); }; });

  const auto fa = std::make_shared<FatouOpts>();
  CLI::App* c_fa = app.add_subcommand("fatou", "normalized transform along a ray to the boundary");
  add_common(c_fa, fa->c);
  c_fa->add_option("--f", fa->f, "boundary function (const:V | indicator:W[:V])")
      ->capture_default_str();
  c_fa->add_option("--v", fa->v, "target direction (W | W^inf)")->capture_default_str();
  c_fa->add_option("--aperture", fa->aperture, "approach domain width")->capture_default_str();
  c_fa->add_option("--max-n", fa->max_n, "deepest ray point")->capture_default_str();
  c_fa->callback([&action, fa] { action = [fa] { return run_fatou(*fa); }; });

  const auto mx = std::make_shared<MaximalOpts>();
  mx->c.depth = 6;
  CLI::App* c_mx = app.add_subcommand("maximal", "weak (1,1) superlevel bounds for the maximal function");
  add_common(c_mx, mx->c);
  c_mx->add_option("--trials", mx->trials, "random inputs on top of the structured ones")
      ->capture_default_str();
  c_mx->add_option("--levels", mx->levels, "size of the dyadic level grid")->capture_default_str();
  c_mx->add_option("--epsilon", mx->epsilon, "visual metric parameter in (0,1]")
      ->capture_default_str();
  c_mx->callback([&action, mx] { action = [mx] { return run_maximal(*mx); }; });

  const auto rd = std::make_shared<RdOpts>();
  CLI::App* c_rd = app.add_subcommand("rd-sum", "cumulative squared coefficients vs the cubic bound");
  add_common(c_rd, rd->c);
  c_rd->add_option("--max-n,--n", rd->max_n, "largest shell")->capture_default_str();
  c_rd->add_option("--xi", rd->xi, "flat | random")->capture_default_str();
  c_rd->add_option("--trials", rd->trials, "number of random xi blocks")->capture_default_str();
  c_rd->callback([&action, rd] { action = [rd] { return run_rd_sum(*rd); }; });

  const auto av = std::make_shared<AvgOpts>();
  CLI::App* c_av = app.add_subcommand("annulus-average", "normalized kernel average over an annulus");
  add_common(c_av, av->c);
  c_av->add_option("--n", av->n, "annulus center radius")->capture_default_str();
  c_av->add_option("--rho", av->rho, "annulus width")->capture_default_str();
  c_av->callback([&action, av] { action = [av] { return run_annulus_average(*av); }; });

  const auto eq = std::make_shared<EqOpts>();
  CLI::App* c_eq = app.add_subcommand("equidistribution", "paired shadow counts against product masses");
  add_common(c_eq, eq->c);
  c_eq->add_option("--u", eq->u, "backward shadow cylinder")->capture_default_str();
  c_eq->add_option("--w", eq->w, "forward shadow cylinder")->capture_default_str();
  c_eq->add_option("--n-lo", eq->n_lo, "first sphere radius")->capture_default_str();
  c_eq->add_option("--max-n,--n", eq->max_n, "last sphere radius")->capture_default_str();
  c_eq->callback([&action, eq] { action = [eq] { return run_equidistribution(*eq); }; });

  const auto sc = std::make_shared<SchwartzOpts>();
  CLI::App* c_sc = app.add_subcommand("schwartz", "weighted algebra: kernel sums, closure, l2 bounds");
  add_common(c_sc, sc->c);
  c_sc->add_option("--t", sc->t, "length weight exponent")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_sc->add_option("--radius", sc->radius, "truncation radius for kernel sums")
      ->capture_default_str();
  c_sc->add_option("--trials", sc->trials, "random closure / l2 certificates")
      ->capture_default_str();
  c_sc->add_option("--max-len", sc->max_len, "longest element in the ratio scan")
      ->capture_default_str();
  c_sc->callback([&action, sc] { action = [sc] { return run_schwartz(*sc); }; });

  const auto cs = std::make_shared<CsOpts>();
  CLI::App* c_cs = app.add_subcommand("cs-lemma", "coefficient Cauchy-Schwarz inequality sweep");
  add_common(c_cs, cs->c);
  c_cs->add_option("--trials", cs->trials, "random (gamma, xi, eta) triples")->capture_default_str();
  c_cs->add_option("--max-len", cs->max_len, "longest gamma")->capture_default_str();
  c_cs->callback([&action, cs] { action = [cs] { return run_cs_lemma(*cs); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return action ? action() : 0;
  } catch (const Error& e) {
    std::cerr << "hyplab: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace hyplab
