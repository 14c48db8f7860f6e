#include "hyplab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "hyplab/boundary.hpp"
#include "hyplab/boundary_rep.hpp"
#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/fatou.hpp"
#include "hyplab/poisson.hpp"

namespace hyplab {

namespace {

bool is_free_model(const GroupModel& m) { return m.name().rfind("free:", 0) == 0; }

Element el(const GroupModel& m, const Word& w) { return Element{m.key(), w}; }

// memoized spherical-function values; radial on free groups
struct PhiMemo {
  const ConformalDensity& mu;
  bool radial;
  std::vector<double> by_len;
  std::map<Word, double> by_word;

  explicit PhiMemo(const ConformalDensity& density)
      : mu(density), radial(is_free_model(density.model())) {}

  double operator()(const Word& g) {
    if (radial) {
      while (by_len.size() <= g.size())
        by_len.push_back(harish_chandra_radial(mu, static_cast<int>(by_len.size())));
      return by_len[g.size()];
    }
    const auto it = by_word.find(g);
    if (it != by_word.end()) return it->second;
    const double v = harish_chandra(mu, el(mu.model(), g));
    by_word.emplace(g, v);
    return v;
  }
};

std::vector<Word> sorted_annulus(const GroupModel& m, int n, double rho, double cap) {
  std::vector<Word> words = m.annulus(n, rho, cap);
  std::sort(words.begin(), words.end());  // lex: prefixes come before extensions
  return words;
}

// F restricted to a subtree is an outside constant plus the active kernels;
// free-group Gromov products are integral, so every annulus word diverging
// from the subtree at depth d contributes exactly e^{alpha d} * its weight.
struct FreeAverageBuilder {
  const GroupModel& m;
  const std::vector<Word>& words;
  std::vector<long double> prefix;  // extended precision so sibling cells stay mergeable
  double alpha;
  std::vector<StepFunction::Leaf> leaves;

  FreeAverageBuilder(const GroupModel& model, const std::vector<Word>& sorted,
                     const std::vector<double>& weights)
      : m(model), words(sorted), alpha(model.alpha()) {
    prefix.resize(weights.size() + 1, 0.0L);
    for (std::size_t i = 0; i < weights.size(); ++i) prefix[i + 1] = prefix[i] + weights[i];
  }

  // returns {collapsed, value}; merges sibling cells within 1e-12
  std::pair<bool, double> build(std::size_t lo, std::size_t hi, int depth, Word& node,
                                double outside) {
    if (lo == hi) {
      leaves.emplace_back(node, Complex{outside, 0.0});
      return {true, outside};
    }
    const double level = std::exp(alpha * depth);
    std::size_t lo2 = lo;
    long double settled = 0.0L;  // the word equal to the node itself, if present
    if (static_cast<int>(words[lo].size()) == depth) {
      settled = prefix[lo + 1] - prefix[lo];
      ++lo2;
    }
    const std::size_t mark = leaves.size();
    bool all_single = true;
    double first_value = 0.0;
    bool have_first = false;
    std::size_t cursor = lo2;
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      if (!node.empty() && !m.can_follow(node.back(), s)) continue;
      const std::size_t rs = cursor;
      while (cursor < hi && words[cursor][static_cast<std::size_t>(depth)] == s) ++cursor;
      const long double excluded =
          (prefix[hi] - prefix[lo2]) - (prefix[cursor] - prefix[rs]) + settled;
      const double child_outside = outside + static_cast<double>(level * excluded);
      node.push_back(s);
      const auto [single, value] = build(rs, cursor, depth + 1, node, child_outside);
      node.pop_back();
      all_single = all_single && single;
      if (!have_first) {
        first_value = value;
        have_first = true;
      } else if (std::abs(value - first_value) > 1e-12 * std::max(1.0, std::abs(first_value))) {
        all_single = false;
      }
    }
    if (all_single) {
      leaves.resize(mark);
      leaves.emplace_back(node, Complex{first_value, 0.0});
      return {true, first_value};
    }
    return {false, 0.0};
  }
};

StepFunction free_annulus_average(const ConformalDensity& mu, const std::vector<Word>& words,
                                  PhiMemo& phi) {
  const GroupModel& m = mu.model();
  const double alpha = m.alpha();
  const double count = static_cast<double>(words.size());
  std::vector<double> weights(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    weights[i] = std::exp(-alpha * words[i].size() / 2.0) / (phi(words[i]) * count);
  FreeAverageBuilder builder(m, words, weights);
  Word node;
  const auto [single, value] = builder.build(0, words.size(), 0, node, 0.0);
  if (single) return StepFunction::constant(m, Complex{value, 0.0});
  int depth = 1;
  for (const auto& [w, v] : builder.leaves) depth = std::max(depth, static_cast<int>(w.size()));
  return StepFunction(m, std::move(builder.leaves), depth);
}

// free products carry half-integral products at same-factor divergences, so
// each orbit kernel is laid out cell by cell through the kernel evaluator
StepFunction direct_annulus_average(const ConformalDensity& mu,
                                    const std::vector<Word>& words, PhiMemo& phi) {
  const GroupModel& m = mu.model();
  const double count = static_cast<double>(words.size());
  const double s = mu.dimension() / 2.0;
  StepFunction total = StepFunction::constant(m, Complex{});
  for (const Word& g : words) {
    const double scale = 1.0 / (phi(g) * count);
    StepFunction piece = StepFunction::constant(m, Complex{});
    if (g.empty()) {
      piece = StepFunction::constant(m, Complex{scale, 0.0});
    } else {
      std::vector<StepFunction::Leaf> leaves;
      Word cell;
      for (std::size_t j = 0; j < g.size(); ++j) {
        for (Letter t = 0; t < m.alphabet_size(); ++t) {
          if (t == g[j]) continue;
          if (j > 0 && !m.can_follow(g[j - 1], t)) continue;
          cell.push_back(t);
          leaves.emplace_back(
              cell, Complex{scale * poisson_kernel_power(mu, el(m, {}), el(m, g), cell, s), 0.0});
          cell.pop_back();
        }
        cell.push_back(g[j]);
      }
      leaves.emplace_back(
          cell, Complex{scale * poisson_kernel_power(mu, el(m, {}), el(m, g), cell, s), 0.0});
      std::sort(leaves.begin(), leaves.end(),
                [](const StepFunction::Leaf& a, const StepFunction::Leaf& b) {
                  return a.first < b.first;
                });
      piece = StepFunction(m, std::move(leaves), static_cast<int>(g.size()));
    }
    total = operator_add(m, total, piece);
  }
  return total;
}

double fit_radius(const GroupModel& m) { return is_free_model(m) ? 18 : 12; }

}  // namespace

AnnulusAverage annulus_average(const ConformalDensity& mu, int n, double rho,
                               int resolution, double cap) {
  const GroupModel& m = mu.model();
  const int natural = n + static_cast<int>(std::ceil(rho)) + 1;
  if (resolution < 0) resolution = natural;
  if (resolution < natural)
    throw DegenerateInputError("annulus average: resolution too shallow for exactness");
  if (mu.resolution() < resolution)
    throw ResolutionError("annulus average: density table is too shallow");
  const std::vector<Word> words = sorted_annulus(m, n, rho, cap);
  if (words.empty()) throw DegenerateInputError("annulus average: empty annulus");
  PhiMemo phi(mu);
  AnnulusAverage out;
  out.n = n;
  out.rho = rho;
  out.count = static_cast<double>(words.size());
  out.average = is_free_model(m) ? free_annulus_average(mu, words, phi)
                                 : direct_annulus_average(mu, words, phi);
  out.sup_norm = out.average.sup_norm();
  return out;
}

DualL1Report dual_l1_check(const ConformalDensity& mu, const StepFunction& f, int n,
                           double rho, double cap) {
  const GroupModel& m = mu.model();
  const AnnulusAverage avg = annulus_average(mu, n, rho, -1, cap);
  PhiMemo phi(mu);  // one spherical integral per radius instead of per element
  KahanSum re, im;
  m.for_each_in_annulus(n, rho, cap, [&](const Word& g) {
    const Complex v = p_lambda_transform(mu, f, el(m, g), 0.0) / phi(g);
    re.add(v.real());
    im.add(v.imag());
  });
  const Complex averaged{re.get() / avg.count, im.get() / avg.count};
  const Complex paired = inner_product(mu, f, avg.average);

  DualL1Report out;
  out.n = n;
  out.rho = rho;
  out.count = avg.count;
  out.average_abs = std::abs(averaged);
  out.pairing_abs = std::abs(paired);
  out.l1_norm = BoundaryMeasure::density(f).total(mu);
  out.bound = avg.sup_norm * out.l1_norm;
  out.holds = out.average_abs <= out.bound * (1.0 + 1e-12) + 1e-15;
  out.consistent = std::abs(averaged - paired) <= 1e-10 * std::max(1.0, std::abs(averaged));
  return out;
}

double rd_shell_sum_direct(const ConformalDensity& mu, const StepFunction& xi, int n,
                           double cap) {
  const GroupModel& m = mu.model();
  const StepFunction xic = xi.map([](Complex v) { return std::conj(v); });
  const Complex s{mu.dimension() / 2.0, 0.0};
  KahanSum total;
  m.for_each_in_annulus(n, 0.0, cap, [&](const Word& g) {
    total.add(std::norm(kernel_pair(mu, el(m, {}), el(m, g), s, xic)));
  });
  return total.get();
}

double rd_shell_sum(const ConformalDensity& mu, const StepFunction& xi, int n, double cap) {
  const GroupModel& m = mu.model();
  const int split = xi.resolution() + 1;
  if (!is_free_model(m) || n <= split) return rd_shell_sum_direct(mu, xi, n, cap);
  // the coefficient of gamma only sees its prefix one level past xi's
  // resolution; all (2k-1)^{n-split} extensions share it
  const StepFunction xic = xi.map([](Complex v) { return std::conj(v); });
  const Complex s{mu.dimension() / 2.0, 0.0};
  const double copies = std::pow(m.alphabet_size() - 1.0, n - split);
  KahanSum total;
  m.for_each_in_annulus(split, 0.0, cap, [&](const Word& p) {
    Word rep = p;
    while (static_cast<int>(rep.size()) < n)
      for (Letter t = 0; t < m.alphabet_size(); ++t)
        if (m.can_follow(rep.back(), t)) {
          rep.push_back(t);
          break;
        }
    total.add(copies * std::norm(kernel_pair(mu, el(m, {}), el(m, rep), s, xic)));
  });
  return total.get();
}

RdSumReport rd_sum(const ConformalDensity& mu, const StepFunction& xi, int n_max,
                   double cap) {
  const GroupModel& m = mu.model();
  if (std::abs(l2_norm(mu, xi) - 1.0) > 1e-10)
    throw DegenerateInputError("coefficient sums expect a unit vector");
  const double rho = 1.0;
  const HCEstimateFit fit = fit_harish_chandra_estimates(mu, 2, fit_radius(m));
  const double alpha = m.alpha();
  const auto env = [&](int k) { return fit.q2(k) * std::exp(-alpha * k / 2.0); };

  RdSumReport out;
  out.rho = rho;
  for (int k = 0; k <= n_max; ++k)
    out.uniform_bound = std::max(out.uniform_bound, annulus_average(mu, k, rho, -1, cap).sup_norm);

  KahanSum cumulative, bound;
  out.all_certified = true;
  for (int k = 0; k <= n_max; ++k) {
    cumulative.add(rd_shell_sum(mu, xi, k, cap));
    double env2 = 0.0;
    for (int j = std::max(0, k - 1); j <= k + 1; ++j) env2 = std::max(env2, env(j) * env(j));
    bound.add(out.uniform_bound * m.annulus_count(k, rho) * env2);
    RdSumReport::Row row;
    row.n = k;
    row.cumulative = cumulative.get();
    row.bound = bound.get();
    row.certified = row.cumulative <= row.bound * (1.0 + 1e-12);
    out.all_certified = out.all_certified && row.certified;
    out.sup_ratio_cubic = std::max(out.sup_ratio_cubic, row.cumulative / std::pow(1.0 + k, 3.0));
    out.rows.push_back(row);
  }
  return out;
}

namespace {

double roblin_annulus_sum(const ConformalDensity& mu, const StepFunction& f,
                          const StepFunction& g, int n, double rho, double cap) {
  const GroupModel& m = mu.model();
  KahanSum total;
  m.for_each_in_annulus(n, rho, cap, [&](const Word& w) {
    total.add(std::norm(matrix_coefficient(mu, w, f, g)));
  });
  return total.get();
}

double roblin_comparison(const ConformalDensity& mu, const HCEstimateFit& fit, int n,
                         double rho) {
  const double alpha = mu.model().alpha();
  const double x = n + rho;
  const double env = fit.q2(static_cast<int>(std::lround(x))) * std::exp(-alpha * x / 2.0);
  return env * env * mu.model().annulus_count(n, rho);
}

const char* kSpectrumCaveat =
    "integer word metric: length spectrum is arithmetic, window max is a "
    "finite proxy, no limit claim along integer radii";

}  // namespace

RoblinCalibration calibrate_roblin(const ConformalDensity& mu, double rho, int n_lo,
                                   int n_hi, double cap) {
  if (rho < 1.0) throw DegenerateInputError("annulus ratio: width must be >= 1");
  if (n_lo > n_hi || n_lo < 0)
    throw DegenerateInputError("annulus ratio: bad window");
  const StepFunction one = StepFunction::constant(mu.model(), Complex{1.0, 0.0});
  const HCEstimateFit fit = fit_harish_chandra_estimates(mu, 2, fit_radius(mu.model()));
  RoblinCalibration calib;
  calib.rho = rho;
  calib.n_lo = n_lo;
  calib.n_hi = n_hi;
  calib.constant = 0.0;
  for (int n = n_lo; n <= n_hi; ++n)
    calib.constant = std::max(calib.constant,
                              roblin_annulus_sum(mu, one, one, n, rho, cap) /
                                  roblin_comparison(mu, fit, n, rho));
  return calib;
}

RoblinReport roblin_experiment(const ConformalDensity& mu, const StepFunction& f,
                               const StepFunction& g, const RoblinCalibration& calib,
                               double cap) {
  const double f2 = std::pow(l2_norm(mu, f), 2.0);
  const double g2 = std::pow(l2_norm(mu, g), 2.0);
  if (f2 <= 0.0 || g2 <= 0.0)
    throw DegenerateInputError("annulus ratio: inputs must have positive norm");
  const HCEstimateFit fit = fit_harish_chandra_estimates(mu, 2, fit_radius(mu.model()));
  RoblinReport out;
  out.f_norm2 = f2;
  out.g_norm2 = g2;
  out.caveat = kSpectrumCaveat;
  for (int n = calib.n_lo; n <= calib.n_hi; ++n) {
    RoblinReport::Row row;
    row.n = n;
    row.annulus_sum = roblin_annulus_sum(mu, f, g, n, calib.rho, cap);
    row.comparison = roblin_comparison(mu, fit, n, calib.rho) * calib.constant;
    row.ratio = row.annulus_sum / (row.comparison * f2 * g2);
    out.max_ratio = std::max(out.max_ratio, row.ratio);
    out.rows.push_back(row);
  }
  out.within = out.max_ratio <= 1.0 + out.slack;
  return out;
}

EquidistributionTrace equidistribution_trace(const ConformalDensity& mu, const Word& u,
                                             const Word& w, int n_lo, int n_hi,
                                             double cap) {
  const GroupModel& m = mu.model();
  if (n_lo < 1 || n_lo > n_hi)
    throw DegenerateInputError("shadow trace: window must start at 1");
  EquidistributionTrace out;
  out.u = u;
  out.w = w;
  out.caveat = kSpectrumCaveat;
  const double reference = mu.mass_e(u) * mu.mass_e(w);
  for (int n = n_lo; n <= n_hi; ++n) {
    long long hits = 0;
    m.for_each_in_annulus(n, 0.0, cap, [&](const Word& gamma) {
      const Direction back = shadow_direction(m, Word{}, m.inverse(gamma));
      if (!back.starts_with(u)) return;
      const Direction fore = shadow_direction(m, Word{}, gamma);
      if (fore.starts_with(w)) ++hits;
    });
    EquidistributionTrace::Row row;
    row.n = n;
    row.empirical = std::exp(-m.alpha() * n) * static_cast<double>(hits);
    row.reference = reference;
    row.ratio = reference > 0.0 ? row.empirical / reference : 0.0;
    out.rows.push_back(row);
  }
  return out;
}

WeakInequalityReport check_weak_inequality(const ConformalDensity& mu,
                                           const StepFunction& f, const StepFunction& g,
                                           int n_max, double cap) {
  const GroupModel& m = mu.model();
  PhiMemo phi(mu);
  const double ff = f.sup_norm();
  const double gg = g.sup_norm();
  WeakInequalityReport out;
  for (int n = 0; n <= n_max; ++n) {
    m.for_each_in_annulus(n, 0.0, cap, [&](const Word& gamma) {
      const double coef = std::abs(matrix_coefficient(mu, gamma, f, g));
      const double bound = ff * gg * phi(gamma);
      ++out.checked;
      if (coef > bound * (1.0 + 1e-12) + 1e-15) ++out.violations;
      if (bound > 0.0) out.max_ratio = std::max(out.max_ratio, coef / bound);
    });
  }
  out.holds = out.violations == 0;
  return out;
}

}  // namespace hyplab
