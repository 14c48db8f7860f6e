#include "hyplab/schwartz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct ShortlexLess {
  bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

double length_weight(std::size_t len, double t) {
  return std::pow(1.0 + static_cast<double>(len), t);
}

}  // namespace

int SchwartzElement::support_radius() const {
  // entries are shortlex-sorted, so the last one is longest
  return entries_.empty() ? 0 : static_cast<int>(entries_.back().gamma.size());
}

Complex SchwartzElement::value_at(const Word& gamma) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), gamma,
      [](const SchwartzEntry& e, const Word& w) { return shortlex_less(e.gamma, w); });
  if (it != entries_.end() && it->gamma == gamma) return it->value;
  return Complex{};
}

SchwartzSpace::SchwartzSpace(const GroupModel& m)
    : model_(m), mu_(ConformalDensity::exact(m)) {
  radial_phi_ = model_.name().rfind("free:", 0) == 0;
}

double SchwartzSpace::phi(const Word& gamma) {
  if (radial_phi_) {
    const std::size_t n = gamma.size();
    while (phi_by_len_.size() <= n)
      phi_by_len_.push_back(
          harish_chandra_radial(mu_, static_cast<int>(phi_by_len_.size())));
    return phi_by_len_[n];
  }
  const auto it = phi_by_word_.find(gamma);
  if (it != phi_by_word_.end()) return it->second;
  const double v = harish_chandra(mu_, Element{model_.key(), gamma});
  phi_by_word_.emplace(gamma, v);
  return v;
}

const HCEstimateFit& SchwartzSpace::envelope() {
  if (!fitted_) {
    fit_ = fit_harish_chandra_estimates(mu_, 2, radial_phi_ ? 18 : 12);
    fitted_ = true;
  }
  return fit_;
}

double SchwartzSpace::t0() {
  // the weight series compares to sum |C_n| q2(n)^2 e^{-alpha n} (1+n)^{-t}
  // ~ sum (1+n)^{2 deg - t}: converges iff t exceeds 2*deg + 1
  const int deg = envelope().c2 > 1e-12 ? 1 : 0;
  return 2.0 * deg + 1.0;
}

double SchwartzSpace::count_constant() {
  if (count_constant_ == 0.0) {
    const double a = model_.alpha();
    for (int k = 0; k <= 60; ++k)
      count_constant_ =
          std::max(count_constant_, model_.sphere_count(k) * std::exp(-a * k));
  }
  return count_constant_;
}

SchwartzElement SchwartzSpace::element(double t,
                                       std::vector<std::pair<Word, Complex>> coeffs) {
  if (!(t >= 0.0))
    throw DegenerateInputError("schwartz element: decay degree must be >= 0");
  std::map<Word, Complex, ShortlexLess> acc;
  for (auto& [w, c] : coeffs) acc[w] += c;
  SchwartzElement out;
  out.key_ = model_.key();
  out.t_ = t;
  out.entries_.reserve(acc.size());
  for (const auto& [w, c] : acc) {
    if (c == Complex{}) continue;
    out.entries_.push_back(SchwartzEntry{w, c, phi(w), length_weight(w.size(), t)});
  }
  return out;
}

SchwartzElement SchwartzSpace::delta(double t, const Word& gamma, Complex c) {
  return element(t, {{gamma, c}});
}

double schwartz_norm(const SchwartzElement& f) {
  double best = 0.0;
  for (const SchwartzEntry& e : f.entries())
    best = std::max(best, std::abs(e.value) * e.weight / e.phi);
  return best;
}

SchwartzElement convolve(SchwartzSpace& space, const SchwartzElement& f1,
                         const SchwartzElement& f2, double cap) {
  check_same_model(f1.key(), f2.key(), "convolve");
  check_same_model(f1.key(), space.model().key(), "convolve");
  if (f1.t() != f2.t())
    throw DegenerateInputError("convolve: operands carry different decay degrees");
  const double pairs =
      static_cast<double>(f1.support_size()) * static_cast<double>(f2.support_size());
  if (pairs > cap)
    throw CapExceededError("convolve: support product " + std::to_string(pairs) +
                           " exceeds cap " + std::to_string(cap));
  const GroupModel& m = space.model();
  std::map<Word, Complex, ShortlexLess> acc;
  for (const SchwartzEntry& a : f1.entries())
    for (const SchwartzEntry& b : f2.entries())
      acc[m.multiply(a.gamma, b.gamma)] += a.value * b.value;
  std::vector<std::pair<Word, Complex>> coeffs(acc.begin(), acc.end());
  return space.element(f1.t(), std::move(coeffs));
}

SchwartzElement involution(SchwartzSpace& space, const SchwartzElement& f) {
  check_same_model(f.key(), space.model().key(), "involution");
  std::vector<std::pair<Word, Complex>> coeffs;
  coeffs.reserve(f.support_size());
  for (const SchwartzEntry& e : f.entries())
    coeffs.emplace_back(space.model().inverse(e.gamma), std::conj(e.value));
  return space.element(f.t(), std::move(coeffs));
}

namespace {

// Certified bound on sum_{|gamma| > N} phi(g gamma^{-1}) phi(gamma)
// (1+|gamma|)^{-t}.  Uses phi(y) <= env(|y|) = q2(|y|) e^{-alpha |y|/2} with
// |g gamma^{-1}| >= m - L, and |C_m| <= C' e^{alpha m}.  env may rise before
// its peak, so terms below the peak shift are bounded pointwise and the
// polynomial-times-power remainder by integrals.
double trick2_tail_bound(SchwartzSpace& space, int g_length, double t, int N) {
  const HCEstimateFit& fit = space.envelope();
  if (fit.exterior_radius > 3)
    throw UnsupportedApproachError(
        "trick2 tail: envelope validity starts too deep for the split radius");
  const double a = space.model().alpha();
  const auto env = [&](int n) { return fit.q2(n) * std::exp(-a * n / 2.0); };
  int n_bar = -1;  // env nonincreasing from n_bar on
  for (int n = 200; n >= 0; --n) {
    if (env(n + 1) > env(n) * (1.0 + 1e-12)) break;
    n_bar = n;
  }
  if (n_bar < 0)
    throw UnsupportedApproachError("trick2 tail: envelope never starts decreasing");
  std::vector<double> env_sup(static_cast<std::size_t>(n_bar) + 1);
  env_sup[static_cast<std::size_t>(n_bar)] = env(n_bar);
  for (int n = n_bar - 1; n >= 0; --n)
    env_sup[static_cast<std::size_t>(n)] =
        std::max(env(n), env_sup[static_cast<std::size_t>(n) + 1]);
  const double cc = space.count_constant();
  const int m0 = std::max(N + 1, g_length + n_bar);
  KahanSum head;  // terms whose length lower bound lands before the peak
  for (int m = N + 1; m < m0; ++m)
    head.add(cc * std::exp(a * m) * env_sup[static_cast<std::size_t>(m - g_length)] *
             env(m) * std::pow(1.0 + m, -t));
  const double c2 = fit.c2;
  const double A = fit.b2 - fit.c2 * (1.0 + g_length);
  const double B = fit.b2 - fit.c2;
  const double u1 = static_cast<double>(m0);
  double sum = c2 * c2 * std::pow(u1, 3.0 - t) / (t - 3.0);
  sum += std::max(c2 * (A + B), 0.0) * std::pow(u1, 2.0 - t) / (t - 2.0);
  sum += std::max(A * B, 0.0) * std::pow(u1, 1.0 - t) / (t - 1.0);
  return head.get() + cc * std::exp(a * g_length / 2.0) * sum;
}

Trick2Report finish_trick2(SchwartzSpace& space, const Word& g, double t, int N,
                           double partial) {
  Trick2Report r;
  r.partial_sum = partial;
  r.phi_g = space.phi(g);
  r.ratio = partial / r.phi_g;
  r.radius = N;
  r.t = t;
  r.threshold = space.t0();
  r.convergent = t > r.threshold;
  r.tail_bound = r.convergent
                     ? trick2_tail_bound(space, static_cast<int>(g.size()), t, N)
                     : std::numeric_limits<double>::infinity();
  return r;
}

void check_trick2_args(const Word& g, int N) {
  if (N < static_cast<int>(g.size()) + 2)
    throw DegenerateInputError("kernel sum: radius must reach |g| + 2");
}

}  // namespace

Trick2Report trick2_sum(SchwartzSpace& space, const Word& g, double t, int N) {
  check_trick2_args(g, N);
  const GroupModel& m = space.model();
  if (m.name().rfind("free:", 0) != 0) return trick2_sum_direct(space, g, t, N);

  // sphere-stratified closed form: gamma at distance m splits by the exact
  // cancellation length l against g, with counts depending only on l, m, |g|
  const int k2 = m.alphabet_size();      // 2k letters
  const double q = k2 - 1.0;             // branching factor
  const int L = static_cast<int>(g.size());
  KahanSum total;
  auto phibar = [&space](int n) { return space.phi(Word(static_cast<std::size_t>(n), 0)); };
  for (int mm = 0; mm <= N; ++mm) {
    if (mm == 0) {
      total.add(phibar(L));
      continue;
    }
    KahanSum inner;
    const int lmax = std::min(L, mm);
    for (int l = 0; l <= lmax; ++l) {
      double cnt;
      if (l == mm)
        cnt = 1.0;
      else if (l == 0)
        cnt = (L == 0 ? k2 : k2 - 1.0) * std::pow(q, mm - 1);
      else if (l < L)
        cnt = (k2 - 2.0) * std::pow(q, mm - l - 1);
      else
        cnt = (k2 - 1.0) * std::pow(q, mm - L - 1);
      inner.add(cnt * phibar(L + mm - 2 * l));
    }
    total.add(std::pow(1.0 + mm, -t) * phibar(mm) * inner.get());
  }
  return finish_trick2(space, g, t, N, total.get());
}

Trick2Report trick2_sum_direct(SchwartzSpace& space, const Word& g, double t, int N,
                               double cap) {
  check_trick2_args(g, N);
  const GroupModel& m = space.model();
  KahanSum total;
  for (int mm = 0; mm <= N; ++mm) {
    KahanSum sphere;
    const double w = std::pow(1.0 + mm, -t);
    m.for_each_in_annulus(mm, 0.0, cap, [&](const Word& gamma) {
      sphere.add(space.phi(m.multiply(g, m.inverse(gamma))) * space.phi(gamma) * w);
    });
    total.merge(sphere);
  }
  return finish_trick2(space, g, t, N, total.get());
}

double empirical_kernel_constant(SchwartzSpace& space, double t, int radius,
                                 int max_length) {
  if (!(t > space.t0()))
    throw DegenerateInputError(
        "kernel constant: weight series diverges at this decay degree");
  if (radius < max_length + 2)
    throw DegenerateInputError("kernel constant: radius must reach max length + 2");
  const GroupModel& m = space.model();
  double best = 0.0;
  auto consider = [&](const Word& g) {
    const Trick2Report r = trick2_sum(space, g, t, radius);
    best = std::max(best, (r.partial_sum + r.tail_bound) / r.phi_g);
  };
  if (m.name().rfind("free:", 0) == 0) {
    // the stratified sum depends on g through |g| only
    for (int L = 0; L <= max_length; ++L) consider(Word(static_cast<std::size_t>(L), 0));
  } else {
    for (int L = 0; L <= max_length; ++L)
      m.for_each_in_annulus(L, 0.0, 1e6, consider);
  }
  return best;
}

ClosureReport check_algebra_closure(SchwartzSpace& space, const SchwartzElement& f1,
                                    const SchwartzElement& f2, double t) {
  if (f1.t() != t || f2.t() != t)
    throw DegenerateInputError("closure check: elements must carry the stated degree");
  ClosureReport r;
  r.norm_f1 = schwartz_norm(f1);
  r.norm_f2 = schwartz_norm(f2);
  r.norm_conv = schwartz_norm(convolve(space, f1, f2));
  r.kernel_constant = empirical_kernel_constant(space, t);
  r.assembled_constant = std::pow(2.0, t + 1.0) * r.kernel_constant;
  const double product = r.norm_f1 * r.norm_f2;
  r.measured_constant = product > 0.0 ? r.norm_conv / product : 0.0;
  r.certified = product > 0.0 ? r.norm_conv <= r.assembled_constant * product * (1.0 + 1e-12)
                              : r.norm_conv == 0.0;
  return r;
}

L2BoundReport check_l2_boundedness(SchwartzSpace& space, const SchwartzElement& f,
                                   const std::vector<std::pair<Word, Complex>>& h,
                                   double t) {
  if (f.t() != t)
    throw DegenerateInputError("l2 check: element must carry the stated degree");
  const GroupModel& m = space.model();
  std::map<Word, Complex, ShortlexLess> hm;
  for (const auto& [w, c] : h) hm[w] += c;
  std::map<Word, Complex, ShortlexLess> out;
  for (const SchwartzEntry& a : f.entries())
    for (const auto& [w, c] : hm) out[m.multiply(a.gamma, w)] += a.value * c;
  KahanSum h2, conv2;
  for (const auto& [w, c] : hm) h2.add(std::norm(c));
  for (const auto& [w, c] : out) conv2.add(std::norm(c));
  L2BoundReport r;
  r.f_norm = schwartz_norm(f);
  r.h_norm = std::sqrt(h2.get());
  r.conv_norm = std::sqrt(conv2.get());
  r.constant = empirical_kernel_constant(space, t);
  r.constant_squared = r.constant * r.constant;
  r.certified = r.conv_norm <= r.constant * r.f_norm * r.h_norm * (1.0 + 1e-12) + 1e-15;
  return r;
}

}  // namespace hyplab
