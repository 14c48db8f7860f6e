#include "hyplab/boundary_rep.hpp"

#include <cmath>
#include <utility>

#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

Element el(const ConformalDensity& mu, const Word& w) { return Element{mu.key(), w}; }

// refine f so every leaf clears the prefix paths of both endpoint words, then
// scale each leaf by the kernel power, which is constant there
StepFunction kernel_scaled(const ConformalDensity& mu, const StepFunction& f, const Word& from,
                           const Word& to, double s) {
  const GroupModel& m = mu.model();
  const StepFunction split = f.refined_along(m, from).refined_along(m, to);
  std::vector<StepFunction::Leaf> leaves = split.leaves();
  for (auto& [cell, value] : leaves)
    if (value != Complex{}) value *= poisson_kernel_power(mu, el(mu, from), el(mu, to), cell, s);
  return StepFunction(m, std::move(leaves), split.resolution());
}

void require_nonnegative(const StepFunction& f, const char* what) {
  for (const auto& [cell, value] : f.leaves())
    if (value.imag() != 0.0 || value.real() < 0.0)
      throw DegenerateInputError(std::string(what) +
                                 ": coefficient inequality needs non-negative real inputs");
}

// normalized square-root transform based at x, evaluated at the point y
double normalized_at(const ConformalDensity& mu, const Word& x, const Word& y,
                     const StepFunction& h) {
  const double half = mu.dimension() / 2.0;
  const Complex num = kernel_pair(mu, el(mu, x), el(mu, y), half, h);
  const Complex den =
      kernel_pair(mu, el(mu, x), el(mu, y), half, StepFunction::constant(mu.model(), 1.0));
  return num.real() / den.real();
}

}  // namespace

StepFunction rep_act(const ConformalDensity& mu, const Word& g, const StepFunction& f,
                     const Word& basepoint) {
  const GroupModel& m = mu.model();
  check_same_model(m.key(), f.key(), "representation");
  m.check_word(g);
  m.check_word(basepoint);
  const Word gx = m.multiply(g, basepoint);
  return kernel_scaled(mu, f.translate(m, g), basepoint, gx, mu.dimension() / 2.0);
}

Complex inner_product(const ConformalDensity& mu, const StepFunction& f, const StepFunction& h,
                      const Word& basepoint) {
  const GroupModel& m = mu.model();
  check_same_model(m.key(), f.key(), "inner product");
  check_same_model(m.key(), h.key(), "inner product");
  m.check_word(basepoint);
  const StepFunction prod =
      operator_mul(m, f, h.map([](Complex v) { return std::conj(v); }));
  KahanSum re, im;
  for (const auto& [cell, value] : prod.leaves()) {
    if (value == Complex{}) continue;
    const Complex w = value * mu.mass(basepoint, cell);
    re.add(w.real());
    im.add(w.imag());
  }
  return {re.get(), im.get()};
}

double l2_norm(const ConformalDensity& mu, const StepFunction& f, const Word& basepoint) {
  return std::sqrt(std::max(0.0, inner_product(mu, f, f, basepoint).real()));
}

Complex matrix_coefficient(const ConformalDensity& mu, const Word& g, const StepFunction& f,
                           const StepFunction& h, const Word& basepoint) {
  return inner_product(mu, rep_act(mu, g, f, basepoint), h, basepoint);
}

CsPoissonReport check_cs_poisson(const ConformalDensity& mu, const Word& g,
                                 const StepFunction& xi, const StepFunction& eta,
                                 const Word& basepoint) {
  const GroupModel& m = mu.model();
  require_nonnegative(xi, "left input");
  require_nonnegative(eta, "right input");
  m.check_word(g);

  const StepFunction one = StepFunction::constant(m, 1.0);
  CsPoissonReport rep;
  rep.phi = matrix_coefficient(mu, g, one, one, basepoint).real();
  const double coeff = matrix_coefficient(mu, g, xi, eta, basepoint).real();
  rep.lhs = (coeff / rep.phi) * (coeff / rep.phi);

  const Word ginv_x = m.multiply(m.inverse(g), basepoint);
  const Word g_x = m.multiply(g, basepoint);
  const StepFunction xi2 = operator_mul(m, xi, xi);
  const StepFunction eta2 = operator_mul(m, eta, eta);
  rep.rhs = normalized_at(mu, basepoint, ginv_x, xi2) * normalized_at(mu, basepoint, g_x, eta2);

  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs + 1e-10 * std::max(1.0, std::abs(rep.rhs));
  return rep;
}

StepFunction intertwiner(const ConformalDensity& mu, const Word& x, const Word& xprime,
                         const StepFunction& f) {
  const GroupModel& m = mu.model();
  check_same_model(m.key(), f.key(), "intertwiner");
  m.check_word(x);
  m.check_word(xprime);
  return kernel_scaled(mu, f, xprime, x, mu.dimension() / 2.0);
}

}  // namespace hyplab
