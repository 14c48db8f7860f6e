#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "hyplab/density.hpp"
#include "hyplab/group.hpp"
#include "hyplab/poisson.hpp"

namespace hyplab {

// One support point of a rapidly decaying group-algebra element, with the
// weights its norm needs cached at construction.
struct SchwartzEntry {
  Word gamma;
  Complex value;
  double phi = 1.0;     // spherical function at gamma
  double weight = 1.0;  // (1 + |gamma|)^t
};

class SchwartzSpace;

// Finitely supported element of the weighted convolution algebra at decay
// degree t.  Entries are shortlex-sorted and nonzero; built via SchwartzSpace.
class SchwartzElement {
 public:
  double t() const { return t_; }
  const ModelKey& key() const { return key_; }
  const std::vector<SchwartzEntry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  int support_radius() const;
  Complex value_at(const Word& gamma) const;  // zero off the support

 private:
  friend class SchwartzSpace;
  ModelKey key_;
  double t_ = 0.0;
  std::vector<SchwartzEntry> entries_;
};

// Ambient algebra: the group model, its exact conformal density, a memoized
// spherical-function evaluator, and the derived convergence threshold t0 =
// 2*deg(envelope polynomial) + 1 below which the weight series diverges.
class SchwartzSpace {
 public:
  explicit SchwartzSpace(const GroupModel& m);

  const GroupModel& model() const { return model_; }
  const ConformalDensity& density() const { return mu_; }

  double phi(const Word& gamma);
  const HCEstimateFit& envelope();
  double t0();
  // sup_k |sphere_k| e^{-alpha k}; exact for these models, where the ratio
  // sequence is eventually constant (free) or 2-periodic (free products).
  double count_constant();

  SchwartzElement element(double t, std::vector<std::pair<Word, Complex>> coeffs);
  SchwartzElement delta(double t, const Word& gamma, Complex c = Complex{1.0, 0.0});

 private:
  GroupModel model_;
  ConformalDensity mu_;
  bool radial_phi_ = false;          // free groups: phi depends on |gamma| only
  std::vector<double> phi_by_len_;
  std::map<Word, double> phi_by_word_;
  bool fitted_ = false;
  HCEstimateFit fit_;
  double count_constant_ = 0.0;
};

// max over support of |f(gamma)| (1+|gamma|)^t / phi(gamma); 0 for the zero
// element.
double schwartz_norm(const SchwartzElement& f);

// Exact convolution (f1*f2)(g) = sum_gamma f1(gamma) f2(gamma^{-1} g) over the
// finite supports.  Refuses when |supp f1|*|supp f2| exceeds `cap`.
SchwartzElement convolve(SchwartzSpace& space, const SchwartzElement& f1,
                         const SchwartzElement& f2, double cap = 1e7);

// f*(gamma) = conj(f(gamma^{-1})); norm-preserving since phi is symmetric.
SchwartzElement involution(SchwartzSpace& space, const SchwartzElement& f);

// Truncated kernel sum S_N(g,t) = sum_{|gamma| <= N} phi(g gamma^{-1})
// phi(gamma) (1+|gamma|)^{-t} with a certified bound on the discarded tail,
// assembled from the linear spherical-function envelopes and the sphere-count
// constant.  The ratio S/phi(g) staying bounded over g is the kernel lemma.
struct Trick2Report {
  double partial_sum = 0.0;
  double tail_bound = 0.0;  // +inf when the full series diverges
  double phi_g = 1.0;
  double ratio = 0.0;  // partial_sum / phi_g
  int radius = 0;
  double t = 0.0;
  double threshold = 0.0;  // the space's t0
  bool convergent = false;
};
Trick2Report trick2_sum(SchwartzSpace& space, const Word& g, double t, int radius);
// Brute-force evaluation of the same truncated sum; validation oracle for the
// sphere-stratified fast path.
Trick2Report trick2_sum_direct(SchwartzSpace& space, const Word& g, double t, int radius,
                               double cap = 2e7);

// Certified uniform kernel constant: max over representatives with |g| <=
// max_length of (S_N(g,t) + tail)/phi(g).  Requires t > t0.
double empirical_kernel_constant(SchwartzSpace& space, double t, int radius = 12,
                                 int max_length = 6);

// Closure certificate: ||f1*f2|| <= B_t ||f1|| ||f2|| with B_t = 2^{t+1} C_t
// assembled from the kernel constant; the measured best constant is
// informational.
struct ClosureReport {
  double norm_f1 = 0.0;
  double norm_f2 = 0.0;
  double norm_conv = 0.0;
  double kernel_constant = 0.0;     // C_t
  double assembled_constant = 0.0;  // B_t = 2^{t+1} C_t
  double measured_constant = 0.0;   // norm_conv / (norm_f1 norm_f2)
  bool certified = false;
};
ClosureReport check_algebra_closure(SchwartzSpace& space, const SchwartzElement& f1,
                                    const SchwartzElement& f2, double t);

// l2 operator certificate: ||f*h||_2 <= C_t ||f||_{S_t} ||h||_2.
struct L2BoundReport {
  double f_norm = 0.0;
  double h_norm = 0.0;
  double conv_norm = 0.0;
  double constant = 0.0;  // C_t; constant_squared rides along per the proof
  double constant_squared = 0.0;
  bool certified = false;
};
L2BoundReport check_l2_boundedness(SchwartzSpace& space, const SchwartzElement& f,
                                   const std::vector<std::pair<Word, Complex>>& h, double t);

}  // namespace hyplab
