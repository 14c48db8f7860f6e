#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "hyplab/boundary.hpp"
#include "hyplab/group.hpp"

namespace hyplab {

using Complex = std::complex<double>;

// A simple function on the boundary: finitely many cylinder cells, each with a
// constant value. Leaves are stored in prefix-tree preorder and tile the
// boundary exactly; `resolution` is the declared depth bound (every leaf is at
// most this deep) that downstream exactness preconditions check against.
class StepFunction {
 public:
  using Leaf = std::pair<Word, Complex>;

  StepFunction() = default;
  StepFunction(const GroupModel& m, std::vector<Leaf> leaves, int resolution);

  static StepFunction constant(const GroupModel& m, Complex value);
  // 1 on the cylinder of `w`, 0 elsewhere (values configurable)
  static StepFunction indicator(const GroupModel& m, const Word& w, Complex inside = 1.0,
                                Complex outside = 0.0);

  const ModelKey& key() const { return key_; }
  int resolution() const { return resolution_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }

  Complex value_at(const Direction& v) const;
  Complex value_on_cylinder(const Word& w) const;  // throws ResolutionError if w is too shallow

  // split leaves until every cell at `depth` or shallower that meets the path
  // of `w` is explicit; value-preserving, raises resolution to at least depth
  StepFunction refined_along(const GroupModel& m, const Word& w) const;
  // declared-resolution bump without changing cells
  StepFunction with_resolution(int resolution) const;

  StepFunction map(const std::function<Complex(Complex)>& f) const;
  double sup_norm() const;

  friend StepFunction combine(const GroupModel& m, const StepFunction& f, const StepFunction& g,
                              const std::function<Complex(Complex, Complex)>& op);

  // left translation: (act(g, f))(v) = f(g^-1 v); resolution grows by |g|
  StepFunction translate(const GroupModel& m, const Word& g) const;

  void validate(const GroupModel& m) const;  // partition + preorder invariants

 private:
  ModelKey key_;
  int resolution_ = 0;
  std::vector<Leaf> leaves_;
};

StepFunction combine(const GroupModel& m, const StepFunction& f, const StepFunction& g,
                     const std::function<Complex(Complex, Complex)>& op);

StepFunction operator_add(const GroupModel& m, const StepFunction& f, const StepFunction& g);
StepFunction operator_sub(const GroupModel& m, const StepFunction& f, const StepFunction& g);
StepFunction operator_mul(const GroupModel& m, const StepFunction& f, const StepFunction& g);
StepFunction scale(const StepFunction& f, Complex c);

double max_abs_diff(const GroupModel& m, const StepFunction& f, const StepFunction& g);

}  // namespace hyplab
