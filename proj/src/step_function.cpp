#include "hyplab/step_function.hpp"

#include <algorithm>

namespace hyplab {

namespace {

bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

StepFunction::StepFunction(const GroupModel& m, std::vector<Leaf> leaves, int resolution)
    : key_(m.key()), resolution_(resolution), leaves_(std::move(leaves)) {
  validate(m);
}

StepFunction StepFunction::constant(const GroupModel& m, Complex value) {
  StepFunction f;
  f.key_ = m.key();
  f.resolution_ = 0;
  f.leaves_.emplace_back(Word{}, value);
  return f;
}

StepFunction StepFunction::indicator(const GroupModel& m, const Word& w, Complex inside,
                                     Complex outside) {
  m.check_word(w);
  if (w.empty()) return constant(m, inside);
  StepFunction f;
  f.key_ = m.key();
  f.resolution_ = static_cast<int>(w.size());
  Word prefix;
  // preorder: siblings before the path letter, then descend, then siblings after
  std::function<void(std::size_t)> descend = [&](std::size_t j) {
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      if (!prefix.empty() && !m.can_follow(prefix.back(), s)) continue;
      prefix.push_back(s);
      if (s == w[j]) {
        if (j + 1 == w.size())
          f.leaves_.emplace_back(prefix, inside);
        else
          descend(j + 1);
      } else {
        f.leaves_.emplace_back(prefix, outside);
      }
      prefix.pop_back();
    }
  };
  descend(0);
  return f;
}

Complex StepFunction::value_at(const Direction& v) const {
  const Word w = v.prefix(std::max(resolution_, 1));
  return value_on_cylinder(w);
}

Complex StepFunction::value_on_cylinder(const Word& w) const {
  auto it = std::lower_bound(leaves_.begin(), leaves_.end(), w,
                             [](const Leaf& l, const Word& key) { return l.first < key; });
  if (it != leaves_.end() && it->first == w) return it->second;
  if (it != leaves_.end() && is_prefix(w, it->first))
    throw ResolutionError("cylinder is shallower than the cells of this step function");
  if (it == leaves_.begin()) throw Error("step function partition lookup failed");
  --it;
  if (!is_prefix(it->first, w)) throw Error("step function partition lookup failed");
  return it->second;
}

StepFunction StepFunction::refined_along(const GroupModel& m, const Word& u) const {
  StepFunction out;
  out.key_ = key_;
  out.resolution_ = std::max(resolution_, static_cast<int>(u.size()) + 1);
  out.leaves_.reserve(leaves_.size() + u.size() * static_cast<std::size_t>(m.alphabet_size()));
  std::function<void(const Word&, Complex)> emit = [&](const Word& w, Complex val) {
    if (!(w.size() <= u.size() && std::equal(w.begin(), w.end(), u.begin()))) {
      out.leaves_.emplace_back(w, val);
      return;
    }
    // w is a (possibly equal) prefix of u: split into children
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      if (!w.empty() && !m.can_follow(w.back(), s)) continue;
      Word child = w;
      child.push_back(s);
      emit(child, val);
    }
  };
  for (const Leaf& l : leaves_) emit(l.first, l.second);
  return out;
}

StepFunction StepFunction::with_resolution(int resolution) const {
  if (resolution < resolution_)
    throw ResolutionError("declared resolution cannot drop below the deepest cell");
  StepFunction out = *this;
  out.resolution_ = resolution;
  return out;
}

StepFunction StepFunction::map(const std::function<Complex(Complex)>& f) const {
  StepFunction out = *this;
  for (Leaf& l : out.leaves_) l.second = f(l.second);
  return out;
}

double StepFunction::sup_norm() const {
  double s = 0.0;
  for (const Leaf& l : leaves_) s = std::max(s, std::abs(l.second));
  return s;
}

StepFunction combine(const GroupModel& m, const StepFunction& f, const StepFunction& g,
                     const std::function<Complex(Complex, Complex)>& op) {
  check_same_model(f.key_, g.key_, "combine");
  check_same_model(f.key_, m.key(), "combine");
  StepFunction out;
  out.key_ = f.key_;
  out.resolution_ = std::max(f.resolution_, g.resolution_);
  std::size_t i = 0, j = 0;
  while (i < f.leaves_.size() && j < g.leaves_.size()) {
    const auto& [wf, vf] = f.leaves_[i];
    const auto& [wg, vg] = g.leaves_[j];
    if (wf == wg) {
      out.leaves_.emplace_back(wf, op(vf, vg));
      ++i;
      ++j;
    } else if (is_prefix(wf, wg)) {
      out.leaves_.emplace_back(wg, op(vf, vg));
      ++j;
      if (j == g.leaves_.size() || !is_prefix(wf, g.leaves_[j].first)) ++i;
    } else if (is_prefix(wg, wf)) {
      out.leaves_.emplace_back(wf, op(vf, vg));
      ++i;
      if (i == f.leaves_.size() || !is_prefix(wg, f.leaves_[i].first)) ++j;
    } else {
      throw Error("step function partitions fell out of alignment");
    }
  }
  if (i != f.leaves_.size() || j != g.leaves_.size())
    throw Error("step function partitions fell out of alignment");
  return out;
}

StepFunction StepFunction::translate(const GroupModel& m, const Word& g) const {
  check_same_model(key_, m.key(), "translate");
  m.check_word(g);
  if (g.empty()) return *this;
  const Word u = m.inverse(g);
  StepFunction split = refined_along(m, u);
  StepFunction out;
  out.key_ = key_;
  out.resolution_ = split.resolution_ + static_cast<int>(g.size());
  out.leaves_.reserve(split.leaves_.size());
  for (const Leaf& l : split.leaves_) out.leaves_.emplace_back(m.multiply(g, l.first), l.second);
  std::sort(out.leaves_.begin(), out.leaves_.end(),
            [](const Leaf& a, const Leaf& b) { return a.first < b.first; });
  return out;
}

void StepFunction::validate(const GroupModel& m) const {
  check_same_model(key_, m.key(), "validate");
  if (leaves_.empty()) throw Error("step function has no cells");
  for (const Leaf& l : leaves_) {
    m.check_word(l.first);
    if (static_cast<int>(l.first.size()) > resolution_)
      throw ResolutionError("cell deeper than the declared resolution");
  }
  // preorder tiling: a depth-first walk must meet every leaf exactly once
  std::size_t i = 0;
  std::function<void(const Word&)> cover = [&](const Word& prefix) {
    if (i < leaves_.size() && leaves_[i].first == prefix) {
      ++i;
      return;
    }
    if (static_cast<int>(prefix.size()) >= resolution_ + 1)
      throw Error("step function cells do not tile the boundary");
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      if (!prefix.empty() && !m.can_follow(prefix.back(), s)) continue;
      Word child = prefix;
      child.push_back(s);
      cover(child);
    }
  };
  cover(Word{});
  if (i != leaves_.size()) throw Error("step function cells do not tile the boundary");
}

StepFunction operator_add(const GroupModel& m, const StepFunction& f, const StepFunction& g) {
  return combine(m, f, g, [](Complex a, Complex b) { return a + b; });
}
StepFunction operator_sub(const GroupModel& m, const StepFunction& f, const StepFunction& g) {
  return combine(m, f, g, [](Complex a, Complex b) { return a - b; });
}
StepFunction operator_mul(const GroupModel& m, const StepFunction& f, const StepFunction& g) {
  return combine(m, f, g, [](Complex a, Complex b) { return a * b; });
}
StepFunction scale(const StepFunction& f, Complex c) {
  return f.map([c](Complex v) { return c * v; });
}

double max_abs_diff(const GroupModel& m, const StepFunction& f, const StepFunction& g) {
  return operator_sub(m, f, g).sup_norm();
}

}  // namespace hyplab
