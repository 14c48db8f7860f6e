#include "hyplab/density.hpp"

#include <cmath>
#include <limits>

#include "hyplab/detutil.hpp"

namespace hyplab {

namespace {

bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

ConformalDensity ConformalDensity::exact(const GroupModel& m) {
  ConformalDensity d(m);
  d.kind_ = DensityKind::Exact;
  d.dimension_ = m.alpha();
  d.resolution_ = 1 << 20;
  return d;
}

ConformalDensity ConformalDensity::orbit(const GroupModel& m, double s, int ball_radius,
                                         int depth, double cap) {
  if (s <= m.alpha())
    throw DivergenceError("orbital sum needs an exponent above the critical value");
  if (depth < 1)
    throw DegenerateInputError("orbital density needs depth >= 1");
  if (ball_radius < depth + 5)
    throw ResolutionError("orbital density needs ball radius >= depth + 5");
  ConformalDensity d(m);
  d.kind_ = DensityKind::Orbit;
  d.dimension_ = s;
  d.resolution_ = depth;
  d.s_ = s;
  d.ball_radius_ = ball_radius;
  d.cap_ = cap;
  d.cache_ = std::make_shared<Cache>();
  return d;
}

double ConformalDensity::mass_e(const Word& w) const {
  model_.check_word(w);
  if (kind_ == DensityKind::Orbit) return mass(Word{}, w);
  if (w.empty()) return 1.0;
  const ModelKey& k = model_.key();
  if (k.backend == Backend::FreeGroup) {
    const double br = 2.0 * k.a - 1.0;
    return (1.0 / (2.0 * k.a)) * std::pow(br, -(static_cast<double>(w.size()) - 1.0));
  }
  const double pm = k.a - 1.0, qm = k.b - 1.0;
  const double root = std::sqrt(pm * qm);
  const double mx = 1.0 / (pm + root);
  const double my = mx * std::sqrt(pm / qm);
  double mass = model_.letter_factor(w[0]) == 0 ? mx : my;
  for (std::size_t i = 1; i < w.size(); ++i)
    mass /= model_.letter_factor(w[i]) == 0 ? pm : qm;
  return mass;
}

double ConformalDensity::mass(const Word& basepoint, const Word& w) const {
  model_.check_word(basepoint);
  model_.check_word(w);
  if (kind_ == DensityKind::Orbit) {
    if (static_cast<int>(w.size()) > resolution_)
      throw ResolutionError("cylinder deeper than the orbital density resolution");
    const Table& t = orbit_table(basepoint);
    double sum = 0.0;
    for (auto it = t.buckets.lower_bound(w); it != t.buckets.end() && is_prefix(w, it->first); ++it)
      sum += it->second;
    return sum;
  }
  if (basepoint.empty()) return mass_e(w);
  // exact equivariance: mu_g(cyl w) = mu_e(g^-1 cyl w); when w still sits on
  // g's prefix path the image is not one cylinder, so split into children
  if (is_prefix(w, basepoint)) {
    double sum = 0.0;
    for (Letter s = 0; s < model_.alphabet_size(); ++s) {
      if (!w.empty() && !model_.can_follow(w.back(), s)) continue;
      Word child = w;
      child.push_back(s);
      sum += mass(basepoint, child);
    }
    return sum;
  }
  return mass_e(model_.multiply(model_.inverse(basepoint), w));
}

ConformalDensity::Table ConformalDensity::build_orbit_table(const Word& x) const {
  const int M = resolution_;
  const int N = ball_radius_;
  const int H = std::max(M, static_cast<int>(x.size()) + 2);
  if (model_.ball_count(H) > cap_)
    throw CapExceededError("orbital density near zone exceeds the enumeration cap");
  Table t;
  KahanSum z;
  // near zone: whole ball of radius H around e, pushed along shadow directions
  for (int len = 0; len <= H; ++len) {
    for (const auto& c : model_.annulus_chunks(len, 0.0, 1)) {
      model_.enumerate_chunk(c, [&](const Word& u) {
        if (u == x) return;  // the basepoint itself has no direction to push to
        const int du = model_.distance(x, u);
        if (du > N) return;
        const double wt = std::exp(-s_ * du);
        t.buckets[shadow_direction(model_, x, u).prefix(M)] += wt;
        z.add(wt);
      });
    }
  }
  // deep zone: every |h| > H extends a unique length-H word u and satisfies
  // d(x,h) = d(x,u) + (|h| - H); extension counts stratify in closed form
  for (const auto& c : model_.annulus_chunks(H, 0.0, 1)) {
    model_.enumerate_chunk(c, [&](const Word& u) {
      const int du = model_.distance(x, u);
      double count = 1.0;
      KahanSum acc;
      Letter last = u.back();
      for (int tstep = 1; du + tstep <= N; ++tstep) {
        count *= model_.degree_after(last);
        // the successors of a letter all share a factor; any of them works as
        // the representative for the next step's degree
        last = model_.smallest_extension(Word{last});
        acc.add(std::exp(-s_ * (du + tstep)) * count);
      }
      const double total = acc.get();
      if (total > 0.0) {
        t.buckets[Word(u.begin(), u.begin() + M)] += total;
        z.add(total);
      }
    });
  }
  const double Z = z.get();
  if (Z <= 0.0) throw DegenerateInputError("orbital sum is empty at these parameters");
  for (auto& [key, val] : t.buckets) val /= Z;
  return t;
}

const ConformalDensity::Table& ConformalDensity::orbit_table(const Word& basepoint) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->tables.find(basepoint);
  if (it == cache_->tables.end())
    it = cache_->tables.emplace(basepoint, build_orbit_table(basepoint)).first;
  return it->second;
}

std::vector<std::pair<Word, double>> ConformalDensity::table(const Word& basepoint,
                                                             int depth) const {
  std::vector<std::pair<Word, double>> out;
  for (const Word& w : model_.annulus(depth, 0.0, cap_ > 0 ? cap_ : 1e7))
    out.emplace_back(w, mass(basepoint, w));
  return out;
}

ConformalityReport ConformalDensity::measure_conformality(int depth) const {
  if (depth < 2) throw DegenerateInputError("conformality measurement needs depth >= 2");
  ConformalityReport rep{1.0, 1.0, Word{}, Word{}};
  const auto cells = model_.annulus(depth, 0.0, 1e6);
  for (Letter s = 0; s < model_.alphabet_size(); ++s) {
    const Word y{s};
    for (const Word& w : cells) {
      // Busemann value is constant on cells at least one level past |y|
      const double b = busemann(model_, canonical_direction(model_, w), Word{}, y).value();
      const double expected = std::exp(dimension_ * b) * mass_e(w);
      const double actual = mass(y, w);
      if (expected == 0.0 && actual == 0.0) continue;
      if (expected <= 0.0 || actual <= 0.0) {
        rep.c_q = std::numeric_limits<double>::infinity();
        rep.worst_ratio = 0.0;
        rep.worst_basepoint = y;
        rep.worst_cylinder = w;
        return rep;
      }
      const double ratio = actual / expected;
      const double defect = std::max(ratio, 1.0 / ratio);
      if (defect > rep.c_q) {
        rep.c_q = defect;
        rep.worst_ratio = ratio;
        rep.worst_basepoint = y;
        rep.worst_cylinder = w;
      }
    }
  }
  return rep;
}

AhlforsReport ConformalDensity::certify_ahlfors_regularity(const VisualMetricParams& params,
                                                           int depth) const {
  params.validate(model_);
  if (depth < 1) throw DegenerateInputError("regularity scan needs depth >= 1");
  if (depth > resolution_)
    throw ResolutionError("regularity scan is deeper than the density resolution");
  AhlforsReport rep;
  rep.dimension_d = dimension_ / params.epsilon;
  rep.k = 1.0;
  rep.worst_radius_depth = 0;
  // Ball of radius e^{-eps j} around any direction through a depth-`depth`
  // cylinder is the depth-j prefix cylinder, so scanning prefixes covers all
  // (center, radius) pairs with radii e^{-eps j}, j <= depth.
  for (const Word& w : model_.annulus(depth, 0.0, 1e6)) {
    for (int j = 1; j <= depth; ++j) {
      Word prefix(w.begin(), w.begin() + j);
      const double ball = mass(Word{}, prefix);
      const double rd = std::exp(-rep.dimension_d * params.epsilon * j);
      if (ball <= 0.0)
        throw EstimateInfeasibleError("zero-mass cylinder: no finite regularity constant");
      const double k = std::max(ball / rd, rd / ball);
      if (k > rep.k) {
        rep.k = k;
        rep.worst_center = w;
        rep.worst_radius_depth = j;
      }
    }
  }
  return rep;
}

std::string density_serialize(const ConformalDensity& mu, const VisualMetricParams& params,
                              int depth) {
  params.validate(mu.model());
  if (depth < 1) throw DegenerateInputError("serialization needs depth >= 1");
  const int cq_depth = std::min(depth, 3) < 2 ? 2 : std::min(depth, 3);
  const double c_q = mu.measure_conformality(std::min(cq_depth, mu.resolution())).c_q;

  char buf[128];
  std::string out = "hyplab-density 1\n";
  out += "model " + mu.model().name() + "\n";
  out += mu.kind() == DensityKind::Exact ? "kind exact\n" : "kind orbit\n";
  std::snprintf(buf, sizeof buf, "dimension %.17g\n", mu.dimension());
  out += buf;
  std::snprintf(buf, sizeof buf, "epsilon %.17g\n", params.epsilon);
  out += buf;
  std::snprintf(buf, sizeof buf, "c_q %.17g\n", c_q);
  out += buf;
  std::snprintf(buf, sizeof buf, "depth %d\n", depth);
  out += buf;
  for (const auto& [w, mass] : mu.table(Word{}, depth)) {
    std::snprintf(buf, sizeof buf, "mass %s %.17g\n", mu.model().word_str(w).c_str(), mass);
    out += buf;
  }
  return out;
}

DensityFile density_parse(const std::string& text) {
  DensityFile f;
  std::size_t pos = 0;
  bool saw_magic = false;
  auto next_line = [&](std::string& line) {
    if (pos >= text.size()) return false;
    const std::size_t nl = text.find('\n', pos);
    line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    return true;
  };
  std::string line;
  while (next_line(line)) {
    if (line.empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) throw SerializationError("malformed density line: " + line);
    const std::string tag = line.substr(0, sp);
    const std::string rest = line.substr(sp + 1);
    try {
      if (tag == "hyplab-density") {
        if (rest != "1") throw SerializationError("unsupported density file version " + rest);
        saw_magic = true;
      } else if (tag == "model") {
        f.model = rest;
      } else if (tag == "kind") {
        if (rest != "exact" && rest != "orbit")
          throw SerializationError("unknown density kind " + rest);
        f.kind = rest;
      } else if (tag == "dimension") {
        f.dimension = std::stod(rest);
      } else if (tag == "epsilon") {
        f.epsilon = std::stod(rest);
      } else if (tag == "c_q") {
        f.c_q = std::stod(rest);
      } else if (tag == "depth") {
        f.depth = std::stoi(rest);
      } else if (tag == "mass") {
        const std::size_t sp2 = rest.find(' ');
        if (sp2 == std::string::npos)
          throw SerializationError("malformed mass line: " + line);
        f.masses.emplace_back(rest.substr(0, sp2), std::stod(rest.substr(sp2 + 1)));
      } else {
        throw SerializationError("unknown density header tag " + tag);
      }
    } catch (const std::invalid_argument&) {
      throw SerializationError("unparseable number in density line: " + line);
    } catch (const std::out_of_range&) {
      throw SerializationError("out-of-range number in density line: " + line);
    }
  }
  if (!saw_magic) throw SerializationError("missing hyplab-density header");
  if (f.model.empty()) throw SerializationError("density file lacks a model line");
  return f;
}

}  // namespace hyplab
