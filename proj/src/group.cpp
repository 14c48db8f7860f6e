#include "hyplab/group.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>

namespace hyplab {

namespace {

// letter names for free groups: generator i -> 'a'+i, inverse -> 'A'+i
char free_letter_char(Letter s) {
  const int gen = s >> 1;
  return static_cast<char>(((s & 1) ? 'A' : 'a') + gen);
}

}  // namespace

GroupModel GroupModel::free_group(int rank) {
  if (rank < 2) throw DegenerateInputError("free group rank must be >= 2");
  if (rank > 13) throw DegenerateInputError("free group rank capped at 13 (letter names a..m)");
  GroupModel m;
  m.key_ = ModelKey{Backend::FreeGroup, rank, 0};
  m.nletters_ = 2 * rank;
  m.inv_.resize(m.nletters_);
  m.factor_.resize(m.nletters_);
  m.expo_.assign(m.nletters_, 1);
  for (Letter s = 0; s < m.nletters_; ++s) {
    m.inv_[s] = s ^ 1;
    m.factor_[s] = static_cast<std::int16_t>(s >> 1);
  }
  m.growth_ = 2.0 * rank - 1.0;
  m.alpha_ = std::log(m.growth_);
  return m;
}

GroupModel GroupModel::cyclic_free_product(int p, int q) {
  if (p < 2 || q < 2) throw DegenerateInputError("cyclic factor orders must be >= 2");
  if (p == 2 && q == 2) throw DegenerateInputError("Z2 * Z2 is not hyperbolic-of-exponential-growth; orders (2,2) rejected");
  GroupModel m;
  m.key_ = ModelKey{Backend::CyclicFreeProduct, p, q};
  m.nletters_ = (p - 1) + (q - 1);
  m.inv_.resize(m.nletters_);
  m.factor_.resize(m.nletters_);
  m.expo_.resize(m.nletters_);
  for (Letter s = 0; s < m.nletters_; ++s) {
    const bool first = s < p - 1;
    const int ord = first ? p : q;
    const int e = first ? (s + 1) : (s - (p - 1) + 1);
    m.factor_[s] = first ? 0 : 1;
    m.expo_[s] = static_cast<std::int16_t>(e);
    const int einv = ord - e;
    m.inv_[s] = static_cast<Letter>(first ? (einv - 1) : (p - 1 + einv - 1));
  }
  // |C_{n+2}| = (p-1)(q-1) |C_n| exactly, so the growth rate is the sqrt
  m.growth_ = std::sqrt(static_cast<double>(p - 1) * static_cast<double>(q - 1));
  m.alpha_ = 0.5 * std::log(static_cast<double>(p - 1) * static_cast<double>(q - 1));
  return m;
}

GroupModel GroupModel::parse(const std::string& spec) {
  auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (head == "free") return free_group(std::stoi(tail));
    if (head == "zfp") {
      auto comma = tail.find(',');
      if (comma == std::string::npos) throw DegenerateInputError("zfp spec needs two orders");
      return cyclic_free_product(std::stoi(tail.substr(0, comma)), std::stoi(tail.substr(comma + 1)));
    }
  } catch (const std::invalid_argument&) {
    throw DegenerateInputError("unparsable group spec: " + spec);
  } catch (const std::out_of_range&) {
    throw DegenerateInputError("unparsable group spec: " + spec);
  }
  throw DegenerateInputError("unknown group spec '" + spec + "' (want free:K or zfp:P,Q)");
}

std::string GroupModel::name() const {
  std::ostringstream os;
  if (key_.backend == Backend::FreeGroup)
    os << "free:" << key_.a;
  else
    os << "zfp:" << key_.a << "," << key_.b;
  return os.str();
}

int GroupModel::degree_after(Letter prev) const {
  if (key_.backend == Backend::FreeGroup) return nletters_ - 1;
  return factor_[prev] == 0 ? (key_.b - 1) : (key_.a - 1);
}

Letter GroupModel::smallest_extension(const Word& w, Letter forbidden) const {
  for (Letter s = 0; s < nletters_; ++s) {
    if (s == forbidden) continue;
    if (!w.empty() && !can_follow(w.back(), s)) continue;
    return s;
  }
  throw DegenerateInputError("no admissible extension letter");  // unreachable for rank>=2 models
}

bool GroupModel::is_normal_form(const Word& w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0 || w[i] >= nletters_) return false;
    if (i > 0 && !can_follow(w[i - 1], w[i])) return false;
  }
  return true;
}

void GroupModel::check_word(const Word& w) const {
  if (!is_normal_form(w)) throw DegenerateInputError("word is not in normal form for " + name());
}

Word GroupModel::multiply(const Word& a, const Word& b) const {
  Word r = a;
  r.reserve(a.size() + b.size());
  for (Letter s : b) {
    if (r.empty()) {
      r.push_back(s);
      continue;
    }
    const Letter back = r.back();
    if (key_.backend == Backend::FreeGroup) {
      if (back == (s ^ 1))
        r.pop_back();
      else
        r.push_back(s);
    } else {
      if (factor_[back] != factor_[s]) {
        r.push_back(s);
      } else {
        const int ord = factor_[s] == 0 ? key_.a : key_.b;
        const int e = (expo_[back] + expo_[s]) % ord;
        if (e == 0)
          r.pop_back();
        else
          r.back() = static_cast<Letter>(factor_[s] == 0 ? (e - 1) : (key_.a - 1 + e - 1));
      }
    }
  }
  return r;
}

Word GroupModel::inverse(const Word& a) const {
  Word r(a.rbegin(), a.rend());
  for (Letter& s : r) s = inv_[s];
  return r;
}

int GroupModel::distance(const Word& a, const Word& b) const {
  // d(a,b) = |a^-1 b|; cancellation happens only at the junction, so walk it
  // directly instead of materializing the product.
  std::size_t i = 0;
  const std::size_t n = std::min(a.size(), b.size());
  while (i < n && a[i] == b[i]) ++i;
  int len = static_cast<int>(a.size() - i + b.size() - i);
  if (key_.backend == Backend::CyclicFreeProduct && i < a.size() && i < b.size() &&
      factor_[a[i]] == factor_[b[i]])
    --len;  // diverging syllables of the same factor merge into one
  return len;
}

HalfInt GroupModel::gromov(const Word& y, const Word& z, const Word& x) const {
  const int dxy = distance(x, y);
  const int dxz = distance(x, z);
  const int dyz = distance(y, z);
  return HalfInt{dxy + dxz - dyz};
}

bool GroupModel::shortlex_less(const Word& a, const Word& b) const {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string GroupModel::word_str(const Word& w) const {
  if (w.empty()) return "e";
  std::string s;
  if (key_.backend == Backend::FreeGroup) {
    s.reserve(w.size());
    for (Letter l : w) s.push_back(free_letter_char(l));
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s.push_back('.');
      s.push_back(factor_[w[i]] == 0 ? 'x' : 'y');
      s += std::to_string(expo_[w[i]]);
    }
  }
  return s;
}

Word GroupModel::word_parse(const std::string& s) const {
  Word w;
  if (s.empty() || s == "e") return w;
  if (key_.backend == Backend::FreeGroup) {
    for (char c : s) {
      int gen, bar;
      if (c >= 'a' && c < 'a' + key_.a) {
        gen = c - 'a';
        bar = 0;
      } else if (c >= 'A' && c < 'A' + key_.a) {
        gen = c - 'A';
        bar = 1;
      } else {
        throw DegenerateInputError(std::string("bad letter '") + c + "' in free-group word");
      }
      w.push_back(static_cast<Letter>(2 * gen + bar));
    }
  } else {
    std::size_t i = 0;
    while (i < s.size()) {
      const char f = s[i++];
      if (f != 'x' && f != 'y') throw DegenerateInputError("bad syllable in word: " + s);
      if (i < s.size() && s[i] == '^') ++i;
      int e = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) e = e * 10 + (s[i++] - '0');
      if (e == 0) e = 1;
      const int ord = f == 'x' ? key_.a : key_.b;
      if (e >= ord) throw DegenerateInputError("syllable exponent out of range in word: " + s);
      w.push_back(static_cast<Letter>(f == 'x' ? e - 1 : key_.a - 1 + e - 1));
      if (i < s.size()) {
        if (s[i] != '.') throw DegenerateInputError("expected '.' between syllables in word: " + s);
        ++i;
      }
    }
  }
  check_word(w);
  return w;
}

double GroupModel::sphere_count(int n) const {
  if (n < 0) return 0.0;
  if (n == 0) return 1.0;
  if (key_.backend == Backend::FreeGroup)
    return 2.0 * key_.a * std::pow(2.0 * key_.a - 1.0, n - 1);
  const double pm = key_.a - 1.0, qm = key_.b - 1.0;
  const int hi = (n + 1) / 2, lo = n / 2;
  return std::pow(pm, hi) * std::pow(qm, lo) + std::pow(qm, hi) * std::pow(pm, lo);
}

double GroupModel::log_sphere_count(int n) const {
  if (n <= 0) return 0.0;
  if (key_.backend == Backend::FreeGroup)
    return std::log(2.0 * key_.a) + (n - 1) * std::log(2.0 * key_.a - 1.0);
  const double lp = std::log(key_.a - 1.0), lq = std::log(key_.b - 1.0);
  const int hi = (n + 1) / 2, lo = n / 2;
  const double t1 = hi * lp + lo * lq, t2 = hi * lq + lo * lp;
  const double m = std::max(t1, t2);
  return m + std::log(std::exp(t1 - m) + std::exp(t2 - m));
}

double GroupModel::ball_count(int n) const {
  double c = 0.0;
  for (int j = 0; j <= n; ++j) c += sphere_count(j);
  return c;
}

void GroupModel::annulus_window(int n, double rho, int* lo, int* hi) {
  *lo = std::max(0, static_cast<int>(std::ceil(n - rho - 1e-12)));
  *hi = static_cast<int>(std::floor(n + rho + 1e-12));
}

double GroupModel::annulus_count(int n, double rho) const {
  int lo, hi;
  annulus_window(n, rho, &lo, &hi);
  double c = 0.0;
  for (int j = lo; j <= hi; ++j) c += sphere_count(j);
  return c;
}

void GroupModel::guard_cap(int n, double rho, double cap) const {
  const double predicted = annulus_count(n, rho);
  if (predicted > cap) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "annulus(n=%d, rho=%g) holds %.0f elements, over the cap of %.0f", n, rho,
                  predicted, cap);
    throw CapExceededError(buf);
  }
}

std::vector<GroupModel::AnnulusChunk> GroupModel::annulus_chunks(int n, double rho,
                                                                 int split_depth) const {
  int lo, hi;
  annulus_window(n, rho, &lo, &hi);
  std::vector<AnnulusChunk> chunks;
  for (int len = lo; len <= hi; ++len) {
    const int d = std::min(split_depth, len);
    if (d == 0) {
      chunks.push_back(AnnulusChunk{len, Word{}});
      continue;
    }
    // all normal-form prefixes of length d, lex order
    Word w;
    dfs_fixed_length(w, d, [&](const Word& pre) { chunks.push_back(AnnulusChunk{len, pre}); });
  }
  return chunks;
}

CriticalExponentEstimate GroupModel::estimate_critical_exponent(int radius) const {
  if (radius < 5) throw DegenerateInputError("critical exponent estimate needs radius >= 5");
  CriticalExponentEstimate e{};
  e.raw = log_sphere_count(radius) / radius;
  // one-step log ratio converges immediately for the free group; the free
  // product's counts oscillate with period two, so difference across two steps
  if (key_.backend == Backend::FreeGroup)
    e.extrapolated = log_sphere_count(radius) - log_sphere_count(radius - 1);
  else
    e.extrapolated = 0.5 * (log_sphere_count(radius) - log_sphere_count(radius - 2));
  return e;
}

namespace {

// four-point hyperbolicity constant over a ball, exact in half-integers;
// basepoint fixed at e (the metric is homogeneous)
int delta_halves_by_scan(const GroupModel& m, int radius) {
  std::vector<Word> ball;
  {
    Word w;
    ball.push_back(w);
    for (int len = 1; len <= radius; ++len)
      for (const auto& c : m.annulus_chunks(len, 0.0, 1))
        m.enumerate_chunk(c, [&](const Word& u) { ball.push_back(u); });
  }
  const int N = static_cast<int>(ball.size());
  // G[i][j] holds 2*(ball[i], ball[j])_e = |ball[i]| + |ball[j]| - d(i,j)
  std::vector<std::vector<int>> G(N, std::vector<int>(N));
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const int g = static_cast<int>(ball[i].size() + ball[j].size()) - m.distance(ball[i], ball[j]);
      G[i][j] = g;
      G[j][i] = g;
    }
  int worst = 0;
  for (int y = 0; y < N; ++y)
    for (int z = 0; z < N; ++z) {
      int best = -1;  // max over u of min(G[y][u], G[u][z])
      const auto& gy = G[y];
      const auto& gz = G[z];
      for (int u = 0; u < N; ++u) best = std::max(best, std::min(gy[u], gz[u]));
      worst = std::max(worst, best - gy[z]);
    }
  return worst;
}

struct DeltaCert {
  int halves;
  int radius;
};

std::map<std::pair<int, int>, DeltaCert> g_delta_memo;
std::mutex g_delta_mutex;

DeltaCert delta_cert(const GroupModel& m) {
  if (m.key().backend == Backend::FreeGroup) return DeltaCert{0, 0};
  const auto pq = std::make_pair(m.key().a, m.key().b);
  std::lock_guard<std::mutex> lock(g_delta_mutex);
  auto it = g_delta_memo.find(pq);
  if (it != g_delta_memo.end()) return it->second;
  // scan the largest ball of at most 1500 elements, radius capped at 12
  int radius = 12;
  while (radius > 2 && m.ball_count(radius) > 1500) --radius;
  DeltaCert cert{delta_halves_by_scan(m, radius), radius};
  g_delta_memo[pq] = cert;
  return cert;
}

}  // namespace

double GroupModel::delta() const { return delta_cert(*this).halves * 0.5; }

int GroupModel::delta_certified_radius() const { return delta_cert(*this).radius; }

}  // namespace hyplab
