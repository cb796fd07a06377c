#include "semitorus/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "semitorus/error.hpp"

namespace semitorus {

namespace {

constexpr std::uint64_t kMaxPeriod = 10'000'000;

bool is_uniform(const DigitBernoulli& m) {
  Rational u(1, m.base);
  return std::all_of(m.probs.begin(), m.probs.end(), [&](const Rational& p) { return p == u; });
}

// Digit with probability 1, if any.
std::optional<unsigned> degenerate_digit(const DigitBernoulli& m) {
  for (unsigned d = 0; d < m.base; ++d) {
    if (m.probs[d] == 1) return d;
  }
  return std::nullopt;
}

}  // namespace

MeasureModel MeasureModel::lebesgue() { return MeasureModel(Lebesgue{}); }

MeasureModel MeasureModel::atomic(std::vector<Atom> atoms) {
  require(!atoms.empty(), "atomic measure needs at least one atom");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.point < b.point; });
  Rational total = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(atoms[i].mass > 0, "atom masses must be positive");
    if (i > 0) require(!(atoms[i].point == atoms[i - 1].point), "atoms must be distinct");
    total += atoms[i].mass;
  }
  require(total == 1, "atom masses must sum to exactly 1, got " + semitorus::to_string(total));
  return MeasureModel(AtomicMeasure{std::move(atoms)});
}

MeasureModel MeasureModel::uniform_atomic(const std::vector<Rational>& points) {
  require(!points.empty(), "uniform atomic measure needs points");
  Rational mass(1, static_cast<unsigned long>(points.size()));
  std::vector<Atom> atoms;
  for (const auto& p : points) atoms.push_back({TorusPoint(p), mass});
  return atomic(std::move(atoms));
}

MeasureModel MeasureModel::digit_bernoulli(unsigned base, std::vector<Rational> probs) {
  require(base >= 2, "digit-Bernoulli base must be >= 2");
  require(probs.size() == base, "digit-Bernoulli needs one probability per digit");
  Rational total = 0;
  for (const auto& p : probs) {
    require(p >= 0, "digit probabilities must be nonnegative");
    total += p;
  }
  require(total == 1, "digit probabilities must sum to exactly 1, got " + semitorus::to_string(total));
  return MeasureModel(DigitBernoulli{base, std::move(probs)});
}

MeasureModel MeasureModel::cantor() {
  return digit_bernoulli(3, {Rational(1, 2), Rational(0), Rational(1, 2)});
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

MeasureModel MeasureModel::parse(std::string_view text) {
  std::string t = trim(text);
  if (t == "lebesgue") return lebesgue();
  if (t == "cantor") return cantor();
  const std::string grammar = "measure must match lebesgue | atomic:[p/q=m,...] | bernoulli:base=B,probs=p0,p1,...";
  if (t.rfind("atomic:", 0) == 0) {
    std::string body = trim(std::string_view(t).substr(7));
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
      fail(ErrorKind::Parse, "atomic " + grammar + " (missing brackets)");
    }
    std::vector<Atom> atoms;
    for (const auto& item : split(std::string_view(body).substr(1, body.size() - 2), ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) fail(ErrorKind::Parse, "atom '" + item + "' must be point=mass");
      atoms.push_back({TorusPoint(parse_rational(trim(std::string_view(item).substr(0, eq)))),
                       parse_rational(trim(std::string_view(item).substr(eq + 1)))});
    }
    try {
      return atomic(std::move(atoms));
    } catch (const Error& e) {
      fail(ErrorKind::Parse, std::string("atomic measure: ") + e.what());
    }
  }
  if (t.rfind("bernoulli:", 0) == 0) {
    std::string body = t.substr(10);
    auto probs_at = body.find("probs=");
    if (body.rfind("base=", 0) != 0 || probs_at == std::string::npos) {
      fail(ErrorKind::Parse, grammar);
    }
    std::string base_text = trim(std::string_view(body).substr(5, probs_at - 5));
    if (!base_text.empty() && base_text.back() == ',') base_text.pop_back();
    Rational base = parse_rational(base_text);
    if (base.get_den() != 1 || base < 2 || base > 1000) fail(ErrorKind::Parse, "bernoulli base must be an integer in [2, 1000]");
    std::vector<Rational> probs;
    for (const auto& p : split(std::string_view(body).substr(probs_at + 6), ',')) probs.push_back(parse_rational(p));
    try {
      return digit_bernoulli(static_cast<unsigned>(base.get_num().get_ui()), std::move(probs));
    } catch (const Error& e) {
      fail(ErrorKind::Parse, std::string("bernoulli measure: ") + e.what());
    }
  }
  fail(ErrorKind::Parse, grammar + ", got '" + t + "'");
}

std::string MeasureModel::to_string() const {
  struct Visitor {
    std::string operator()(const Lebesgue&) const { return "lebesgue"; }
    std::string operator()(const AtomicMeasure& m) const {
      std::string s = "atomic:[";
      for (std::size_t i = 0; i < m.atoms.size(); ++i) {
        if (i) s += ",";
        s += semitorus::to_string(m.atoms[i].point.value()) + "=" + semitorus::to_string(m.atoms[i].mass);
      }
      return s + "]";
    }
    std::string operator()(const DigitBernoulli& m) const {
      std::string s = "bernoulli:base=" + std::to_string(m.base) + ",probs=";
      for (std::size_t i = 0; i < m.probs.size(); ++i) {
        if (i) s += ",";
        s += semitorus::to_string(m.probs[i]);
      }
      return s;
    }
  };
  return std::visit(Visitor{}, v_);
}

namespace {

Rational atomic_cdf(const AtomicMeasure& m, const Rational& t) {
  // An atom at 0 sits at 1 under the (0, 1] convention.
  Rational total = 0;
  for (const auto& a : m.atoms) {
    Rational pos = a.point.value() == 0 ? Rational(1) : a.point.value();
    if (pos <= t) total += a.mass;
  }
  return total;
}

// Base-p expansion of t in [0, 1): `prefix` digits then `period` digits
// repeating forever (period empty when the expansion terminates).
struct Expansion {
  std::vector<unsigned> prefix;
  std::vector<unsigned> period;
};

Expansion expand(const Rational& t, unsigned base) {
  Integer p(base);
  Integer den = t.get_den();
  std::size_t pre = 0;
  Integer g;
  while (true) {
    mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
    if (g == 1) break;
    den /= g;
    ++pre;
  }
  std::uint64_t period = 0;
  if (den != 1) {
    Integer r = p % den;
    period = 1;
    while (r != 1) {
      r = (r * p) % den;
      if (++period > kMaxPeriod) {
        fail(ErrorKind::ResourceLimit, "base-" + std::to_string(base) + " period of " + to_string(t) +
                                           " exceeds " + std::to_string(kMaxPeriod) + " digits");
      }
    }
  }
  Expansion out;
  out.prefix.reserve(pre);
  out.period.reserve(period);
  Integer r = t.get_num();
  const Integer& b = t.get_den();
  for (std::uint64_t i = 0; i < pre + period; ++i) {
    r *= p;
    Integer d;
    mpz_fdiv_qr(d.get_mpz_t(), r.get_mpz_t(), r.get_mpz_t(), b.get_mpz_t());
    (i < pre ? out.prefix : out.period).push_back(static_cast<unsigned>(d.get_ui()));
  }
  return out;
}

// Integer form of the digit law: P(d) = weight[d] / denom, P(digit < d) =
// below[d] / denom.
struct DigitWeights {
  Integer denom;
  std::vector<Integer> weight;
  std::vector<Integer> below;
};

DigitWeights weights_of(const DigitBernoulli& m) {
  DigitWeights w;
  w.denom = 1;
  for (const auto& p : m.probs) {
    Integer l;
    mpz_lcm(l.get_mpz_t(), w.denom.get_mpz_t(), p.get_den_mpz_t());
    w.denom = l;
  }
  Integer acc = 0;
  for (const auto& p : m.probs) {
    w.below.push_back(acc);
    Integer wd = p.get_num() * (w.denom / p.get_den());
    w.weight.push_back(wd);
    acc += wd;
  }
  return w;
}

// Folds digits (last to first) onto a tail value num / (tail_den * denom^k).
// Returns the pair (numerator, denominator) of
//   below[d1]/D + w[d1]/D * (below[d2]/D + w[d2]/D * ( ... + tail)).
std::pair<Integer, Integer> fold_digits(const DigitWeights& w, const std::vector<unsigned>& digits,
                                        Integer num, Integer den) {
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    num = w.below[*it] * den + w.weight[*it] * num;
    den *= w.denom;
  }
  return {num, den};
}

Rational bernoulli_cdf(const DigitBernoulli& m, const Rational& t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  DigitWeights w = weights_of(m);
  Expansion e = expand(t, m.base);
  Integer tail_num = 0;
  Integer tail_den = 1;
  if (!e.period.empty()) {
    // G = (A + W G) / D^v, so G = A / (D^v - W).
    auto [a, dv] = fold_digits(w, e.period, Integer(0), Integer(1));
    Integer prod = 1;
    for (unsigned d : e.period) prod *= w.weight[d];
    tail_num = a;
    tail_den = dv - prod;
  }
  auto [num, den] = fold_digits(w, e.prefix, tail_num, tail_den);
  return make_rational(num, den);
}

std::vector<Atom> degenerate_atoms(const DigitBernoulli& m, unsigned digit) {
  return {{TorusPoint(Rational(digit, m.base - 1)), Rational(1)}};
}

}  // namespace

Rational cdf_at(const MeasureModel& mu, const Rational& t) {
  require(t >= 0 && t <= 1, "cdf_at requires t in [0, 1]");
  struct Visitor {
    const Rational& t;
    Rational operator()(const Lebesgue&) const { return t; }
    Rational operator()(const AtomicMeasure& m) const { return atomic_cdf(m, t); }
    Rational operator()(const DigitBernoulli& m) const {
      if (auto d = degenerate_digit(m)) return atomic_cdf(AtomicMeasure{degenerate_atoms(m, *d)}, t);
      if (is_uniform(m)) return t;
      return bernoulli_cdf(m, t);
    }
  };
  return std::visit(Visitor{t}, mu.variant());
}

Rational arc_mass(const MeasureModel& mu, const Arc& arc) {
  if (arc.is_full()) return 1;
  const Rational& s = arc.start().value();
  Rational e = arc.end();
  if (e <= 1) return cdf_at(mu, e) - cdf_at(mu, s);
  return (1 - cdf_at(mu, s)) + cdf_at(mu, e - 1);
}

Rational point_mass(const MeasureModel& mu, const TorusPoint& x) {
  struct Visitor {
    const TorusPoint& x;
    Rational operator()(const Lebesgue&) const { return 0; }
    Rational operator()(const AtomicMeasure& m) const {
      for (const auto& a : m.atoms) {
        if (a.point == x) return a.mass;
      }
      return 0;
    }
    Rational operator()(const DigitBernoulli& m) const {
      if (auto d = degenerate_digit(m)) return (*this)(AtomicMeasure{degenerate_atoms(m, *d)});
      return 0;
    }
  };
  return std::visit(Visitor{x}, mu.variant());
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the pair
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ index);
}

namespace {

// Index of the first cumulative weight exceeding u / 2^64.
template <class Weights>
std::size_t pick(std::uint64_t u, const Weights& masses) {
  Integer scaled_u(static_cast<unsigned long>(u));
  Rational acc = 0;
  Integer two64;
  mpz_ui_pow_ui(two64.get_mpz_t(), 2, 64);
  for (std::size_t i = 0; i < masses.size(); ++i) {
    acc += masses[i];
    if (acc * two64 > scaled_u) return i;
  }
  return masses.size() - 1;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  while (true) {
    std::uint64_t u = rng();
    if (u < limit) return u % n;
  }
}

}  // namespace

TorusPoint sample_point(const MeasureModel& mu, std::uint64_t seed, unsigned depth, unsigned lebesgue_base) {
  require(depth >= 1, "sample_point requires depth >= 1");
  require(lebesgue_base >= 2, "sample_point requires base >= 2");
  std::mt19937_64 rng(seed);
  struct Visitor {
    std::mt19937_64& rng;
    unsigned depth;
    unsigned lebesgue_base;
    // The drawn digits name a cell (c, c + base^-depth]; one extra nonzero
    // anchor digit keeps the point off the cell's excluded left endpoint.
    TorusPoint operator()(const Lebesgue&) const {
      Integer n = 0;
      for (unsigned i = 0; i < depth; ++i) n = n * lebesgue_base + static_cast<unsigned long>(uniform_below(rng, lebesgue_base));
      n = n * lebesgue_base + (lebesgue_base - 1);
      return TorusPoint(make_rational(n, ipow(lebesgue_base, depth + 1)));
    }
    TorusPoint operator()(const AtomicMeasure& m) const {
      std::vector<Rational> masses;
      for (const auto& a : m.atoms) masses.push_back(a.mass);
      return m.atoms[pick(rng(), masses)].point;
    }
    TorusPoint operator()(const DigitBernoulli& m) const {
      if (auto d = degenerate_digit(m)) return degenerate_atoms(m, *d).front().point;
      unsigned anchor = m.base - 1;
      while (m.probs[anchor] == 0) --anchor;
      Integer n = 0;
      for (unsigned i = 0; i < depth; ++i) n = n * m.base + static_cast<unsigned long>(pick(rng(), m.probs));
      n = n * m.base + anchor;
      return TorusPoint(make_rational(n, ipow(m.base, depth + 1)));
    }
  };
  return std::visit(Visitor{rng, depth, lebesgue_base}, mu.variant());
}

bool InvarianceReport::invariant() const { return witness() == nullptr; }

const InvarianceCheck* InvarianceReport::witness() const {
  for (const auto& c : checks) {
    if (!c.equal()) return &c;
  }
  return nullptr;
}

InvarianceReport check_invariance(const MeasureModel& mu, std::uint64_t q, const std::vector<Arc>& test_arcs) {
  require(q >= 1, "check_invariance requires q >= 1");
  InvarianceReport report;
  report.q = q;
  for (const auto& arc : test_arcs) {
    InvarianceCheck c{arc, arc_mass(mu, arc), Rational(0)};
    if (arc.is_full()) {
      c.preimage_mass = 1;
    } else {
      for (const auto& piece : preimage_arcs(arc, q)) c.preimage_mass += arc_mass(mu, piece);
    }
    report.checks.push_back(std::move(c));
  }
  return report;
}

std::vector<Arc> canonical_test_arcs() {
  std::vector<Arc> arcs;
  for (unsigned m = 2; m <= 12; ++m) {
    for (unsigned j = 0; j < m; ++j) {
      arcs.emplace_back(TorusPoint(Rational(j, m)), Rational(1, m));
      if (m > 2) arcs.emplace_back(TorusPoint(Rational(j, m)), Rational(2, m));
    }
  }
  for (unsigned b = 2; b <= 9; ++b) {
    for (unsigned a = 1; a < b; ++a) {
      arcs.push_back(Arc::ball(TorusPoint(Rational(a, b)), Rational(1, 100 * b * b)));
    }
  }
  return arcs;
}

double analytic_entropy(const MeasureModel& mu, std::uint64_t p) {
  require(p >= 2, "analytic_entropy requires p >= 2");
  if (const auto* m = std::get_if<DigitBernoulli>(&mu.variant())) {
    if (!is_uniform(*m) && !degenerate_digit(*m) && m->base != p) {
      fail(ErrorKind::UnsupportedCombination, "analytic entropy of a base-" + std::to_string(m->base) +
                                                  " digit measure is only available for p = " +
                                                  std::to_string(m->base));
    }
  }
  auto report = check_invariance(mu, p, canonical_test_arcs());
  if (const auto* w = report.witness()) {
    fail(ErrorKind::InvarianceViolation,
         "measure " + mu.to_string() + " is not T_" + std::to_string(p) + "-invariant: arc (" +
             to_string(w->arc.start().value()) + ", +" + to_string(w->arc.length()) + "] has mass " +
             to_string(w->mass) + " but preimage mass " + to_string(w->preimage_mass));
  }
  struct Visitor {
    std::uint64_t p;
    double operator()(const Lebesgue&) const { return std::log(static_cast<double>(p)); }
    double operator()(const AtomicMeasure&) const { return 0.0; }
    double operator()(const DigitBernoulli& m) const {
      if (degenerate_digit(m)) return 0.0;
      if (is_uniform(m)) return std::log(static_cast<double>(p));
      double h = 0;
      for (const auto& prob : m.probs) {
        if (prob > 0) h -= to_double(prob) * log_rational(prob);
      }
      return h;
    }
  };
  return std::visit(Visitor{p}, mu.variant());
}

}  // namespace semitorus
