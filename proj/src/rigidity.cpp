#include "semitorus/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <tuple>

#include "semitorus/error.hpp"

namespace semitorus {

namespace {

unsigned bit_length(const Integer& z) {
  return z == 0 ? 0 : static_cast<unsigned>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

Integer pow2(unsigned bits) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, bits);
  return out;
}

// Adjacent pair in circular order: `from` reaches `to` going forward by gap.
struct GapPair {
  std::size_t from;
  std::size_t to;
  Integer gap;
};

// Circular gaps between consecutive values in [0, one), sorted ascending.
std::vector<GapPair> circular_gaps(const std::vector<Integer>& sorted, const Integer& one) {
  std::vector<GapPair> gaps;
  const std::size_t n = sorted.size();
  for (std::size_t i = 0; i + 1 < n; ++i) gaps.push_back({i, i + 1, sorted[i + 1] - sorted[i]});
  gaps.push_back({n - 1, 0, sorted[0] + one - sorted[n - 1]});
  return gaps;
}

// Smaller ell first, then smaller q2.
bool better(const Integer& q1, const Integer& q2, const Integer& best_q1, const Integer& best_q2) {
  Integer ell = q1 - q2;
  Integer best_ell = best_q1 - best_q2;
  return ell < best_ell || (ell == best_ell && q2 < best_q2);
}

std::optional<CollisionWitness> rational_collision(const Rational& x, const std::vector<Integer>& elements,
                                                   const Rational& delta) {
  const Integer& a = x.get_num();
  const Integer& b = x.get_den();
  std::vector<std::pair<Integer, Integer>> residues;  // (q a mod b, q)
  residues.reserve(elements.size());
  for (const auto& q : elements) {
    Integer r = (q * a) % b;
    residues.emplace_back(r, q);
  }
  std::sort(residues.begin(), residues.end());

  std::optional<CollisionWitness> best;
  auto consider = [&](const Integer& q1, const Integer& q2, const TorusPoint& point, bool exact,
                      const Rational& gap) {
    if (best && !better(q1, q2, best->q1, best->q2)) return;
    CollisionWitness w;
    w.q1 = q1;
    w.q2 = q2;
    w.overlap_point = point;
    w.ell = q1 - q2;
    w.k = round_nearest(w.ell * x);
    w.exact = exact;
    w.gap_upper = gap;
    best = w;
  };

  for (std::size_t i = 0; i + 1 < residues.size(); ++i) {
    if (residues[i].first == residues[i + 1].first) {
      consider(residues[i + 1].second, residues[i].second, TorusPoint(make_rational(residues[i].first, b)), true,
               Rational(0));
    }
  }
  if (best) return best;

  std::vector<Integer> values;
  for (const auto& r : residues) values.push_back(r.first);
  auto gaps = circular_gaps(values, b);
  Integer smallest = std::min_element(gaps.begin(), gaps.end(), [](const GapPair& u, const GapPair& v) {
                       return u.gap < v.gap;
                     })->gap;
  Rational gap = make_rational(smallest, b);
  if (gap > 2 * delta) return std::nullopt;
  for (const auto& g : gaps) {
    if (g.gap != smallest) continue;
    const Integer& qa = residues[g.from].second;
    const Integer& qb = residues[g.to].second;
    Rational mid = make_rational(2 * residues[g.from].first + g.gap, 2 * b);
    consider(std::max(qa, qb), std::min(qa, qb), TorusPoint(mid), false, gap);
  }
  return best;
}

std::optional<CollisionWitness> irrational_collision(const AngleSpec& x, const std::vector<Integer>& elements,
                                                     const Rational& delta, PrecisionPolicy policy) {
  unsigned bits = std::max(policy.start_bits,
                           bit_length(elements.back()) + bit_length(ceil(1 / delta)) + 8);
  const Rational two_delta = 2 * delta;
  while (true) {
    FixedReal alpha = eval_angle(x, bits).frac();
    const unsigned scale = alpha.scale();
    const Integer one = pow2(scale);
    struct Entry {
      Integer m;
      Integer q;
      Integer r;
    };
    std::vector<Entry> pts;
    pts.reserve(elements.size());
    for (const auto& q : elements) {
      FixedReal p = alpha.times(q).frac();
      pts.push_back({p.mantissa(), q, p.radius_ulps()});
    }
    std::sort(pts.begin(), pts.end(), [](const Entry& u, const Entry& v) {
      return std::tie(u.m, u.q) < std::tie(v.m, v.q);
    });
    Integer r_max = 0;
    std::vector<Integer> values;
    for (const auto& p : pts) {
      values.push_back(p.m);
      if (p.r > r_max) r_max = p.r;
    }
    auto gaps = circular_gaps(values, one);
    // Sorted values move by at most r_max, so every true gap is within
    // 2 r_max of the computed one.
    Integer smallest = gaps.front().gap;
    for (const auto& g : gaps) smallest = std::min(smallest, g.gap);
    if (make_rational(smallest - 2 * r_max, one) > two_delta) return std::nullopt;

    const GapPair* chosen = nullptr;
    Integer chosen_upper;
    for (const auto& g : gaps) {
      Integer upper = g.gap + pts[g.from].r + pts[g.to].r;
      if (chosen == nullptr || upper < chosen_upper) {
        chosen = &g;
        chosen_upper = upper;
      }
    }
    // Every pair that might be the true minimum must share one ell.
    std::set<Integer> ells;
    std::optional<std::pair<Integer, Integer>> pick;
    std::optional<Rational> mid;
    for (const auto& g : gaps) {
      if (g.gap - 2 * r_max > chosen_upper) continue;
      Integer q1 = std::max(pts[g.from].q, pts[g.to].q);
      Integer q2 = std::min(pts[g.from].q, pts[g.to].q);
      ells.insert(q1 - q2);
      if (!pick || better(q1, q2, pick->first, pick->second)) {
        pick = std::make_pair(q1, q2);
        mid = make_rational(2 * pts[g.from].m + g.gap, 2 * one);
      }
    }
    bool decided = ells.size() == 1 && make_rational(chosen_upper, one) <= two_delta;
    if (decided) {
      CollisionWitness w;
      w.q1 = pick->first;
      w.q2 = pick->second;
      w.ell = w.q1 - w.q2;
      w.overlap_point = TorusPoint(*mid);
      w.k = round_nearest(alpha.times(w.ell).midpoint());
      w.exact = false;
      w.gap_upper = make_rational(chosen_upper, one);
      return w;
    }
    if (bits >= policy.cap_bits) {
      fail(ErrorKind::PrecisionExhausted, "collision scan for " + x.to_string() + " undecided at " +
                                              std::to_string(bits) + " bits");
    }
    bits = std::min(policy.cap_bits, 2 * bits);
  }
}

}  // namespace

std::vector<DilationImage> dilation_images(const TorusPoint& x, const Rational& delta, const GeneratorSet& gens,
                                           const Integer& limit) {
  require(delta > 0 && delta < Rational(1, 2), "dilation_images requires 0 < delta < 1/2");
  require(limit >= gens.smallest(), "dilation_images requires M >= smallest generator");
  Arc ball = Arc::ball(x, delta);
  std::vector<DilationImage> out;
  for (const auto& q : enumerate_up_to(gens, limit)) out.push_back({q, dilate_arc(ball, q)});
  return out;
}

std::optional<CollisionWitness> find_point_collision(const AngleSpec& x, const std::vector<Integer>& elements,
                                                     const Rational& delta, PrecisionPolicy policy) {
  require(delta > 0 && delta < Rational(1, 2), "collision tolerance must lie in (0, 1/2)");
  if (elements.size() < 2) {
    fail(ErrorKind::InsufficientElements,
         "collision search needs at least 2 semigroup elements, got " + std::to_string(elements.size()));
  }
  if (const auto* r = std::get_if<RationalAngle>(&x.variant())) {
    return rational_collision(reduce_mod1(r->value).value(), elements, delta);
  }
  return irrational_collision(x, elements, delta, policy);
}

std::optional<CollisionWitness> find_point_collision(const AngleSpec& x, const GeneratorSet& gens,
                                                     const Integer& limit, const Rational& delta,
                                                     PrecisionPolicy policy) {
  return find_point_collision(x, enumerate_up_to(gens, limit), delta, policy);
}

namespace {

struct Piece {
  Rational lo;  // (lo, hi]
  Rational hi;
  std::size_t index;
};

std::vector<Piece> pieces_of(const Arc& arc, std::size_t index) {
  if (arc.is_full()) return {{Rational(0), Rational(1), index}};
  const Rational& s = arc.start().value();
  Rational e = arc.end();
  if (e <= 1) return {{s, e, index}};
  return {{s, Rational(1), index}, {Rational(0), e - 1, index}};
}

// Two distinct arcs that intersect, found by sweeping piece endpoints.
std::optional<std::pair<std::size_t, std::size_t>> overlapping_pair(const std::vector<DilationImage>& arcs) {
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (auto& p : pieces_of(arcs[i].arc, i)) pieces.push_back(std::move(p));
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return std::tie(a.lo, a.hi, a.index) < std::tie(b.lo, b.hi, b.index);
  });
  // The two earlier pieces with largest right ends, from distinct arcs.
  const Piece* first = nullptr;
  const Piece* second = nullptr;
  for (const auto& p : pieces) {
    for (const Piece* c : {first, second}) {
      if (c != nullptr && c->index != p.index && p.lo < c->hi) return std::make_pair(c->index, p.index);
    }
    if (first == nullptr || p.hi > first->hi) {
      if (first == nullptr || first->index != p.index) second = first;
      first = &p;
    } else if (p.index != first->index && (second == nullptr || p.hi > second->hi)) {
      second = &p;
    }
  }
  return std::nullopt;
}

}  // namespace

PigeonholeReport measure_pigeonhole(const MeasureModel& mu, const TorusPoint& x, const GeneratorSet& gens,
                                    const Integer& limit, const Rational& beta,
                                    std::optional<Rational> delta_override) {
  require(beta > 0, "measure_pigeonhole requires beta > 0");
  PigeonholeReport r;
  r.limit = limit;
  r.beta = beta;
  r.delta = delta_override ? *delta_override : make_rational(1, ipow(limit, 5));
  r.arcs = dilation_images(x, r.delta, gens, limit);
  r.total_mass = 0;
  for (const auto& img : r.arcs) {
    Rational m = arc_mass(mu, img.arc);
    if (m > 0 && ball_mass_exceeds(m, r.delta, beta)) ++r.heavy_arcs;
    r.total_mass += m;
    r.masses.push_back(std::move(m));
  }
  r.forced = r.total_mass > 1;
  if (r.forced) {
    auto pair = overlapping_pair(r.arcs);
    if (!pair) fail(ErrorKind::ConstructionViolation, "arc masses exceed 1 but no overlapping pair was found");
    const auto& u = r.arcs[pair->first];
    const auto& v = r.arcs[pair->second];
    auto point = common_point(u.arc, v.arc);
    if (!point) fail(ErrorKind::ConstructionViolation, "sweep pair failed the intersection re-check");
    r.pair = std::make_pair(std::max(u.q, v.q), std::min(u.q, v.q));
    r.overlap_point = *point;
  }
  return r;
}

namespace {

// |x - c| <= kappa for the representative of x in [0, 1).
bool kappa_holds(const AngleSpec& x, const Rational& c, const Rational& kappa, PrecisionPolicy policy) {
  if (const auto* r = std::get_if<RationalAngle>(&x.variant())) {
    return abs(reduce_mod1(r->value).value() - c) <= kappa;
  }
  unsigned bits = std::max(policy.start_bits, bit_length(ceil(1 / kappa)) + 8);
  while (true) {
    FixedReal v = eval_angle(x, bits).frac();
    Rational lo = v.lower() - c;
    Rational hi = v.upper() - c;
    Rational upper = std::max(abs(lo), abs(hi));
    Rational lower = (lo <= 0 && hi >= 0) ? Rational(0) : std::min(abs(lo), abs(hi));
    if (upper <= kappa) return true;
    if (lower > kappa) return false;
    if (bits >= policy.cap_bits) {
      fail(ErrorKind::PrecisionExhausted, "kappa bound for " + x.to_string() + " undecided at " +
                                              std::to_string(bits) + " bits");
    }
    bits = std::min(policy.cap_bits, 2 * bits);
  }
}

}  // namespace

ReconstructionTrace reconstruct_rational(const AngleSpec& x, SemigroupCache& cache,
                                         const ReconstructionOptions& options) {
  require(options.max_doublings >= 1, "reconstruct_rational requires at least one doubling");
  require(options.delta_exponent >= 2, "delta exponent must be at least 2");
  require(options.m1 >= 2, "reconstruct_rational requires M1 >= 2");
  ReconstructionTrace trace;
  Integer m = options.m1;
  for (unsigned stage = 0; stage <= options.max_doublings; ++stage) {
    if (stage > 0) m = m * m;
    ReconstructionStage st;
    st.limit = m;
    st.delta = make_rational(1, ipow(m, options.delta_exponent));
    st.kappa_bound = make_rational(2, ipow(m, options.delta_exponent - 1));
    const auto& elements = cache.elements_up_to(m);
    if (elements.size() < 2) {
      fail(ErrorKind::InsufficientElements, "fewer than 2 semigroup elements below M1 = " + to_string(m));
    }
    st.witness = find_point_collision(x, elements, st.delta, options.policy);
    if (!st.witness) {
      st.note = "no pair within 2 delta";
      trace.stages.push_back(std::move(st));
      trace.reason = "stage " + std::to_string(stage + 1) + " (M = " + to_string(m) + "): no collision";
      return trace;
    }
    st.candidate = make_rational(st.witness->k, st.witness->ell);
    st.kappa_verified = kappa_holds(x, *st.candidate, st.kappa_bound, options.policy);
    if (!st.kappa_verified) {
      st.note = "kappa bound violated";
      trace.stages.push_back(std::move(st));
      trace.reason = "stage " + std::to_string(stage + 1) + ": |x - k/l| exceeds 2 M^-4";
      return trace;
    }
    if (!trace.stages.empty()) {
      const auto& prev = trace.stages.back();
      if (prev.candidate && *prev.candidate == *st.candidate) {
        Rational spacing = make_rational(1, prev.candidate->get_den() * m);
        if (prev.kappa_bound + st.kappa_bound < spacing) {
          st.note = "stabilised";
          trace.certified = true;
          trace.value = *st.candidate;
          trace.stages.push_back(std::move(st));
          return trace;
        }
        st.note = "repeated candidate, kappa bounds not separated";
      } else {
        st.note = "candidate changed";
      }
    }
    trace.stages.push_back(std::move(st));
  }
  trace.reason = "candidates did not stabilise within " + std::to_string(trace.stages.size()) + " stages";
  return trace;
}

ReconstructionTrace reconstruct_rational(const AngleSpec& x, const GeneratorSet& gens,
                                         const ReconstructionOptions& options) {
  SemigroupCache cache(gens);
  return reconstruct_rational(x, cache, options);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::FiniteSupportDetected:
      return "FiniteSupportDetected";
    case Verdict::LebesgueConsistent:
      return "LebesgueConsistent";
    case Verdict::PositiveEntropyNoConclusion:
      return "PositiveEntropyNoConclusion";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

namespace {

void zero_entropy_branch(const MeasureModel& mu, const GeneratorSet& gens, const ClassifyParams& params,
                         ClassificationReport& report) {
  report.lemma1 = lemma1_scan(mu, params.beta, params.eps, params.delta_grid, params.samples, params.seed);
  if (!report.lemma1->holds) report.notes.push_back("ball-mass scan did not hold on the delta grid");

  std::set<TorusPoint> sampled(report.lemma1->points.begin(), report.lemma1->points.end());
  SemigroupCache cache(gens);
  ReconstructionOptions opts;
  opts.m1 = params.m1;
  opts.max_doublings = params.doublings;
  std::set<TorusPoint> recovered;
  bool all_certified = true;
  for (const auto& x : sampled) {
    auto trace = reconstruct_rational(AngleSpec::rational(x.value()), cache, opts);
    if (!trace.certified) {
      all_certified = false;
      report.notes.push_back("reconstruction of " + to_string(x.value()) + " not certified: " + trace.reason);
    } else {
      recovered.insert(TorusPoint(trace.value));
    }
    report.reconstructions.emplace_back(x, std::move(trace));
    auto ph = measure_pigeonhole(mu, x, gens, params.m1, params.beta);
    if (!ph.forced) report.notes.push_back("measure pigeonhole not forced at " + to_string(x.value()));
    report.pigeonholes.push_back(std::move(ph));
  }
  if (!all_certified) return;

  // Forward orbit closure of the recovered points.
  std::set<TorusPoint> closure(recovered.begin(), recovered.end());
  std::deque<TorusPoint> queue(recovered.begin(), recovered.end());
  while (!queue.empty()) {
    TorusPoint y = queue.front();
    queue.pop_front();
    for (const auto& q : gens.generators()) {
      TorusPoint z = times_n(y, q);
      if (closure.insert(z).second) {
        if (closure.size() > params.max_atoms) {
          report.notes.push_back("orbit closure exceeds " + std::to_string(params.max_atoms) + " points");
          return;
        }
        queue.push_back(z);
      }
    }
  }
  Rational total = 0;
  std::vector<Atom> atoms;
  for (const auto& y : closure) {
    Rational m = point_mass(mu, y);
    if (m == 0) {
      report.notes.push_back("orbit point " + to_string(y.value()) + " carries no mass");
      return;
    }
    total += m;
    atoms.push_back({y, m});
  }
  if (total != 1) {
    report.notes.push_back("recovered atoms carry mass " + to_string(total) + ", not 1");
    return;
  }
  MeasureModel atom_measure = MeasureModel::atomic(atoms);
  bool invariant = true;
  for (const auto& q : gens.generators()) {
    report.atom_invariance.push_back(check_invariance(atom_measure, q.get_ui(), canonical_test_arcs()));
    invariant = invariant && report.atom_invariance.back().invariant();
  }
  report.atoms = std::move(atoms);
  if (!invariant) {
    report.notes.push_back("recovered atom set fails the invariance check");
    return;
  }
  report.verdict = Verdict::FiniteSupportDetected;
}

void lebesgue_branch(const MeasureModel& mu, const ClassifyParams& params, ClassificationReport& report) {
  bool arcs_ok = true;
  for (unsigned d = 1; d <= params.dyadic_depth; ++d) {
    Integer cells = pow2(d);
    for (Integer j = 0; j < cells; ++j) {
      Arc arc(TorusPoint(make_rational(j, cells)), make_rational(1, cells));
      Rational m = arc_mass(mu, arc);
      bool ok = m == arc.length();
      arcs_ok = arcs_ok && ok;
      report.arc_checks.push_back({arc, m, ok});
    }
  }
  std::vector<TorusPoint> pts;
  pts.reserve(params.ks_samples);
  for (std::uint64_t i = 0; i < params.ks_samples; ++i) {
    pts.push_back(sample_point(mu, sample_seed(params.seed + 0x9e3779b97f4a7c15ULL, i), 48));
  }
  report.sample_discrepancy = star_discrepancy(pts);
  report.ks_threshold = params.ks_coefficient / std::sqrt(static_cast<double>(params.ks_samples));
  bool ks_ok = to_double(report.sample_discrepancy->d_star_upper) <= report.ks_threshold;
  if (!arcs_ok) report.notes.push_back("dyadic arc masses differ from their lengths");
  if (!ks_ok) report.notes.push_back("sample discrepancy exceeds the KS threshold");
  report.verdict = arcs_ok && ks_ok ? Verdict::LebesgueConsistent : Verdict::Inconclusive;
}

}  // namespace

ClassificationReport classify_measure(const MeasureModel& mu, const GeneratorSet& gens, const ClassifyParams& params) {
  ClassificationReport report;
  const auto arcs = canonical_test_arcs();
  std::vector<Integer> invariant;
  for (const auto& q : gens.generators()) {
    require(q.fits_ulong_p(), "generators must fit in 64 bits");
    report.invariance.push_back(check_invariance(mu, q.get_ui(), arcs));
    if (report.invariance.back().invariant()) {
      invariant.push_back(q);
    } else {
      const auto* w = report.invariance.back().witness();
      report.notes.push_back("not T_" + to_string(q) + "-invariant: arc (" + to_string(w->arc.start().value()) +
                             ", +" + to_string(w->arc.length()) + "] has mass " + to_string(w->mass) +
                             ", preimage mass " + to_string(w->preimage_mass));
    }
  }
  if (invariant.empty()) {
    fail(ErrorKind::InvarianceViolation,
         "measure " + mu.to_string() + " is invariant under none of " + gens.to_string() + "; " + report.notes.front());
  }
  report.invariant_generators = invariant;
  GeneratorSet sub(invariant);
  report.lacunarity = is_lacunary(sub);

  bool any_zero = false;
  for (const auto& q : invariant) {
    GeneratorEntropy e;
    e.p = q;
    try {
      e.value = analytic_entropy(mu, q.get_ui());
      e.analytic = true;
      e.zero = e.value == 0;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::UnsupportedCombination) throw;
      auto est = smb_estimate(mu, q.get_ui(), params.smb_depth, params.smb_samples, params.seed, params.threads);
      e.value = est.mean;
      e.std_error = est.std_error;
      e.zero = est.mean < params.zero_entropy_factor * std::log(sub.smallest().get_d());
    }
    any_zero = any_zero || e.zero;
    report.entropies.push_back(e);
  }

  if (any_zero) {
    zero_entropy_branch(mu, sub, params, report);
  } else if (!report.lacunarity.lacunary) {
    lebesgue_branch(mu, params, report);
  } else {
    report.verdict = Verdict::PositiveEntropyNoConclusion;
  }
  return report;
}

}  // namespace semitorus
