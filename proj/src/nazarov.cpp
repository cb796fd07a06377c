#include "semitorus/nazarov.hpp"

#include <algorithm>
#include <iterator>

#include "semitorus/error.hpp"

namespace semitorus {

namespace {

std::uint64_t to_u64(const Integer& n, const char* what) {
  require(n >= 0 && n.fits_ulong_p(), std::string(what) + " must fit in 64 bits");
  return n.get_ui();
}

Integer from_u64(std::uint64_t n) { return Integer(static_cast<unsigned long>(n)); }

// Extends table[k] = (k alpha mod 1 in the window) up to k = hi.
void extend_table(std::vector<std::uint8_t>& table, const NazarovConfig& config, std::uint64_t hi) {
  if (table.empty()) table.push_back(0);
  if (table.size() > hi) return;
  WindowScanner scan(config.alpha, config.window_lo, config.window_hi, config.precision);
  for (std::uint64_t k = table.size(); k <= hi; ++k) {
    Decision d = scan.test(k);
    if (d == Decision::Undecidable) {
      fail(ErrorKind::PrecisionExhausted, "window test undecidable at k = " + std::to_string(k) + " for " +
                                              config.alpha.to_string());
    }
    table.push_back(d == Decision::Inside ? 1 : 0);
  }
}

struct Bounds {
  Rational lower_rate;  // width - slack
  Rational upper_rate;  // width + slack
};

Bounds bounds_of(const NazarovConfig& config) {
  Rational width = config.window_hi - config.window_lo;
  return {width - config.slack, width + config.slack};
}

bool estimate_holds(const Bounds& b, std::uint64_t n, std::uint64_t count) {
  Rational c = from_u64(count);
  Rational nn = from_u64(n);
  return nn * b.lower_rate < c && c < nn * b.upper_rate;
}

// First n in [lo, hi] where the estimate fails, using the table.
std::optional<std::uint64_t> first_estimate_failure(const std::vector<std::uint8_t>& table, const Bounds& b,
                                                    std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t count = 0;
  for (std::uint64_t n = 1; n <= hi; ++n) {
    count += table[n];
    if (n >= lo && !estimate_holds(b, n, count)) return n;
  }
  return std::nullopt;
}

bool contains_sorted(const std::vector<Integer>& v, const Integer& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

std::string str(const Integer& z) { return to_string(z); }

// Recomputes every stage check from the record. `table` must cover rec.n_k.
StageChecks evaluate_stage(const NazarovConfig& config, const Integer& n0, const StageRecord* prev,
                           const StageRecord& rec, const std::vector<std::uint8_t>& table,
                           std::vector<std::string>& failures) {
  StageChecks c;
  const std::string tag = "stage " + std::to_string(rec.k) + ": ";
  auto report = [&](const std::string& what) { failures.push_back(tag + what); };
  const Integer g = config.growth_factor;

  // Shape of N', N_k.
  bool shape = true;
  if (prev == nullptr) {
    shape = rec.ell == 0 && rec.n_prime == n0 && rec.n_k == g * n0;
  } else {
    shape = rec.ell >= 1 && rec.n_prime == prev->n_k * ipow(g, rec.ell) && rec.n_k == g * rec.n_prime;
  }
  if (!shape) report("stage bounds N' and N_k do not follow the doubling scheme");

  std::vector<Integer> previous_sigma;
  if (prev == nullptr) {
    c.stopping_rule = true;
  } else {
    GeneratorSet gens(prev->generators);
    previous_sigma = enumerate_up_to(gens, rec.n_k);
    std::uint64_t at_stop = previous_sigma.size();
    bool sparse = Rational(from_u64(at_stop)) <= config.stop_fraction * rec.n_k;
    bool minimal = true;
    std::uint64_t before = 0;
    if (rec.ell > 1) {
      before = static_cast<std::uint64_t>(
          std::upper_bound(previous_sigma.begin(), previous_sigma.end(), rec.n_prime) - previous_sigma.begin());
      minimal = Rational(from_u64(before)) > config.stop_fraction * rec.n_prime;
    }
    c.stopping_rule = sparse && minimal && at_stop == rec.count_at_stop && before == rec.count_before_stop;
    if (!sparse) {
      report("stopping rule: |Sigma ∩ [1, 2N']| = " + std::to_string(at_stop) + " exceeds " +
             to_string(config.stop_fraction) + " * " + str(rec.n_k));
    }
    if (!minimal) {
      report("stopping rule minimality: |Sigma ∩ [1, N']| = " + std::to_string(before) + " is not above " +
             to_string(config.stop_fraction) + " * " + str(rec.n_prime));
    }
    if (at_stop != rec.count_at_stop || before != rec.count_before_stop) {
      report("stopping rule: recorded counts do not match the recount");
    }
  }

  // A_k: exactly the window elements of (N', N_k] outside the previous semigroup.
  std::vector<Integer> expected_added;
  if (rec.n_k.fits_ulong_p() && rec.n_k.get_ui() < table.size()) {
    for (std::uint64_t k = to_u64(rec.n_prime, "N'") + 1; k <= rec.n_k.get_ui(); ++k) {
      Integer kk = from_u64(k);
      if (table[k] && !contains_sorted(previous_sigma, kk)) expected_added.push_back(kk);
    }
  }
  if (rec.added != expected_added) {
    report("added set differs from the window elements of (N', N_k] outside the previous semigroup");
  }
  Rational needed = config.add_fraction * rec.n_prime;
  c.added_size = Rational(from_u64(rec.added.size())) >= needed;
  if (!c.added_size) {
    report("added-size bound: |A| = " + std::to_string(rec.added.size()) + " is below " + to_string(needed));
  }
  c.added_size = c.added_size && rec.added == expected_added;

  // B_{N_k} = (previous semigroup ∩ [1, N_k]) ∪ A_k.
  std::vector<Integer> expected_b;
  std::merge(previous_sigma.begin(), previous_sigma.end(), rec.added.begin(), rec.added.end(),
             std::back_inserter(expected_b));
  bool b_ok = rec.generators == expected_b;
  if (!b_ok) report("snapshot B_{N_k} differs from the previous semigroup plus A_k");
  if (rec.generators.empty()) {
    report("snapshot B_{N_k} is empty");
    return c;
  }

  std::vector<Integer> sigma = enumerate_up_to(GeneratorSet(rec.generators), rec.n_k);
  c.set_equality = sigma == rec.generators && b_ok;
  if (sigma != rec.generators) {
    report("set equality: the semigroup generated by B has " + std::to_string(sigma.size()) +
           " elements up to N_k, B has " + std::to_string(rec.generators.size()));
  }
  if (sigma.size() != rec.sigma_count) report("recorded semigroup count does not match the recount");

  Rational density = make_rational(from_u64(sigma.size()), rec.n_k);
  c.density = density >= config.density_floor && density == rec.density && sigma.size() == rec.sigma_count;
  if (density < config.density_floor) {
    report("density floor: " + to_string(density) + " < " + to_string(config.density_floor));
  }
  if (density != rec.density) report("recorded density does not match the recount");

  BiasCertificate bias = certify_bias(rec.generators, config);
  bool same_weyl = bias.weyl.re.value == rec.weyl.re.value && bias.weyl.re.radius == rec.weyl.re.radius &&
                   bias.weyl.im.value == rec.weyl.im.value && bias.weyl.im.radius == rec.weyl.im.radius;
  c.weyl_bound = bias.holds && same_weyl;
  if (!bias.holds) {
    report("Weyl bias bound: Re = " + to_decimal(bias.weyl.re.value, 8) + " +- " +
           to_decimal(bias.weyl.re.radius, 8, true) + " is not certified above sqrt(2)/40 - 1/100 + " +
           to_string(config.weyl_margin));
  }
  if (!same_weyl) report("recorded Weyl sum does not match the recomputation");

  c.closure = true;
  if (prev != nullptr) {
    const auto& pb = prev->generators;
    for (std::size_t i = 0; i < pb.size() && c.closure; ++i) {
      for (std::size_t j = i; j < pb.size(); ++j) {
        Integer prod = pb[i] * pb[j];
        if (prod > rec.n_k) break;
        if (!contains_sorted(rec.generators, prod)) {
          c.closure = false;
          report("closure: " + str(pb[i]) + " * " + str(pb[j]) + " is missing from B_{N_k}");
          break;
        }
      }
    }
  }
  return c;
}

}  // namespace

std::vector<Integer> qualifying_set(const AngleSpec& alpha, const Integer& lo, const Integer& hi,
                                    const std::function<bool(const Integer&)>& exclude,
                                    const NazarovConfig& config) {
  require(lo < hi, "qualifying_set requires lo < hi");
  require(lo >= 0, "qualifying_set requires lo >= 0");
  std::uint64_t a = to_u64(lo, "lo");
  std::uint64_t b = to_u64(hi, "hi");
  WindowScanner scan(alpha, config.window_lo, config.window_hi, config.precision);
  std::vector<Integer> out;
  for (std::uint64_t k = a + 1; k <= b; ++k) {
    Decision d = scan.test(k);
    if (d == Decision::Undecidable) {
      fail(ErrorKind::PrecisionExhausted, "window test undecidable at k = " + std::to_string(k));
    }
    if (d != Decision::Inside) continue;
    Integer kk = from_u64(k);
    if (exclude && exclude(kk)) continue;
    out.push_back(kk);
  }
  return out;
}

Estimate2Result verify_estimate2(const AngleSpec& alpha, const Integer& n, const NazarovConfig& config) {
  require(n >= 1, "verify_estimate2 requires n >= 1");
  NazarovConfig cfg = config;
  cfg.alpha = alpha;
  std::vector<std::uint8_t> table;
  extend_table(table, cfg, to_u64(n, "n"));
  Estimate2Result r;
  r.n = n;
  for (std::uint64_t k = 1; k < table.size(); ++k) r.count += table[k];
  Bounds b = bounds_of(cfg);
  r.lower = n * b.lower_rate;
  r.upper = n * b.upper_rate;
  r.holds = estimate_holds(b, n.get_ui(), r.count);
  return r;
}

Integer find_N0(const AngleSpec& alpha, const Integer& search_limit, const NazarovConfig& config) {
  require(search_limit >= 8, "find_N0 requires a search limit >= 8");
  NazarovConfig cfg = config;
  cfg.alpha = alpha;
  const std::uint64_t limit = to_u64(search_limit, "search limit");
  std::vector<std::uint8_t> table;
  extend_table(table, cfg, limit);
  Bounds b = bounds_of(cfg);
  // fails_after[n] = number of failing m in [1, n].
  std::vector<std::uint64_t> fails(limit + 1, 0);
  std::uint64_t count = 0;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    count += table[n];
    fails[n] = fails[n - 1] + (estimate_holds(b, n, count) ? 0 : 1);
  }
  for (std::uint64_t n0 = 1; n0 <= limit; ++n0) {
    std::uint64_t top = std::min<std::uint64_t>(4 * n0, limit);
    if (fails[top] == fails[n0 - 1]) return from_u64(n0);
  }
  fail(ErrorKind::NotFound, "no N0 <= " + to_string(search_limit) + " satisfies the window-count estimate for " +
                                alpha.to_string());
}

ConstructionState start_construction(const NazarovConfig& config) {
  require(config.growth_factor >= 2, "growth factor must be >= 2");
  require(config.window_lo >= 0 && config.window_lo < config.window_hi && config.window_hi <= 1,
          "window must satisfy 0 <= lo < hi <= 1");
  ConstructionState state;
  state.config = config;
  state.n0 = config.n0 ? *config.n0 : find_N0(config.alpha, config.n0_search_limit, config);
  require(state.n0 >= 1, "N0 must be >= 1");
  state.estimate2_lo = state.n0;
  state.estimate2_hi = state.n0 - 1;
  return state;
}

namespace {

// Lazily re-verifies the estimate at every n up to `hi`.
void reverify_estimate(ConstructionState& state, const Integer& hi) {
  if (hi <= state.estimate2_hi) return;
  const std::uint64_t top = to_u64(hi, "N");
  extend_table(state.qualifies, state.config, top);
  auto bad = first_estimate_failure(state.qualifies, bounds_of(state.config), to_u64(state.estimate2_lo, "N0"), top);
  if (bad) {
    fail(ErrorKind::ConstructionViolation,
         "window-count estimate fails at n = " + std::to_string(*bad) + " (N0 = " + to_string(state.n0) + ")");
  }
  state.estimate2_hi = hi;
}

}  // namespace

void run_stage(ConstructionState& state) {
  const NazarovConfig& cfg = state.config;
  const Integer g = cfg.growth_factor;
  StageRecord rec;
  rec.k = static_cast<unsigned>(state.stages.size()) + 1;
  std::vector<Integer> previous_sigma;
  if (state.stages.empty()) {
    rec.n_prime = state.n0;
    rec.n_k = g * state.n0;
  } else {
    const StageRecord& prev = state.stages.back();
    GeneratorSet gens(prev.generators);
    Integer n_prime = prev.n_k;
    std::uint64_t before = 0;
    for (unsigned ell = 1;; ++ell) {
      n_prime *= g;
      Integer top = g * n_prime;
      if (top > cfg.count_cap) {
        fail(ErrorKind::ResourceLimit, "stage " + std::to_string(rec.k) + ": stopping rule not met below the count cap " +
                                           to_string(cfg.count_cap));
      }
      std::uint64_t at = count_up_to(gens, top);
      if (Rational(from_u64(at)) <= cfg.stop_fraction * top) {
        rec.ell = ell;
        rec.n_prime = n_prime;
        rec.n_k = top;
        rec.count_at_stop = at;
        rec.count_before_stop = ell > 1 ? before : 0;
        break;
      }
      before = at;
    }
    previous_sigma = enumerate_up_to(gens, rec.n_k);
  }

  // The estimate is used at N' and 2N'; everything below is re-checked too.
  reverify_estimate(state, rec.n_k);
  for (std::uint64_t k = to_u64(rec.n_prime, "N'") + 1; k <= rec.n_k.get_ui(); ++k) {
    Integer kk = from_u64(k);
    if (state.qualifies[k] && !contains_sorted(previous_sigma, kk)) rec.added.push_back(kk);
  }
  Rational needed = cfg.add_fraction * rec.n_prime;
  if (Rational(from_u64(rec.added.size())) < needed) {
    fail(ErrorKind::ConstructionViolation, "stage " + std::to_string(rec.k) + ": only " +
                                               std::to_string(rec.added.size()) + " window elements in (" +
                                               to_string(rec.n_prime) + ", " + to_string(rec.n_k) +
                                               "], need " + to_string(needed));
  }
  std::merge(previous_sigma.begin(), previous_sigma.end(), rec.added.begin(), rec.added.end(),
             std::back_inserter(rec.generators));

  rec.sigma_count = enumerate_up_to(GeneratorSet(rec.generators), rec.n_k).size();
  rec.density = make_rational(from_u64(rec.sigma_count), rec.n_k);
  rec.weyl = certify_bias(rec.generators, cfg).weyl;

  std::vector<std::string> failures;
  const StageRecord* prev = state.stages.empty() ? nullptr : &state.stages.back();
  rec.checks = evaluate_stage(cfg, state.n0, prev, rec, state.qualifies, failures);
  rec.checks.estimate2 = true;
  state.stages.push_back(std::move(rec));
}

ConstructionState run_construction(const NazarovConfig& config) {
  require(config.stages >= 1, "at least one stage is required");
  ConstructionState state = start_construction(config);
  for (unsigned i = 0; i < config.stages; ++i) run_stage(state);
  return state;
}

BiasCertificate certify_bias(const std::vector<Integer>& set, const NazarovConfig& config) {
  require(!set.empty(), "bias certificate needs a nonempty set");
  auto points = orbit_points(set, config.alpha);
  BiasCertificate cert;
  for (unsigned bits = 128;; bits *= 2) {
    cert.working_bits = bits;
    cert.weyl = weyl_sum(points, 1, bits);
    // Re_lower - margin >= sqrt(2)/40 - 1/100  <=>  y >= sqrt(2), y = 40 (Re_lower - margin + 1/100).
    Rational y = 40 * (cert.weyl.re.lower() - config.weyl_margin + Rational(1, 100));
    cert.holds = y > 0 && y * y >= 2;
    if (cert.holds) return cert;
    Rational y_hi = 40 * (cert.weyl.re.upper() - config.weyl_margin + Rational(1, 100));
    bool hopeless = y_hi <= 0 || y_hi * y_hi < 2;
    if (hopeless || bits >= 512) return cert;
  }
}

VerificationResult verify_construction(const ConstructionState& state) {
  VerificationResult result;
  const NazarovConfig& cfg = state.config;
  if (state.stages.empty()) {
    result.failures.push_back("no stages recorded");
    result.ok = false;
    return result;
  }
  if (state.estimate2_lo != state.n0) {
    result.failures.push_back("window-count estimate range does not start at N0");
  }
  const Integer& last = state.stages.back().n_k;
  if (state.estimate2_hi < last) {
    result.failures.push_back("window-count estimate range ends at " + to_string(state.estimate2_hi) +
                              ", below N_k = " + to_string(last));
  }
  std::vector<std::uint8_t> table;
  extend_table(table, cfg, to_u64(std::max(last, state.estimate2_hi), "N"));
  auto bad = first_estimate_failure(table, bounds_of(cfg), to_u64(state.n0, "N0"), to_u64(state.estimate2_hi, "N"));
  if (bad) {
    result.failures.push_back("window-count estimate: fails at n = " + std::to_string(*bad));
  }
  for (std::size_t i = 0; i < state.stages.size(); ++i) {
    const StageRecord& rec = state.stages[i];
    if (rec.k != i + 1) result.failures.push_back("stage numbering is not consecutive");
    const StageRecord* prev = i == 0 ? nullptr : &state.stages[i - 1];
    StageChecks checks = evaluate_stage(cfg, state.n0, prev, rec, table, result.failures);
    checks.estimate2 = !bad && state.estimate2_hi >= rec.n_k;
    if (!checks.all()) {
      if (result.failures.empty()) result.failures.push_back("stage " + std::to_string(rec.k) + ": check failed");
    }
  }
  result.ok = result.failures.empty();
  return result;
}

}  // namespace semitorus
