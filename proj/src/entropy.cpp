#include "semitorus/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "semitorus/error.hpp"

namespace semitorus {

Arc PadicCell::arc() const {
  Integer cells = ipow(Integer(static_cast<unsigned long>(base)), depth);
  return Arc(TorusPoint(make_rational(index, cells)), make_rational(1, cells));
}

PadicCell padic_cell(const TorusPoint& x, std::uint64_t p, unsigned n) {
  require(p >= 2, "padic_cell requires p >= 2");
  require(n >= 1, "padic_cell requires n >= 1");
  Integer cells = ipow(Integer(static_cast<unsigned long>(p)), n);
  PadicCell cell{p, n, Integer(0)};
  if (x.value() == 0) {
    cell.index = cells - 1;
  } else {
    cell.index = ceil(x.value() * cells) - 1;
  }
  return cell;
}

namespace {

// Exact r with r^n == mass, if mass is a perfect n-th power.
std::optional<Rational> exact_root(const Rational& mass, unsigned n) {
  Integer num, den;
  if (mpz_root(num.get_mpz_t(), mass.get_num_mpz_t(), n) == 0) return std::nullopt;
  if (mpz_root(den.get_mpz_t(), mass.get_den_mpz_t(), n) == 0) return std::nullopt;
  return make_rational(num, den);
}

double neg_log(const Rational& r) {
  // Small numerators and denominators go through std::log directly so that
  // r = 1/p yields exactly std::log(p).
  const double limit = 9007199254740992.0;  // 2^53
  if (r.get_num() < limit && r.get_den() < limit) {
    return std::log(r.get_den().get_d()) - std::log(r.get_num().get_d());
  }
  return -log_rational(r);
}

}  // namespace

InformationSample information_value(const MeasureModel& mu, const TorusPoint& x, std::uint64_t p, unsigned n) {
  PadicCell cell = padic_cell(x, p, n);
  InformationSample s{x, n, arc_mass(mu, cell.arc()), 0.0, false};
  if (s.cell_mass == 0) {
    s.infinite = true;
    s.value = std::numeric_limits<double>::infinity();
    return s;
  }
  if (auto root = exact_root(s.cell_mass, n)) {
    s.value = neg_log(*root);
  } else {
    s.value = -log_rational(s.cell_mass) / static_cast<double>(n);
  }
  return s;
}

namespace {

unsigned sampling_depth(const MeasureModel& mu, std::uint64_t p, unsigned n, unsigned& base) {
  base = static_cast<unsigned>(p);
  if (const auto* m = std::get_if<DigitBernoulli>(&mu.variant())) base = m->base;
  // Enough model digits to resolve the depth-n p-adic cell, plus slack.
  double ratio = std::log(static_cast<double>(p)) / std::log(static_cast<double>(base));
  return static_cast<unsigned>(std::ceil(n * ratio)) + 16;
}

}  // namespace

SmbEstimate smb_estimate(const MeasureModel& mu, std::uint64_t p, unsigned n, std::uint64_t samples,
                         std::uint64_t seed, unsigned threads) {
  require(n >= 1, "smb_estimate requires n >= 1");
  require(samples >= 1, "smb_estimate requires at least one sample");
  unsigned base = 2;
  unsigned depth = sampling_depth(mu, p, n, base);
  std::vector<InformationSample> draws(samples);
  detail::parallel_for(samples, threads, [&](std::size_t i) {
    TorusPoint x = sample_point(mu, sample_seed(seed, i), depth, base);
    draws[i] = information_value(mu, x, p, n);
  });
  SmbEstimate est;
  est.p = p;
  est.depth = n;
  est.samples = samples;
  // Sums are shifted by the first finite value, so identical values give
  // that value back exactly with zero spread.
  std::optional<double> shift;
  double sum = 0;
  std::uint64_t finite = 0;
  for (const auto& d : draws) {
    est.values.push_back(d.value);
    if (d.infinite) {
      ++est.infinite_values;
      continue;
    }
    if (!shift) shift = d.value;
    sum += d.value - *shift;
    ++finite;
  }
  if (finite > 0) {
    est.mean = *shift + sum / static_cast<double>(finite);
    double ss = 0;
    for (const auto& d : draws) {
      if (!d.infinite) ss += (d.value - est.mean) * (d.value - est.mean);
    }
    if (finite > 1) est.std_error = std::sqrt(ss / static_cast<double>(finite - 1) / static_cast<double>(finite));
  }
  try {
    est.analytic = analytic_entropy(mu, p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnsupportedCombination && e.kind() != ErrorKind::InvarianceViolation) throw;
  }
  return est;
}

bool ball_mass_exceeds(const Rational& mass, const Rational& delta, const Rational& beta) {
  require(beta > 0, "beta must be positive");
  require(delta > 0, "delta must be positive");
  unsigned long a = beta.get_num().get_ui();
  unsigned long b = beta.get_den().get_ui();
  require(beta.get_num().fits_ulong_p() && beta.get_den().fits_ulong_p() && a <= 4096 && b <= 4096,
          "beta numerator and denominator must be at most 4096");
  return pow(mass, b) > pow(delta, a);
}

std::vector<Rational> power_grid(unsigned base, unsigned from, unsigned to) {
  require(base >= 2 && from <= to, "power grid needs base >= 2 and from <= to");
  std::vector<Rational> grid;
  for (unsigned e = from; e <= to; ++e) grid.push_back(make_rational(1, ipow(base, e)));
  return grid;
}

Lemma1Report lemma1_scan(const MeasureModel& mu, const Rational& beta, const Rational& eps,
                         std::vector<Rational> delta_grid, std::uint64_t samples, std::uint64_t seed,
                         unsigned sample_depth, std::size_t max_failures) {
  require(!delta_grid.empty(), "lemma1_scan requires a nonempty delta grid");
  require(beta > 0, "lemma1_scan requires beta > 0");
  require(eps > 0 && eps < 1, "lemma1_scan requires 0 < eps < 1");
  require(samples >= 1, "lemma1_scan requires at least one sample");
  for (const auto& d : delta_grid) require(d > 0 && d < Rational(1, 2), "grid values must lie in (0, 1/2)");
  std::sort(delta_grid.begin(), delta_grid.end(), [](const Rational& a, const Rational& b) { return a > b; });
  delta_grid.erase(std::unique(delta_grid.begin(), delta_grid.end()), delta_grid.end());

  unsigned base = 2;
  if (const auto* m = std::get_if<DigitBernoulli>(&mu.variant())) base = m->base;

  Lemma1Report report;
  report.beta = beta;
  report.eps = eps;
  report.grid = delta_grid;
  report.samples = samples;
  const std::size_t g = delta_grid.size();
  // pass[i][j]: sample i passes at grid index j (descending deltas).
  std::vector<std::vector<char>> pass(samples, std::vector<char>(g, 0));
  std::vector<std::vector<Rational>> masses(samples, std::vector<Rational>(g));
  report.points.resize(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    report.points[i] = sample_point(mu, sample_seed(seed, i), sample_depth, base);
    for (std::size_t j = 0; j < g; ++j) {
      masses[i][j] = arc_mass(mu, Arc::ball(report.points[i], delta_grid[j]));
      pass[i][j] = ball_mass_exceeds(masses[i][j], delta_grid[j], beta);
    }
  }
  // Suffix "all pass" from the smallest delta upwards.
  std::vector<std::vector<char>> all_below(samples, std::vector<char>(g, 0));
  report.point_delta0.assign(samples, std::nullopt);
  for (std::uint64_t i = 0; i < samples; ++i) {
    bool ok = true;
    for (std::size_t j = g; j-- > 0;) {
      ok = ok && pass[i][j];
      all_below[i][j] = ok;
      if (ok) report.point_delta0[i] = delta_grid[j];
    }
  }
  for (std::size_t j = 0; j < g; ++j) {
    DeltaPassCount c{delta_grid[j], 0};
    for (std::uint64_t i = 0; i < samples; ++i) c.passes += pass[i][j] ? 1 : 0;
    report.per_delta.push_back(c);
  }
  Rational threshold = 1 - eps;
  auto fraction_at = [&](std::size_t j) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < samples; ++i) k += all_below[i][j] ? 1 : 0;
    return Rational(Integer(static_cast<unsigned long>(k)), Integer(static_cast<unsigned long>(samples)));
  };
  report.pass_fraction = fraction_at(g - 1);
  for (std::size_t j = 0; j < g; ++j) {
    Rational f = fraction_at(j);
    f.canonicalize();
    if (f > threshold) {
      report.delta0 = delta_grid[j];
      report.pass_fraction = f;
      break;
    }
  }
  report.pass_fraction.canonicalize();
  report.holds = report.pass_fraction > threshold;
  for (std::uint64_t i = 0; i < samples && report.failures.size() < max_failures; ++i) {
    for (std::size_t j = g; j-- > 0;) {
      if (!pass[i][j]) {
        report.failures.push_back({report.points[i], delta_grid[j], masses[i][j]});
        break;
      }
    }
  }
  return report;
}

}  // namespace semitorus
