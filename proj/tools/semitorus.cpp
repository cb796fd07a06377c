// Command-line front end: one subcommand per library operation, JSON and CSV
// reports with an embedded run manifest.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>

#include "semitorus/error.hpp"
#include "semitorus/report.hpp"

using namespace semitorus;

namespace {

constexpr int kOk = 0;
constexpr int kCertifiedFailure = 1;
constexpr int kUsage = 2;

struct Globals {
  std::uint64_t seed = 1;
  unsigned precision = 256;
  std::string json_path;
  bool json = false;
  std::string csv_path;
  unsigned threads = 1;
  bool timing = false;
};

struct Outcome {
  Json result = Json::object();
  std::string summary;
  int code = kOk;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
};

// Parse errors from the grammars, reported with the rule that was violated.
template <class F>
auto with_rule(const std::string& rule, F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::InvalidArgument) {
      throw Error(ErrorKind::Parse, rule + ": " + e.what());
    }
    throw;
  }
}

const char* kMeasureRule = "measure grammar `lebesgue` | `atomic:[p/q=m,...]` | `bernoulli:base=b,probs=...`";
const char* kAngleRule = "angle grammar `rational:p/q` | `quadratic:(a+b*sqrt(d))/c` | `decimal:0.ddd`";
const char* kGensRule = "generator list `g1,g2,...` of integers >= 2";
const char* kRationalRule = "rational `p/q`";
const char* kGridRule = "delta grid `b^-i..b^-j` or `r1,r2,...`";
const char* kCheckpointRule = "checkpoint list `n1,n2,...` with entries like `1000` or `1e6`";

MeasureModel measure_arg(const std::string& s) {
  return with_rule(kMeasureRule, [&] { return MeasureModel::parse(s); });
}

AngleSpec angle_arg(const std::string& s) {
  return with_rule(kAngleRule, [&] {
    if (s.find(':') == std::string::npos) return AngleSpec::rational(parse_rational(s));
    return AngleSpec::parse(s);
  });
}

GeneratorSet gens_arg(const std::string& s) {
  return with_rule(kGensRule, [&] { return GeneratorSet::parse(s); });
}

Rational rational_arg(const std::string& s) {
  return with_rule(kRationalRule, [&] { return parse_rational(s); });
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Integer integer_arg(const std::string& s, const char* rule) {
  static const std::regex sci(R"(^\s*(\d+)\s*[eE]\s*(\d+)\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, sci)) {
    return Integer(m[1].str()) * ipow(Integer(10), std::stoul(m[2].str()));
  }
  return with_rule(rule, [&] {
    Rational r = parse_rational(s);
    if (r.get_den() != 1) fail(ErrorKind::Parse, "'" + s + "' is not an integer");
    return r.get_num();
  });
}

std::vector<Integer> checkpoints_arg(const std::string& s) {
  std::vector<Integer> out;
  for (const auto& part : split(s, ',')) out.push_back(integer_arg(part, kCheckpointRule));
  if (out.empty()) fail(ErrorKind::Parse, std::string(kCheckpointRule) + ": empty list");
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Rational> grid_arg(const std::string& s) {
  static const std::regex range(R"(^\s*(\d+)\^-(\d+)\s*\.\.\s*(\d+)\^-(\d+)\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, range)) {
    unsigned b1 = std::stoul(m[1].str());
    unsigned b2 = std::stoul(m[3].str());
    unsigned from = std::stoul(m[2].str());
    unsigned to = std::stoul(m[4].str());
    if (b1 != b2 || b1 < 2) fail(ErrorKind::Parse, std::string(kGridRule) + ": both ends need the same base >= 2");
    if (from > to) std::swap(from, to);
    return power_grid(b1, from, to);
  }
  std::vector<Rational> out;
  for (const auto& part : split(s, ',')) out.push_back(with_rule(kGridRule, [&] { return parse_rational(part); }));
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Json snapshot(const CLI::App* sub) {
  Json cfg = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    std::string key = opt->get_name();
    if (opt->count() > 0) {
      auto results = opt->results();
      cfg[key] = results.size() == 1 ? Json(results.front()) : Json(results);
    } else if (!opt->get_default_str().empty()) {
      cfg[key] = opt->get_default_str();
    }
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

// ---- semigroup --------------------------------------------------------------

Outcome semigroup_count(const std::string& gens_s, const std::string& limit_s) {
  GeneratorSet gens = gens_arg(gens_s);
  Integer limit = integer_arg(limit_s, "integer limit");
  std::uint64_t n = count_up_to(gens, limit);
  Outcome o;
  o.result["gens"] = gens.to_string();
  o.result["limit"] = integers_json({limit})[0];
  o.result["count"] = n;
  o.summary = "count = " + std::to_string(n);
  o.csv_header = {"N", "count"};
  o.csv_rows.push_back({to_string(limit), std::to_string(n)});
  return o;
}

Outcome semigroup_density(const std::string& gens_s, const std::string& cps_s) {
  GeneratorSet gens = gens_arg(gens_s);
  auto report = density_profile(gens, checkpoints_arg(cps_s));
  auto lac = is_lacunary(gens);
  Outcome o;
  o.result["gens"] = gens.to_string();
  Json d = to_json(report);
  o.result["checkpoints"] = d["checkpoints"];
  o.result["empiricalSlope"] = d["empiricalSlope"];
  o.result["lacunary"] = lac.lacunary;
  o.result["witness"] = to_json(lac)["witness"];
  o.csv_header = {"N", "count", "density", "logDensity"};
  std::ostringstream s;
  for (const auto& c : report.checkpoints) {
    o.csv_rows.push_back({to_string(c.n), std::to_string(c.count), to_string(c.density), fmt(c.log_density)});
    s << "N = " << to_string(c.n) << "  count = " << c.count << "  density = " << to_double(c.density) << "\n";
  }
  o.summary = s.str();
  return o;
}

Outcome semigroup_lacunary(const std::string& gens_s) {
  GeneratorSet gens = gens_arg(gens_s);
  auto lac = is_lacunary(gens);
  Outcome o;
  o.result["gens"] = gens.to_string();
  o.result["lacunarity"] = to_json(lac);
  o.summary = lac.lacunary ? "lacunary (powers of " + to_string(*lac.witness) + ")" : "nonlacunary";
  return o;
}

// ---- measure ----------------------------------------------------------------

Outcome measure_mass(const std::string& mu_s, const std::string& start_s, const std::string& length_s,
                     const std::string& point_s) {
  MeasureModel mu = measure_arg(mu_s);
  Outcome o;
  o.result["measure"] = mu.to_string();
  if (!point_s.empty()) {
    TorusPoint x(rational_arg(point_s));
    Rational m = point_mass(mu, x);
    o.result["point"] = rational_json(x.value());
    o.result["mass"] = rational_json(m);
    o.summary = "mu({" + to_string(x.value()) + "}) = " + to_string(m);
    return o;
  }
  Arc arc(TorusPoint(rational_arg(start_s)), rational_arg(length_s));
  Rational m = arc_mass(mu, arc);
  o.result["arc"] = to_json(arc);
  o.result["mass"] = rational_json(m);
  o.summary = "mass = " + to_string(m);
  return o;
}

Outcome measure_invariance(const std::string& mu_s, std::uint64_t q) {
  MeasureModel mu = measure_arg(mu_s);
  auto report = check_invariance(mu, q, canonical_test_arcs());
  Outcome o;
  o.result["measure"] = mu.to_string();
  o.result["invariance"] = to_json(report);
  o.summary = report.invariant() ? "invariant under T_" + std::to_string(q) + " on all canonical arcs"
                                 : "not invariant under T_" + std::to_string(q);
  return o;
}

// ---- entropy ----------------------------------------------------------------

Outcome entropy_estimate(const Globals& g, const std::string& mu_s, std::uint64_t p, unsigned depth,
                         std::uint64_t samples, bool values) {
  MeasureModel mu = measure_arg(mu_s);
  auto est = smb_estimate(mu, p, depth, samples, g.seed, g.threads);
  Outcome o;
  o.result["measure"] = mu.to_string();
  o.result["estimate"] = to_json(est, values);
  std::ostringstream s;
  s << "h estimate = " << fmt(est.mean) << " +- " << fmt(est.std_error);
  if (est.analytic) s << "  (analytic " << fmt(*est.analytic) << ")";
  o.summary = s.str();
  o.csv_header = {"sample", "information"};
  for (std::size_t i = 0; i < est.values.size(); ++i) o.csv_rows.push_back({std::to_string(i), fmt(est.values[i])});
  return o;
}

Outcome entropy_lemma1(const Globals& g, const std::string& mu_s, const std::string& beta_s,
                       const std::string& eps_s, const std::string& grid_s, std::uint64_t samples, unsigned depth) {
  MeasureModel mu = measure_arg(mu_s);
  auto report = lemma1_scan(mu, rational_arg(beta_s), rational_arg(eps_s), grid_arg(grid_s), samples, g.seed, depth);
  Outcome o;
  o.result["measure"] = mu.to_string();
  o.result["lemma1"] = to_json(report);
  o.summary = std::string(report.holds ? "holds" : "fails") + ", pass fraction " + to_string(report.pass_fraction);
  o.csv_header = {"delta", "passes"};
  for (const auto& d : report.per_delta) o.csv_rows.push_back({to_string(d.delta), std::to_string(d.passes)});
  return o;
}

// ---- rigidity ---------------------------------------------------------------

Outcome rigidity_reconstruct(const Globals& g, const std::string& x_s, const std::string& gens_s,
                             const std::string& m1_s, unsigned doublings, unsigned delta_exponent) {
  ReconstructionOptions opt;
  opt.m1 = integer_arg(m1_s, "integer M1");
  opt.max_doublings = doublings;
  opt.delta_exponent = delta_exponent;
  opt.policy.start_bits = std::max(64u, g.precision);
  AngleSpec x = angle_arg(x_s);
  auto trace = reconstruct_rational(x, gens_arg(gens_s), opt);
  Outcome o;
  o.result["x"] = x.to_string();
  Json t = to_json(trace);
  o.result["stages"] = t["stages"];
  o.result["verdict"] = t["verdict"];
  if (t.contains("reason")) o.result["reason"] = t["reason"];
  o.summary = trace.certified ? "verdict " + to_string(trace.value) : "verdict NotCertified: " + trace.reason;
  return o;
}

Outcome rigidity_classify(const Globals& g, const std::string& mu_s, const std::string& gens_s,
                          std::uint64_t samples, unsigned smb_depth) {
  ClassifyParams params;
  params.seed = g.seed;
  params.samples = samples;
  params.smb_depth = smb_depth;
  params.threads = g.threads;
  MeasureModel mu = measure_arg(mu_s);
  auto report = classify_measure(mu, gens_arg(gens_s), params);
  Outcome o;
  o.result["measure"] = mu.to_string();
  o.result["classification"] = to_json(report);
  std::string atoms;
  for (const auto& a : report.atoms) atoms += (atoms.empty() ? "" : ", ") + to_string(a.point.value());
  o.summary = std::string("verdict ") + to_string(report.verdict) + (atoms.empty() ? "" : " {" + atoms + "}");
  return o;
}

Outcome rigidity_pigeonhole(const std::string& mu_s, const std::string& x_s, const std::string& gens_s,
                            const std::string& m_s, const std::string& beta_s, const std::string& delta_s) {
  MeasureModel mu = measure_arg(mu_s);
  std::optional<Rational> delta;
  if (!delta_s.empty()) delta = rational_arg(delta_s);
  auto r = measure_pigeonhole(mu, TorusPoint(rational_arg(x_s)), gens_arg(gens_s), integer_arg(m_s, "integer M"),
                              rational_arg(beta_s), delta);
  Outcome o;
  o.result["measure"] = mu.to_string();
  o.result["pigeonhole"] = to_json(r);
  o.summary = std::string(r.forced ? "CollisionForced" : "NotForced") + ", total mass " + to_string(r.total_mass);
  return o;
}

// ---- equidist ---------------------------------------------------------------

std::vector<Integer> point_set(const std::string& gens_s, const std::string& set_s, const Integer& limit) {
  if (!set_s.empty()) {
    std::vector<Integer> out;
    for (const auto& part : split(set_s, ',')) out.push_back(integer_arg(part, "explicit integer set"));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  if (!gens_s.empty()) return enumerate_up_to(gens_arg(gens_s), limit);
  std::vector<Integer> all;
  require(limit.fits_ulong_p(), "limit too large for the full integer range");
  for (unsigned long n = 1; n <= limit.get_ui(); ++n) all.emplace_back(n);
  return all;
}

Outcome equidist_weyl(const std::string& gens_s, const std::string& set_s, const std::string& alpha_s,
                      const std::string& limit_s, long h, const std::string& cps_s) {
  require(h != 0, "harmonic h must be nonzero");
  AngleSpec alpha = angle_arg(alpha_s);
  auto sigmas = point_set(gens_s, set_s, integer_arg(limit_s, "integer limit"));
  require(!sigmas.empty(), "the point set is empty");
  auto pts = orbit_points(sigmas, alpha);
  auto z = weyl_sum(pts, h);
  Outcome o;
  o.result["alpha"] = alpha.to_string();
  o.result["N"] = sigmas.size();
  o.result["h"] = h;
  o.result["weyl"] = to_json(z);
  o.summary = "Re S = " + to_decimal(z.re.value, 12) + " +- " + fmt(to_double(z.re.radius)) +
              ", Im S = " + to_decimal(z.im.value, 12);
  std::vector<std::uint64_t> cps;
  if (!cps_s.empty()) {
    for (const auto& c : checkpoints_arg(cps_s)) cps.push_back(c.get_ui());
  } else {
    for (std::uint64_t n = 1; n <= pts.size(); n *= 2) cps.push_back(n);
    if (cps.empty() || cps.back() != pts.size()) cps.push_back(pts.size());
  }
  o.csv_header = {"N", "absS", "ReS"};
  for (const auto& c : weyl_profile(pts, h, cps)) o.csv_rows.push_back({std::to_string(c.n), fmt(c.modulus), fmt(c.re)});
  return o;
}

Outcome equidist_discrepancy(const std::string& gens_s, const std::string& set_s, const std::string& alpha_s,
                             const std::string& limit_s) {
  AngleSpec alpha = angle_arg(alpha_s);
  auto sigmas = point_set(gens_s, set_s, integer_arg(limit_s, "integer limit"));
  require(!sigmas.empty(), "the point set is empty");
  auto r = star_discrepancy(orbit_points(sigmas, alpha));
  Outcome o;
  o.result["alpha"] = alpha.to_string();
  o.result["discrepancy"] = to_json(r);
  o.summary = "D* <= " + to_decimal(r.d_star_upper, 12, true) + ", D* N / log N = " + fmt(r.normalized);
  return o;
}

// ---- nazarov ----------------------------------------------------------------

Outcome nazarov_run(const Globals& g, const std::string& alpha_s, unsigned stages, const std::string& n0_s,
                    const std::string& search_s) {
  NazarovConfig cfg;
  cfg.alpha = angle_arg(alpha_s);
  cfg.stages = stages;
  cfg.precision.start_bits = g.precision;
  cfg.n0_search_limit = integer_arg(search_s, "integer search limit");
  if (!n0_s.empty()) cfg.n0 = integer_arg(n0_s, "integer N0");
  auto state = run_construction(cfg);
  Outcome o;
  o.result = to_json(state);
  bool ok = o.result["allChecksHold"].get<bool>();
  std::ostringstream s;
  s << "N0 = " << to_string(state.n0) << "\n";
  for (const auto& r : state.stages) {
    s << "stage " << r.k << ": N_k = " << to_string(r.n_k) << "  |B| = " << r.generators.size()
      << "  density = " << to_double(r.density) << "  Re S >= " << to_decimal(r.weyl.re.lower(), 6)
      << (r.checks.all() ? "  ok" : "  FAILED") << "\n";
  }
  o.summary = s.str();
  o.code = ok ? kOk : kCertifiedFailure;
  o.csv_header = {"k", "N_k", "sigmaCount", "density", "ReS"};
  for (const auto& r : state.stages) {
    o.csv_rows.push_back({std::to_string(r.k), to_string(r.n_k), std::to_string(r.sigma_count),
                          to_string(r.density), to_decimal(r.weyl.re.value, 12)});
  }
  return o;
}

Outcome nazarov_verify(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot read " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, "certificate file is not valid JSON: " + std::string(e.what()));
  }
  const Json& body = j.contains("result") ? j.at("result") : j;
  auto state = construction_from_json(body);
  auto v = verify_construction(state);
  Outcome o;
  o.result["file"] = path;
  o.result["ok"] = v.ok;
  o.result["failures"] = v.failures;
  if (v.ok) {
    o.summary = "all " + std::to_string(state.stages.size()) + " stage certificates hold";
  } else {
    std::string s = "verification failed:";
    for (const auto& f : v.failures) s += "\n  " + f;
    o.summary = s;
    o.code = kCertifiedFailure;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments with multiplicative semigroup actions on the circle", "semitorus"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with one section per subcommand, e.g. [semigroup.count]");

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--precision", g.precision, "Working precision in bits for certified evaluation")
      ->capture_default_str();
  auto* json_opt = app.add_option("--json", g.json_path, "Write the JSON report (to stdout, or to the given path)")
                       ->expected(0, 1);
  app.add_option("--csv", g.csv_path, "Write CSV rows to a path ('-' for stdout)");
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 256u));
  app.add_flag("--timing", g.timing, "Record wall time in the manifest");

  std::function<Outcome()> action;
  CLI::App* chosen = nullptr;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->callback([&chosen, sub] { chosen = sub; });
    return sub;
  };

  // Option storage; every subcommand owns its own strings.
  struct Strings {
    std::string gens = "2,3", limit = "1000", checkpoints = "1e2,1e4,1e6";
    std::string measure = "lebesgue", start = "0", length = "1/2", point;
    std::string beta = "1/10", eps = "1/2", grid = "2^-5..2^-40";
    std::string x = "1/3", m1 = "100", m = "10", delta;
    std::string alpha = "quadratic:(-1+1*sqrt(5))/2", set, n0, search = "100000", file, weyl_checkpoints;
  };
  Strings s;
  std::uint64_t q = 2, p = 3, samples = 1000, ks = 16;
  unsigned depth = 1000, doublings = 2, delta_exp = 5, sample_depth = 48, stages = 3, smb_depth = 1000;
  long h = 1;
  bool values = false;

  auto* semigroup = app.add_subcommand("semigroup", "Semigroup enumeration, density and lacunarity");
  semigroup->require_subcommand(1);
  auto* sg_count = leaf(semigroup, "count", "Count Sigma ∩ [1, N]");
  sg_count->add_option("--gens", s.gens, "Generators, e.g. 2,3")->required();
  sg_count->add_option("--limit", s.limit, "N")->required();
  auto* sg_density = leaf(semigroup, "density", "Density profile at checkpoints");
  sg_density->add_option("--gens", s.gens)->required();
  sg_density->add_option("--checkpoints", s.checkpoints, "e.g. 1e2,1e4,1e6")->capture_default_str();
  auto* sg_lac = leaf(semigroup, "lacunary", "Lacunarity test");
  sg_lac->add_option("--gens", s.gens)->required();

  auto* measure = app.add_subcommand("measure", "Exact measure queries");
  measure->require_subcommand(1);
  auto* m_mass = leaf(measure, "mass", "Mass of the arc (start, start + length] or of a point");
  m_mass->add_option("--measure", s.measure)->required();
  m_mass->add_option("--start", s.start)->capture_default_str();
  m_mass->add_option("--length", s.length)->capture_default_str();
  m_mass->add_option("--point", s.point, "Report the point mass at x instead");
  auto* m_inv = leaf(measure, "invariance", "T_q invariance on the canonical arc family");
  m_inv->add_option("--measure", s.measure)->required();
  m_inv->add_option("--q", q)->required();

  auto* entropy = app.add_subcommand("entropy", "Entropy estimation");
  entropy->require_subcommand(1);
  auto* e_est = leaf(entropy, "estimate", "Information-function entropy estimate");
  e_est->add_option("--measure", s.measure)->required();
  e_est->add_option("--p", p)->capture_default_str();
  e_est->add_option("--depth", depth)->capture_default_str();
  e_est->add_option("--samples", samples)->capture_default_str();
  e_est->add_flag("--values", values, "Include per-sample values in the JSON report");
  auto* e_l1 = leaf(entropy, "lemma1", "Ball-mass lower bound scan");
  e_l1->add_option("--measure", s.measure)->required();
  e_l1->add_option("--beta", s.beta)->capture_default_str();
  e_l1->add_option("--eps", s.eps)->capture_default_str();
  e_l1->add_option("--delta-grid", s.grid)->capture_default_str();
  e_l1->add_option("--samples", samples)->capture_default_str();
  e_l1->add_option("--sample-depth", sample_depth)->capture_default_str();

  auto* rigidity = app.add_subcommand("rigidity", "Collisions, reconstruction and classification");
  rigidity->require_subcommand(1);
  auto* r_rec = leaf(rigidity, "reconstruct", "Rational reconstruction over M1, M1^2, M1^4, ...");
  r_rec->add_option("--x", s.x, "Rational p/q or an angle spec")->required();
  r_rec->add_option("--gens", s.gens)->required();
  r_rec->add_option("--m1", s.m1)->capture_default_str();
  r_rec->add_option("--doublings", doublings)->capture_default_str()->check(CLI::Range(1u, 6u));
  r_rec->add_option("--expert-delta-exponent", delta_exp, "delta = M^-e (default 5)")
      ->capture_default_str()
      ->check(CLI::Range(2u, 20u));
  auto* r_cls = leaf(rigidity, "classify", "Measure classification");
  r_cls->add_option("--measure", s.measure)->required();
  r_cls->add_option("--gens", s.gens)->required();
  r_cls->add_option("--samples", ks, "Sampled points to reconstruct")->capture_default_str();
  r_cls->add_option("--smb-depth", smb_depth)->capture_default_str();
  auto* r_ph = leaf(rigidity, "pigeonhole", "Measure-level pigeonhole over the dilated balls");
  r_ph->add_option("--measure", s.measure)->required();
  r_ph->add_option("--x", s.x)->required();
  r_ph->add_option("--gens", s.gens)->required();
  r_ph->add_option("--m", s.m)->capture_default_str();
  r_ph->add_option("--beta", s.beta)->capture_default_str();
  r_ph->add_option("--delta", s.delta, "Override delta = M^-5");

  auto* equidist = app.add_subcommand("equidist", "Weyl sums and discrepancy");
  equidist->require_subcommand(1);
  auto* w = leaf(equidist, "weyl", "Certified Weyl sum of {sigma alpha}");
  auto* d = leaf(equidist, "discrepancy", "Star discrepancy of {sigma alpha}");
  for (auto* sub : {w, d}) {
    sub->add_option("--gens", s.gens, "Generators; omit for all integers")->default_str("");
    sub->add_option("--set", s.set, "Explicit integer set instead of a semigroup");
    sub->add_option("--alpha", s.alpha)->capture_default_str();
    sub->add_option("--limit", s.limit)->capture_default_str();
  }
  // `--h` would clash with `-h`, so this subcommand only takes `--help`.
  w->set_help_flag("--help", "Print this help message and exit");
  w->add_option("--h", h, "Harmonic")->capture_default_str();
  w->add_option("--checkpoints", s.weyl_checkpoints, "CSV checkpoints; default powers of 2");

  auto* nazarov = app.add_subcommand("nazarov", "Biased positive-density semigroup construction");
  nazarov->require_subcommand(1);
  auto* n_run = leaf(nazarov, "run", "Run the construction and certify every stage");
  n_run->add_option("--alpha", s.alpha)->capture_default_str();
  n_run->add_option("--stages", stages)->capture_default_str()->check(CLI::Range(1u, 8u));
  n_run->add_option("--n0", s.n0, "Use this N0 instead of searching");
  n_run->add_option("--search-limit", s.search)->capture_default_str();
  auto* n_ver = leaf(nazarov, "verify", "Re-check a construction report");
  n_ver->add_option("file", s.file, "Report written by `nazarov run --json`")->required();

  bool gens_given = false;
  try {
    app.parse(argc, argv);
    gens_given = (w->count("--gens") + d->count("--gens")) > 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  g.json = json_opt->count() > 0;

  auto started = std::chrono::steady_clock::now();
  Outcome out;
  try {
    if (chosen == sg_count) out = semigroup_count(s.gens, s.limit);
    else if (chosen == sg_density) out = semigroup_density(s.gens, s.checkpoints);
    else if (chosen == sg_lac) out = semigroup_lacunary(s.gens);
    else if (chosen == m_mass) out = measure_mass(s.measure, s.start, s.length, s.point);
    else if (chosen == m_inv) out = measure_invariance(s.measure, q);
    else if (chosen == e_est) out = entropy_estimate(g, s.measure, p, depth, samples, values);
    else if (chosen == e_l1) out = entropy_lemma1(g, s.measure, s.beta, s.eps, s.grid, samples, sample_depth);
    else if (chosen == r_rec) out = rigidity_reconstruct(g, s.x, s.gens, s.m1, doublings, delta_exp);
    else if (chosen == r_cls) out = rigidity_classify(g, s.measure, s.gens, ks, smb_depth);
    else if (chosen == r_ph) out = rigidity_pigeonhole(s.measure, s.x, s.gens, s.m, s.beta, s.delta);
    else if (chosen == w) out = equidist_weyl(gens_given ? s.gens : "", s.set, s.alpha, s.limit, h, s.weyl_checkpoints);
    else if (chosen == d) out = equidist_discrepancy(gens_given ? s.gens : "", s.set, s.alpha, s.limit);
    else if (chosen == n_run) out = nazarov_run(g, s.alpha, stages, s.n0, s.search);
    else if (chosen == n_ver) out = nazarov_verify(s.file);
    else {
      std::cerr << "error: no subcommand selected\n";
      return kUsage;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Parse:
      case ErrorKind::InvalidArgument:
      case ErrorKind::UnsupportedCombination:
      case ErrorKind::InvarianceViolation:
      case ErrorKind::InsufficientElements:
        return kUsage;
      default:
        return kCertifiedFailure;
    }
  }

  RunManifest manifest;
  for (int i = 0; i < argc; ++i) manifest.command_line.emplace_back(argv[i]);
  if (!manifest.command_line.empty()) manifest.command_line.front() = "semitorus";
  manifest.config = snapshot(chosen);
  manifest.seed = g.seed;
  manifest.precision = g.precision;
  if (g.timing) {
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }

  try {
    if (g.json) {
      Json doc;
      doc["manifest"] = to_json(manifest);
      doc["result"] = out.result;
      if (g.json_path.empty() || g.json_path == "-") {
        std::cout << dump(doc);
      } else {
        write_text(g.json_path, dump(doc));
        std::cout << out.summary << (out.summary.empty() || out.summary.back() == '\n' ? "" : "\n");
      }
    } else {
      std::cout << out.summary << (out.summary.empty() || out.summary.back() == '\n' ? "" : "\n");
    }
    if (!g.csv_path.empty()) {
      std::ostringstream csv;
      for (std::size_t i = 0; i < out.csv_header.size(); ++i) csv << (i ? "," : "") << out.csv_header[i];
      csv << "\n";
      for (const auto& row : out.csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << csv_escape(row[i]);
        csv << "\n";
      }
      write_text(g.csv_path, csv.str());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (out.code == kCertifiedFailure && g.json) std::cerr << out.summary << "\n";
  return out.code;
}
