#include "semitorus/report.hpp"

#include "semitorus/error.hpp"

namespace semitorus {

namespace {

constexpr int kDecimalDigits = 20;

Json integer_json(const Integer& z) {
  if (z.fits_slong_p()) return Json(z.get_si());
  return Json(z.get_str());
}

Integer integer_from_json(const Json& j) {
  if (j.is_number_unsigned()) return Integer(static_cast<unsigned long>(j.get<std::uint64_t>()));
  if (j.is_number_integer()) return Integer(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_string()) {
    Rational r = parse_rational(j.get<std::string>());
    if (r.get_den() != 1) fail(ErrorKind::Parse, "expected an integer, got " + j.get<std::string>());
    return r.get_num();
  }
  fail(ErrorKind::Parse, "expected an integer, got " + j.dump());
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("field '") + key + "': " + e.what());
  }
}

Json optional_rational(const std::optional<Rational>& r) { return r ? rational_json(*r) : Json(nullptr); }

}  // namespace

Json rational_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(integer_from_json(j));
  fail(ErrorKind::Parse, "expected a rational string \"p/q\", got " + j.dump());
}

Json integers_json(const std::vector<Integer>& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(integer_json(z));
  return out;
}

std::vector<Integer> integers_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorKind::Parse, "expected an integer array");
  std::vector<Integer> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(integer_from_json(e));
  return out;
}

Json to_json(const CertifiedReal& c) {
  Json j;
  j["value"] = to_decimal(c.value, kDecimalDigits);
  j["errorRadius"] = to_decimal(c.radius, kDecimalDigits, true);
  j["exactValue"] = rational_json(c.value);
  j["exactRadius"] = rational_json(c.radius);
  return j;
}

CertifiedReal certified_from_json(const Json& j) {
  return {rational_from_json(field(j, "exactValue")), rational_from_json(field(j, "exactRadius"))};
}

Json to_json(const ComplexValue& z) {
  Json j;
  j["re"] = to_json(z.re);
  j["im"] = to_json(z.im);
  return j;
}

Json to_json(const Arc& a) {
  Json j;
  j["start"] = rational_json(a.start().value());
  j["length"] = rational_json(a.length());
  return j;
}

Json to_json(const RunManifest& m) {
  Json j;
  j["commandLine"] = m.command_line;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["precision"] = m.precision;
  j["toolVersion"] = m.version;
  if (m.wall_seconds) j["wallSeconds"] = *m.wall_seconds;
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.command_line = get<std::vector<std::string>>(j, "commandLine");
  m.config = field(j, "config");
  m.seed = get<std::uint64_t>(j, "seed");
  m.precision = get<unsigned>(j, "precision");
  m.version = get<std::string>(j, "toolVersion");
  if (j.contains("wallSeconds")) m.wall_seconds = get<double>(j, "wallSeconds");
  return m;
}

Json to_json(const DensityReport& r) {
  Json cps = Json::array();
  for (const auto& c : r.checkpoints) {
    Json e;
    e["N"] = integer_json(c.n);
    e["count"] = c.count;
    e["density"] = rational_json(c.density);
    e["logDensity"] = c.empty ? Json(nullptr) : Json(c.log_density);
    cps.push_back(e);
  }
  Json j;
  j["checkpoints"] = cps;
  j["empiricalSlope"] = r.empirical_slope;
  return j;
}

Json to_json(const LacunarityResult& r) {
  Json j;
  j["lacunary"] = r.lacunary;
  j["witness"] = r.witness ? integer_json(*r.witness) : Json(nullptr);
  j["independentPair"] = r.independent_pair
                             ? Json::array({integer_json(r.independent_pair->first),
                                            integer_json(r.independent_pair->second)})
                             : Json(nullptr);
  return j;
}

Json to_json(const InvarianceReport& r) {
  Json j;
  j["q"] = r.q;
  j["arcsChecked"] = r.checks.size();
  j["invariant"] = r.invariant();
  if (const auto* w = r.witness()) {
    Json wj;
    wj["arc"] = to_json(w->arc);
    wj["mass"] = rational_json(w->mass);
    wj["preimageMass"] = rational_json(w->preimage_mass);
    j["witness"] = wj;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(const SmbEstimate& e, bool include_values) {
  Json j;
  j["p"] = e.p;
  j["depth"] = e.depth;
  j["samples"] = e.samples;
  j["mean"] = e.mean;
  j["stdError"] = e.std_error;
  j["analytic"] = e.analytic ? Json(*e.analytic) : Json(nullptr);
  j["infiniteValues"] = e.infinite_values;
  if (include_values) j["values"] = e.values;
  return j;
}

Json to_json(const Lemma1Report& r) {
  Json j;
  j["beta"] = rational_json(r.beta);
  j["eps"] = rational_json(r.eps);
  j["samples"] = r.samples;
  Json per = Json::array();
  for (const auto& d : r.per_delta) {
    Json e;
    e["delta"] = rational_json(d.delta);
    e["passes"] = d.passes;
    per.push_back(e);
  }
  j["perDelta"] = per;
  j["delta0"] = optional_rational(r.delta0);
  j["passFraction"] = rational_json(r.pass_fraction);
  j["holds"] = r.holds;
  Json fails = Json::array();
  for (const auto& f : r.failures) {
    Json e;
    e["x"] = rational_json(f.x.value());
    e["delta"] = rational_json(f.delta);
    e["mass"] = rational_json(f.mass);
    fails.push_back(e);
  }
  j["failures"] = fails;
  return j;
}

Json to_json(const CollisionWitness& w) {
  Json j;
  j["q1"] = integer_json(w.q1);
  j["q2"] = integer_json(w.q2);
  j["k"] = integer_json(w.k);
  j["ell"] = integer_json(w.ell);
  j["exact"] = w.exact;
  j["overlapPoint"] = rational_json(w.overlap_point.value());
  j["gapUpper"] = rational_json(w.gap_upper);
  return j;
}

Json to_json(const ReconstructionTrace& t) {
  Json stages = Json::array();
  for (const auto& s : t.stages) {
    Json e;
    e["M"] = integer_json(s.limit);
    e["delta"] = rational_json(s.delta);
    if (s.witness) {
      e["q1"] = integer_json(s.witness->q1);
      e["q2"] = integer_json(s.witness->q2);
      e["k"] = integer_json(s.witness->k);
      e["ell"] = integer_json(s.witness->ell);
      e["exactCollision"] = s.witness->exact;
    } else {
      e["q1"] = e["q2"] = e["k"] = e["ell"] = nullptr;
    }
    e["candidate"] = optional_rational(s.candidate);
    e["kappaBound"] = rational_json(s.kappa_bound);
    e["kappaVerified"] = s.kappa_verified;
    e["note"] = s.note;
    stages.push_back(e);
  }
  Json j;
  j["stages"] = stages;
  j["verdict"] = t.certified ? rational_json(t.value) : Json("NotCertified");
  if (!t.certified) j["reason"] = t.reason;
  return j;
}

Json to_json(const PigeonholeReport& r) {
  Json j;
  j["M"] = integer_json(r.limit);
  j["delta"] = rational_json(r.delta);
  j["beta"] = rational_json(r.beta);
  j["arcs"] = r.arcs.size();
  j["totalMass"] = rational_json(r.total_mass);
  j["heavyArcs"] = r.heavy_arcs;
  j["verdict"] = r.forced ? "CollisionForced" : "NotForced";
  if (r.pair) {
    j["pair"] = Json::array({integer_json(r.pair->first), integer_json(r.pair->second)});
    j["overlapPoint"] = rational_json(r.overlap_point->value());
  }
  return j;
}

Json to_json(const DiscrepancyReport& r) {
  Json j;
  j["N"] = r.n;
  j["dStarLower"] = to_decimal(r.d_star_lower, kDecimalDigits);
  j["dStarUpper"] = to_decimal(r.d_star_upper, kDecimalDigits, true);
  j["normalized"] = r.normalized;
  return j;
}

Json to_json(const ClassificationReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  Json inv = Json::array();
  for (const auto& i : r.invariance) inv.push_back(to_json(i));
  j["invariance"] = inv;
  j["invariantGenerators"] = integers_json(r.invariant_generators);
  Json ent = Json::array();
  for (const auto& e : r.entropies) {
    Json x;
    x["p"] = integer_json(e.p);
    x["estimate"] = e.value;
    x["analytic"] = e.analytic;
    x["stdError"] = e.std_error;
    x["zero"] = e.zero;
    ent.push_back(x);
  }
  j["perGeneratorEntropy"] = ent;
  j["lacunarity"] = to_json(r.lacunarity);
  j["lemma1"] = r.lemma1 ? to_json(*r.lemma1) : Json(nullptr);
  Json recs = Json::array();
  for (const auto& [x, trace] : r.reconstructions) {
    Json e;
    e["x"] = rational_json(x.value());
    e["trace"] = to_json(trace);
    recs.push_back(e);
  }
  j["reconstructions"] = recs;
  Json ph = Json::array();
  for (const auto& p : r.pigeonholes) ph.push_back(to_json(p));
  j["pigeonholes"] = ph;
  Json atoms = Json::array();
  for (const auto& a : r.atoms) {
    Json e;
    e["point"] = rational_json(a.point.value());
    e["mass"] = rational_json(a.mass);
    atoms.push_back(e);
  }
  j["atoms"] = atoms;
  Json ai = Json::array();
  for (const auto& i : r.atom_invariance) ai.push_back(to_json(i));
  j["atomInvariance"] = ai;
  std::size_t matching = 0;
  for (const auto& c : r.arc_checks) matching += c.matches ? 1 : 0;
  j["arcChecks"] = {{"total", r.arc_checks.size()}, {"matching", matching}};
  j["sampleDiscrepancy"] = r.sample_discrepancy ? to_json(*r.sample_discrepancy) : Json(nullptr);
  j["ksThreshold"] = r.ks_threshold;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const NazarovConfig& c) {
  Json j;
  j["alpha"] = c.alpha.to_string();
  j["window"] = Json::array({rational_json(c.window_lo), rational_json(c.window_hi)});
  j["slack"] = rational_json(c.slack);
  j["stopFraction"] = rational_json(c.stop_fraction);
  j["addFraction"] = rational_json(c.add_fraction);
  j["growthFactor"] = c.growth_factor;
  j["stages"] = c.stages;
  j["n0SearchLimit"] = integer_json(c.n0_search_limit);
  j["n0"] = c.n0 ? integer_json(*c.n0) : Json(nullptr);
  j["countCap"] = integer_json(c.count_cap);
  j["precision"] = c.precision.start_bits;
  j["precisionCap"] = c.precision.cap_bits;
  j["weylMargin"] = rational_json(c.weyl_margin);
  j["densityFloor"] = rational_json(c.density_floor);
  return j;
}

NazarovConfig nazarov_config_from_json(const Json& j) {
  NazarovConfig c;
  c.alpha = AngleSpec::parse(get<std::string>(j, "alpha"));
  const Json& w = field(j, "window");
  if (!w.is_array() || w.size() != 2) fail(ErrorKind::Parse, "field 'window' must be a pair");
  c.window_lo = rational_from_json(w[0]);
  c.window_hi = rational_from_json(w[1]);
  c.slack = rational_from_json(field(j, "slack"));
  c.stop_fraction = rational_from_json(field(j, "stopFraction"));
  c.add_fraction = rational_from_json(field(j, "addFraction"));
  c.growth_factor = get<unsigned>(j, "growthFactor");
  c.stages = get<unsigned>(j, "stages");
  c.n0_search_limit = integer_from_json(field(j, "n0SearchLimit"));
  if (!field(j, "n0").is_null()) c.n0 = integer_from_json(field(j, "n0"));
  c.count_cap = integer_from_json(field(j, "countCap"));
  c.precision.start_bits = get<unsigned>(j, "precision");
  c.precision.cap_bits = get<unsigned>(j, "precisionCap");
  c.weyl_margin = rational_from_json(field(j, "weylMargin"));
  c.density_floor = rational_from_json(field(j, "densityFloor"));
  return c;
}

Json to_json(const ConstructionState& s) {
  Json j;
  j["config"] = to_json(s.config);
  j["n0"] = integer_json(s.n0);
  j["estimate2Range"] = Json::array({integer_json(s.estimate2_lo), integer_json(s.estimate2_hi)});
  Json stages = Json::array();
  bool all = true;
  for (const auto& r : s.stages) {
    Json e;
    e["k"] = r.k;
    e["N_k"] = integer_json(r.n_k);
    e["Nprime"] = integer_json(r.n_prime);
    e["ell"] = r.ell;
    e["countAtStop"] = r.count_at_stop;
    e["countBeforeStop"] = r.count_before_stop;
    e["sigmaCount"] = r.sigma_count;
    e["densityAtNk"] = rational_json(r.density);
    e["weylRe"] = to_json(r.weyl.re);
    e["weylIm"] = to_json(r.weyl.im);
    e["checks"] = {{"estimate2", r.checks.estimate2},       {"stoppingRule", r.checks.stopping_rule},
                   {"addedSize", r.checks.added_size},      {"weylBound", r.checks.weyl_bound},
                   {"density", r.checks.density},           {"setEquality", r.checks.set_equality},
                   {"closure", r.checks.closure}};
    e["A_k"] = integers_json(r.added);
    e["B"] = integers_json(r.generators);
    all = all && r.checks.all();
    stages.push_back(e);
  }
  j["stages"] = stages;
  j["allChecksHold"] = all;
  j["asymptoticDensityCertified"] = false;
  return j;
}

ConstructionState construction_from_json(const Json& j) {
  ConstructionState s;
  s.config = nazarov_config_from_json(field(j, "config"));
  s.n0 = integer_from_json(field(j, "n0"));
  const Json& range = field(j, "estimate2Range");
  if (!range.is_array() || range.size() != 2) fail(ErrorKind::Parse, "field 'estimate2Range' must be a pair");
  s.estimate2_lo = integer_from_json(range[0]);
  s.estimate2_hi = integer_from_json(range[1]);
  const Json& stages = field(j, "stages");
  if (!stages.is_array()) fail(ErrorKind::Parse, "field 'stages' must be an array");
  for (const auto& e : stages) {
    StageRecord r;
    r.k = get<unsigned>(e, "k");
    r.n_k = integer_from_json(field(e, "N_k"));
    r.n_prime = integer_from_json(field(e, "Nprime"));
    r.ell = get<unsigned>(e, "ell");
    r.count_at_stop = get<std::uint64_t>(e, "countAtStop");
    r.count_before_stop = get<std::uint64_t>(e, "countBeforeStop");
    r.sigma_count = get<std::uint64_t>(e, "sigmaCount");
    r.density = rational_from_json(field(e, "densityAtNk"));
    r.weyl.re = certified_from_json(field(e, "weylRe"));
    r.weyl.im = certified_from_json(field(e, "weylIm"));
    const Json& c = field(e, "checks");
    r.checks.estimate2 = get<bool>(c, "estimate2");
    r.checks.stopping_rule = get<bool>(c, "stoppingRule");
    r.checks.added_size = get<bool>(c, "addedSize");
    r.checks.weyl_bound = get<bool>(c, "weylBound");
    r.checks.density = get<bool>(c, "density");
    r.checks.set_equality = get<bool>(c, "setEquality");
    r.checks.closure = get<bool>(c, "closure");
    r.added = integers_from_json(field(e, "A_k"));
    r.generators = integers_from_json(field(e, "B"));
    s.stages.push_back(std::move(r));
  }
  return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace semitorus
