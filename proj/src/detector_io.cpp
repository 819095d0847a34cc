#include "pacwrap/detector_io.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pacwrap/errors.hpp"
#include "pacwrap/score_io.hpp"

namespace pacwrap {

namespace {

ordered_json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return "nan";
}

double read_real(const ordered_json& doc, const char* key, const std::string& source) {
  if (!doc.contains(key)) throw ParseError(source, 0, std::string("missing field '") + key + "'");
  const auto& v = doc.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ParseError(source, 0, std::string("field '") + key + "' must be a number");
}

std::int64_t read_int(const ordered_json& doc, const char* key, const std::string& source) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer())
    throw ParseError(source, 0, std::string("field '") + key + "' must be an integer");
  return doc.at(key).get<std::int64_t>();
}

ordered_json optional_real(const std::optional<double>& v) {
  return v ? real(*v) : ordered_json(nullptr);
}

}  // namespace

ordered_json detector_to_json(const WrappedDetector& d) {
  const auto& fn = d.tau_fn();
  const auto& fp = d.tau_fp();
  ordered_json doc;
  doc["version"] = kDetectorSchemaVersion;
  doc["tau_fn"] = real(fn.tau);
  doc["tau_fp"] = real(fp.tau);
  doc["k_star_fn"] = fn.k_star;
  doc["k_star_fp"] = fp.k_star;
  doc["n_fn"] = fn.n_cal;
  doc["n_fp"] = fp.n_cal;
  doc["eps_fn"] = fn.params.eps;
  doc["eps_fp"] = fp.params.eps;
  doc["delta_fn"] = fn.params.delta;
  doc["delta_fp"] = fp.params.delta;
  doc["eps_ad"] = d.eps_ad();
  doc["delta_ad"] = d.delta_ad();
  if (d.final_tau()) doc["final_tau"] = real(*d.final_tau());
  auto trace = ordered_json::array();
  for (const auto& s : d.relaxation_trace()) {
    trace.push_back({{"eps_fn", s.eps_fn},
                     {"eps_fp", s.eps_fp},
                     {"tau_fn", optional_real(s.tau_fn)},
                     {"tau_fp", optional_real(s.tau_fp)}});
  }
  doc["relaxation_trace"] = trace;
  doc["strictness_convention"] = "strict";
  doc["calib_violations_fn"] = fn.calib_violation_count;
  doc["calib_violations_fp"] = fp.calib_violation_count;
  doc["trivial_fn"] = fn.trivial;
  doc["trivial_fp"] = fp.trivial;
  return doc;
}

WrappedDetector detector_from_json(const ordered_json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source, 0, "detector document must be a JSON object");
  if (read_int(doc, "version", source) != kDetectorSchemaVersion)
    throw ParseError(source, 0, "unsupported detector version");
  if (doc.value("strictness_convention", std::string()) != "strict")
    throw ParseError(source, 0, "strictness_convention must be \"strict\"");

  PacThreshold fn;
  fn.direction = Direction::MissBelow;
  fn.tau = read_real(doc, "tau_fn", source);
  fn.k_star = read_int(doc, "k_star_fn", source);
  fn.n_cal = read_int(doc, "n_fn", source);
  fn.params = {read_real(doc, "eps_fn", source), read_real(doc, "delta_fn", source)};
  fn.calib_violation_count = doc.value("calib_violations_fn", std::int64_t{0});
  fn.trivial = doc.value("trivial_fn", false);

  PacThreshold fp;
  fp.direction = Direction::FlagAbove;
  fp.tau = read_real(doc, "tau_fp", source);
  fp.k_star = read_int(doc, "k_star_fp", source);
  fp.n_cal = read_int(doc, "n_fp", source);
  fp.params = {read_real(doc, "eps_fp", source), read_real(doc, "delta_fp", source)};
  fp.calib_violation_count = doc.value("calib_violations_fp", std::int64_t{0});
  fp.trivial = doc.value("trivial_fp", false);

  try {
    fn.params.validate();
    fp.params.validate();
  } catch (const std::domain_error& e) {
    throw ParseError(source, 0, e.what());
  }

  std::vector<RelaxStep> trace;
  if (doc.contains("relaxation_trace")) {
    const auto& t = doc.at("relaxation_trace");
    if (!t.is_array()) throw ParseError(source, 0, "relaxation_trace must be an array");
    for (const auto& e : t) {
      RelaxStep s;
      s.eps_fn = read_real(e, "eps_fn", source);
      s.eps_fp = read_real(e, "eps_fp", source);
      if (e.contains("tau_fn") && !e.at("tau_fn").is_null()) s.tau_fn = read_real(e, "tau_fn", source);
      if (e.contains("tau_fp") && !e.at("tau_fp").is_null()) s.tau_fp = read_real(e, "tau_fp", source);
      trace.push_back(s);
    }
  }

  std::optional<double> final_tau;
  if (doc.contains("final_tau") && !doc.at("final_tau").is_null())
    final_tau = read_real(doc, "final_tau", source);

  WrappedDetector d(fn, fp, std::move(trace), final_tau);
  if (d.eps_ad() != read_real(doc, "eps_ad", source) ||
      d.delta_ad() != read_real(doc, "delta_ad", source))
    throw ParseError(source, 0, "eps_ad/delta_ad inconsistent with the component guarantees");
  if (final_tau && !(*final_tau >= fp.tau && *final_tau <= fn.tau))
    throw ParseError(source, 0, "final_tau lies outside [tau_fp, tau_fn]");
  return d;
}

void write_detector_file(const std::filesystem::path& path, const WrappedDetector& detector,
                         const ordered_json& config) {
  auto doc = detector_to_json(detector);
  if (!config.is_null()) doc["config"] = config;
  write_file_atomic(path, dump(doc));
}

WrappedDetector read_detector_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, std::string("invalid JSON: ") + e.what());
  }
  return detector_from_json(doc, path.string());
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["eps_fn"] = cfg.eps_fn;
  j["eps_fp"] = cfg.eps_fp;
  j["delta_fn"] = cfg.delta_fn;
  j["delta_fp"] = cfg.delta_fp;
  j["relax_step"] = cfg.relax_step;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  ordered_json outputs = ordered_json::object();
  for (const auto& [k, v] : cfg.outputs) outputs[k] = v;
  j["outputs"] = outputs;
  return j;
}

ordered_json cp_interval_to_json(const CPInterval& ci) {
  return {{"lower", ci.lower},
          {"upper", ci.upper},
          {"level", ci.level},
          {"successes", ci.successes},
          {"trials", ci.trials}};
}

ordered_json report_to_json(const ValidationReport& r) {
  ordered_json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["rng"] = r.rng;
  j["eps_fn"] = r.params_fn.eps;
  j["delta_fn"] = r.params_fn.delta;
  j["eps_fp"] = r.params_fp.eps;
  j["delta_fp"] = r.params_fp.delta;
  j["resample"] = {{"n_normal", r.resample.n_normal}, {"n_anomaly", r.resample.n_anomaly}};
  j["population"] = {{"normal", r.population_normal}, {"anomaly", r.population_anomaly}};
  j["k_star_fn"] = r.k_star_fn;
  j["k_star_fp"] = r.k_star_fp;
  j["fpr_violations"] = r.fpr_violations;
  j["fnr_violations"] = r.fnr_violations;
  j["fpr_violation_interval"] = cp_interval_to_json(r.fpr_violation_interval);
  j["fnr_violation_interval"] = cp_interval_to_json(r.fnr_violation_interval);
  j["mean_fpr"] = r.mean_fpr;
  j["mean_fnr"] = r.mean_fnr;
  j["mean_ambiguity"] = r.mean_ambiguity;
  j["per_trial_fpr"] = r.per_trial_fpr;
  j["per_trial_fnr"] = r.per_trial_fnr;
  j["per_trial_ambiguity"] = r.per_trial_ambiguity;
  return j;
}

std::string report_to_csv(const ValidationReport& r) {
  std::ostringstream out;
  out << "trial,fpr,fnr,ambiguity\n";
  for (std::size_t i = 0; i < r.per_trial_fpr.size(); ++i)
    out << i << ',' << format_double(r.per_trial_fpr[i]) << ',' << format_double(r.per_trial_fnr[i])
        << ',' << format_double(r.per_trial_ambiguity[i]) << '\n';
  out << "\nkey,value\n";
  out << "trials," << r.trials << '\n';
  out << "seed," << r.seed << '\n';
  out << "eps_fn," << format_double(r.params_fn.eps) << '\n';
  out << "delta_fn," << format_double(r.params_fn.delta) << '\n';
  out << "eps_fp," << format_double(r.params_fp.eps) << '\n';
  out << "delta_fp," << format_double(r.params_fp.delta) << '\n';
  out << "fpr_violations," << r.fpr_violations << '\n';
  out << "fnr_violations," << r.fnr_violations << '\n';
  out << "fpr_violation_lower," << format_double(r.fpr_violation_interval.lower) << '\n';
  out << "fpr_violation_upper," << format_double(r.fpr_violation_interval.upper) << '\n';
  out << "fnr_violation_lower," << format_double(r.fnr_violation_interval.lower) << '\n';
  out << "fnr_violation_upper," << format_double(r.fnr_violation_interval.upper) << '\n';
  out << "mean_fpr," << format_double(r.mean_fpr) << '\n';
  out << "mean_fnr," << format_double(r.mean_fnr) << '\n';
  out << "mean_ambiguity," << format_double(r.mean_ambiguity) << '\n';
  return out.str();
}

namespace {

ordered_json method_to_json(const MethodSummary& m) {
  return {{"fpr_violations", m.fpr_violations},
          {"fnr_violations", m.fnr_violations},
          {"fpr_violation_interval", cp_interval_to_json(m.fpr_violation_interval)},
          {"fnr_violation_interval", cp_interval_to_json(m.fnr_violation_interval)},
          {"mean_fpr", m.mean_fpr},
          {"mean_fnr", m.mean_fnr},
          {"mean_ambiguity", m.mean_ambiguity}};
}

}  // namespace

ordered_json comparison_to_json(const BaselineComparison& c) {
  ordered_json j;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["rng"] = c.rng;
  j["eps_fn"] = c.params_fn.eps;
  j["delta_fn"] = c.params_fn.delta;
  j["eps_fp"] = c.params_fp.eps;
  j["delta_fp"] = c.params_fp.delta;
  j["resample"] = {{"n_normal", c.resample.n_normal}, {"n_anomaly", c.resample.n_anomaly}};
  j["pac"] = method_to_json(c.pac);
  j["conformal"] = method_to_json(c.conformal);
  return j;
}

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "eps,delta,mean_ambiguity,stderr\n";
  for (const auto& c : cells) {
    out << format_double(c.eps) << ',' << format_double(c.delta) << ',';
    if (c.feasible)
      out << format_double(c.mean_ambiguity) << ',' << format_double(c.stderr_ambiguity);
    else
      out << "infeasible,infeasible";
    out << '\n';
  }
  return out.str();
}

ordered_json sweep_to_json(const std::vector<SweepCell>& cells) {
  auto arr = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json j = {{"eps", c.eps}, {"delta", c.delta}, {"feasible", c.feasible}};
    if (c.feasible) {
      j["mean_ambiguity"] = c.mean_ambiguity;
      j["stderr"] = c.stderr_ambiguity;
      j["trials"] = c.trials;
    }
    arr.push_back(j);
  }
  return arr;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace pacwrap
