// pacwrap: PAC false-positive / false-negative guarantees around any anomaly
// detector's scores.
//
// Every subcommand writes machine-readable JSON to stdout (or to --json) and a
// human-readable summary to stderr; `predict` writes CSV to stdout instead.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pacwrap/binomial.hpp"
#include "pacwrap/calibration.hpp"
#include "pacwrap/config.hpp"
#include "pacwrap/conformal.hpp"
#include "pacwrap/detector_io.hpp"
#include "pacwrap/errors.hpp"
#include "pacwrap/harness.hpp"
#include "pacwrap/score_io.hpp"
#include "pacwrap/synthetic.hpp"
#include "pacwrap/wrap.hpp"

namespace {

using namespace pacwrap;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseFailure = 2,
  kInsufficientCalibration = 3,
  kRelaxationFailed = 4,
  kOrderingViolation = 5,
  kModeUnavailable = 6,
  kOutOfInterval = 7,
};

// Flags shared by all subcommands. Precedence: flag > --config file >
// $PACWRAP_SEED (seed only) > built-in default.
struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps, delta, eps_fn, eps_fp, delta_fn, delta_fp, step;
  std::optional<std::int64_t> trials;
  std::optional<unsigned> workers;
  std::string json_out;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "TOML config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--eps", eps, "Error level for both sides");
    app->add_option("--delta", delta, "Confidence level for both sides");
    app->add_option("--eps-fn", eps_fn, "FN-side error level");
    app->add_option("--eps-fp", eps_fp, "FP-side error level");
    app->add_option("--delta-fn", delta_fn, "FN-side confidence level");
    app->add_option("--delta-fp", delta_fp, "FP-side confidence level");
    app->add_option("--step", step, "Relaxation step for eps");
    app->add_option("--trials", trials, "Monte Carlo trials");
    app->add_option("--workers", workers, "Worker threads for Monte Carlo loops");
    app->add_option("--json", json_out, "Write the JSON result here instead of stdout");
  }

  RunConfig resolve(std::int64_t default_trials) const {
    RunConfig cfg;
    cfg.trials = default_trials;
    apply_seed_env(cfg);
    if (!config_path.empty()) load_config_file(cfg, config_path);
    if (seed) cfg.seed = *seed;
    if (eps) cfg.eps_fn = cfg.eps_fp = *eps;
    if (delta) cfg.delta_fn = cfg.delta_fp = *delta;
    if (eps_fn) cfg.eps_fn = *eps_fn;
    if (eps_fp) cfg.eps_fp = *eps_fp;
    if (delta_fn) cfg.delta_fn = *delta_fn;
    if (delta_fp) cfg.delta_fp = *delta_fp;
    if (step) cfg.relax_step = *step;
    if (trials) cfg.trials = *trials;
    if (workers) cfg.workers = *workers;
    cfg.validate();
    return cfg;
  }
};

// Inputs naming either one labeled file or a pair of per-class files.
struct ClassInputs {
  std::string labeled, normal, anomaly;

  void attach(CLI::App* app, const std::string& labeled_flag = "--labeled") {
    app->add_option(labeled_flag, labeled, "Labeled score file (label column required)");
    app->add_option("--normal", normal, "Normal-class score file");
    app->add_option("--anomaly", anomaly, "Anomaly-class score file");
  }

  Population load() const {
    if (!labeled.empty()) {
      if (!normal.empty() || !anomaly.empty())
        throw ParseError("arguments", 0, "give either a labeled file or --normal/--anomaly");
      const auto file = read_score_file(labeled);
      try {
        return Population::from_samples(file.records);
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(labeled, 0, e.what());
      }
    }
    if (normal.empty() || anomaly.empty())
      throw ParseError("arguments", 0, "need a labeled file or both --normal and --anomaly");
    Population p;
    p.normal = class_scores(normal, 0);
    p.anomaly = class_scores(anomaly, 1);
    return p;
  }

  static std::vector<double> class_scores(const std::string& path, int label) {
    const auto file = read_score_file(path);
    for (std::size_t i = 0; i < file.records.size(); ++i) {
      const auto& l = file.records[i].label;
      if (l && *l != label)
        throw ParseError(path, 0, "record " + std::to_string(i + 1) + " has label " +
                                      std::to_string(*l) + ", expected " + std::to_string(label));
    }
    return scores_of(file.records);
  }
};

void emit_json(const ordered_json& doc, const std::string& path) {
  if (path.empty())
    std::cout << dump(doc);
  else
    write_file_atomic(path, dump(doc));
}

ordered_json threshold_json(const PacThreshold& t) {
  ordered_json j;
  j["tau"] = std::isfinite(t.tau) ? ordered_json(t.tau) : ordered_json(format_double(t.tau));
  j["k_star"] = t.k_star;
  j["n_cal"] = t.n_cal;
  j["eps"] = t.params.eps;
  j["delta"] = t.params.delta;
  j["calib_violations"] = t.calib_violation_count;
  j["trivial"] = t.trivial;
  return j;
}

ordered_json ordering_json(const OrderingDiagnosis& d) {
  return {{"ordered", d.ordered},
          {"normals_above_tau_fn", d.normals_above_fn},
          {"anomalies_below_tau_fp", d.anomalies_below_fp},
          {"k_star_fp", d.k_star_fp},
          {"k_star_fn", d.k_star_fn},
          {"counts_within_budget", d.counts_within_budget},
          {"counts_strictly_below_budget", d.counts_strictly_below_budget}};
}

void print_ordering(const OrderingDiagnosis& d) {
  std::cerr << "ordering: tau_fn " << (d.ordered ? ">=" : "<") << " tau_fp"
            << (d.ordered ? " (empty-set ambiguity region)" : " (both-labels ambiguity region)")
            << "\n  normals above tau_fn: " << d.normals_above_fn << " (k*_fp=" << d.k_star_fp
            << ")\n  anomalies below tau_fp: " << d.anomalies_below_fp
            << " (k*_fn=" << d.k_star_fn << ")\n";
  if (d.strict_form_disagrees())
    std::cerr << "  note: a count sits exactly on its budget; the strict-count form of the "
                 "ordering condition disagrees here\n";
}

void print_detector(const WrappedDetector& d) {
  std::cerr << "tau_fn=" << format_double(d.tau_fn().tau) << " (k*=" << d.tau_fn().k_star
            << ", n=" << d.tau_fn().n_cal << ")\n"
            << "tau_fp=" << format_double(d.tau_fp().tau) << " (k*=" << d.tau_fp().k_star
            << ", n=" << d.tau_fp().n_cal << ")\n"
            << "eps_ad=" << format_double(d.eps_ad()) << " delta_ad=" << format_double(d.delta_ad())
            << "\n";
  if (d.final_tau()) std::cerr << "final_tau=" << format_double(*d.final_tau()) << "\n";
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("arguments", 0, "bad grid value '" + item + "'");
    }
  }
  if (out.empty()) throw ParseError("arguments", 0, "empty grid");
  return out;
}

ResampleSpec resample_from(std::int64_t cal_normal, std::int64_t cal_anomaly,
                           std::optional<std::int64_t> cal_size, std::optional<double> ratio) {
  if (cal_size) return ResampleSpec::from_ratio(*cal_size, ratio.value_or(0.5));
  return {cal_normal, cal_anomaly};
}

ordered_json resample_json(const ResampleSpec& r) {
  return {{"n_normal", r.n_normal}, {"n_anomaly", r.n_anomaly}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC guarantees on false-positive and false-negative rates for anomaly scores"};
  app.require_subcommand(1);

  // calibrate
  CommonFlags cal_flags;
  ClassInputs cal_inputs;
  std::string cal_out;
  bool allow_trivial = false;
  auto* cal = app.add_subcommand("calibrate", "Fit tau_fn and tau_fp on calibration scores");
  cal_flags.attach(cal);
  cal_inputs.attach(cal);
  cal->add_option("--out", cal_out, "Detector JSON to write")->required();
  cal->add_flag("--allow-trivial", allow_trivial,
                "Return vacuous thresholds instead of failing on small samples");

  // predict
  std::string pred_scores, pred_detector, pred_mode = "abstain", pred_out;
  auto* pred = app.add_subcommand("predict", "Classify scores with a saved detector");
  pred->add_option("--scores", pred_scores, "Score file")->required();
  pred->add_option("--detector", pred_detector, "Detector JSON")->required();
  pred->add_option("--mode", pred_mode, "abstain | final")
      ->check(CLI::IsMember({"abstain", "final"}));
  pred->add_option("--out", pred_out, "Write CSV here instead of stdout");

  // relax
  CommonFlags relax_flags;
  ClassInputs relax_inputs;
  std::string relax_out;
  auto* relax = app.add_subcommand("relax", "Raise eps until tau_fn >= tau_fp");
  relax_flags.attach(relax);
  relax_inputs.attach(relax);
  relax->add_option("--out", relax_out, "Detector JSON to write")->required();

  // collapse
  std::string col_detector, col_out;
  std::optional<double> col_tau;
  auto* col = app.add_subcommand("collapse", "Replace the ambiguity region by one threshold");
  col->add_option("--detector", col_detector, "Detector JSON")->required();
  col->add_option("--tau", col_tau, "Threshold in [tau_fp, tau_fn] (default: midpoint)");
  col->add_option("--out", col_out, "Detector JSON to write")->required();

  // evaluate
  std::string eval_scores, eval_detector, eval_mode = "abstain", eval_json;
  auto* eval = app.add_subcommand("evaluate", "FPR, FNR, ERR and ambiguity on labeled scores");
  eval->add_option("--scores", eval_scores, "Labeled score file")->required();
  eval->add_option("--detector", eval_detector, "Detector JSON")->required();
  eval->add_option("--mode", eval_mode, "abstain | final")->check(CLI::IsMember({"abstain", "final"}));
  eval->add_option("--json", eval_json, "Write the JSON result here instead of stdout");

  // mc-validate and compare-baseline share their inputs
  struct McArgs {
    CommonFlags flags;
    ClassInputs inputs;
    std::int64_t cal_normal = 0, cal_anomaly = 0;
    std::optional<std::int64_t> cal_size;
    std::optional<double> anomaly_ratio;
    std::string csv_out;
  };
  auto attach_mc = [](CLI::App* sub, McArgs& a) {
    a.flags.attach(sub);
    a.inputs.attach(sub, "--population");
    sub->add_option("--cal-normal", a.cal_normal, "Normal calibration size per trial");
    sub->add_option("--cal-anomaly", a.cal_anomaly, "Anomaly calibration size per trial");
    sub->add_option("--cal-size", a.cal_size, "Total calibration size per trial");
    sub->add_option("--anomaly-ratio", a.anomaly_ratio, "Anomaly fraction of --cal-size");
  };
  McArgs mc_args;
  auto* mc = app.add_subcommand("mc-validate", "Known-finite-population PAC validation");
  attach_mc(mc, mc_args);
  mc->add_option("--csv", mc_args.csv_out, "Per-trial CSV report");

  McArgs cmp_args;
  auto* cmp = app.add_subcommand("compare-baseline", "PAC thresholds vs split-conformal baseline");
  attach_mc(cmp, cmp_args);

  // sweep
  McArgs sw_args;
  std::string sw_eps = "0.05,0.1,0.15,0.2,0.25", sw_delta = "0.05,0.1,0.15,0.2,0.25";
  bool sw_no_resample = false;
  auto* sw = app.add_subcommand("sweep", "Mean ambiguity over an (eps, delta) grid");
  attach_mc(sw, sw_args);
  sw->add_option("--eps-grid", sw_eps, "Comma-separated eps values");
  sw->add_option("--delta-grid", sw_delta, "Comma-separated delta values");
  sw->add_flag("--no-resample", sw_no_resample, "Calibrate once on the given scores per cell");
  sw->add_option("--csv", sw_args.csv_out, "Long-format CSV output");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Synthetic data generators");
  sim->require_subcommand(1);
  CommonFlags sim_flags;
  std::int64_t sim_n_normal = 2000, sim_n_anomaly = 2000;
  double sim_sep = 5.0;
  std::string sim_out, sim_out_normal, sim_out_anomaly;
  auto* sim_scores = sim->add_subcommand("scores", "1-D Gaussian scores: N(0,1) vs N(sep,1)");
  sim_flags.attach(sim_scores);
  sim_scores->add_option("--n-normal", sim_n_normal);
  sim_scores->add_option("--n-anomaly", sim_n_anomaly);
  sim_scores->add_option("--separation", sim_sep);
  sim_scores->add_option("--out", sim_out, "Labeled score file with both classes");
  sim_scores->add_option("--out-normal", sim_out_normal);
  sim_scores->add_option("--out-anomaly", sim_out_anomaly);

  CommonFlags cl_flags;
  GaussianClusterSpec cl_spec;
  double cl_sigma2 = 25.0;
  bool cl_random_sigma2 = false;
  std::string cl_features, cl_cal_scores, cl_test_scores;
  auto* sim_cl = sim->add_subcommand("clusters", "Two Gaussian clusters scored by centroid distance");
  cl_flags.attach(sim_cl);
  sim_cl->add_option("--dim", cl_spec.dim);
  sim_cl->add_option("--margin", cl_spec.margin);
  sim_cl->add_option("--sigma2", cl_sigma2);
  sim_cl->add_flag("--random-sigma2", cl_random_sigma2, "Draw sigma2 from U[1, 100]");
  sim_cl->add_option("--train-normal", cl_spec.train_normal);
  sim_cl->add_option("--cal-normal", cl_spec.cal_normal);
  sim_cl->add_option("--cal-anomaly", cl_spec.cal_anomaly);
  sim_cl->add_option("--test-normal", cl_spec.test_normal);
  sim_cl->add_option("--test-anomaly", cl_spec.test_anomaly);
  sim_cl->add_option("--features-out", cl_features, "Feature CSV (x0..,label,split)");
  sim_cl->add_option("--cal-scores", cl_cal_scores, "Labeled calibration score file");
  sim_cl->add_option("--test-scores", cl_test_scores, "Labeled test score file");

  CommonFlags sh_flags;
  ShiftSpec sh_spec;
  std::int64_t sh_n = 1000;
  std::string sh_out;
  auto* sim_sh = sim->add_subcommand("shift", "Anomalies from the gamma-mixed mean");
  sh_flags.attach(sim_sh);
  sim_sh->add_option("--gamma", sh_spec.gamma);
  sim_sh->add_option("--n", sh_n);
  sim_sh->add_option("--out", sh_out, "Labeled score file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParseFailure;
  }

  try {
    if (*cal) {
      const auto cfg = cal_flags.resolve(4000);
      const auto pop = cal_inputs.load();
      const CalibrationOptions opts{allow_trivial};
      const auto fn = calibrate_fn(pop.anomaly, cfg.params_fn(), opts);
      const auto fp = calibrate_fp(pop.normal, cfg.params_fp(), opts);
      const WrappedDetector det(fn, fp, {RelaxStep{fn.params.eps, fp.params.eps, fn.tau, fp.tau}});
      const auto diag = check_ordering(det, pop.normal, pop.anomaly);
      write_detector_file(cal_out, det, config_to_json(cfg));
      print_detector(det);
      print_ordering(diag);
      emit_json({{"detector", cal_out},
                 {"tau_fn", threshold_json(fn)},
                 {"tau_fp", threshold_json(fp)},
                 {"eps_ad", det.eps_ad()},
                 {"delta_ad", det.delta_ad()},
                 {"ordering", ordering_json(diag)},
                 {"config", config_to_json(cfg)}},
                cal_flags.json_out);
    } else if (*pred) {
      const auto det = read_detector_file(pred_detector);
      const auto file = read_score_file(pred_scores);
      const auto scores = scores_of(file.records);
      const auto mode = pred_mode == "final" ? PredictMode::FinalThreshold : PredictMode::WithAbstention;
      const auto preds = predict_batch(scores, det, mode);
      std::ostringstream out;
      out << "score,verdict,set_value\n";
      std::int64_t n_anomaly = 0, n_normal = 0, n_abstain = 0;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        out << format_double(scores[i]) << ',' << to_string(preds[i].verdict) << ','
            << to_string(preds[i].set_value) << '\n';
        switch (preds[i].verdict) {
          case Verdict::Anomaly: ++n_anomaly; break;
          case Verdict::Normal: ++n_normal; break;
          case Verdict::Abstain: ++n_abstain; break;
        }
      }
      if (pred_out.empty())
        std::cout << out.str();
      else
        write_file_atomic(pred_out, out.str());
      std::cerr << "anomaly=" << n_anomaly << " normal=" << n_normal << " abstain=" << n_abstain
                << "\n";
    } else if (*relax) {
      const auto cfg = relax_flags.resolve(4000);
      const auto pop = relax_inputs.load();
      try {
        const auto det = relax_constraints(pop.normal, pop.anomaly, cfg.params_fn(), cfg.params_fp(),
                                           cfg.relax_step);
        write_detector_file(relax_out, det, config_to_json(cfg));
        print_detector(det);
        std::cerr << "relaxation passes: " << det.relaxation_trace().size() << "\n";
        auto doc = detector_to_json(det);
        doc["detector"] = relax_out;
        doc["config"] = config_to_json(cfg);
        emit_json(doc, relax_flags.json_out);
      } catch (const RelaxationFailed& e) {
        std::cerr << "trace:\n";
        for (const auto& s : e.trace())
          std::cerr << "  eps_fn=" << format_double(s.eps_fn) << " eps_fp=" << format_double(s.eps_fp)
                    << " tau_fn=" << (s.tau_fn ? format_double(*s.tau_fn) : "n/a")
                    << " tau_fp=" << (s.tau_fp ? format_double(*s.tau_fp) : "n/a") << "\n";
        throw;
      }
    } else if (*col) {
      const auto det = read_detector_file(col_detector);
      const auto rule = col_tau ? CollapseRule::custom(*col_tau) : CollapseRule::midpoint();
      const auto collapsed = collapse_threshold(det, rule);
      write_detector_file(col_out, collapsed);
      print_detector(collapsed);
      auto doc = detector_to_json(collapsed);
      doc["detector"] = col_out;
      emit_json(doc, "");
    } else if (*eval) {
      const auto det = read_detector_file(eval_detector);
      const auto file = read_score_file(eval_scores);
      std::vector<int> labels;
      for (std::size_t i = 0; i < file.records.size(); ++i) {
        if (!file.records[i].label)
          throw ParseError(eval_scores, 0, "record " + std::to_string(i + 1) + " has no label");
        labels.push_back(*file.records[i].label);
      }
      const auto scores = scores_of(file.records);
      const auto mode = eval_mode == "final" ? PredictMode::FinalThreshold : PredictMode::WithAbstention;
      const auto counts = confusion(predict_batch(scores, det, mode), labels);
      const auto r = rates(counts);
      auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
      ordered_json doc;
      doc["counts"] = {{"tp", counts.tp}, {"tn", counts.tn}, {"fp", counts.fp},
                       {"fn", counts.fn}, {"abstained", counts.abstained}};
      doc["fpr"] = opt(r.fpr);
      doc["fnr"] = opt(r.fnr);
      doc["err"] = opt(r.err);
      doc["ambiguity"] = (det.final_tau() || scores.empty()) ? ordered_json(nullptr)
                                                             : ordered_json(ambiguity_fraction(scores, det));
      emit_json(doc, eval_json);
      auto show = [](const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; };
      std::cerr << "FPR=" << show(r.fpr) << " FNR=" << show(r.fnr) << " ERR=" << show(r.err)
                << " abstained=" << counts.abstained << "\n";
    } else if (*mc) {
      const auto cfg = mc_args.flags.resolve(4000);
      const auto pop = mc_args.inputs.load();
      MonteCarloOptions opts{cfg.trials, cfg.seed,
                             resample_from(mc_args.cal_normal, mc_args.cal_anomaly, mc_args.cal_size,
                                           mc_args.anomaly_ratio),
                             cfg.workers};
      const auto report = mc_validate(pop, cfg.params_fn(), cfg.params_fp(), opts);
      auto doc = report_to_json(report);
      doc["config"] = config_to_json(cfg);
      emit_json(doc, mc_args.flags.json_out);
      if (!mc_args.csv_out.empty()) write_file_atomic(mc_args.csv_out, report_to_csv(report));
      const auto& fi = report.fpr_violation_interval;
      const auto& ni = report.fnr_violation_interval;
      std::fprintf(stderr,
                   "trials=%lld  Pr(FPR>%g) in [%.3f, %.3f] (%lld)  Pr(FNR>%g) in [%.3f, %.3f] (%lld)\n",
                   static_cast<long long>(report.trials), cfg.eps_fp, fi.lower, fi.upper,
                   static_cast<long long>(report.fpr_violations), cfg.eps_fn, ni.lower, ni.upper,
                   static_cast<long long>(report.fnr_violations));
    } else if (*cmp) {
      const auto cfg = cmp_args.flags.resolve(300);
      const auto pop = cmp_args.inputs.load();
      MonteCarloOptions opts{cfg.trials, cfg.seed,
                             resample_from(cmp_args.cal_normal, cmp_args.cal_anomaly,
                                           cmp_args.cal_size, cmp_args.anomaly_ratio),
                             cfg.workers};
      const auto c = compare_baseline(pop, cfg.params_fn(), cfg.params_fp(), opts);
      auto doc = comparison_to_json(c);
      doc["config"] = config_to_json(cfg);
      emit_json(doc, cmp_args.flags.json_out);
      auto line = [&](const char* name, const MethodSummary& m) {
        std::fprintf(stderr,
                     "%-10s Pr(FPR>eps) [%.3f, %.3f]  Pr(FNR>eps) [%.3f, %.3f]  mean FPR %.3f  "
                     "mean FNR %.3f  ambiguity %.3f\n",
                     name, m.fpr_violation_interval.lower, m.fpr_violation_interval.upper,
                     m.fnr_violation_interval.lower, m.fnr_violation_interval.upper, m.mean_fpr,
                     m.mean_fnr, m.mean_ambiguity);
      };
      line("pac", c.pac);
      line("conformal", c.conformal);
    } else if (*sw) {
      const auto cfg = sw_args.flags.resolve(100);
      const auto pop = sw_args.inputs.load();
      SweepOptions opts;
      opts.trials_per_cell = cfg.trials;
      opts.seed = cfg.seed;
      opts.resample = resample_from(sw_args.cal_normal, sw_args.cal_anomaly, sw_args.cal_size,
                                    sw_args.anomaly_ratio);
      opts.resample_calibration = !sw_no_resample;
      opts.workers = cfg.workers;
      const auto eps_grid = parse_grid(sw_eps);
      const auto delta_grid = parse_grid(sw_delta);
      const auto cells = sweep_ambiguity(pop, eps_grid, delta_grid, opts);
      if (!sw_args.csv_out.empty()) write_file_atomic(sw_args.csv_out, sweep_to_csv(cells));
      ordered_json doc;
      doc["cells"] = sweep_to_json(cells);
      doc["resample"] = opts.resample_calibration ? ordered_json(resample_json(opts.resample))
                                                  : ordered_json(nullptr);
      doc["config"] = config_to_json(cfg);
      emit_json(doc, sw_args.flags.json_out);
      std::cerr << sweep_to_csv(cells);
    } else if (*sim_scores) {
      const auto cfg = sim_flags.resolve(1);
      const auto s = simulate_scores(sim_n_normal, sim_n_anomaly, sim_sep, cfg.seed);
      if (!sim_out_normal.empty()) write_score_file(sim_out_normal, s.normal);
      if (!sim_out_anomaly.empty()) write_score_file(sim_out_anomaly, s.anomaly);
      if (!sim_out.empty()) {
        auto all = s.normal;
        all.insert(all.end(), s.anomaly.begin(), s.anomaly.end());
        write_score_file(sim_out, all);
      }
      emit_json({{"n_normal", sim_n_normal},
                 {"n_anomaly", sim_n_anomaly},
                 {"separation", sim_sep},
                 {"seed", cfg.seed}},
                sim_flags.json_out);
      std::cerr << "simulated " << sim_n_normal << " normal and " << sim_n_anomaly
                << " anomaly scores\n";
    } else if (*sim_cl) {
      const auto cfg = cl_flags.resolve(1);
      cl_spec.seed = cfg.seed;
      cl_spec.sigma2 = cl_random_sigma2 ? std::nullopt : std::optional<double>(cl_sigma2);
      const auto data = generate_clusters(cl_spec);
      const auto centroid = empirical_centroid(data.train);
      if (!cl_features.empty()) {
        std::ostringstream out;
        for (std::size_t j = 0; j < cl_spec.dim; ++j) out << 'x' << j << ',';
        out << "label,split\n";
        auto rows = [&](const FeatureMatrix& m, const std::vector<int>* y, const char* split) {
          for (std::size_t i = 0; i < m.rows(); ++i) {
            for (double v : m.row(i)) out << format_double(v) << ',';
            out << (y ? (*y)[i] : 0) << ',' << split << '\n';
          }
        };
        rows(data.train, nullptr, "train");
        rows(data.calibration.x, &data.calibration.y, "calibration");
        rows(data.test.x, &data.test.y, "test");
        write_file_atomic(cl_features, out.str());
      }
      if (!cl_cal_scores.empty()) write_score_file(cl_cal_scores, score_split(data.calibration, centroid));
      if (!cl_test_scores.empty()) write_score_file(cl_test_scores, score_split(data.test, centroid));
      emit_json({{"dim", cl_spec.dim},
                 {"margin", cl_spec.margin},
                 {"sigma2", data.sigma2},
                 {"mu_anomalous", data.mu_anomalous},
                 {"train_centroid", centroid},
                 {"sizes",
                  {{"train", data.train.rows()},
                   {"calibration", data.calibration.y.size()},
                   {"test", data.test.y.size()}}},
                 {"seed", cfg.seed}},
                cl_flags.json_out);
      std::cerr << "clusters: sigma2=" << format_double(data.sigma2) << " train=" << data.train.rows()
                << " calibration=" << data.calibration.y.size() << " test=" << data.test.y.size()
                << "\n";
    } else if (*sim_sh) {
      const auto cfg = sh_flags.resolve(1);
      const auto s = generate_shifted_test(sh_spec, sh_n, cfg.seed);
      write_score_file(sh_out, s);
      emit_json({{"gamma", sh_spec.gamma}, {"n", sh_n}, {"seed", cfg.seed}}, sh_flags.json_out);
      std::cerr << "shifted anomalies: gamma=" << format_double(sh_spec.gamma) << " n=" << sh_n << "\n";
    }
  } catch (const InsufficientCalibration& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInsufficientCalibration;
  } catch (const RelaxationFailed& e) {
    std::cerr << "error: relaxation failed: " << e.what() << "\n";
    return kRelaxationFailed;
  } catch (const OrderingViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOrderingViolation;
  } catch (const ModeUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kModeUnavailable;
  } catch (const OutOfInterval& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOutOfInterval;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const NonFiniteScore& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kParseFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kParseFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
