// Command-line front end: learn, decode, eval, baseline, bounds, oracle, synth.
#include "subsample/bounds.hpp"
#include "subsample/experiment.hpp"
#include "subsample/parallel.hpp"
#include "subsample/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace subsample;
using nlohmann::json;

namespace {

struct DataOpts {
  std::string path;
  std::string format;
  std::string transform;

  void add(CLI::App* app, bool with_transform = true) {
    app->add_option("--data", path, "Signal file (.smx, .csv) or directory of .pgm images")->required();
    app->add_option("--format", format, "smx | csv | pgm-dir (default: from the path)");
    if (with_transform)
      app->add_option("--transform", transform, "e.g. dct2:256, hadamard:64, daub4:32x32:L3 (default: dct2 of the data shape)");
  }

  TrainingSet load() const {
    LoadStats stats;
    auto ts = load_signals(path, format.empty() ? infer_signal_format(path) : parse_signal_format(format), &stats);
    if (stats.skipped_zero > 0) std::cerr << "warning: skipped " << stats.skipped_zero << " zero signal(s)\n";
    return ts;
  }

  TransformSpec spec_for(const TrainingSet& ts, const std::string& fallback = "") const {
    const std::string text = !transform.empty() ? transform : fallback;
    if (!text.empty()) {
      auto spec = parse_transform_spec(text);
      if (spec.p != ts.dim()) throw Error(ErrorCode::DimensionMismatch, "transform size != signal length");
      return spec;
    }
    if (ts.dims()) return TransformSpec::make_2d(TransformKind::DCT2, ts.dims()->rows, ts.dims()->cols);
    return TransformSpec::make_1d(TransformKind::DCT2, ts.dim());
  }
};

struct ConstraintOpts {
  std::string kind = "cardinality";
  std::string partition_file;
  Index n = 0;

  void add(CLI::App* app) {
    app->add_option("--constraint", kind, "cardinality | tree | partition")
        ->check(CLI::IsMember({"cardinality", "tree", "partition"}));
    app->add_option("--partition", partition_file, "JSON file {\"groups\": [[..]], \"quotas\": [..]}");
    app->add_option("--n", n, "Budget (ignored for partition constraints)");
  }

  ConstraintSet make(const TransformSpec& spec) const {
    if (kind == "partition") {
      if (partition_file.empty()) throw CLI::ValidationError("--partition", "required with --constraint partition");
      std::ifstream in(partition_file);
      if (!in) throw Error(ErrorCode::ParseError, "cannot open " + partition_file);
      json j;
      try {
        in >> j;
        return PartitionMatroid{j.at("groups").get<std::vector<std::vector<Index>>>(),
                                j.at("quotas").get<std::vector<Index>>()};
      } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, partition_file + ": " + e.what());
      }
    }
    if (n < 1) throw CLI::ValidationError("--n", "a positive budget is required");
    if (kind == "tree") return wavelet_tree(spec, n);
    return Cardinality{n};
  }
};

void emit_mask(const IndexSet& mask, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << to_json(mask).dump(2) << '\n';
  } else {
    save_index_set(out, mask);
  }
}

json selection_summary(const SelectionResult& r) {
  json j = {{"n", r.omega.size()}, {"objective", r.objective}, {"solver", r.solver}, {"guarantee", r.guarantee}};
  if (r.enumerated > 0) j["enumerated"] = r.enumerated;
  return j;
}

json bound_json(const BoundReport& b) {
  return {{"kind", to_string(b.kind)}, {"delta", b.delta}, {"epsilon", b.epsilon},
          {"guaranteed_capture", b.guaranteed_capture}, {"bound_value", b.bound_value}, {"note", b.note}};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw CLI::ValidationError("grid", "not a number: '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning subsampling masks for compressive sensing"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: SUBSAMPLE_THREADS or hardware)")
      ->check(CLI::NonNegativeNumber);

  // learn
  auto* learn = app.add_subcommand("learn", "Learn a mask from training signals");
  DataOpts learn_data;
  ConstraintOpts learn_cs;
  std::string learn_criterion = "avg", learn_out;
  SaturateParams learn_sat;
  learn_data.add(learn);
  learn_cs.add(learn);
  learn->add_option("--criterion", learn_criterion, "avg | gen | gen:<q> | min");
  learn->add_option("--alpha", learn_sat.alpha, "Saturate budget inflation (min criterion)");
  learn->add_option("--epsilon", learn_sat.epsilon, "Saturate bisection tolerance");
  learn->add_option("--out,-o", learn_out, "Mask JSON path (default: stdout)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive search for small instances");
  DataOpts oracle_data;
  ConstraintOpts oracle_cs;
  std::string oracle_criterion = "avg", oracle_out;
  double oracle_limit = 1e6;
  oracle_data.add(oracle);
  oracle_cs.add(oracle);
  oracle->add_option("--criterion", oracle_criterion, "avg | gen | gen:<q> | min");
  oracle->add_option("--limit", oracle_limit, "Maximum number of feasible sets to visit");
  oracle->add_option("--out,-o", oracle_out, "Mask JSON path (default: stdout)");

  // decode
  auto* decode = app.add_subcommand("decode", "Reconstruct signals through a mask");
  DataOpts decode_data;
  std::string decode_mask, decode_decoder = "linear", decode_sparsity, decode_out;
  BpConfig decode_bp;
  std::optional<double> decode_peak;
  decode_data.add(decode);
  decode->add_option("--mask", decode_mask, "Mask JSON")->required();
  decode->add_option("--decoder", decode_decoder, "linear | bp")->check(CLI::IsMember({"linear", "bp"}));
  decode->add_option("--sparsity", decode_sparsity, "Sparsity basis for bp (default: identity)");
  decode->add_option("--max-iters", decode_bp.max_iters, "bp iteration cap");
  decode->add_option("--threshold", decode_bp.threshold, "bp soft threshold (0: automatic)");
  decode->add_option("--peak", decode_peak, "PSNR peak (default: per-signal max |x|)");
  decode->add_option("--out,-o", decode_out, "Write reconstructions (original scale) to this .smx file");

  // eval
  auto* eval = app.add_subcommand("eval", "Run an experiment config and print the report");
  std::string eval_config, eval_csv;
  std::optional<std::uint64_t> eval_seed;
  eval->add_option("--config", eval_config, "Experiment JSON")->required();
  eval->add_option("--csv", eval_csv, "Report CSV path (overrides report_path)");
  eval->add_option("--seed", eval_seed, "Overrides every seed in the config");
  bool eval_timing = false;
  eval->add_flag("--timing", eval_timing, "Record wall time per cell (the CSV is then not reproducible)");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Tune a randomized variable-density mask");
  DataOpts base_data;
  std::string base_family = "lustig", base_out, base_r, base_d, base_a;
  Index base_n = 0;
  int base_draws = 20, base_levels = 100;
  std::uint64_t base_seed = 0;
  std::size_t base_score = 100;
  base_data.add(baseline);
  baseline->add_option("--family", base_family, "lustig | roman | uniform")
      ->check(CLI::IsMember({"lustig", "roman", "uniform"}));
  baseline->add_option("--n", base_n, "Budget")->required();
  baseline->add_option("--draws", base_draws, "Masks drawn per grid point");
  baseline->add_option("--seed", base_seed, "Random seed");
  baseline->add_option("--r", base_r, "Comma-separated fully sampled radii");
  baseline->add_option("--d", base_d, "Comma-separated polynomial degrees (lustig)");
  baseline->add_option("--a", base_a, "Comma-separated decay rates (roman)");
  baseline->add_option("--levels", base_levels, "Number of levels (roman)");
  baseline->add_option("--score-signals", base_score, "Training signals used to score draws");
  baseline->add_option("--out,-o", base_out, "Mask JSON path (default: stdout)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Generalization guarantees for a mask");
  DataOpts bounds_data;
  std::string bounds_mask, bounds_kind = "gen", bounds_test;
  double bounds_q = 2.0, bounds_eta = 0.05;
  std::optional<double> bounds_eps, bounds_delta;
  bounds_data.add(bounds);
  bounds->add_option("--mask", bounds_mask, "Mask JSON")->required();
  bounds->add_option("--kind", bounds_kind, "gen | min | statistical")
      ->check(CLI::IsMember({"gen", "min", "statistical"}));
  bounds->add_option("--q", bounds_q, "Concave criterion exponent (gen)");
  bounds->add_option("--eps", bounds_eps, "Hypothesis distance (gen, min)");
  bounds->add_option("--delta", bounds_delta, "Override the training slack");
  bounds->add_option("--eta", bounds_eta, "Failure probability (statistical)");
  bounds->add_option("--test", bounds_test, "Test signals: measure eps and actual capture per signal");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic ensemble");
  std::string synth_ensemble = "powerlaw-dct", synth_out;
  Index synth_p = 256, synth_m = 100, synth_rows = 0, synth_cols = 0;
  std::uint64_t synth_seed = 0;
  double synth_decay = 1.2;
  synth_cmd->add_option("--ensemble", synth_ensemble, "powerlaw-dct | twocluster-hadamard");
  synth_cmd->add_option("--p", synth_p, "Signal length");
  synth_cmd->add_option("--m", synth_m, "Number of signals");
  synth_cmd->add_option("--rows", synth_rows, "2D power-law images: rows (with --cols)");
  synth_cmd->add_option("--cols", synth_cols, "2D power-law images: columns");
  synth_cmd->add_option("--decay", synth_decay, "Power-law exponent");
  synth_cmd->add_option("--seed", synth_seed, "Random seed");
  synth_cmd->add_option("--out,-o", synth_out, "Output .smx path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (threads > 0) set_thread_count(threads);

    if (learn->parsed() || oracle->parsed()) {
      const bool brute = oracle->parsed();
      const auto& d = brute ? oracle_data : learn_data;
      const auto ts = d.load();
      const auto spec = d.spec_for(ts);
      const auto cs = (brute ? oracle_cs : learn_cs).make(spec);
      const auto c = parse_criterion(brute ? oracle_criterion : learn_criterion);
      const auto et = energy_table(spec, ts);
      auto r = brute ? brute_force_select(c, et, cs, oracle_limit) : learn_mask(c, et, cs, learn_sat);
      r.omega.meta().transform = to_string(spec);
      const auto& out = brute ? oracle_out : learn_out;
      emit_mask(r.omega, out);
      if (!out.empty() && out != "-") std::cout << selection_summary(r).dump() << '\n';
    } else if (decode->parsed()) {
      const auto mask = load_index_set(decode_mask);
      const auto ts = decode_data.load();
      const auto spec = decode_data.spec_for(ts, mask.meta().transform);
      if (mask.dim() != spec.p) throw Error(ErrorCode::DimensionMismatch, "mask dimension != signal length");
      RawSignals recon;
      recon.dims = ts.dims();
      json per = json::array();
      CompensatedSum err, ps;
      int not_converged = 0;
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const auto msr = measure(spec, mask, ts[j]);
        Eigen::VectorXd xhat;
        double imag = 0.0;
        if (decode_decoder == "bp") {
          decode_bp.sparsity = decode_sparsity.empty() ? TransformSpec::make_1d(TransformKind::Identity, spec.p)
                                                       : parse_transform_spec(decode_sparsity);
          const auto r = bp_decode(msr, decode_bp);
          not_converged += r.converged ? 0 : 1;
          xhat = r.x;
        } else {
          xhat = linear_decode(msr, &imag);
        }
        const double e = (ts[j].values() - xhat).squaredNorm() + imag * imag;
        const Eigen::VectorXd x0 = ts[j].original();
        const double peak = decode_peak ? *decode_peak : std::max(x0.cwiseAbs().maxCoeff(), 1e-300);
        const double scale = ts[j].original_norm();
        const double p = psnr_from_error(e * scale * scale, spec.p, peak);
        err.add(e);
        ps.add(p);
        per.push_back({{"l2_error", e}, {"psnr_db", std::isinf(p) ? json("inf") : json(p)}});
        recon.rows.push_back(xhat * ts[j].original_norm());
      }
      if (!decode_out.empty()) write_smx(decode_out, recon);
      const double m = static_cast<double>(ts.size());
      json out = {{"decoder", decode_decoder}, {"signals", ts.size()}, {"mean_l2_error", err.value() / m},
                  {"mean_psnr_db", std::isinf(ps.value()) ? json("inf") : json(ps.value() / m)}, {"per_signal", per}};
      if (decode_decoder == "bp") out["not_converged"] = not_converged;
      std::cout << out.dump(2) << '\n';
    } else if (eval->parsed()) {
      auto cfg = load_config(eval_config);
      if (!eval_csv.empty()) cfg.report_path = eval_csv;
      if (eval_timing) cfg.record_timing = true;
      if (eval_seed) {
        cfg.split.seed = *eval_seed;
        for (auto& b : cfg.baselines) b.seed = *eval_seed;
      }
      const auto rep = run_experiment(cfg);
      std::cout << report_table(rep);
    } else if (baseline->parsed()) {
      const auto ts = base_data.load();
      const auto spec = base_data.spec_for(ts);
      auto grid = BaselineGrid::defaults();
      if (!base_r.empty()) grid.r = parse_list(base_r);
      if (!base_d.empty()) grid.d = parse_list(base_d);
      if (!base_a.empty()) grid.a = parse_list(base_a);
      grid.levels = base_levels;
      const auto family = parse_baseline_family(base_family);
      const auto tuned = tune_baseline(family, grid, ts, spec, base_n, base_draws, base_seed, base_score);
      emit_mask(tuned.mask, base_out);
      if (!base_out.empty() && base_out != "-")
        std::cout << json{{"family", base_family}, {"train_score", tuned.train_score}, {"params", tuned.mask.meta().criterion}}.dump()
                  << '\n';
    } else if (bounds->parsed()) {
      const auto mask = load_index_set(bounds_mask);
      const auto ts = bounds_data.load();
      const auto spec = bounds_data.spec_for(ts, mask.meta().transform);
      if (mask.dim() != spec.p) throw Error(ErrorCode::DimensionMismatch, "mask dimension != signal length");
      const auto et = energy_table(spec, ts);
      json out;
      if (bounds_kind == "statistical") {
        const auto lc = log_constraint_cardinality(Cardinality{static_cast<Index>(mask.size())}, spec.p);
        BoundReport r;
        r.kind = BoundKind::Statistical;
        r.bound_value = stat_bound(static_cast<Index>(ts.size()), lc.value, bounds_eta);
        r.note = "log|A| " + lc.method + " = " + std::to_string(lc.value) + "; eta = " + std::to_string(bounds_eta);
        out = bound_json(r);
      } else {
        auto bound_for = [&](double eps) {
          return bounds_kind == "gen" ? det_bound_gen(et, mask, bounds_q, eps, bounds_delta)
                                      : det_bound_min(et, mask, eps, bounds_delta);
        };
        if (bounds_test.empty()) {
          if (!bounds_eps) throw CLI::ValidationError("--eps", "required unless --test is given");
          out = bound_json(bound_for(*bounds_eps));
        } else {
          const auto test = load_signals(bounds_test);
          out = json::array();
          for (std::size_t k = 0; k < test.size(); ++k) {
            const auto& x = test[k].values();
            const double eps = bounds_eps ? *bounds_eps
                               : bounds_kind == "gen" ? hypothesis_epsilon_avg(spec, ts, mask, x)
                                                      : hypothesis_epsilon_min(spec, ts, mask, x);
            json row = bound_json(bound_for(eps));
            const Coefficients c = forward(spec, x);
            double cap = 0.0;
            for (Index i : mask.indices()) cap += std::norm(c(i));
            row["captured"] = cap;
            out.push_back(row);
          }
        }
      }
      std::cout << out.dump(2) << '\n';
    } else if (synth_cmd->parsed()) {
      const auto e = parse_ensemble(synth_ensemble);
      RawSignals data;
      if (synth_rows > 0 || synth_cols > 0) {
        if (e != Ensemble::PowerLawDct) throw CLI::ValidationError("--rows", "2D output is only available for powerlaw-dct");
        data = synth_powerlaw_dct(synth_rows * synth_cols, synth_m, synth_seed, synth_decay, Dims2{synth_rows, synth_cols});
      } else if (e == Ensemble::PowerLawDct) {
        data = synth_powerlaw_dct(synth_p, synth_m, synth_seed, synth_decay);
      } else {
        data = synth_two_cluster_hadamard(synth_p, synth_m, synth_seed);
      }
      write_smx(synth_out, data);
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
