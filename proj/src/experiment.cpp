#include "subsample/experiment.hpp"

#include "subsample/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace subsample {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ParseError, "config: " + what); }

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).string();
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string stem(const std::string& method, Index n) {
  std::string s;
  for (char ch : method) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.') {
      s.push_back(ch);
    } else if (!s.empty() && s.back() != '-') {
      s.push_back('-');
    }
  }
  while (!s.empty() && s.back() == '-') s.pop_back();
  return s + "_n" + std::to_string(n);
}

double peak_of(const Eigen::VectorXd& x, std::optional<double> peak) {
  if (peak) return *peak;
  const double m = x.cwiseAbs().maxCoeff();
  return m > 0.0 ? m : 1.0;
}

// Per-signal squared error on the unit-norm signal (including the imaginary
// part a complex transform leaves behind) and PSNR at the original scale,
// reduced in signal order.
template <typename Decode>
DecodeScore score_each(const TrainingSet& test, std::optional<double> peak, Decode&& decode) {
  if (test.size() == 0) throw Error(ErrorCode::DimensionMismatch, "empty test set");
  std::vector<double> err(test.size()), ps(test.size());
  parallel_for(test.size(), [&](std::size_t j) {
    const Signal& s = test[j];
    double imag = 0.0;
    const Eigen::VectorXd xhat = decode(s, &imag);
    err[j] = (s.values() - xhat).squaredNorm() + imag * imag;
    const double scale = s.original_norm();
    ps[j] = psnr_from_error(err[j] * scale * scale, s.size(), peak_of(s.original(), peak));
  });
  CompensatedSum e, p;
  for (std::size_t j = 0; j < test.size(); ++j) {
    e.add(err[j]);
    p.add(ps[j]);
  }
  const double m = static_cast<double>(test.size());
  return {e.value() / m, p.value() / m};
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> number_list(const nlohmann::json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

Criterion parse_criterion(const std::string& text) {
  if (text == "avg") return Avg{};
  if (text == "min") return Min{};
  if (text == "gen") return Gen{};
  std::string q;
  if (text.rfind("gen:", 0) == 0) q = text.substr(4);
  if (text.rfind("gen(q=", 0) == 0 && text.back() == ')') q = text.substr(6, text.size() - 7);
  if (!q.empty()) {
    try {
      std::size_t used = 0;
      const double v = std::stod(q, &used);
      if (used == q.size()) {
        if (!(v >= 1.0)) throw Error(ErrorCode::DomainError, "gen needs q >= 1");
        return Gen{v};
      }
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorCode::ParseError, "unknown criterion '" + text + "' (avg, min, gen, gen:<q>)");
}

Criterion criterion_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_criterion(j.get<std::string>());
  if (!j.is_object() || !j.contains("name")) config_error("criterion must be a string or {\"name\": ..}");
  const auto name = j["name"].get<std::string>();
  if (name == "gen") {
    const double q = j.value("q", 2.0);
    if (!(q >= 1.0)) throw Error(ErrorCode::DomainError, "gen needs q >= 1");
    return Gen{q};
  }
  return parse_criterion(name);
}

std::pair<TrainingSet, TrainingSet> split_train_test(const TrainingSet& all, const SplitRule& rule) {
  if (!(rule.ratio > 0.0 && rule.ratio < 1.0)) throw Error(ErrorCode::DomainError, "split ratio must lie in (0, 1)");
  const std::size_t m = all.size();
  if (m < 2) throw Error(ErrorCode::DimensionMismatch, "need at least two signals to split");
  auto n_train = static_cast<std::size_t>(std::ceil(rule.ratio * static_cast<double>(m) - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, m - 1);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (rule.mode == SplitMode::Shuffle) {
    std::mt19937_64 rng(rule.seed);
    for (std::size_t k = m - 1; k > 0; --k) std::swap(order[k], order[rng() % (k + 1)]);
  }
  std::vector<std::size_t> tr(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> te(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {all.select(tr), all.select(te)};
}

ConstraintSet ConstraintRule::instantiate(const TransformSpec& spec, Index n) const {
  switch (kind) {
    case ConstraintKind::Cardinality: return Cardinality{n};
    case ConstraintKind::Partition: return partition;
    case ConstraintKind::Tree: return wavelet_tree(spec, n);
  }
  return Cardinality{n};
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  try {
    ExperimentConfig cfg;
    if (!j.is_object()) config_error("top level must be an object");
    if (!j.contains("transform")) config_error("missing 'transform'");
    cfg.transform = parse_transform_spec(j["transform"].get<std::string>());

    if (j.contains("data")) {
      const auto& d = j["data"];
      if (d.is_string()) {
        cfg.data_path = resolve(base_dir, d.get<std::string>());
      } else {
        cfg.data_path = resolve(base_dir, d.at("path").get<std::string>());
        cfg.data_format = d.value("format", "");
        cfg.test_path = resolve(base_dir, d.value("test_path", ""));
      }
    }

    if (j.contains("criteria")) {
      cfg.criteria.clear();
      for (const auto& c : j["criteria"]) cfg.criteria.push_back(criterion_from_json(c));
    } else if (j.contains("criterion")) {
      cfg.criteria = {criterion_from_json(j["criterion"])};
    }

    if (j.contains("constraint")) {
      const auto& c = j["constraint"];
      const auto type = c.is_string() ? c.get<std::string>() : c.value("type", "cardinality");
      if (type == "cardinality") {
        cfg.constraint.kind = ConstraintKind::Cardinality;
      } else if (type == "tree") {
        cfg.constraint.kind = ConstraintKind::Tree;
      } else if (type == "partition") {
        cfg.constraint.kind = ConstraintKind::Partition;
        cfg.constraint.partition.groups = c.at("groups").get<std::vector<std::vector<Index>>>();
        cfg.constraint.partition.quotas = c.at("quotas").get<std::vector<Index>>();
        validate_constraint(cfg.constraint.partition, cfg.transform.p);
      } else {
        config_error("unknown constraint type '" + type + "'");
      }
    }

    if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<Index>>();
    if (cfg.constraint.kind == ConstraintKind::Partition) {
      const Index total = cfg.constraint.partition.total();
      if (cfg.n_list.empty()) cfg.n_list = {total};
      if (cfg.n_list != std::vector<Index>{total}) config_error("a partition constraint fixes n_list to [sum of quotas]");
    }
    if (cfg.n_list.empty()) config_error("n_list is empty");
    for (Index n : cfg.n_list)
      if (n < 1 || n > cfg.transform.p) throw Error(ErrorCode::BadBudget, "budget " + std::to_string(n) + " outside [1, p]");

    if (j.contains("split")) {
      const auto& s = j["split"];
      const auto mode = s.value("mode", "prefix");
      if (mode == "prefix") {
        cfg.split.mode = SplitMode::Prefix;
      } else if (mode == "shuffle") {
        cfg.split.mode = SplitMode::Shuffle;
      } else {
        config_error("split mode must be prefix or shuffle");
      }
      cfg.split.ratio = s.value("ratio", 0.5);
      cfg.split.seed = s.value("seed", std::uint64_t{0});
    }

    if (j.contains("saturate")) {
      cfg.saturate.alpha = j["saturate"].value("alpha", 1.0);
      cfg.saturate.epsilon = j["saturate"].value("epsilon", 1e-6);
    }

    if (j.contains("baselines")) {
      for (const auto& b : j["baselines"]) {
        BaselineConfig bc;
        bc.family = parse_baseline_family(b.at("family").get<std::string>());
        const auto def = BaselineGrid::defaults();
        bc.grid.r = number_list(b, "r", def.r);
        bc.grid.d = number_list(b, "d", def.d);
        bc.grid.a = number_list(b, "a", def.a);
        bc.grid.levels = b.value("levels", def.levels);
        bc.draws = b.value("draws", bc.family == BaselineFamily::Uniform ? 1 : 20);
        bc.seed = b.value("seed", std::uint64_t{0});
        bc.score_signals = b.value("score_signals", std::size_t{100});
        cfg.baselines.push_back(std::move(bc));
      }
    }

    if (j.contains("decoders")) {
      const auto& d = j["decoders"];
      cfg.linear = d.value("linear", true);
      if (d.contains("bp") && !(d["bp"].is_boolean() && !d["bp"].get<bool>())) {
        BpConfig bp;
        bp.sparsity = TransformSpec::make_1d(TransformKind::Identity, cfg.transform.p);
        if (d["bp"].is_object()) {
          const auto& o = d["bp"];
          if (o.contains("sparsity")) bp.sparsity = parse_transform_spec(o["sparsity"].get<std::string>());
          bp.max_iters = o.value("max_iters", bp.max_iters);
          bp.feas_tol = o.value("feas_tol", bp.feas_tol);
          bp.step_tol = o.value("step_tol", bp.step_tol);
          bp.threshold = o.value("threshold", bp.threshold);
        }
        cfg.bp = bp;
      }
    }
    cfg.adaptive = j.value("adaptive", true);
    if (j.contains("psnr_peak") && !j["psnr_peak"].is_null()) cfg.psnr_peak = j["psnr_peak"].get<double>();
    cfg.report_path = resolve(base_dir, j.value("report_path", ""));
    cfg.mask_dir = resolve(base_dir, j.value("mask_dir", ""));
    cfg.record_timing = j.value("record_timing", false);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    config_error(e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return config_from_json(j, fs::path(path).parent_path().string());
}

DecodeScore score_linear(const TransformSpec& spec, const IndexSet& omega, const TrainingSet& test,
                         std::optional<double> peak) {
  return score_each(test, peak, [&](const Signal& s, double* imag) { return linear_decode(measure(spec, omega, s), imag); });
}

DecodeScore score_bp(const TransformSpec& spec, const IndexSet& omega, const TrainingSet& test, const BpConfig& bp,
                     std::optional<double> peak) {
  return score_each(test, peak, [&](const Signal& s, double*) { return bp_decode(measure(spec, omega, s), bp).x; });
}

DecodeScore score_adaptive(const TransformSpec& spec, Index n, const TrainingSet& test, std::optional<double> peak) {
  return score_each(test, peak, [&](const Signal& s, double* imag) { return adaptive_nterm(spec, s, n, imag); });
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const TrainingSet& train, const TrainingSet& test) {
  validate(cfg.transform);
  if (train.dim() != cfg.transform.p || test.dim() != cfg.transform.p)
    throw Error(ErrorCode::DimensionMismatch, "signal length != transform size");
  const auto& spec = cfg.transform;
  const EnergyTable et = energy_table(spec, train);

  ExperimentReport rep;
  auto decode_rows = [&](const std::string& method, Index n, const IndexSet& omega, std::optional<double> objective,
                         double learn_ms) {
    auto add = [&](const char* decoder, auto&& run) {
      ReportRow row{method, n, decoder, 0.0, 0.0, objective, std::nullopt, ""};
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const DecodeScore s = run();
        row.l2_error = s.l2_error;
        row.psnr_db = s.psnr_db;
      } catch (const std::exception& e) {
        row.l2_error = row.psnr_db = std::nan("");
        row.error = e.what();
      }
      if (cfg.record_timing) row.wall_ms = learn_ms + elapsed_ms(t0);
      rep.rows.push_back(std::move(row));
    };
    if (cfg.linear) add("linear", [&] { return score_linear(spec, omega, test, cfg.psnr_peak); });
    if (cfg.bp) add("bp", [&] { return score_bp(spec, omega, test, *cfg.bp, cfg.psnr_peak); });
  };
  auto failed = [&](const std::string& method, Index n, const std::exception& e) {
    rep.rows.push_back({method, n, "-", std::nan(""), std::nan(""), std::nullopt, std::nullopt, e.what()});
  };

  for (Index n : cfg.n_list) {
    for (const auto& c : cfg.criteria) {
      const std::string method = describe(canonical(c));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const ConstraintSet cs = cfg.constraint.instantiate(spec, n);
        auto res = learn_mask(c, et, cs, cfg.saturate);
        res.omega.meta().transform = to_string(spec);
        const double ms = elapsed_ms(t0);
        rep.masks.emplace_back(stem(method, n), res.omega);
        decode_rows(method, n, res.omega, res.objective, ms);
      } catch (const std::exception& e) {
        failed(method, n, e);
      }
    }
    for (const auto& b : cfg.baselines) {
      const std::string method = to_string(b.family);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const auto tuned = tune_baseline(b.family, b.grid, et, spec, n, b.draws, b.seed, b.score_signals);
        const double ms = elapsed_ms(t0);
        rep.masks.emplace_back(stem(method, n), tuned.mask);
        decode_rows(method, n, tuned.mask, evaluate(Avg{}, et, tuned.mask), ms);
      } catch (const std::exception& e) {
        failed(method, n, e);
      }
    }
    if (cfg.adaptive) {
      ReportRow row{"adaptive", n, "nterm", 0.0, 0.0, std::nullopt, std::nullopt, ""};
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const DecodeScore s = score_adaptive(spec, n, test, cfg.psnr_peak);
        row.l2_error = s.l2_error;
        row.psnr_db = s.psnr_db;
      } catch (const std::exception& e) {
        row.l2_error = row.psnr_db = std::nan("");
        row.error = e.what();
      }
      if (cfg.record_timing) row.wall_ms = elapsed_ms(t0);
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.data_path.empty()) throw Error(ErrorCode::ParseError, "config: no data path");
  const auto fmt = cfg.data_format.empty() ? infer_signal_format(cfg.data_path) : parse_signal_format(cfg.data_format);
  const TrainingSet all = load_signals(cfg.data_path, fmt);
  ExperimentReport rep;
  if (!cfg.test_path.empty()) {
    rep = run_experiment(cfg, all, load_signals(cfg.test_path));
  } else {
    const auto [train, test] = split_train_test(all, cfg.split);
    rep = run_experiment(cfg, train, test);
  }
  persist(cfg, rep);
  return rep;
}

std::string report_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  out << "method,n,decoder,l2_error,psnr_db,train_objective,wall_ms\n";
  for (const auto& r : rep.rows) {
    out << r.method << ',' << r.n << ',' << r.decoder << ',' << fixed(r.l2_error, 4) << ',' << fixed(r.psnr_db, 3)
        << ',' << (r.train_objective ? fixed(*r.train_objective, 6) : "NA") << ','
        << (r.wall_ms ? fixed(*r.wall_ms, 1) : "NA") << '\n';
  }
  return out.str();
}

std::string report_table(const ExperimentReport& rep) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %6s %-8s %10s %10s %12s\n", "method", "n", "decoder", "l2_error", "psnr_db",
                "train_obj");
  out << buf;
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%-14s %6lld %-8s %10s %10s %12s", r.method.c_str(), static_cast<long long>(r.n),
                  r.decoder.c_str(), fixed(r.l2_error, 4).c_str(), fixed(r.psnr_db, 3).c_str(),
                  r.train_objective ? fixed(*r.train_objective, 6).c_str() : "NA");
    out << buf;
    if (r.wall_ms) out << "  " << fixed(*r.wall_ms, 1) << " ms";
    if (!r.error.empty()) out << "  error: " << r.error;
    out << '\n';
  }
  return out.str();
}

void persist(const ExperimentConfig& cfg, const ExperimentReport& rep) {
  if (!cfg.report_path.empty()) {
    const auto parent = fs::path(cfg.report_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream out(cfg.report_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + cfg.report_path);
    out << report_csv(rep);
  }
  if (!cfg.mask_dir.empty()) {
    fs::create_directories(cfg.mask_dir);
    for (const auto& [name, mask] : rep.masks) save_index_set((fs::path(cfg.mask_dir) / (name + ".json")).string(), mask);
  }
}

}  // namespace subsample
