#include "subsample/baselines.hpp"
#include "subsample/bounds.hpp"
#include "subsample/decoders.hpp"
#include "subsample/experiment.hpp"
#include "subsample/synth.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace subsample;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Index> complete_binary(Index depth) {
  std::vector<Index> parent(static_cast<std::size_t>((Index{1} << depth) - 1), -1);
  for (std::size_t v = 1; v < parent.size(); ++v) parent[v] = static_cast<Index>((v - 1) / 2);
  return parent;
}

TransformSpec random_spec(std::mt19937_64& rng, TransformKind kind, Index max_log2) {
  return TransformSpec::make_1d(kind, Index{1} << testutil::pick(rng, 2, max_log2));
}

Outcome transform_unitarity() {
  std::mt19937_64 rng(101);
  double worst_norm = 0, worst_inv = 0, worst_dense = 0;
  for (auto kind : {TransformKind::Hadamard, TransformKind::DCT2, TransformKind::DFT, TransformKind::Daub4}) {
    for (int t = 0; t < 1000; ++t) {
      const auto spec = random_spec(rng, kind, 9);
      const Eigen::VectorXd x = testutil::random_unit(rng, spec.p);
      const Coefficients c = forward(spec, x);
      worst_norm = std::max(worst_norm, std::abs(c.norm() - 1.0));
      worst_inv = std::max(worst_inv, (adjoint_complex(spec, c) - x.cast<std::complex<double>>()).cwiseAbs().maxCoeff());
      if (spec.p <= 64)
        worst_dense = std::max(worst_dense, (testutil::dense_matrix(spec) * x - c).cwiseAbs().maxCoeff());
    }
  }
  return {worst_norm < 1e-10 && worst_inv < 1e-10 && worst_dense < 1e-9,
          fmt("max |norm-1| %.2e, max inverse residual %.2e, max dense deviation %.2e", worst_norm, worst_inv,
              worst_dense)};
}

Outcome error_identity() {
  std::mt19937_64 rng(102);
  const TransformKind kinds[] = {TransformKind::Hadamard, TransformKind::DCT2, TransformKind::DFT, TransformKind::Daub4,
                                 TransformKind::Identity};
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto spec = random_spec(rng, kinds[t % 5], 8);
    const auto x = normalize(testutil::random_unit(rng, spec.p));
    const IndexSet omega(testutil::random_subset(rng, spec.p, testutil::pick(rng, 1, spec.p)), spec.p);
    double imag = 0;
    const Eigen::VectorXd xhat = linear_decode(measure(spec, omega, x), &imag);
    const double err = (x.values() - xhat).squaredNorm() + imag * imag;
    const double cap = captured_energy(energy_table(spec, TrainingSet({x})), omega)(0);
    worst = std::max(worst, std::abs(err - (1.0 - cap)));
  }
  return {worst < 1e-10, fmt("max |error^2 - (1 - captured)| %.2e", worst)};
}

Outcome modular_exactness() {
  std::mt19937_64 rng(103);
  int sorted_ok = 0, matroid_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const Index p = testutil::pick(rng, 2, 12);
    const auto et = testutil::random_table(rng, testutil::pick(rng, 1, 8), p);
    const Cardinality cs{testutil::pick(rng, 1, p)};
    sorted_ok += select_avg_sorted(et, cs.n).omega.indices() == brute_force_select(Avg{}, et, cs).omega.indices();
  }
  for (int t = 0; t < 100; ++t) {
    const Index p = testutil::pick(rng, 3, 12);
    const auto et = testutil::random_table(rng, testutil::pick(rng, 1, 8), p);
    const Index groups = testutil::pick(rng, 1, std::min<Index>(3, p));
    std::vector<Index> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    PartitionMatroid pm;
    pm.groups.resize(static_cast<std::size_t>(groups));
    for (Index i = 0; i < p; ++i) pm.groups[static_cast<std::size_t>(i < groups ? i : testutil::pick(rng, 0, groups - 1))].push_back(perm[static_cast<std::size_t>(i)]);
    for (auto& g : pm.groups) {
      std::sort(g.begin(), g.end());
      pm.quotas.push_back(testutil::pick(rng, 0, static_cast<Index>(g.size())));
    }
    if (pm.total() == 0) pm.quotas[0] = 1;
    matroid_ok += select_modular_matroid_greedy(et, pm).omega.indices() == brute_force_select(Avg{}, et, pm).omega.indices();
  }
  return {sorted_ok == 100 && matroid_ok == 100,
          fmt("sorting %d/100, matroid greedy %d/100 identical to brute force", sorted_ok, matroid_ok)};
}

Outcome submodular_ratio() {
  std::mt19937_64 rng(104);
  const double bound = 1.0 - std::exp(-1.0);
  int guaranteed = 0, near_opt = 0;
  double worst = 1.0;
  for (int t = 0; t < 200; ++t) {
    const Index p = testutil::pick(rng, 2, 12);
    const auto et = testutil::random_table(rng, testutil::pick(rng, 1, 8), p);
    const double q = 1.0 + 3.0 * testutil::unif(rng);
    const Cardinality cs{testutil::pick(rng, 1, p)};
    const double got = select_gen_greedy(et, q, cs).objective;
    const double opt = brute_force_select(Gen{q}, et, cs).objective;
    const double ratio = opt > 0 ? got / opt : 1.0;
    worst = std::min(worst, ratio);
    guaranteed += got >= bound * opt - 1e-12;
    near_opt += ratio >= 0.95;
  }
  return {guaranteed == 200 && near_opt >= 180,
          fmt(">= (1-1/e) OPT on %d/200, ratio >= 0.95 on %d/200, worst ratio %.4f", guaranteed, near_opt, worst)};
}

Outcome saturate_bicriteria() {
  std::mt19937_64 rng(105);
  constexpr double tol = 1e-6;  // bisection stopping gap
  int reach = 0, size_ok = 0, exact_size_ok = 0;
  double worst_gap = 0;
  for (int t = 0; t < 100; ++t) {
    const Index p = testutil::pick(rng, 2, 12);
    const Index m = testutil::pick(rng, 1, 5);
    const auto et = testutil::random_table(rng, m, p);
    const Index n = testutil::pick(rng, 1, std::max<Index>(1, p / 2));
    const double opt = brute_force_select(Min{}, et, Cardinality{n}).objective;
    const double alpha = 1.0 + std::log(static_cast<double>(m));
    const auto inflated = select_min_saturate(et, n, SaturateParams{alpha, tol}).omega;
    const double got = evaluate(Min{}, et, inflated);
    worst_gap = std::max(worst_gap, opt - got);
    reach += got >= opt - tol;
    size_ok += static_cast<Index>(inflated.size()) <= static_cast<Index>(std::floor(alpha * static_cast<double>(n)));
    exact_size_ok += static_cast<Index>(select_min_saturate(et, n, SaturateParams{1.0, tol}).omega.size()) <= n;
  }
  return {reach == 100 && size_ok == 100 && exact_size_ok == 100,
          fmt("f_min >= OPT - %.0e on %d/100 (worst shortfall %.2e), size <= floor(alpha n) %d/100, alpha=1 size <= n %d/100",
              tol, reach, worst_gap, size_ok, exact_size_ok)};
}

Outcome tree_dp() {
  std::mt19937_64 rng(106);
  int agree = 0;
  for (int t = 0; t < 100; ++t) {
    const Index p = testutil::pick(rng, 1, 20);
    std::vector<Index> parent(static_cast<std::size_t>(p), -1);
    for (Index v = 1; v < p; ++v) parent[static_cast<std::size_t>(v)] = testutil::pick(rng, 0, v - 1);
    const auto et = testutil::random_table(rng, testutil::pick(rng, 1, 6), p);
    const RootedConnectedTree cs{parent, 0, testutil::pick(rng, 1, std::min<Index>(8, p))};
    const auto dp = select_avg_tree_dp(et, cs);
    const auto bf = brute_force_select(Avg{}, et, cs);
    agree += dp.omega.indices() == bf.omega.indices() && std::abs(dp.objective - bf.objective) < 1e-12;
  }
  const auto parent = complete_binary(6);
  std::string counts;
  bool catalan = true;
  const std::uint64_t expect[] = {1, 2, 5, 14, 42, 132};
  for (Index n = 1; n <= 6; ++n) {
    std::uint64_t k = 0;
    for_each_feasible(RootedConnectedTree{parent, 0, n}, 63, [&](const std::vector<Index>&) { ++k; });
    catalan = catalan && k == expect[n - 1];
    counts += (n > 1 ? "," : "") + std::to_string(k);
  }
  return {agree == 100 && catalan, fmt("DP equals brute force on %d/100 trees, counts %s", agree, counts.c_str())};
}

Outcome bound_soundness() {
  std::mt19937_64 rng(107);
  int checked = 0, held = 0, informative = 0;
  const TransformKind kinds[] = {TransformKind::Hadamard, TransformKind::DCT2, TransformKind::DFT, TransformKind::Daub4};
  for (int t = 0; t < 200; ++t) {
    const auto spec = TransformSpec::make_1d(kinds[t % 4], 32);
    const auto train = synth_powerlaw_dct(32, testutil::pick(rng, 2, 8), rng());
    std::vector<Signal> sigs;
    for (const auto& r : train.rows) sigs.push_back(normalize(r));
    const TrainingSet ts(std::move(sigs));
    const auto et = energy_table(spec, ts);
    const double q = 1.0 + 3.0 * testutil::unif(rng);
    const Index n = testutil::pick(rng, 4, 28);
    const IndexSet omega = t % 2 ? select_gen_greedy(et, q, Cardinality{n}).omega : select_min_saturate(et, n).omega;
    const auto& anchor = ts[static_cast<std::size_t>(testutil::pick(rng, 0, static_cast<Index>(ts.size()) - 1))];
    const Eigen::VectorXd x =
        normalize(anchor.values() + 0.3 * testutil::unif(rng) * testutil::random_unit(rng, 32)).values();
    const double cap = captured_energy(energy_table(spec, TrainingSet({normalize(x)})), omega)(0);
    const auto gen = det_bound_gen(et, omega, q, hypothesis_epsilon_avg(spec, ts, omega, x));
    const auto min = det_bound_min(et, omega, hypothesis_epsilon_min(spec, ts, omega, x));
    checked += 2;
    held += (cap >= gen.guaranteed_capture - 1e-10) + (cap >= min.guaranteed_capture - 1e-10);
    informative += (gen.guaranteed_capture > 0) + (min.guaranteed_capture > 0);
  }
  return {held == checked && informative > 0,
          fmt("guarantee held on %d/%d bound evaluations (%d non-vacuous)", held, checked, informative)};
}

Outcome statistical_bound() {
  const auto mix = SparseMixtureDistribution::reference();
  const auto spec = TransformSpec::make_1d(TransformKind::DCT2, 8);
  const auto r = monte_carlo_delta_n(mix, spec, 2, 200, 500, 0.05, 108);
  const double b = stat_bound(200, std::log(28.0), 0.05);
  return {r.exceedance <= 0.05 && std::abs(b - 0.2650) <= 5e-4,
          fmt("exceedance %.3f (bound %.4f, mean gap %.4f, max gap %.4f), stat_bound(200, ln 28, 0.05) = %.4f",
              r.exceedance, r.bound, r.mean_delta, r.max_delta, b)};
}

Outcome qualitative_trend() {
  const Index p = 256;
  const auto spec = TransformSpec::make_1d(TransformKind::DCT2, p);
  const auto raw = synth_powerlaw_dct(p, 700, 109);
  std::vector<Signal> tr, te;
  for (std::size_t j = 0; j < raw.rows.size(); ++j) (j < 500 ? tr : te).push_back(normalize(raw.rows[j]));
  const TrainingSet train(std::move(tr)), test(std::move(te));
  const auto et = energy_table(spec, train);
  bool ok = true;
  std::string detail;
  for (Index n : {16, 32, 64}) {
    const auto learned_mask = select_avg_sorted(et, n).omega;
    const auto learned = score_linear(spec, learned_mask, test).l2_error;
    const auto tuned = tune_baseline(BaselineFamily::Lustig, BaselineGrid::defaults(), et, spec, n, 20, 110);
    const auto lustig = score_linear(spec, tuned.mask, test).l2_error;
    const auto uniform = score_linear(spec, uniform_random_mask(p, n, derive_seed(111, static_cast<std::uint64_t>(n))), test).l2_error;
    const auto adaptive = score_adaptive(spec, n, test).l2_error;
    ok = ok && adaptive <= learned && learned < lustig && lustig <= uniform;
    detail += fmt("%sn=%lld adaptive %.6f learned %.6f lustig %.6f (r=%.3f d=%.2f%s) uniform %.4f", n == 16 ? "" : "; ",
                  static_cast<long long>(n), adaptive, learned, lustig, tuned.lustig.r, tuned.lustig.d,
                  tuned.mask.indices() == learned_mask.indices() ? ", same mask as learned" : "", uniform);
  }
  return {ok, detail};
}

Outcome bp_sanity() {
  std::mt19937_64 rng(112);
  const auto spec = TransformSpec::make_1d(TransformKind::Hadamard, 64);
  BpConfig cfg;
  cfg.sparsity = TransformSpec::make_1d(TransformKind::Identity, 64);
  int recovered = 0, no_worse = 0;
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(64);
    x(testutil::pick(rng, 0, 63)) = testutil::unif(rng) < 0.5 ? -1.0 : 1.0;
    const IndexSet omega = uniform_random_mask(64, 32, rng());
    const auto msr = measure(spec, omega, x);
    const auto res = bp_decode(msr, cfg);
    const double bp_err = (res.x - x).norm();
    const double lin_err = (linear_decode(msr) - x).norm();
    worst = std::max(worst, bp_err);
    recovered += bp_err <= 1e-4;
    no_worse += bp_err <= lin_err + 1e-8;
  }
  return {recovered == 50 && no_worse == 50,
          fmt("recovered %d/50 (max error %.2e), BP <= linear on %d/50", recovered, worst, no_worse)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome eval_determinism() {
  const fs::path work = fs::temp_directory_path() / ("subsample_accept_" + std::to_string(::getpid()));
  fs::create_directories(work);
  auto cfg = nlohmann::json::parse(slurp(fs::path(SUBSAMPLE_DATA_DIR) / "example_config.json"));
  cfg["data"]["path"] = (fs::path(SUBSAMPLE_DATA_DIR) / cfg["data"]["path"].get<std::string>()).string();
  cfg.erase("mask_dir");
  std::string csv[2];
  bool ran = true;
  for (int k = 0; k < 2; ++k) {
    const auto report = work / ("report" + std::to_string(k) + ".csv");
    cfg["report_path"] = report.string();
    const auto cfg_path = work / ("config" + std::to_string(k) + ".json");
    std::ofstream(cfg_path) << cfg.dump(2);
    const std::string cmd = std::string("\"") + SUBSAMPLE_CLI + "\" eval --config \"" + cfg_path.string() + "\" > /dev/null";
    ran = ran && std::system(cmd.c_str()) == 0;
    csv[k] = slurp(report);
  }
  fs::remove_all(work);
  const bool same = ran && !csv[0].empty() && csv[0] == csv[1];
  return {same, fmt("two eval runs %s (%zu bytes)", same ? "byte-identical" : "differ or failed", csv[0].size())};
}

struct Check {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Check checks[] = {
      {1, "transform unitarity", 10, transform_unitarity},
      {2, "linear error identity", 5, error_identity},
      {3, "modular solver exactness", 30, modular_exactness},
      {4, "greedy submodular ratio", 60, submodular_ratio},
      {5, "saturate bicriteria", 60, saturate_bicriteria},
      {6, "tree DP and Catalan counts", 30, tree_dp},
      {7, "deterministic bound soundness", 30, bound_soundness},
      {8, "statistical bound Monte Carlo", 120, statistical_bound},
      {9, "error ordering on power-law ensemble", 180, qualitative_trend},
      {10, "basis pursuit recovery", 120, bp_sanity},
      {11, "eval determinism", 60, eval_determinism},
  };
  int failed = 0;
  for (const auto& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    std::printf("%s %d: %s | %s | %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(checks)) - failed, std::size(checks));
  return failed == 0 ? 0 : 1;
}
