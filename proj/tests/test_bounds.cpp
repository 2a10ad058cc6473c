#include "subsample/bounds.hpp"

#include "subsample/selectors.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace subsample;

namespace {

EnergyTable rows_capturing(std::initializer_list<double> caps) {
  // two columns: column 0 holds the captured share
  Eigen::MatrixXd e(static_cast<Index>(caps.size()), 2);
  Index j = 0;
  for (double c : caps) {
    e(j, 0) = c;
    e(j, 1) = 1 - c;
    ++j;
  }
  return energy_table_from_matrix(e);
}

}  // namespace

TEST_CASE("deterministic bound, concave criterion") {
  const IndexSet first({0}, 2);
  const auto perfect = det_bound_gen(rows_capturing({1.0, 1.0}), first, 2, 0.0);
  CHECK(perfect.delta == doctest::Approx(0.0));
  CHECK(perfect.guaranteed_capture == doctest::Approx(1.0));

  const auto plug = det_bound_gen(rows_capturing({0.5}), first, 2, 0.01, 0.04);
  CHECK(plug.guaranteed_capture == doctest::Approx(0.91).epsilon(1e-12));

  const auto q1 = det_bound_gen(rows_capturing({0.95, 0.99}), first, 1, 0.0016);
  CHECK(q1.delta == doctest::Approx(0.03).epsilon(1e-12));
  const double expect = 1 - std::pow(std::sqrt(0.03) + 0.04, 2);
  CHECK(q1.guaranteed_capture == doctest::Approx(expect).epsilon(1e-12));
  CHECK(q1.guaranteed_capture == doctest::Approx(0.9547).epsilon(1e-4));

  // q = 2: mean g = mean(1 - (1 - c)^2), delta = (1 - mean g)^(1/2)
  const auto q2 = det_bound_gen(rows_capturing({0.9, 0.6}), first, 2, 0.0);
  CHECK(q2.delta == doctest::Approx(std::sqrt((0.01 + 0.16) / 2)).epsilon(1e-12));

  CHECK_THROWS_AS(det_bound_gen(rows_capturing({1.0}), first, 2, -0.1), Error);
  CHECK_THROWS_AS(det_bound_gen(rows_capturing({1.0}), first, 0.5, 0.1), Error);
  CHECK(guaranteed_capture(1.0, 1.0) == 0.0);
}

TEST_CASE("deterministic bound, worst-case criterion") {
  const IndexSet first({0}, 2);
  CHECK(det_bound_min(rows_capturing({1.0, 1.0}), first, 0.0).guaranteed_capture == doctest::Approx(1.0));
  const auto r = det_bound_min(rows_capturing({0.91, 0.99}), first, 0.01);
  CHECK(r.delta == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(r.guaranteed_capture == doctest::Approx(0.84).epsilon(1e-12));
  CHECK_THROWS_AS(det_bound_min(rows_capturing({1.0}), first, -1e-3), Error);
}

TEST_CASE("antipodal test signal") {
  std::mt19937_64 rng(1);
  const auto spec = TransformSpec::make_1d(TransformKind::DCT2, 16);
  const auto ts = testutil::random_training_set(rng, 16, 1);
  const IndexSet omega(testutil::random_subset(rng, 16, 6), 16);
  const Eigen::VectorXd x = -ts[0].values();
  const auto et = energy_table(spec, ts);
  const auto ex = energy_table(spec, TrainingSet({normalize(x)}));
  CHECK(captured_energy(ex, omega)(0) == doctest::Approx(captured_energy(et, omega)(0)).epsilon(1e-14));
  // x - x_j = -2 x_j, so the off-mask distance is four times the off-mask energy
  const double off = 1.0 - captured_energy(et, omega)(0);
  CHECK(off_mask_distances(spec, ts, omega, x)(0) == doctest::Approx(4.0 * off).epsilon(1e-12));
  CHECK((x - ts[0].values()).squaredNorm() == doctest::Approx(4.0));
}

TEST_CASE("bounds hold on constructed near-training test signals") {
  std::mt19937_64 rng(2);
  const auto spec = TransformSpec::make_1d(TransformKind::Hadamard, 32);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    const auto ts = testutil::random_training_set(rng, 32, 4);
    const auto et = energy_table(spec, ts);
    const IndexSet omega = select_gen_greedy(et, 2, Cardinality{20}).omega;
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd noise = testutil::random_unit(rng, 32) * 0.2 * testutil::unif(rng);
      const Eigen::VectorXd x = normalize(ts[static_cast<std::size_t>(k % 4)].values() + noise).values();
      const double cap = captured_energy(energy_table(spec, TrainingSet({normalize(x)})), omega)(0);
      const auto g = det_bound_gen(et, omega, 2, hypothesis_epsilon_avg(spec, ts, omega, x));
      const auto m = det_bound_min(et, omega, hypothesis_epsilon_min(spec, ts, omega, x));
      CHECK(cap >= g.guaranteed_capture - 1e-10);
      CHECK(cap >= m.guaranteed_capture - 1e-10);
      checked += m.guaranteed_capture > 0;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("log cardinality") {
  CHECK(log_constraint_cardinality(Cardinality{2}, 8).value == doctest::Approx(std::log(28.0)).epsilon(1e-12));
  CHECK(log_constraint_cardinality(PartitionMatroid{{{0, 1, 2, 3}, {4, 5, 6, 7}}, {1, 1}}, 8).value ==
        doctest::Approx(std::log(16.0)).epsilon(1e-12));
  std::vector<Index> parent(15, -1);
  for (Index v = 1; v < 15; ++v) parent[static_cast<std::size_t>(v)] = (v - 1) / 2;
  const auto tree = log_constraint_cardinality(RootedConnectedTree{parent, 0, 3}, 15);
  CHECK(tree.value == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(tree.method == "exact-dp");
  std::vector<Index> deep(63, -1);
  for (Index v = 1; v < 63; ++v) deep[static_cast<std::size_t>(v)] = (v - 1) / 2;
  const auto big = log_constraint_cardinality(RootedConnectedTree{deep, 0, 4}, 63);
  CHECK(big.method == "catalan-bound");
  CHECK(big.value == doctest::Approx(std::log(14.0)).epsilon(1e-12));
  CHECK_THROWS_AS(log_constraint_cardinality(Cardinality{9}, 8), Error);
}

TEST_CASE("statistical bound") {
  CHECK(stat_bound(200, std::log(28.0), 0.05) == doctest::Approx(0.2650).epsilon(5e-4 / 0.265));
  CHECK(stat_bound(200, std::log(28.0), 0.05) == doctest::Approx(std::sqrt(0.01 * (std::log(28.0) + std::log(40.0)))));
  CHECK(stat_bound(50, 0.0, 1.0 - 1e-12) == doctest::Approx(std::sqrt(2.0 / 50 * std::log(2.0))).epsilon(1e-9));
  CHECK(stat_bound(100, 3.0, 0.1) / stat_bound(200, 3.0, 0.1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(stat_bound(100, 3.0, 0.1) > stat_bound(101, 3.0, 0.1));
  CHECK(stat_bound(100, 3.1, 0.1) > stat_bound(100, 3.0, 0.1));
  CHECK(stat_bound(100, 3.0, 0.05) > stat_bound(100, 3.0, 0.1));
  CHECK_THROWS_AS(stat_bound(0, 1.0, 0.1), Error);
  CHECK_THROWS_AS(stat_bound(10, 1.0, 0.0), Error);
  CHECK_THROWS_AS(stat_bound(10, 1.0, 1.0), Error);
}

TEST_CASE("Monte Carlo gap") {
  std::mt19937_64 rng(3);
  const auto spec = TransformSpec::make_1d(TransformKind::DCT2, 8);
  const FixedSignalDistribution fixed(normalize(testutil::random_unit(rng, 8)));
  const auto r = monte_carlo_delta_n(fixed, spec, 2, 10, 20, 0.05, 1);
  CHECK(r.exceedance == 0.0);
  CHECK(std::abs(r.max_delta) < 1e-12);

  const auto mix = SparseMixtureDistribution::reference();
  const auto one = monte_carlo_delta_n(mix, spec, 2, 1, 50, 0.05, 2);
  CHECK(one.bound > 1.0);
  CHECK(one.exceedance == 0.0);
  CHECK(one.min_delta >= -1e-12);

  // the mixture's closed-form means match a sample average
  std::mt19937_64 g(4);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(8);
  for (int k = 0; k < 20000; ++k) acc += forward(spec, mix.sample(g)).cwiseAbs2();
  CHECK((acc / 20000 - *mix.index_means(spec)).cwiseAbs().maxCoeff() < 0.02);
  CHECK(std::abs(mix.index_means(spec)->sum() - 1.0) < 1e-12);

  const auto again = monte_carlo_delta_n(mix, spec, 2, 20, 30, 0.05, 9);
  const auto same = monte_carlo_delta_n(mix, spec, 2, 20, 30, 0.05, 9);
  CHECK(again.mean_delta == same.mean_delta);
  CHECK_THROWS_AS(monte_carlo_delta_n(mix, TransformSpec::make_1d(TransformKind::DCT2, 16), 2, 20, 30, 0.05, 9), Error);
}
