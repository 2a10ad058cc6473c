#include "subsample/baselines.hpp"

#include "subsample/decoders.hpp"
#include "subsample/selectors.hpp"
#include "subsample/synth.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <set>

using namespace subsample;

TEST_CASE("spectral distance centers") {
  const auto d8 = spectral_distance(TransformSpec::make_1d(TransformKind::DCT2, 8));
  CHECK(d8(0) == 0.0);
  CHECK(d8(7) == 1.0);
  CHECK(d8(3) == doctest::Approx(3.0 / 7.0));
  const auto f8 = spectral_distance(TransformSpec::make_1d(TransformKind::DFT, 8));
  CHECK(f8(0) == 0.0);
  CHECK(f8(4) == 1.0);
  CHECK(f8(1) == f8(7));
  const auto f2 = spectral_distance(TransformSpec::make_2d(TransformKind::DFT, 8, 8));
  CHECK(f2(0) == 0.0);
  CHECK(f2(4 * 8 + 4) == doctest::Approx(1.0));
}

TEST_CASE("Lustig density") {
  const auto h8 = TransformSpec::make_1d(TransformKind::Hadamard, 8);
  const auto flat = lustig_density(h8, {0.0, 0.0});
  CHECK(flat.w == Eigen::VectorXd::Ones(8));
  CHECK(flat.fully_sampled.empty());

  const auto half = lustig_density(h8, {0.5, 3.0});
  CHECK(half.fully_sampled.size() >= 4);
  const auto t = spectral_distance(h8);
  for (Index i : half.fully_sampled) CHECK(t(i) <= 0.5);

  const auto spec = TransformSpec::make_2d(TransformKind::DCT2, 16, 16);
  const auto dm = lustig_density(spec, {0.1, 2.0});
  const double maxd = std::hypot(15.0, 15.0);
  for (Index r = 0; r < 16; ++r) {
    for (Index c = 0; c < 16; ++c) {
      const double tt = std::hypot(static_cast<double>(r), static_cast<double>(c)) / maxd;
      const Index i = r * 16 + c;
      const bool full = std::find(dm.fully_sampled.begin(), dm.fully_sampled.end(), i) != dm.fully_sampled.end();
      CHECK(full == (tt <= 0.1));
      if (!full) CHECK(dm.w(i) == doctest::Approx((1 - tt) * (1 - tt)).epsilon(1e-14));
    }
  }
  // weights decrease with radius along the diagonal
  for (Index k = 2; k < 16; ++k) CHECK(dm.w(k * 17) < dm.w((k - 1) * 17) + 1e-15);
  CHECK_THROWS_AS(lustig_density(h8, {0.6, 1.0}), Error);
  CHECK_THROWS_AS(lustig_density(h8, {0.1, -1.0}), Error);
}

TEST_CASE("Roman levels hit the budget exactly") {
  const auto spec = TransformSpec::make_1d(TransformKind::DCT2, 64);
  for (Index n : {8, 16, 32}) {
    const auto lv = roman_levels(spec, {0.0, 8, 4.0, 1.0}, n);
    Index total = static_cast<Index>(lv.fully_sampled.size());
    for (std::size_t k = 0; k < lv.quotas.size(); ++k) {
      CHECK(lv.quotas[k] >= 0);
      CHECK(lv.quotas[k] <= static_cast<Index>(lv.members[k].size()));
      total += lv.quotas[k];
    }
    CHECK(total == n);
    CHECK(draw_mask(lv, n, 3).size() == static_cast<std::size_t>(n));
  }
  // full sampling
  const auto full = roman_levels(spec, {0.1, 10, 2.0, 1.0}, 64);
  for (std::size_t k = 0; k < full.quotas.size(); ++k) CHECK(full.quotas[k] == static_cast<Index>(full.members[k].size()));

  // a -> 0: quotas proportional to level sizes
  const auto tiny = roman_levels(TransformSpec::make_1d(TransformKind::DCT2, 200), {0.0, 4, 1e-9, 1.0}, 100);
  for (Index q : tiny.quotas) CHECK(q == 25);

  // a sweep over (a, r, n): totals exact, and the continuous total is monotone in b
  for (double a : {0.5, 2.0, 8.0, 20.0})
    for (double r : {0.0, 0.05, 0.2})
      for (Index n : {20, 33, 50}) {
        const auto lv = roman_levels(spec, {r, 16, a, 1.0}, n);
        Index total = static_cast<Index>(lv.fully_sampled.size());
        for (auto q : lv.quotas) total += q;
        CHECK(total == n);
      }
  CHECK_THROWS_AS(roman_levels(spec, {0.5, 8, 4.0, 1.0}, 4), Error);
}

TEST_CASE("draw_mask") {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(8);
  w.head(3).setOnes();
  for (std::uint64_t seed : {1u, 2u, 99u}) CHECK(draw_mask(DensityMap{w, {}}, 3, seed).indices() == std::vector<Index>{0, 1, 2});
  CHECK(draw_mask(DensityMap{Eigen::VectorXd::Ones(8), {0}}, 1, 5).indices() == std::vector<Index>{0});
  const DensityMap dm{Eigen::VectorXd::LinSpaced(16, 1.0, 0.1), {}};
  CHECK(draw_mask(dm, 6, 42) == draw_mask(dm, 6, 42));
  CHECK_THROWS_AS(draw_mask(DensityMap{w, {}}, 4, 1), Error);
  CHECK_THROWS_AS(draw_mask(DensityMap{w, {0, 1}}, 1, 1), Error);

  // every seed yields exactly n indices
  for (std::uint64_t seed = 0; seed < 50; ++seed) CHECK(uniform_random_mask(32, 11, seed).size() == 11);

  // heavier weights are drawn more often
  std::vector<int> hits(16, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const IndexSet m = draw_mask(dm, 4, seed);
    for (Index i : m.indices()) ++hits[static_cast<std::size_t>(i)];
  }
  CHECK(hits[0] > hits[15] * 2);
}

TEST_CASE("tune_baseline") {
  std::mt19937_64 rng(1);
  const auto spec = TransformSpec::make_1d(TransformKind::DCT2, 64);
  const auto raw = synth_powerlaw_dct(64, 80, 7);
  std::vector<Signal> s;
  for (const auto& r : raw.rows) s.push_back(normalize(r));
  const TrainingSet ts(std::move(s));
  const auto et = energy_table(spec, ts);

  BaselineGrid one;
  one.r = {0.1};
  one.d = {2.0};
  const auto single = tune_baseline(BaselineFamily::Lustig, one, et, spec, 16, 1, 9);
  CHECK(single.mask.indices() == draw_mask(lustig_density(spec, {0.1, 2.0}), 16, single.draw_seed).indices());
  CHECK(single.mask.meta().criterion.find("lustig(r=0.1,d=2)") == 0);

  BaselineGrid uniform_only, shaped;
  uniform_only.r = shaped.r = {0.0};
  uniform_only.d = {0.0};
  shaped.d = {1.0, 2.0, 4.0};
  const auto u = tune_baseline(BaselineFamily::Lustig, uniform_only, et, spec, 16, 10, 3);
  const auto l = tune_baseline(BaselineFamily::Lustig, shaped, et, spec, 16, 10, 3);
  CHECK(evaluate(Avg{}, et, l.mask) > evaluate(Avg{}, et, u.mask));

  const auto learned = select_avg_sorted(et, 16);
  for (const auto fam : {BaselineFamily::Lustig, BaselineFamily::Roman, BaselineFamily::Uniform}) {
    BaselineGrid g = BaselineGrid::defaults();
    g.r = {0.0, 0.05, 0.1};
    g.d = {1.0, 3.0};
    g.a = {1.0, 5.0};
    const auto tb = tune_baseline(fam, g, et, spec, 16, 4, 11);
    CHECK(tb.mask.size() == 16);
    CHECK(learned.objective >= evaluate(Avg{}, et, tb.mask) - 1e-12);
    const auto again = tune_baseline(fam, g, et, spec, 16, 4, 11);
    CHECK(again.mask == tb.mask);
  }
  CHECK_THROWS_AS(tune_baseline(BaselineFamily::Lustig, one, et, spec, 16, 0, 1), Error);
  BaselineGrid big_r;
  big_r.r = {0.5};
  big_r.d = {1.0};
  CHECK_THROWS_AS(tune_baseline(BaselineFamily::Lustig, big_r, et, spec, 4, 2, 1), Error);
}

TEST_CASE("adaptive n-term approximation") {
  std::mt19937_64 rng(2);
  const auto spec = TransformSpec::make_1d(TransformKind::DCT2, 32);
  Coefficients c = Coefficients::Zero(32);
  c(5) = 1.0;
  const Signal one = normalize(adjoint(spec, c));
  CHECK((adaptive_nterm(spec, one, 1) - one.values()).norm() < 1e-12);

  const Signal x = normalize(testutil::random_unit(rng, 32));
  CHECK((adaptive_nterm(spec, x, 32) - x.values()).norm() < 1e-12);

  std::vector<double> mag(32);
  const Coefficients cx = forward(spec, x);
  for (Index i = 0; i < 32; ++i) mag[static_cast<std::size_t>(i)] = std::norm(cx(i));
  std::sort(mag.begin(), mag.end());
  double tail = 0;
  for (int k = 0; k < 16; ++k) tail += mag[static_cast<std::size_t>(k)];
  CHECK(std::abs((adaptive_nterm(spec, x, 16) - x.values()).squaredNorm() - tail) < 1e-10);
  CHECK_THROWS_AS(adaptive_nterm(spec, x, 33), Error);
}

TEST_CASE("adaptive error lower-bounds every fixed mask") {
  std::mt19937_64 rng(3);
  for (const auto kind : {TransformKind::Hadamard, TransformKind::DCT2, TransformKind::DFT, TransformKind::Daub4}) {
    const auto spec = TransformSpec::make_1d(kind, 16);
    for (int t = 0; t < 20; ++t) {
      const Signal x = normalize(testutil::random_unit(rng, 16));
      const Index n = testutil::pick(rng, 1, 16);
      // compare full (complex) reconstructions: real part error plus discarded imaginary energy
      double im = 0.0;
      const double best = (adaptive_nterm(spec, x, n, &im) - x.values()).squaredNorm() + im * im;
      for (int k = 0; k < 10; ++k) {
        const IndexSet omega(testutil::random_subset(rng, 16, n), 16);
        double im2 = 0.0;
        const double err = (linear_decode(measure(spec, omega, x), &im2) - x.values()).squaredNorm() + im2 * im2;
        CHECK(best <= err + 1e-12);
      }
    }
  }
}
