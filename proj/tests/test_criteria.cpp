#include "subsample/criteria.hpp"

#include "subsample/decoders.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <numeric>

using namespace subsample;

namespace {

EnergyTable two_rows() {
  Eigen::MatrixXd e(2, 4);
  e << 0.7, 0.3, 0, 0, 0, 0.3, 0.7, 0;
  return energy_table_from_matrix(e);
}

EnergyTable one_row(std::initializer_list<double> v) {
  Eigen::MatrixXd e(1, static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) e(0, i++) = x;
  return energy_table_from_matrix(e);
}

// f_gen from its definition, for the exhaustive checks
double gen_value(double q, const Eigen::MatrixXd& e, const std::vector<Index>& s) {
  const Eigen::VectorXd c = testutil::captured(e, s);
  double acc = 0.0;
  for (Index j = 0; j < c.size(); ++j) acc += 1.0 - std::pow(1.0 - std::min(1.0, c(j)), q);
  return acc / static_cast<double>(c.size());
}

}  // namespace

TEST_CASE("g_eval") {
  CHECK(g_eval(2, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(g_eval(1, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(g_eval(2, 0) == 0.0);
  CHECK(g_eval(2, 1) == 1.0);
  CHECK_NOTHROW(g_eval(2, 1 + 1e-13));
  CHECK_THROWS_AS(g_eval(2, 1.1), Error);
  CHECK_THROWS_AS(g_eval(2, -0.01), Error);
  CHECK_THROWS_AS(g_eval(0.5, 0.5), Error);
  for (double a = 0.0; a < 0.95; a += 0.05) {
    CHECK(g_eval(3, a + 0.05) > g_eval(3, a));
    // concavity: increments shrink
    CHECK(g_eval(3, a + 0.05) - g_eval(3, a) >= g_eval(3, std::min(1.0, a + 0.1)) - g_eval(3, a + 0.05) - 1e-15);
  }
}

TEST_CASE("evaluate on the two-row table") {
  const auto et = two_rows();
  CHECK(evaluate(Min{}, et, IndexSet({0, 2}, 4)) == doctest::Approx(0.7));
  CHECK(evaluate(Avg{}, et, IndexSet({0, 1}, 4)) == doctest::Approx(0.65));
  // oracle: every 2-subset, Min; {0,2} is the unique optimum
  double best = -1;
  std::vector<Index> arg;
  testutil::for_each_subset(4, 2, [&](const std::vector<Index>& s) {
    const double v = testutil::captured(et.e, s).minCoeff();
    if (v > best + 1e-15) {
      best = v;
      arg = s;
    }
  });
  CHECK(arg == std::vector<Index>{0, 2});
  CHECK(best == doctest::Approx(0.7));
}

TEST_CASE("full set captures everything for every criterion") {
  std::mt19937_64 rng(1);
  const auto et = testutil::random_table(rng, 5, 9);
  std::vector<Index> all(9);
  std::iota(all.begin(), all.end(), 0);
  for (const Criterion& c : {Criterion{Avg{}}, Criterion{Gen{2}}, Criterion{Gen{4.5}}, Criterion{Min{}}})
    CHECK(std::abs(evaluate(c, et, IndexSet(all, 9)) - 1.0) < 1e-8);
}

TEST_CASE("marginal gains") {
  std::mt19937_64 rng(2);
  const auto et = testutil::random_table(rng, 4, 6);
  CriterionState st(et);
  const Eigen::VectorXd mean = et.e.colwise().mean();
  for (Index i = 0; i < 6; ++i) CHECK(std::abs(marginal_gain(Avg{}, st, et, i) - mean(i)) < 1e-15);

  const auto single = one_row({0.6, 0.3, 0.1, 0.0});
  CriterionState s1(single);
  s1.add(single, 0);
  CHECK(marginal_gain(Gen{2}, s1, single, 1) == doctest::Approx(0.15).epsilon(1e-12));

  const auto tr = two_rows();
  CriterionState s2(tr);
  s2.add(tr, 0);
  CHECK(marginal_gain(Min{}, s2, tr, 2) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(marginal_gain(Min{}, s2, tr, 0), Error);
  CHECK_THROWS_AS(s2.add(tr, 0), Error);
}

TEST_CASE("marginal gain equals the difference of evaluations") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto et = testutil::random_table(rng, testutil::pick(rng, 1, 6), 10);
    const auto base = testutil::random_subset(rng, 10, testutil::pick(rng, 0, 6));
    CriterionState st(et);
    for (Index i : base) st.add(et, i);
    const IndexSet omega(base, 10);
    for (Index i = 0; i < 10; ++i) {
      if (omega.contains(i)) continue;
      auto plus = base;
      plus.push_back(i);
      const IndexSet bigger(plus, 10);
      for (const Criterion& c : {Criterion{Avg{}}, Criterion{Gen{2}}, Criterion{Gen{3.5}}, Criterion{Min{}}})
        CHECK(std::abs(marginal_gain(c, st, et, i) - (evaluate(c, et, bigger) - evaluate(c, et, omega))) < 1e-12);
    }
    CHECK((st.captured() - captured_energy(et, omega)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("monotonicity and modularity") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto et = testutil::random_table(rng, 3, 8);
    const auto big = testutil::random_subset(rng, 8, 5);
    std::vector<Index> small(big.begin(), big.begin() + 3);
    for (const Criterion& c : {Criterion{Avg{}}, Criterion{Gen{2}}, Criterion{Min{}}})
      CHECK(evaluate(c, et, IndexSet(small, 8)) <= evaluate(c, et, IndexSet(big, 8)) + 1e-12);
    const Eigen::VectorXd mean = et.e.colwise().mean();
    double sum = 0;
    for (Index i : big) sum += mean(i);
    CHECK(std::abs(evaluate(Avg{}, et, IndexSet(big, 8)) - sum) < 1e-12);
    CHECK(std::abs(evaluate(Gen{1}, et, IndexSet(big, 8)) - evaluate(Avg{}, et, IndexSet(big, 8))) < 1e-14);
  }
  CHECK(std::holds_alternative<Avg>(canonical(Gen{1})));
  CHECK(std::holds_alternative<Gen>(canonical(Gen{2})));
}

TEST_CASE("diminishing returns") {
  std::mt19937_64 rng(5);
  const auto et = testutil::random_table(rng, 4, 16);
  CHECK(diminishing_returns_check(2, et, 1000, 1));
  CHECK(diminishing_returns_check(1, et, 1000, 2));
  CHECK(diminishing_returns_check(3, et, 1000, 3));

  // q = 1 is modular: the inequality holds with equality
  const auto sm = testutil::random_table(rng, 3, 8);
  const Eigen::VectorXd mean = sm.e.colwise().mean();
  for (int t = 0; t < 200; ++t) {
    const auto s2 = testutil::random_subset(rng, 8, 4);
    const std::vector<Index> s1(s2.begin(), s2.begin() + 2);
    Index i = 0;
    while (std::find(s2.begin(), s2.end(), i) != s2.end()) ++i;
    auto a = s1, b = s2;
    a.push_back(i);
    b.push_back(i);
    const double g1 = gen_value(1, sm.e, a) - gen_value(1, sm.e, s1);
    const double g2 = gen_value(1, sm.e, b) - gen_value(1, sm.e, s2);
    CHECK(std::abs(g1 - g2) < 1e-12);
  }
}

TEST_CASE("exhaustive submodularity of the q = 3 criterion for p = 8") {
  std::mt19937_64 rng(6);
  const auto et = testutil::random_table(rng, 4, 8);
  bool ok = true;
  for (unsigned b = 0; b < 256; ++b) {
    for (unsigned a = b;; a = (a - 1) & b) {  // every a within b
      std::vector<Index> sa, sb;
      for (Index k = 0; k < 8; ++k) {
        if (a >> k & 1) sa.push_back(k);
        if (b >> k & 1) sb.push_back(k);
      }
      for (Index i = 0; i < 8; ++i) {
        if (b >> i & 1) continue;
        auto ai = sa, bi = sb;
        ai.push_back(i);
        bi.push_back(i);
        const double lhs = gen_value(3, et.e, ai) - gen_value(3, et.e, sa);
        const double rhs = gen_value(3, et.e, bi) - gen_value(3, et.e, sb);
        ok = ok && lhs >= rhs - 1e-10;
      }
      if (a == 0) break;
    }
  }
  CHECK(ok);
}

TEST_CASE("one minus captured energy is the linear-decoder error") {
  std::mt19937_64 rng(7);
  for (const auto kind : {TransformKind::Hadamard, TransformKind::DCT2, TransformKind::Daub4}) {
    const auto spec = TransformSpec::make_1d(kind, 32);
    const auto ts = testutil::random_training_set(rng, 32, 5);
    const auto et = energy_table(spec, ts);
    const IndexSet omega(testutil::random_subset(rng, 32, 11), 32);
    const Eigen::VectorXd cap = captured_energy(et, omega);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const Eigen::VectorXd xhat = linear_decode(measure(spec, omega, ts[j]));
      CHECK(std::abs((ts[j].values() - xhat).squaredNorm() - (1.0 - cap(static_cast<Index>(j)))) < 1e-10);
    }
  }
}

TEST_CASE("compensated sum beats naive summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int k = 0; k < 10; ++k) s.add(1e-16);
  s.add(-1.0);
  CHECK(std::abs(s.value() - 1e-15) < 1e-30);
}
