#include "subsample/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace subsample {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double g_unchecked(double q, double a) { return 1.0 - std::pow(1.0 - a, q); }

}  // namespace

double g_eval(double q, double a) {
  if (!(q >= 1.0)) throw Error(ErrorCode::DomainError, "q must be >= 1");
  if (!(a >= -1e-12 && a <= 1.0 + 1e-12)) throw Error(ErrorCode::DomainError, "g argument outside [0, 1]");
  a = clamp01(a);
  if (q == 1.0) return a;
  return g_unchecked(q, a);
}

Criterion canonical(const Criterion& c) {
  if (const auto* g = std::get_if<Gen>(&c)) {
    if (!(g->q >= 1.0)) throw Error(ErrorCode::DomainError, "q must be >= 1");
    if (g->q == 1.0) return Avg{};
  }
  return c;
}

Eigen::VectorXd mean_energy(const EnergyTable& et) {
  const Index m = et.rows(), p = et.cols();
  Eigen::VectorXd means(p);
  for (Index i = 0; i < p; ++i) {
    CompensatedSum s;
    for (Index j = 0; j < m; ++j) s.add(et.e(j, i));
    means(i) = s.value() / static_cast<double>(m);
  }
  return means;
}

Eigen::VectorXd captured_energy(const EnergyTable& et, const IndexSet& omega) {
  if (omega.dim() != et.cols()) throw Error(ErrorCode::DimensionMismatch, "index set dimension != table width");
  Eigen::VectorXd cap(et.rows());
  for (Index j = 0; j < et.rows(); ++j) {
    CompensatedSum s;
    for (Index i : omega.indices()) s.add(et.e(j, i));
    cap(j) = clamp01(s.value());
  }
  return cap;
}

double evaluate_captured(const Criterion& c, const Eigen::Ref<const Eigen::VectorXd>& captured) {
  const auto cc = canonical(c);
  if (std::holds_alternative<Min>(cc)) return captured.minCoeff();
  CompensatedSum s;
  if (std::holds_alternative<Avg>(cc)) {
    for (Index j = 0; j < captured.size(); ++j) s.add(captured(j));
  } else {
    const double q = std::get<Gen>(cc).q;
    for (Index j = 0; j < captured.size(); ++j) s.add(g_unchecked(q, clamp01(captured(j))));
  }
  return s.value() / static_cast<double>(captured.size());
}

double evaluate(const Criterion& c, const EnergyTable& et, const IndexSet& omega) {
  return evaluate_captured(c, captured_energy(et, omega));
}

CriterionState::CriterionState(const EnergyTable& et)
    : sums_(static_cast<std::size_t>(et.rows())), in_set_(static_cast<std::size_t>(et.cols()), 0) {}

Eigen::VectorXd CriterionState::captured() const {
  Eigen::VectorXd cap(static_cast<Index>(sums_.size()));
  for (std::size_t j = 0; j < sums_.size(); ++j) cap(static_cast<Index>(j)) = clamp01(sums_[j].value());
  return cap;
}

double CriterionState::captured(Index j) const { return clamp01(sums_[static_cast<std::size_t>(j)].value()); }

void CriterionState::add(const EnergyTable& et, Index i) {
  if (i < 0 || i >= static_cast<Index>(in_set_.size())) throw Error(ErrorCode::DimensionMismatch, "index outside [0, p)");
  if (in_set_[static_cast<std::size_t>(i)]) throw Error(ErrorCode::AlreadyChosen, "index " + std::to_string(i));
  in_set_[static_cast<std::size_t>(i)] = 1;
  chosen_.push_back(i);
  for (std::size_t j = 0; j < sums_.size(); ++j) sums_[j].add(et.e(static_cast<Index>(j), i));
}

double marginal_gain(const Criterion& c, const CriterionState& st, const EnergyTable& et, Index i,
                     const Eigen::VectorXd* column_means) {
  if (st.is_chosen(i)) throw Error(ErrorCode::AlreadyChosen, "index " + std::to_string(i));
  const auto cc = canonical(c);
  const Index m = et.rows();
  if (std::holds_alternative<Avg>(cc)) {
    if (column_means) return (*column_means)(i);
    CompensatedSum s;
    for (Index j = 0; j < m; ++j) s.add(et.e(j, i));
    return s.value() / static_cast<double>(m);
  }
  if (std::holds_alternative<Min>(cc)) {
    double before = 1.0, after = 1.0;
    for (Index j = 0; j < m; ++j) {
      const double cap = st.captured(j);
      before = std::min(before, cap);
      after = std::min(after, clamp01(cap + et.e(j, i)));
    }
    return after - before;
  }
  const double q = std::get<Gen>(cc).q;
  CompensatedSum s;
  for (Index j = 0; j < m; ++j) {
    const double cap = st.captured(j);
    // g(a+e) - g(a) = (1-a)^q - (1-a-e)^q
    s.add(std::pow(1.0 - cap, q) - std::pow(1.0 - clamp01(cap + et.e(j, i)), q));
  }
  return s.value() / static_cast<double>(m);
}

bool diminishing_returns_check(double q, const EnergyTable& et, int trials, std::uint64_t seed) {
  const Criterion crit = Gen{q};
  const Index p = et.cols();
  if (p < 2) return true;
  std::mt19937_64 rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(p));
  for (int t = 0; t < trials; ++t) {
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    // perm = [omega1 | omega2 \ omega1 | i | rest]
    std::uniform_int_distribution<Index> size2(0, p - 1);
    const Index n2 = size2(rng);
    std::uniform_int_distribution<Index> size1(0, n2);
    const Index n1 = size1(rng);
    const Index i = perm[static_cast<std::size_t>(n2)];
    std::vector<Index> o1(perm.begin(), perm.begin() + n1), o2(perm.begin(), perm.begin() + n2);
    auto with = [&](std::vector<Index> v) {
      v.push_back(i);
      return IndexSet(std::move(v), p);
    };
    const double gain1 = evaluate(crit, et, with(o1)) - evaluate(crit, et, IndexSet(o1, p));
    const double gain2 = evaluate(crit, et, with(o2)) - evaluate(crit, et, IndexSet(o2, p));
    if (gain1 < gain2 - 1e-10) return false;
  }
  return true;
}

}  // namespace subsample
