// Set-function objectives over an energy table: average, concave-transformed
// average (g(a) = 1 - (1-a)^q) and worst case, with incremental evaluation.
#ifndef SUBSAMPLE_CRITERIA_HPP
#define SUBSAMPLE_CRITERIA_HPP

#include "subsample/core.hpp"
#include "subsample/transforms.hpp"

#include <cmath>
#include <cstdint>

namespace subsample {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// 1 - (1-a)^q. Throws DomainError unless a in [0,1] (1e-12 slack) and q >= 1.
double g_eval(double q, double a);

/// Gen with q == 1 is the average criterion; this folds it onto Avg.
Criterion canonical(const Criterion& c);

/// mean_j e(j, i) for every column, compensated and in row order.
Eigen::VectorXd mean_energy(const EnergyTable& et);

/// captured(j) = sum_{i in omega} e(j, i), clamped to [0, 1].
Eigen::VectorXd captured_energy(const EnergyTable& et, const IndexSet& omega);

/// Criterion value of a vector of per-signal captured energies.
double evaluate_captured(const Criterion& c, const Eigen::Ref<const Eigen::VectorXd>& captured);

double evaluate(const Criterion& c, const EnergyTable& et, const IndexSet& omega);

/// Running per-signal captured energies for a growing index set.
class CriterionState {
 public:
  explicit CriterionState(const EnergyTable& et);

  /// Clamped captured energies.
  Eigen::VectorXd captured() const;
  double captured(Index j) const;
  const std::vector<Index>& chosen() const { return chosen_; }
  bool is_chosen(Index i) const { return in_set_[static_cast<std::size_t>(i)] != 0; }

  /// Throws AlreadyChosen.
  void add(const EnergyTable& et, Index i);

 private:
  std::vector<CompensatedSum> sums_;
  std::vector<Index> chosen_;
  std::vector<char> in_set_;
};

/// evaluate(omega + i) - evaluate(omega) in O(m).
/// `column_means` may be passed to avoid recomputing mean_energy for Avg.
double marginal_gain(const Criterion& c, const CriterionState& st, const EnergyTable& et, Index i,
                     const Eigen::VectorXd* column_means = nullptr);

/// Samples nested pairs omega1 within omega2 and i outside omega2, and checks the
/// diminishing-returns inequality for the q-criterion within 1e-10.
bool diminishing_returns_check(double q, const EnergyTable& et, int trials, std::uint64_t seed = 0);

}  // namespace subsample

#endif  // SUBSAMPLE_CRITERIA_HPP
