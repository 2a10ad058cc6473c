// Generalization guarantees for a learned mask.
//
// Deterministic: if the training signals satisfy the capture hypothesis with
// slack delta and a new unit-norm signal is within eps of them outside the
// mask, the new signal keeps at least 1 - (sqrt(delta) + sqrt(eps))^2 of its
// energy. The concave criterion uses averaged delta and eps; the worst case
// criterion uses the minimum capture and the nearest training signal.
//
// Statistical: with probability 1 - eta the empirical-risk mask is within
// sqrt((2/m)(log|A| + log(2/eta))) of the best mask in expected capture.
#ifndef SUBSAMPLE_BOUNDS_HPP
#define SUBSAMPLE_BOUNDS_HPP

#include "subsample/core.hpp"
#include "subsample/criteria.hpp"
#include "subsample/transforms.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>

namespace subsample {

enum class BoundKind { Gen, Min, Statistical };

const char* to_string(BoundKind k);

struct BoundReport {
  BoundKind kind = BoundKind::Gen;
  double delta = 0.0;
  double epsilon = 0.0;
  double guaranteed_capture = 0.0;
  double bound_value = 0.0;
  std::string note;
};

/// 1 - (sqrt(delta) + sqrt(eps))^2, clamped below at 0.
double guaranteed_capture(double delta, double eps);

/// delta = 1 - g^{-1}(mean_j g(captured_j)). `delta_override` switches to formula-plug mode.
BoundReport det_bound_gen(const EnergyTable& train, const IndexSet& omega, double q, double eps,
                          std::optional<double> delta_override = std::nullopt);

/// delta = 1 - min_j captured_j.
BoundReport det_bound_min(const EnergyTable& train, const IndexSet& omega, double eps,
                          std::optional<double> delta_override = std::nullopt);

/// ||P_{omega^c} Psi (x - x_j)||^2 for every training signal.
Eigen::VectorXd off_mask_distances(const TransformSpec& spec, const TrainingSet& train, const IndexSet& omega,
                                   const Eigen::Ref<const Eigen::VectorXd>& x);

/// Average of off_mask_distances (concave-criterion hypothesis).
double hypothesis_epsilon_avg(const TransformSpec& spec, const TrainingSet& train, const IndexSet& omega,
                              const Eigen::Ref<const Eigen::VectorXd>& x);

/// Minimum of off_mask_distances (worst-case hypothesis, "for some j").
double hypothesis_epsilon_min(const TransformSpec& spec, const TrainingSet& train, const IndexSet& omega,
                              const Eigen::Ref<const Eigen::VectorXd>& x);

struct LogCardinality {
  double value = 0.0;  // natural log of |A|
  std::string method;  // "exact", "exact-dp" or "catalan-bound"
};

LogCardinality log_constraint_cardinality(const ConstraintSet& cs, Index p);

/// sqrt((2/m)(log_card + ln(2/eta))).
double stat_bound(Index m, double log_card, double eta);

/// A distribution over unit-norm signals.
class SignalDistribution {
 public:
  virtual ~SignalDistribution() = default;
  virtual Index dim() const = 0;
  virtual Eigen::VectorXd sample(std::mt19937_64& rng) const = 0;
  /// E|<psi_i, x>|^2 for every i, when known in closed form.
  virtual std::optional<Eigen::VectorXd> index_means(const TransformSpec& spec) const = 0;
};

/// Always returns the same signal.
class FixedSignalDistribution : public SignalDistribution {
 public:
  explicit FixedSignalDistribution(const Signal& s) : x_(s.values()) {}
  Index dim() const override { return x_.size(); }
  Eigen::VectorXd sample(std::mt19937_64&) const override { return x_; }
  std::optional<Eigen::VectorXd> index_means(const TransformSpec& spec) const override;

 private:
  Eigen::VectorXd x_;
};

/// Mixture of sparse signals in the coefficient domain of `basis`: component k
/// is chosen with probability weights[k]; its coefficients are `amplitudes[k]`
/// on `supports[k]` with independent random signs (amplitudes unit norm).
class SparseMixtureDistribution : public SignalDistribution {
 public:
  SparseMixtureDistribution(TransformSpec basis, std::vector<double> weights,
                            std::vector<std::vector<Index>> supports, std::vector<std::vector<double>> amplitudes);

  /// The mixture used for the statistical-bound check: p = 8 in the DCT-II
  /// basis, three 2-sparse components.
  static SparseMixtureDistribution reference(Index p = 8);

  Index dim() const override { return basis_.p; }
  Eigen::VectorXd sample(std::mt19937_64& rng) const override;
  std::optional<Eigen::VectorXd> index_means(const TransformSpec& spec) const override;

 private:
  TransformSpec basis_;
  std::vector<double> cumulative_;
  std::vector<double> weights_;
  std::vector<std::vector<Index>> supports_;
  std::vector<std::vector<double>> amplitudes_;
};

struct MonteCarloResult {
  double exceedance = 0.0;  // fraction of trials with delta_n > bound
  double bound = 0.0;
  double mean_delta = 0.0;
  double max_delta = 0.0;
  double min_delta = 0.0;
  int trials = 0;
  bool exact_means = true;
};

/// Draws m training signals per trial, learns the average-criterion mask of size
/// n and measures the expected-capture gap to the best size-n mask.
MonteCarloResult monte_carlo_delta_n(const SignalDistribution& dist, const TransformSpec& spec, Index n, Index m,
                                     int trials, double eta, std::uint64_t seed);

}  // namespace subsample

#endif  // SUBSAMPLE_BOUNDS_HPP
