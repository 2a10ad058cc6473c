// Shared domain types for learning subsampling masks: signals, training sets,
// index sets, constraint families and objective criteria.
#ifndef SUBSAMPLE_CORE_HPP
#define SUBSAMPLE_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace subsample {

using Index = std::int64_t;

enum class ErrorCode {
  ZeroSignal,
  InvalidConstraint,
  DimensionMismatch,
  DomainError,
  AlreadyChosen,
  BadBudget,
  TooLarge,
  Infeasible,
  ParseError,
  ShapeMismatch,
  InvariantViolation,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// 2D shape of a flattened (row-major) signal.
struct Dims2 {
  Index rows = 0;
  Index cols = 0;
  friend bool operator==(const Dims2&, const Dims2&) = default;
};

/// A unit-norm real signal. Construct through normalize().
class Signal {
 public:
  Signal() = default;

  const Eigen::VectorXd& values() const { return values_; }
  double original_norm() const { return original_norm_; }
  Index size() const { return values_.size(); }

  /// Values rescaled back to the original amplitude.
  Eigen::VectorXd original() const { return values_ * original_norm_; }

  friend Signal normalize(const Eigen::Ref<const Eigen::VectorXd>& raw);

 private:
  Eigen::VectorXd values_;
  double original_norm_ = 0.0;
};

/// Scales `raw` to unit l2 norm, recording the original norm.
/// Throws ZeroSignal when the norm is below 1e-300.
Signal normalize(const Eigen::Ref<const Eigen::VectorXd>& raw);

class TrainingSet {
 public:
  TrainingSet() = default;
  explicit TrainingSet(std::vector<Signal> signals, std::optional<Dims2> dims = std::nullopt);

  const std::vector<Signal>& signals() const { return signals_; }
  const Signal& operator[](std::size_t j) const { return signals_[j]; }
  std::size_t size() const { return signals_.size(); }
  Index dim() const { return p_; }
  const std::optional<Dims2>& dims() const { return dims_; }

  /// Signals [first, first+count) as a new set sharing dims.
  TrainingSet slice(std::size_t first, std::size_t count) const;
  TrainingSet select(const std::vector<std::size_t>& rows) const;

 private:
  std::vector<Signal> signals_;
  Index p_ = 0;
  std::optional<Dims2> dims_;
};

struct IndexSetMeta {
  std::string criterion;
  std::string constraint;
  std::string transform;
  friend bool operator==(const IndexSetMeta&, const IndexSetMeta&) = default;
};

/// A sorted, duplicate-free subset of [0, p).
class IndexSet {
 public:
  IndexSet() = default;
  /// Sorts and validates; throws InvariantViolation on duplicates or out-of-range entries.
  IndexSet(std::vector<Index> indices, Index p, IndexSetMeta meta = {});

  /// Builds without sorting; throws InvariantViolation unless already strictly increasing.
  static IndexSet from_sorted(std::vector<Index> indices, Index p, IndexSetMeta meta = {});

  const std::vector<Index>& indices() const { return indices_; }
  Index dim() const { return p_; }
  std::size_t size() const { return indices_.size(); }
  bool contains(Index i) const;
  std::vector<Index> complement() const;

  IndexSetMeta& meta() { return meta_; }
  const IndexSetMeta& meta() const { return meta_; }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Index> indices_;
  Index p_ = 0;
  IndexSetMeta meta_;
};

struct Cardinality {
  Index n = 0;
};

/// Multi-level sampling: at most quotas[k] indices from groups[k].
struct PartitionMatroid {
  std::vector<std::vector<Index>> groups;
  std::vector<Index> quotas;
  Index total() const;
};

/// Feasible sets are connected subtrees containing `root`; parent[root] == -1.
struct RootedConnectedTree {
  std::vector<Index> parent;
  Index root = 0;
  Index n = 0;
  std::vector<std::vector<Index>> children() const;
};

using ConstraintSet = std::variant<Cardinality, PartitionMatroid, RootedConnectedTree>;

/// Throws InvalidConstraint with a reason unless `cs` is well formed for dimension p.
void validate_constraint(const ConstraintSet& cs, Index p);

/// True iff `omega` is a member of the downward closure of the family.
bool membership(const ConstraintSet& cs, const IndexSet& omega);

/// The target set size n of the family.
Index budget(const ConstraintSet& cs);

std::string describe(const ConstraintSet& cs);

struct Avg {};
struct Gen {
  double q = 2.0;
};
struct Min {};

using Criterion = std::variant<Avg, Gen, Min>;

std::string describe(const Criterion& c);

}  // namespace subsample

#endif  // SUBSAMPLE_CORE_HPP
