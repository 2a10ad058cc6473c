#include "subsample/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subsample {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::InvalidConstraint: return "InvalidConstraint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::AlreadyChosen: return "AlreadyChosen";
    case ErrorCode::BadBudget: return "BadBudget";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Signal normalize(const Eigen::Ref<const Eigen::VectorXd>& raw) {
  if (raw.size() < 1) throw Error(ErrorCode::DimensionMismatch, "empty signal");
  if (!raw.allFinite()) throw Error(ErrorCode::DomainError, "signal has non-finite entries");
  // stableNorm avoids underflow for tiny-but-nonzero inputs
  const double norm = raw.stableNorm();
  if (!(norm >= 1e-300)) throw Error(ErrorCode::ZeroSignal, "l2 norm below 1e-300");
  Signal s;
  s.values_ = raw / norm;
  s.original_norm_ = norm;
  return s;
}

TrainingSet::TrainingSet(std::vector<Signal> signals, std::optional<Dims2> dims)
    : signals_(std::move(signals)), dims_(dims) {
  if (signals_.empty()) throw Error(ErrorCode::ShapeMismatch, "training set needs at least one signal");
  p_ = signals_.front().size();
  for (const auto& s : signals_)
    if (s.size() != p_) throw Error(ErrorCode::ShapeMismatch, "signals differ in dimension");
  if (dims_ && dims_->rows * dims_->cols != p_)
    throw Error(ErrorCode::ShapeMismatch, "dims rows*cols != p");
}

TrainingSet TrainingSet::slice(std::size_t first, std::size_t count) const {
  if (first + count > signals_.size()) throw Error(ErrorCode::DimensionMismatch, "slice out of range");
  return TrainingSet({signals_.begin() + first, signals_.begin() + first + count}, dims_);
}

TrainingSet TrainingSet::select(const std::vector<std::size_t>& rows) const {
  std::vector<Signal> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(signals_.at(r));
  return TrainingSet(std::move(out), dims_);
}

IndexSet::IndexSet(std::vector<Index> indices, Index p, IndexSetMeta meta)
    : indices_(std::move(indices)), p_(p), meta_(std::move(meta)) {
  std::sort(indices_.begin(), indices_.end());
  *this = from_sorted(std::move(indices_), p_, std::move(meta_));
}

IndexSet IndexSet::from_sorted(std::vector<Index> indices, Index p, IndexSetMeta meta) {
  if (p < 1) throw Error(ErrorCode::InvariantViolation, "dimension p must be >= 1");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= p)
      throw Error(ErrorCode::InvariantViolation, "index " + std::to_string(indices[k]) + " outside [0, p)");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw Error(ErrorCode::InvariantViolation, "indices not strictly increasing");
  }
  IndexSet s;
  s.indices_ = std::move(indices);
  s.p_ = p;
  s.meta_ = std::move(meta);
  return s;
}

bool IndexSet::contains(Index i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::vector<Index> IndexSet::complement() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(p_) - indices_.size());
  auto it = indices_.begin();
  for (Index i = 0; i < p_; ++i) {
    if (it != indices_.end() && *it == i) {
      ++it;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

Index PartitionMatroid::total() const {
  Index t = 0;
  for (auto q : quotas) t += q;
  return t;
}

std::vector<std::vector<Index>> RootedConnectedTree::children() const {
  std::vector<std::vector<Index>> ch(parent.size());
  for (std::size_t v = 0; v < parent.size(); ++v)
    if (parent[v] >= 0) ch[static_cast<std::size_t>(parent[v])].push_back(static_cast<Index>(v));
  return ch;
}

namespace {

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::InvalidConstraint, why); }

void validate(const Cardinality& c, Index p) {
  if (c.n < 1 || c.n > p) invalid("cardinality n must satisfy 1 <= n <= p");
}

void validate(const PartitionMatroid& pm, Index p) {
  if (pm.groups.size() != pm.quotas.size()) invalid("groups and quotas differ in length");
  if (pm.groups.empty()) invalid("partition needs at least one group");
  std::vector<int> seen(static_cast<std::size_t>(p), 0);
  for (std::size_t k = 0; k < pm.groups.size(); ++k) {
    const auto& g = pm.groups[k];
    for (Index i : g) {
      if (i < 0 || i >= p) invalid("group " + std::to_string(k) + " has index outside [0, p)");
      if (seen[static_cast<std::size_t>(i)]++) invalid("index " + std::to_string(i) + " appears in more than one group (overlap)");
    }
    if (pm.quotas[k] < 0 || pm.quotas[k] > static_cast<Index>(g.size()))
      invalid("quota " + std::to_string(k) + " outside [0, |group|]");
  }
  for (Index i = 0; i < p; ++i)
    if (!seen[static_cast<std::size_t>(i)]) invalid("groups do not cover index " + std::to_string(i));
}

void validate(const RootedConnectedTree& t, Index p) {
  if (static_cast<Index>(t.parent.size()) != p) invalid("parent array length != p");
  if (t.root < 0 || t.root >= p) invalid("root outside [0, p)");
  if (t.parent[static_cast<std::size_t>(t.root)] != -1) invalid("parent[root] must be -1");
  if (t.n < 1 || t.n > p) invalid("tree budget n must satisfy 1 <= n <= p");
  // every node must reach the root without revisiting a node
  std::vector<int> state(static_cast<std::size_t>(p), 0);  // 0 unknown, 1 on path, 2 reaches root
  state[static_cast<std::size_t>(t.root)] = 2;
  std::vector<Index> path;
  for (Index v = 0; v < p; ++v) {
    Index u = v;
    path.clear();
    while (state[static_cast<std::size_t>(u)] == 0) {
      state[static_cast<std::size_t>(u)] = 1;
      path.push_back(u);
      const Index par = t.parent[static_cast<std::size_t>(u)];
      if (par < 0 || par >= p) invalid("node " + std::to_string(u) + " has no valid parent (second root?)");
      u = par;
    }
    if (state[static_cast<std::size_t>(u)] == 1) invalid("parent array contains a cycle");
    for (Index w : path) state[static_cast<std::size_t>(w)] = 2;
  }
}

}  // namespace

void validate_constraint(const ConstraintSet& cs, Index p) {
  if (p < 1) invalid("dimension p must be >= 1");
  std::visit([p](const auto& c) { validate(c, p); }, cs);
}

bool membership(const ConstraintSet& cs, const IndexSet& omega) {
  const auto& idx = omega.indices();
  if (const auto* c = std::get_if<Cardinality>(&cs)) return static_cast<Index>(idx.size()) <= c->n;
  if (const auto* pm = std::get_if<PartitionMatroid>(&cs)) {
    std::vector<Index> group_of(static_cast<std::size_t>(omega.dim()), -1);
    for (std::size_t k = 0; k < pm->groups.size(); ++k)
      for (Index i : pm->groups[k])
        if (i >= 0 && i < omega.dim()) group_of[static_cast<std::size_t>(i)] = static_cast<Index>(k);
    std::vector<Index> counts(pm->groups.size(), 0);
    for (Index i : idx) {
      const Index k = group_of[static_cast<std::size_t>(i)];
      if (k < 0) return false;
      if (++counts[static_cast<std::size_t>(k)] > pm->quotas[static_cast<std::size_t>(k)]) return false;
    }
    return true;
  }
  const auto& t = std::get<RootedConnectedTree>(cs);
  if (idx.empty()) return true;
  if (static_cast<Index>(idx.size()) > t.n) return false;
  if (!omega.contains(t.root)) return false;
  // connected and rooted iff every chosen non-root node's parent is chosen
  for (Index i : idx) {
    if (i == t.root) continue;
    const Index par = t.parent[static_cast<std::size_t>(i)];
    if (par < 0 || !omega.contains(par)) return false;
  }
  return true;
}

Index budget(const ConstraintSet& cs) {
  if (const auto* c = std::get_if<Cardinality>(&cs)) return c->n;
  if (const auto* pm = std::get_if<PartitionMatroid>(&cs)) return pm->total();
  return std::get<RootedConnectedTree>(cs).n;
}

std::string describe(const ConstraintSet& cs) {
  std::ostringstream os;
  if (const auto* c = std::get_if<Cardinality>(&cs)) {
    os << "cardinality(n=" << c->n << ")";
  } else if (const auto* pm = std::get_if<PartitionMatroid>(&cs)) {
    os << "partition(K=" << pm->groups.size() << ",quotas=";
    for (std::size_t k = 0; k < pm->quotas.size(); ++k) os << (k ? "/" : "") << pm->quotas[k];
    os << ")";
  } else {
    const auto& t = std::get<RootedConnectedTree>(cs);
    os << "tree(root=" << t.root << ",n=" << t.n << ")";
  }
  return os.str();
}

std::string describe(const Criterion& c) {
  if (std::holds_alternative<Avg>(c)) return "avg";
  if (std::holds_alternative<Min>(c)) return "min";
  std::ostringstream os;
  os << "gen(q=" << std::get<Gen>(c).q << ")";
  return os.str();
}

}  // namespace subsample
