#include "subsample/bounds.hpp"

#include "subsample/parallel.hpp"
#include "subsample/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace subsample {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::DomainError, "eps must be >= 0");
}

double checked_delta(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(ErrorCode::DomainError, "delta must lie in [0, 1]");
  return delta;
}

double log_binomial(Index n, Index k) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

}  // namespace

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Gen: return "gen";
    case BoundKind::Min: return "min";
    case BoundKind::Statistical: return "statistical";
  }
  return "?";
}

double guaranteed_capture(double delta, double eps) {
  const double r = std::sqrt(delta) + std::sqrt(eps);
  return std::max(0.0, 1.0 - r * r);
}

BoundReport det_bound_gen(const EnergyTable& train, const IndexSet& omega, double q, double eps,
                          std::optional<double> delta_override) {
  check_eps(eps);
  if (!(q >= 1.0)) throw Error(ErrorCode::DomainError, "q must be >= 1");
  BoundReport r;
  r.kind = BoundKind::Gen;
  if (delta_override) {
    r.delta = checked_delta(*delta_override);
    r.note = "delta supplied";
  } else {
    const double mean_g = evaluate(Gen{q}, train, omega);
    // g^{-1}(y) = 1 - (1 - y)^{1/q}, so delta = (1 - mean_g)^{1/q}
    r.delta = q == 1.0 ? 1.0 - mean_g : std::pow(std::max(0.0, 1.0 - mean_g), 1.0 / q);
    r.delta = std::clamp(r.delta, 0.0, 1.0);
    r.note = "delta from training capture (averaged hypothesis)";
  }
  r.epsilon = eps;
  r.guaranteed_capture = guaranteed_capture(r.delta, eps);
  return r;
}

BoundReport det_bound_min(const EnergyTable& train, const IndexSet& omega, double eps,
                          std::optional<double> delta_override) {
  check_eps(eps);
  BoundReport r;
  r.kind = BoundKind::Min;
  if (delta_override) {
    r.delta = checked_delta(*delta_override);
    r.note = "delta supplied; eps is the distance to the nearest training signal";
  } else {
    r.delta = std::clamp(1.0 - captured_energy(train, omega).minCoeff(), 0.0, 1.0);
    r.note = "delta from worst training capture; eps is the distance to the nearest training signal";
  }
  r.epsilon = eps;
  r.guaranteed_capture = guaranteed_capture(r.delta, eps);
  return r;
}

Eigen::VectorXd off_mask_distances(const TransformSpec& spec, const TrainingSet& train, const IndexSet& omega,
                                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (train.dim() != spec.p || x.size() != spec.p || omega.dim() != spec.p)
    throw Error(ErrorCode::DimensionMismatch, "signal, mask and transform sizes differ");
  const auto off = omega.complement();
  Eigen::VectorXd out(static_cast<Index>(train.size()));
  for (std::size_t j = 0; j < train.size(); ++j) {
    const Coefficients c = forward(spec, Eigen::VectorXd(x - train[j].values()));
    double s = 0.0;
    for (Index i : off) s += std::norm(c(i));
    out(static_cast<Index>(j)) = s;
  }
  return out;
}

double hypothesis_epsilon_avg(const TransformSpec& spec, const TrainingSet& train, const IndexSet& omega,
                              const Eigen::Ref<const Eigen::VectorXd>& x) {
  return off_mask_distances(spec, train, omega, x).mean();
}

double hypothesis_epsilon_min(const TransformSpec& spec, const TrainingSet& train, const IndexSet& omega,
                              const Eigen::Ref<const Eigen::VectorXd>& x) {
  return off_mask_distances(spec, train, omega, x).minCoeff();
}

LogCardinality log_constraint_cardinality(const ConstraintSet& cs, Index p) {
  validate_constraint(cs, p);
  if (const auto* c = std::get_if<Cardinality>(&cs)) return {log_binomial(p, c->n), "exact"};
  if (const auto* pm = std::get_if<PartitionMatroid>(&cs)) {
    double v = 0.0;
    for (std::size_t k = 0; k < pm->groups.size(); ++k)
      v += log_binomial(static_cast<Index>(pm->groups[k].size()), pm->quotas[k]);
    return {v, "exact"};
  }
  const auto& t = std::get<RootedConnectedTree>(cs);
  if (p <= 30) return {std::log(feasible_count(cs, p)), "exact-dp"};
  // Catalan(n) = C(2n, n) / (n + 1)
  return {log_binomial(2 * t.n, t.n) - std::log(static_cast<double>(t.n) + 1.0), "catalan-bound"};
}

double stat_bound(Index m, double log_card, double eta) {
  if (m < 1) throw Error(ErrorCode::DomainError, "m must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::DomainError, "eta must lie in (0, 1)");
  if (!(log_card >= 0.0)) throw Error(ErrorCode::DomainError, "log cardinality must be >= 0");
  return std::sqrt(2.0 / static_cast<double>(m) * (log_card + std::log(2.0 / eta)));
}

std::optional<Eigen::VectorXd> FixedSignalDistribution::index_means(const TransformSpec& spec) const {
  return Eigen::VectorXd(forward(spec, x_).cwiseAbs2());
}

SparseMixtureDistribution::SparseMixtureDistribution(TransformSpec basis, std::vector<double> weights,
                                                     std::vector<std::vector<Index>> supports,
                                                     std::vector<std::vector<double>> amplitudes)
    : basis_(std::move(basis)),
      weights_(std::move(weights)),
      supports_(std::move(supports)),
      amplitudes_(std::move(amplitudes)) {
  if (weights_.empty() || weights_.size() != supports_.size() || weights_.size() != amplitudes_.size())
    throw Error(ErrorCode::DimensionMismatch, "mixture components disagree in count");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::DomainError, "mixture weights must sum to > 0");
  double acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (weights_[k] < 0.0) throw Error(ErrorCode::DomainError, "negative mixture weight");
    if (supports_[k].size() != amplitudes_[k].size()) throw Error(ErrorCode::DimensionMismatch, "support/amplitude mismatch");
    double norm2 = 0.0;
    for (double a : amplitudes_[k]) norm2 += a * a;
    if (std::abs(norm2 - 1.0) > 1e-12) throw Error(ErrorCode::DomainError, "component amplitudes must have unit norm");
    for (Index i : supports_[k])
      if (i < 0 || i >= basis_.p) throw Error(ErrorCode::DimensionMismatch, "support index outside [0, p)");
    weights_[k] /= total;
    acc += weights_[k];
    cumulative_.push_back(acc);
  }
}

SparseMixtureDistribution SparseMixtureDistribution::reference(Index p) {
  const double h = std::sqrt(0.5);
  return SparseMixtureDistribution(TransformSpec::make_1d(TransformKind::DCT2, p), {0.5, 0.3, 0.2},
                                   {{0, 1}, {0, 3}, {2, 5}}, {{0.8, 0.6}, {0.6, 0.8}, {h, h}});
}

Eigen::VectorXd SparseMixtureDistribution::sample(std::mt19937_64& rng) const {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  std::size_t k = 0;
  while (k + 1 < cumulative_.size() && u >= cumulative_[k]) ++k;
  Coefficients c = Coefficients::Zero(basis_.p);
  for (std::size_t l = 0; l < supports_[k].size(); ++l) {
    const double sign = (rng() & 1u) ? 1.0 : -1.0;
    c(supports_[k][l]) = sign * amplitudes_[k][l];
  }
  return adjoint(basis_, c);
}

std::optional<Eigen::VectorXd> SparseMixtureDistribution::index_means(const TransformSpec& spec) const {
  if (!(spec == basis_)) return std::nullopt;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(basis_.p);
  for (std::size_t k = 0; k < weights_.size(); ++k)
    for (std::size_t l = 0; l < supports_[k].size(); ++l)
      mu(supports_[k][l]) += weights_[k] * amplitudes_[k][l] * amplitudes_[k][l];
  return mu;
}

MonteCarloResult monte_carlo_delta_n(const SignalDistribution& dist, const TransformSpec& spec, Index n, Index m,
                                     int trials, double eta, std::uint64_t seed) {
  if (dist.dim() != spec.p) throw Error(ErrorCode::DimensionMismatch, "distribution and transform sizes differ");
  if (trials < 1) throw Error(ErrorCode::DomainError, "trials must be >= 1");
  const ConstraintSet cs = Cardinality{n};
  validate_constraint(cs, spec.p);

  MonteCarloResult res;
  res.trials = trials;
  auto mu = dist.index_means(spec);
  if (!mu) {
    res.exact_means = false;
    constexpr int kSurrogate = 100000;
    std::mt19937_64 rng(seed ^ 0x6d65616eULL);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(spec.p);
    for (int k = 0; k < kSurrogate; ++k) acc += forward(spec, normalize(dist.sample(rng))).cwiseAbs2();
    mu = Eigen::VectorXd(acc / kSurrogate);
  }
  const EnergyTable truth{mu->transpose()};
  const auto best = brute_force_select(Avg{}, truth, cs);
  const double best_value = best.objective;
  res.bound = stat_bound(m, log_constraint_cardinality(cs, spec.p).value, eta);

  std::vector<double> deltas(static_cast<std::size_t>(trials));
  parallel_for(deltas.size(), [&](std::size_t t) {
    std::mt19937_64 rng(seed + t);
    std::vector<Signal> signals;
    signals.reserve(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j) signals.push_back(normalize(dist.sample(rng)));
    const auto et = energy_table(spec, TrainingSet(std::move(signals)));
    const auto learned = select_avg_sorted(et, n);
    deltas[t] = best_value - evaluate(Avg{}, truth, learned.omega);
  });

  int exceed = 0;
  res.min_delta = deltas.front();
  res.max_delta = deltas.front();
  double sum = 0.0;
  for (double d : deltas) {
    exceed += d > res.bound ? 1 : 0;
    sum += d;
    res.min_delta = std::min(res.min_delta, d);
    res.max_delta = std::max(res.max_delta, d);
  }
  res.mean_delta = sum / trials;
  res.exceedance = static_cast<double>(exceed) / trials;
  return res;
}

}  // namespace subsample
