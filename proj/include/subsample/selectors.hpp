// Solvers for argmax over a constraint family of a criterion value:
//   - sorting (average, cardinality), exact
//   - greedy on a partition matroid (average), exact
//   - lazy greedy (concave criterion), (1-1/e) for cardinality, 1/2 for matroids
//   - Saturate with greedy partial cover (worst case), bicriteria
//   - tree knapsack DP (average, rooted connected subtrees), exact
//   - exhaustive enumeration, used as the test oracle
// Ties always go to the smaller index (lexicographically smaller set for enumeration).
#ifndef SUBSAMPLE_SELECTORS_HPP
#define SUBSAMPLE_SELECTORS_HPP

#include "subsample/core.hpp"
#include "subsample/criteria.hpp"
#include "subsample/transforms.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace subsample {

struct SaturateParams {
  double alpha = 1.0;    // budget inflation, >= 1
  double epsilon = 1e-6; // bisection stopping gap, > 0
};

struct SelectionResult {
  IndexSet omega;
  double objective = 0.0;
  std::string solver;
  std::string guarantee;
  std::uint64_t enumerated = 0;  // brute force only
};

enum class GreedyMode { Lazy, Naive };

SelectionResult select_avg_sorted(const EnergyTable& et, Index n);

SelectionResult select_modular_matroid_greedy(const EnergyTable& et, const PartitionMatroid& cs);

/// `cs` must hold a Cardinality or PartitionMatroid.
SelectionResult select_gen_greedy(const EnergyTable& et, double q, const ConstraintSet& cs,
                                  GreedyMode mode = GreedyMode::Lazy);

SelectionResult select_min_saturate(const EnergyTable& et, Index n, const SaturateParams& params = {});

SelectionResult select_avg_tree_dp(const EnergyTable& et, const RootedConnectedTree& cs);

/// Number of sets of exactly the family's budget size (double; may be huge).
double feasible_count(const ConstraintSet& cs, Index p);

/// Calls visit(indices) for every feasible set of the budget size, indices sorted.
/// Throws TooLarge when more than `limit` sets would be visited.
void for_each_feasible(const ConstraintSet& cs, Index p, const std::function<void(const std::vector<Index>&)>& visit,
                       double limit = 1e6);

SelectionResult brute_force_select(const Criterion& c, const EnergyTable& et, const ConstraintSet& cs,
                                   double limit = 1e6);

/// Routes (criterion, constraint) to the matching solver.
SelectionResult learn_mask(const Criterion& c, const EnergyTable& et, const ConstraintSet& cs,
                           const SaturateParams& saturate = {});

}  // namespace subsample

#endif  // SUBSAMPLE_SELECTORS_HPP
