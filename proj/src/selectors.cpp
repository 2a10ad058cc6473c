#include "subsample/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace subsample {

namespace {

SelectionResult finish(const Criterion& c, const EnergyTable& et, std::vector<Index> chosen, std::string solver,
                       std::string guarantee) {
  SelectionResult r;
  r.omega = IndexSet(std::move(chosen), et.cols());
  r.omega.meta().criterion = describe(c);
  r.objective = evaluate(c, et, r.omega);
  r.solver = std::move(solver);
  r.guarantee = std::move(guarantee);
  return r;
}

/// Indices ordered by decreasing value, smaller index first on ties.
std::vector<Index> order_by_value(const Eigen::VectorXd& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) > values(b); });
  return order;
}

std::vector<Index> group_lookup(const PartitionMatroid& pm, Index p) {
  std::vector<Index> group_of(static_cast<std::size_t>(p), -1);
  for (std::size_t k = 0; k < pm.groups.size(); ++k)
    for (Index i : pm.groups[k]) group_of[static_cast<std::size_t>(i)] = static_cast<Index>(k);
  return group_of;
}

struct Candidate {
  double gain;
  Index index;
  std::size_t round;  // selection round in which `gain` was computed
};

// Max-heap order: larger gain first, then smaller index.
struct CandidateLess {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.index > b.index;
  }
};

using CandidateQueue = std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess>;

double log_binomial(Index n, Index k) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

// count[v][k]: rooted subtrees at v with exactly k nodes, k <= n.
std::vector<double> rooted_subtree_counts(const RootedConnectedTree& t) {
  const auto children = t.children();
  const auto n = static_cast<std::size_t>(t.n);
  std::vector<std::vector<double>> cnt(t.parent.size());
  std::vector<Index> order, stack{t.root};
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (Index c : children[static_cast<std::size_t>(v)]) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto v = static_cast<std::size_t>(*it);
    std::vector<double> cur(n + 1, 0.0);
    cur[1] = 1.0;
    for (Index c : children[v]) {
      const auto& cc = cnt[static_cast<std::size_t>(c)];
      std::vector<double> next = cur;  // child excluded
      for (std::size_t k1 = 1; k1 <= n; ++k1) {
        if (cur[k1] == 0.0) continue;
        for (std::size_t k2 = 1; k1 + k2 <= n; ++k2) next[k1 + k2] += cur[k1] * cc[k2];
      }
      cur = std::move(next);
    }
    cnt[v] = std::move(cur);
    for (Index c : children[v]) std::vector<double>().swap(cnt[static_cast<std::size_t>(c)]);
  }
  return cnt[static_cast<std::size_t>(t.root)];
}

}  // namespace

SelectionResult select_avg_sorted(const EnergyTable& et, Index n) {
  if (n < 1 || n > et.cols()) throw Error(ErrorCode::BadBudget, "need 1 <= n <= p");
  const auto order = order_by_value(mean_energy(et));
  return finish(Avg{}, et, {order.begin(), order.begin() + n}, "sorted", "exact");
}

SelectionResult select_modular_matroid_greedy(const EnergyTable& et, const PartitionMatroid& cs) {
  validate_constraint(cs, et.cols());
  if (cs.total() < 1) throw Error(ErrorCode::InvalidConstraint, "sum of quotas must be >= 1");
  const auto group_of = group_lookup(cs, et.cols());
  std::vector<Index> used(cs.groups.size(), 0), chosen;
  for (Index i : order_by_value(mean_energy(et))) {
    const auto k = static_cast<std::size_t>(group_of[static_cast<std::size_t>(i)]);
    if (used[k] < cs.quotas[k]) {
      ++used[k];
      chosen.push_back(i);
      if (static_cast<Index>(chosen.size()) == cs.total()) break;
    }
  }
  return finish(Avg{}, et, std::move(chosen), "matroid-greedy", "exact");
}

SelectionResult select_gen_greedy(const EnergyTable& et, double q, const ConstraintSet& cs, GreedyMode mode) {
  if (std::holds_alternative<RootedConnectedTree>(cs))
    throw Error(ErrorCode::InvalidConstraint, "greedy supports cardinality or partition matroid constraints");
  validate_constraint(cs, et.cols());
  const Criterion crit = canonical(Gen{q});
  const Index p = et.cols();
  const Index n = budget(cs);
  if (n < 1) throw Error(ErrorCode::InvalidConstraint, "budget must be >= 1");

  const auto* pm = std::get_if<PartitionMatroid>(&cs);
  std::vector<Index> group_of = pm ? group_lookup(*pm, p) : std::vector<Index>(static_cast<std::size_t>(p), 0);
  std::vector<Index> quotas = pm ? pm->quotas : std::vector<Index>{n};
  std::vector<Index> used(quotas.size(), 0);
  auto room = [&](Index i) {
    const auto k = static_cast<std::size_t>(group_of[static_cast<std::size_t>(i)]);
    return used[k] < quotas[k];
  };

  const Eigen::VectorXd means = mean_energy(et);
  CriterionState st(et);

  if (mode == GreedyMode::Naive) {
    while (static_cast<Index>(st.chosen().size()) < n) {
      Index best = -1;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (Index i = 0; i < p; ++i) {
        if (st.is_chosen(i) || !room(i)) continue;
        const double g = marginal_gain(crit, st, et, i, &means);
        if (g > best_gain) {
          best_gain = g;
          best = i;
        }
      }
      if (best < 0) break;
      ++used[static_cast<std::size_t>(group_of[static_cast<std::size_t>(best)])];
      st.add(et, best);
    }
  } else {
    CandidateQueue queue;
    for (Index i = 0; i < p; ++i) queue.push({marginal_gain(crit, st, et, i, &means), i, 0});
    while (static_cast<Index>(st.chosen().size()) < n && !queue.empty()) {
      Candidate top = queue.top();
      queue.pop();
      if (!room(top.index)) continue;  // its group is full for good
      if (top.round == st.chosen().size()) {
        ++used[static_cast<std::size_t>(group_of[static_cast<std::size_t>(top.index)])];
        st.add(et, top.index);
        continue;
      }
      top.gain = marginal_gain(crit, st, et, top.index, &means);
      top.round = st.chosen().size();
      queue.push(top);
    }
  }

  std::string guarantee;
  if (std::holds_alternative<Avg>(crit))
    guarantee = "exact (modular)";
  else
    guarantee = pm ? ">= 1/2 OPT (partition matroid)" : ">= (1-1/e) OPT (cardinality)";
  return finish(crit, et, st.chosen(), mode == GreedyMode::Lazy ? "lazy-greedy" : "greedy", guarantee);
}

namespace {

struct GpcOutcome {
  std::vector<Index> chosen;
  bool saturated = false;
};

// Greedy partial cover on fbar_c(S) = (1/m) sum_j min(f_j(S), c). Stops once
// every signal reaches c, when no index has positive gain, or once more than
// `cap` indices are chosen.
GpcOutcome greedy_partial_cover(const EnergyTable& et, double c, Index cap) {
  const Index m = et.rows(), p = et.cols();
  CriterionState st(et);
  auto gain = [&](Index i) {
    CompensatedSum s;
    for (Index j = 0; j < m; ++j) {
      const double cur = st.captured(j);
      s.add(std::min(std::min(cur + et.e(j, i), 1.0), c) - std::min(cur, c));
    }
    return s.value() / static_cast<double>(m);
  };
  auto saturated = [&] {
    for (Index j = 0; j < m; ++j)
      if (st.captured(j) < c) return false;
    return true;
  };

  GpcOutcome out;
  CandidateQueue queue;
  for (Index i = 0; i < p; ++i) queue.push({gain(i), i, 0});
  while (!saturated()) {
    if (static_cast<Index>(st.chosen().size()) > cap) break;
    Index pick = -1;
    while (!queue.empty()) {
      Candidate top = queue.top();
      queue.pop();
      if (top.round == st.chosen().size()) {
        if (top.gain > 1e-15) pick = top.index;
        break;
      }
      top.gain = gain(top.index);
      top.round = st.chosen().size();
      queue.push(top);
    }
    if (pick < 0) break;  // c unreachable
    st.add(et, pick);
  }
  out.saturated = saturated();
  out.chosen = st.chosen();
  return out;
}

}  // namespace

SelectionResult select_min_saturate(const EnergyTable& et, Index n, const SaturateParams& params) {
  if (n < 1 || n > et.cols()) throw Error(ErrorCode::BadBudget, "need 1 <= n <= p");
  if (!(params.alpha >= 1.0)) throw Error(ErrorCode::DomainError, "alpha must be >= 1");
  if (!(params.epsilon > 0.0)) throw Error(ErrorCode::DomainError, "epsilon must be > 0");
  const auto cap = static_cast<Index>(std::floor(params.alpha * static_cast<double>(n)));

  std::vector<Index> all(static_cast<std::size_t>(et.cols()));
  std::iota(all.begin(), all.end(), Index{0});
  double c_min = 0.0;
  double c_max = captured_energy(et, IndexSet::from_sorted(all, et.cols())).minCoeff();
  std::vector<Index> best;
  while (c_max - c_min > params.epsilon) {
    const double c = 0.5 * (c_min + c_max);
    auto gpc = greedy_partial_cover(et, c, cap);
    if (!gpc.saturated || static_cast<Index>(gpc.chosen.size()) > cap) {
      c_max = c;
    } else {
      c_min = c;
      best = std::move(gpc.chosen);
    }
  }
  std::string guarantee = "|omega| <= floor(alpha n) = " + std::to_string(cap);
  return finish(Min{}, et, std::move(best), "saturate", guarantee);
}

SelectionResult select_avg_tree_dp(const EnergyTable& et, const RootedConnectedTree& cs) {
  validate_constraint(cs, et.cols());
  const Eigen::VectorXd w = mean_energy(et);
  const auto children = cs.children();
  const auto n = static_cast<std::size_t>(cs.n);
  constexpr double kNone = -std::numeric_limits<double>::infinity();

  std::vector<Index> order, stack{cs.root};
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (Index c : children[static_cast<std::size_t>(v)]) stack.push_back(c);
  }

  // best[v][k]: max weight of a k-node subtree rooted at v; split[v][t][k]: nodes
  // taken from child t when the first t+1 children are merged.
  std::vector<std::vector<double>> best(cs.parent.size());
  std::vector<std::vector<std::vector<std::uint32_t>>> split(cs.parent.size());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto v = static_cast<std::size_t>(*it);
    std::vector<double> cur{kNone, w(*it)};
    for (Index c : children[v]) {
      const auto& bc = best[static_cast<std::size_t>(c)];
      const std::size_t size = std::min(n, cur.size() - 1 + bc.size() - 1);
      std::vector<double> next(size + 1, kNone);
      std::vector<std::uint32_t> choice(size + 1, 0);
      for (std::size_t k1 = 1; k1 < cur.size(); ++k1) {
        if (cur[k1] == kNone) continue;
        if (cur[k1] > next[k1]) {
          next[k1] = cur[k1];
          choice[k1] = 0;
        }
        for (std::size_t k2 = 1; k2 < bc.size() && k1 + k2 <= size; ++k2) {
          if (bc[k2] == kNone) continue;
          const double val = cur[k1] + bc[k2];
          if (val > next[k1 + k2]) {
            next[k1 + k2] = val;
            choice[k1 + k2] = static_cast<std::uint32_t>(k2);
          }
        }
      }
      cur = std::move(next);
      split[v].push_back(std::move(choice));
    }
    best[v] = std::move(cur);
  }

  const auto& root_best = best[static_cast<std::size_t>(cs.root)];
  if (root_best.size() <= n || root_best[n] == kNone)
    throw Error(ErrorCode::InvalidConstraint, "no rooted subtree of the requested size");

  std::vector<Index> chosen;
  std::vector<std::pair<Index, std::size_t>> todo{{cs.root, n}};
  while (!todo.empty()) {
    auto [v, k] = todo.back();
    todo.pop_back();
    chosen.push_back(v);
    const auto& ch = children[static_cast<std::size_t>(v)];
    for (std::size_t t = ch.size(); t-- > 0;) {
      const std::size_t k2 = split[static_cast<std::size_t>(v)][t][k];
      if (k2 > 0) todo.emplace_back(ch[t], k2);
      k -= k2;
    }
  }
  return finish(Avg{}, et, std::move(chosen), "tree-dp", "exact");
}

double feasible_count(const ConstraintSet& cs, Index p) {
  validate_constraint(cs, p);
  if (const auto* c = std::get_if<Cardinality>(&cs)) return std::round(std::exp(log_binomial(p, c->n)));
  if (const auto* pm = std::get_if<PartitionMatroid>(&cs)) {
    double lc = 0.0;
    for (std::size_t k = 0; k < pm->groups.size(); ++k)
      lc += log_binomial(static_cast<Index>(pm->groups[k].size()), pm->quotas[k]);
    return std::round(std::exp(lc));
  }
  const auto& t = std::get<RootedConnectedTree>(cs);
  return rooted_subtree_counts(t)[static_cast<std::size_t>(t.n)];
}

void for_each_feasible(const ConstraintSet& cs, Index p, const std::function<void(const std::vector<Index>&)>& visit,
                       double limit) {
  if (feasible_count(cs, p) > limit) throw Error(ErrorCode::TooLarge, "more feasible sets than the enumeration limit");

  if (const auto* c = std::get_if<Cardinality>(&cs)) {
    const auto n = static_cast<std::size_t>(c->n);
    std::vector<Index> comb(n);
    std::iota(comb.begin(), comb.end(), Index{0});
    while (true) {
      visit(comb);
      std::size_t k = n;
      while (k > 0 && comb[k - 1] == p - static_cast<Index>(n - k + 1)) --k;
      if (k == 0) break;
      ++comb[k - 1];
      for (std::size_t r = k; r < n; ++r) comb[r] = comb[r - 1] + 1;
    }
    return;
  }

  if (const auto* pm = std::get_if<PartitionMatroid>(&cs)) {
    // odometer over per-group combinations
    const std::size_t K = pm->groups.size();
    std::vector<std::vector<Index>> groups = pm->groups;
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::vector<std::vector<std::size_t>> pos(K);
    for (std::size_t k = 0; k < K; ++k) {
      pos[k].resize(static_cast<std::size_t>(pm->quotas[k]));
      std::iota(pos[k].begin(), pos[k].end(), std::size_t{0});
    }
    std::vector<Index> set;
    while (true) {
      set.clear();
      for (std::size_t k = 0; k < K; ++k)
        for (auto q : pos[k]) set.push_back(groups[k][q]);
      std::sort(set.begin(), set.end());
      visit(set);
      std::size_t k = 0;
      for (; k < K; ++k) {
        auto& ps = pos[k];
        const std::size_t gsz = groups[k].size(), nk = ps.size();
        std::size_t r = nk;
        while (r > 0 && ps[r - 1] == gsz - (nk - r + 1)) --r;
        if (r > 0) {
          ++ps[r - 1];
          for (std::size_t s = r; s < nk; ++s) ps[s] = ps[s - 1] + 1;
          break;
        }
        std::iota(ps.begin(), ps.end(), std::size_t{0});
      }
      if (k == K) break;
    }
    return;
  }

  // Rooted subtrees: each frontier node is either added (exposing its children)
  // or excluded for good, so every subtree is produced exactly once.
  const auto& t = std::get<RootedConnectedTree>(cs);
  const auto children = t.children();
  const auto n = static_cast<std::size_t>(t.n);
  std::vector<Index> set{t.root};
  std::vector<Index> sorted;
  std::function<void(std::vector<Index>)> grow = [&](std::vector<Index> frontier) {
    if (set.size() == n) {
      sorted = set;
      std::sort(sorted.begin(), sorted.end());
      visit(sorted);
      return;
    }
    if (frontier.empty()) return;
    const Index v = frontier.back();
    frontier.pop_back();
    // exclude v
    grow(frontier);
    // include v
    set.push_back(v);
    auto extended = frontier;
    const auto& ch = children[static_cast<std::size_t>(v)];
    extended.insert(extended.begin(), ch.begin(), ch.end());
    grow(std::move(extended));
    set.pop_back();
  };
  grow(children[static_cast<std::size_t>(t.root)]);
}

SelectionResult brute_force_select(const Criterion& c, const EnergyTable& et, const ConstraintSet& cs, double limit) {
  validate_constraint(cs, et.cols());
  const Index p = et.cols();
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<Index> best_set;
  std::uint64_t count = 0;
  Eigen::VectorXd cap(et.rows());
  for_each_feasible(
      cs, p,
      [&](const std::vector<Index>& set) {
        ++count;
        for (Index j = 0; j < et.rows(); ++j) {
          CompensatedSum s;
          for (Index i : set) s.add(et.e(j, i));
          cap(j) = std::clamp(s.value(), 0.0, 1.0);
        }
        const double val = evaluate_captured(c, cap);
        if (val > best_val || (val == best_val && set < best_set)) {
          best_val = val;
          best_set = set;
        }
      },
      limit);
  auto r = finish(c, et, best_set, "brute-force", "exact");
  r.enumerated = count;
  return r;
}

SelectionResult learn_mask(const Criterion& c, const EnergyTable& et, const ConstraintSet& cs,
                           const SaturateParams& saturate) {
  const auto crit = canonical(c);
  validate_constraint(cs, et.cols());
  SelectionResult r;
  if (std::holds_alternative<Avg>(crit)) {
    if (const auto* card = std::get_if<Cardinality>(&cs))
      r = select_avg_sorted(et, card->n);
    else if (const auto* pm = std::get_if<PartitionMatroid>(&cs))
      r = select_modular_matroid_greedy(et, *pm);
    else
      r = select_avg_tree_dp(et, std::get<RootedConnectedTree>(cs));
  } else if (const auto* g = std::get_if<Gen>(&crit)) {
    r = select_gen_greedy(et, g->q, cs);
  } else {
    const auto* card = std::get_if<Cardinality>(&cs);
    if (!card) throw Error(ErrorCode::InvalidConstraint, "the worst-case criterion supports cardinality constraints only");
    r = select_min_saturate(et, card->n, saturate);
  }
  r.omega.meta().criterion = describe(c);
  r.omega.meta().constraint = describe(cs);
  return r;
}

}  // namespace subsample
