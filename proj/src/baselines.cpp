#include "subsample/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace subsample {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  // (0, 1]: 53 random bits, offset so log() stays finite
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

void shuffle(std::vector<Index>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

// frequency offset from DC in natural FFT order
double fft_offset(Index i, Index len) { return static_cast<double>(i <= len / 2 ? i : len - i); }

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Eigen::VectorXd spectral_distance(const TransformSpec& spec) {
  Eigen::VectorXd t(spec.p);
  const bool dft = spec.kind == TransformKind::DFT;
  if (!spec.is_2d()) {
    const double denom = dft ? std::floor(static_cast<double>(spec.p) / 2.0) : static_cast<double>(spec.p - 1);
    for (Index i = 0; i < spec.p; ++i) {
      const double dist = dft ? fft_offset(i, spec.p) : static_cast<double>(i);
      t(i) = denom > 0 ? dist / denom : 0.0;
    }
    return t;
  }
  const Index R = spec.dims2->rows, C = spec.dims2->cols;
  const double mr = dft ? std::floor(static_cast<double>(R) / 2.0) : static_cast<double>(R - 1);
  const double mc = dft ? std::floor(static_cast<double>(C) / 2.0) : static_cast<double>(C - 1);
  const double denom = std::hypot(mr, mc);
  for (Index r = 0; r < R; ++r) {
    for (Index c = 0; c < C; ++c) {
      const double dr = dft ? fft_offset(r, R) : static_cast<double>(r);
      const double dc = dft ? fft_offset(c, C) : static_cast<double>(c);
      t(r * C + c) = denom > 0 ? std::hypot(dr, dc) / denom : 0.0;
    }
  }
  return t;
}

DensityMap lustig_density(const TransformSpec& spec, const LustigParams& params) {
  if (!(params.r >= 0.0 && params.r <= 0.5)) throw Error(ErrorCode::DomainError, "lustig r must lie in [0, 0.5]");
  if (!(params.d >= 0.0)) throw Error(ErrorCode::DomainError, "lustig d must be >= 0");
  const Eigen::VectorXd t = spectral_distance(spec);
  DensityMap dm;
  dm.w.resize(spec.p);
  for (Index i = 0; i < spec.p; ++i) {
    if (params.r > 0.0 && t(i) <= params.r) {
      dm.fully_sampled.push_back(i);
      dm.w(i) = 1.0;
    } else {
      dm.w(i) = std::pow(std::max(0.0, 1.0 - t(i)), params.d);
    }
  }
  return dm;
}

RomanLevels roman_levels(const TransformSpec& spec, const RomanParams& params, Index n) {
  if (!(params.r >= 0.0 && params.r <= 0.5)) throw Error(ErrorCode::DomainError, "roman r must lie in [0, 0.5]");
  if (params.levels < 1) throw Error(ErrorCode::DomainError, "roman needs N >= 1 levels");
  if (!(params.a > 0.0)) throw Error(ErrorCode::DomainError, "roman a must be > 0");
  if (n < 0 || n > spec.p) throw Error(ErrorCode::BadBudget, "need 0 <= n <= p");

  const Eigen::VectorXd t = spectral_distance(spec);
  const auto N = static_cast<std::size_t>(params.levels);
  RomanLevels out;
  out.members.resize(N);
  for (Index i = 0; i < spec.p; ++i) {
    if (params.r > 0.0 && t(i) <= params.r) {
      out.fully_sampled.push_back(i);
      continue;
    }
    const double u = params.r < 1.0 ? (t(i) - params.r) / (1.0 - params.r) : 0.0;
    const auto k = std::min(N - 1, static_cast<std::size_t>(std::max(0.0, std::floor(u * static_cast<double>(N)))));
    out.members[k].push_back(i);
  }
  const Index target = n - static_cast<Index>(out.fully_sampled.size());
  if (target < 0)
    throw Error(ErrorCode::Infeasible, "budget " + std::to_string(n) + " below fully sampled region of " +
                                           std::to_string(out.fully_sampled.size()));

  std::vector<double> sizes(N);
  for (std::size_t k = 0; k < N; ++k) sizes[k] = static_cast<double>(out.members[k].size());
  auto fractions = [&](double b, double scale) {
    std::vector<double> x(N);
    for (std::size_t k = 0; k < N; ++k) {
      const double pos = (static_cast<double>(k) + 0.5) / static_cast<double>(N);
      x[k] = std::min(sizes[k], scale * sizes[k] * std::exp(-params.a * std::pow(pos, b)));
    }
    return x;
  };
  auto total = [](const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0); };

  // total is nondecreasing in b (every base is < 1)
  double lo = std::log(1e-6), hi = std::log(1e6);
  const auto T = static_cast<double>(target);
  double b = std::exp(lo), scale = 1.0;
  if (total(fractions(std::exp(lo), 1.0)) >= T) {
    double s_lo = 0.0, s_hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (s_lo + s_hi);
      (total(fractions(b, mid)) < T ? s_lo : s_hi) = mid;
    }
    scale = s_hi;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (total(fractions(std::exp(mid), 1.0)) < T ? lo : hi) = mid;
    }
    b = std::exp(hi);
  }
  out.b = b;
  out.scale = scale;

  // Largest-remainder rounding to hit the target exactly.
  const auto x = fractions(b, scale);
  out.quotas.resize(N);
  Index sum = 0;
  for (std::size_t k = 0; k < N; ++k) {
    out.quotas[k] = static_cast<Index>(std::floor(x[k]));
    sum += out.quotas[k];
  }
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
    return x[a] - static_cast<double>(out.quotas[a]) > x[c] - static_cast<double>(out.quotas[c]);
  });
  while (sum < target) {
    bool moved = false;
    for (std::size_t k : order) {
      if (sum == target) break;
      if (out.quotas[k] < static_cast<Index>(out.members[k].size())) {
        ++out.quotas[k];
        ++sum;
        moved = true;
      }
    }
    if (!moved) throw Error(ErrorCode::Infeasible, "levels cannot hold the requested budget");
  }
  for (auto it = order.rbegin(); sum > target && it != order.rend(); ++it) {
    if (out.quotas[*it] > 0) {
      --out.quotas[*it];
      --sum;
    }
  }
  return out;
}

IndexSet draw_mask(const DensityMap& dm, Index n, std::uint64_t seed) {
  const Index p = dm.w.size();
  if (n < 0 || n > p) throw Error(ErrorCode::BadBudget, "need 0 <= n <= p");
  if (static_cast<Index>(dm.fully_sampled.size()) > n)
    throw Error(ErrorCode::Infeasible, "fully sampled region exceeds the budget");
  std::vector<char> taken(static_cast<std::size_t>(p), 0);
  std::vector<Index> chosen = dm.fully_sampled;
  for (Index i : chosen) taken[static_cast<std::size_t>(i)] = 1;

  std::mt19937_64 rng(seed);
  std::vector<std::pair<double, Index>> keys;
  for (Index i = 0; i < p; ++i) {
    if (taken[static_cast<std::size_t>(i)]) continue;
    const double u = unit_uniform(rng);  // drawn for every index so streams stay aligned
    if (dm.w(i) > 0.0) keys.emplace_back(std::log(u) / dm.w(i), i);
  }
  const auto need = static_cast<std::size_t>(n) - chosen.size();
  if (keys.size() < need) throw Error(ErrorCode::Infeasible, "not enough positive-weight indices for the budget");
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(need), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t k = 0; k < need; ++k) chosen.push_back(keys[k].second);
  return IndexSet(std::move(chosen), p);
}

IndexSet draw_mask(const RomanLevels& levels, Index n, std::uint64_t seed) {
  Index p = static_cast<Index>(levels.fully_sampled.size());
  for (const auto& m : levels.members) p += static_cast<Index>(m.size());
  Index total = static_cast<Index>(levels.fully_sampled.size());
  for (auto q : levels.quotas) total += q;
  if (total != n) throw Error(ErrorCode::Infeasible, "level quotas do not add up to n");
  std::mt19937_64 rng(seed);
  std::vector<Index> chosen = levels.fully_sampled;
  for (std::size_t k = 0; k < levels.members.size(); ++k) {
    auto pool = levels.members[k];
    if (levels.quotas[k] > static_cast<Index>(pool.size())) throw Error(ErrorCode::Infeasible, "quota exceeds level size");
    shuffle(pool, rng);
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + levels.quotas[k]);
  }
  return IndexSet(std::move(chosen), p);
}

IndexSet uniform_random_mask(Index p, Index n, std::uint64_t seed) {
  return draw_mask(DensityMap{Eigen::VectorXd::Ones(p), {}}, n, seed);
}

const char* to_string(BaselineFamily f) {
  switch (f) {
    case BaselineFamily::Lustig: return "lustig";
    case BaselineFamily::Roman: return "roman";
    case BaselineFamily::Uniform: return "uniform";
  }
  return "?";
}

BaselineFamily parse_baseline_family(const std::string& name) {
  if (name == "lustig") return BaselineFamily::Lustig;
  if (name == "roman") return BaselineFamily::Roman;
  if (name == "uniform") return BaselineFamily::Uniform;
  throw Error(ErrorCode::ParseError, "unknown baseline family '" + name + "'");
}

BaselineGrid BaselineGrid::defaults() {
  BaselineGrid g;
  for (int k = 0; k <= 20; ++k) g.r.push_back(0.025 * k);
  for (int k = 0; k <= 40; ++k) g.d.push_back(0.25 * k);
  for (int k = 1; k <= 160; ++k) g.a.push_back(0.05 * k);
  for (int k = 9; k <= 25; ++k) g.a.push_back(k);
  g.levels = 100;
  return g;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

TunedBaseline tune_baseline(BaselineFamily family, const BaselineGrid& grid, const EnergyTable& train,
                            const TransformSpec& spec, Index n, int draws, std::uint64_t seed,
                            std::size_t score_signals) {
  if (draws < 1) throw Error(ErrorCode::DomainError, "draws must be >= 1");
  if (train.cols() != spec.p) throw Error(ErrorCode::DimensionMismatch, "energy table width != transform size");
  if (n < 1 || n > spec.p) throw Error(ErrorCode::BadBudget, "need 1 <= n <= p");

  // fixed random scoring subsample
  std::vector<Index> rows(static_cast<std::size_t>(train.rows()));
  std::iota(rows.begin(), rows.end(), Index{0});
  if (rows.size() > score_signals) {
    std::mt19937_64 rng(derive_seed(seed, 0x5c0e));
    shuffle(rows, rng);
    rows.resize(score_signals);
    std::sort(rows.begin(), rows.end());
  }
  Eigen::MatrixXd sub(static_cast<Index>(rows.size()), train.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) sub.row(static_cast<Index>(k)) = train.e.row(rows[k]);
  const Eigen::VectorXd means = mean_energy(EnergyTable{sub});
  auto score = [&](const IndexSet& mask) {
    CompensatedSum s;
    for (Index i : mask.indices()) s.add(means(i));
    return s.value();
  };

  TunedBaseline best;
  best.family = family;
  bool have = false;
  auto consider = [&](const IndexSet& mask, std::uint64_t draw_seed, const LustigParams& lp, const RomanParams& rp) {
    const double s = score(mask);
    if (!have || s > best.train_score) {
      have = true;
      best.train_score = s;
      best.mask = mask;
      best.draw_seed = draw_seed;
      best.lustig = lp;
      best.roman = rp;
    }
  };

  std::uint64_t point = 0;
  std::string last_error = "empty parameter grid";
  if (family == BaselineFamily::Uniform) {
    const DensityMap dm{Eigen::VectorXd::Ones(spec.p), {}};
    for (int k = 0; k < draws; ++k) {
      const auto s = derive_seed(seed, 0, static_cast<std::uint64_t>(k));
      consider(draw_mask(dm, n, s), s, {}, {});
    }
  } else if (family == BaselineFamily::Lustig) {
    for (double r : grid.r) {
      for (double d : grid.d) {
        ++point;
        const LustigParams lp{r, d};
        try {
          const auto dm = lustig_density(spec, lp);
          for (int k = 0; k < draws; ++k) {
            const auto s = derive_seed(seed, point, static_cast<std::uint64_t>(k));
            consider(draw_mask(dm, n, s), s, lp, {});
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Infeasible) throw;
          last_error = e.what();
        }
      }
    }
  } else {
    for (double r : grid.r) {
      for (double a : grid.a) {
        ++point;
        RomanParams rp{r, grid.levels, a, 1.0};
        try {
          const auto lv = roman_levels(spec, rp, n);
          rp.b = lv.b;
          for (int k = 0; k < draws; ++k) {
            const auto s = derive_seed(seed, point, static_cast<std::uint64_t>(k));
            consider(draw_mask(lv, n, s), s, {}, rp);
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Infeasible) throw;
          last_error = e.what();
        }
      }
    }
  }
  if (!have) throw Error(ErrorCode::Infeasible, "no grid point admits the budget: " + last_error);

  std::ostringstream desc;
  desc << to_string(family);
  if (family == BaselineFamily::Lustig) desc << "(r=" << fmt_double(best.lustig.r) << ",d=" << fmt_double(best.lustig.d) << ")";
  if (family == BaselineFamily::Roman)
    desc << "(r=" << fmt_double(best.roman.r) << ",N=" << best.roman.levels << ",a=" << fmt_double(best.roman.a)
         << ",b=" << fmt_double(best.roman.b) << ")";
  desc << ";seed=" << best.draw_seed;
  best.mask.meta().criterion = desc.str();
  best.mask.meta().constraint = "cardinality(n=" + std::to_string(n) + ")";
  best.mask.meta().transform = to_string(spec);
  return best;
}

TunedBaseline tune_baseline(BaselineFamily family, const BaselineGrid& grid, const TrainingSet& train,
                            const TransformSpec& spec, Index n, int draws, std::uint64_t seed,
                            std::size_t score_signals) {
  return tune_baseline(family, grid, energy_table(spec, train), spec, n, draws, seed, score_signals);
}

Eigen::VectorXd adaptive_nterm(const TransformSpec& spec, const Signal& x, Index n, double* discarded_imag_norm) {
  if (n < 0 || n > spec.p) throw Error(ErrorCode::BadBudget, "need 0 <= n <= p");
  Coefficients c = forward(spec, x);
  const Eigen::VectorXd mag = c.cwiseAbs2();
  std::vector<Index> order(static_cast<std::size_t>(spec.p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return mag(a) > mag(b); });
  for (std::size_t k = static_cast<std::size_t>(n); k < order.size(); ++k) c(order[k]) = 0.0;
  return adjoint(spec, c, discarded_imag_norm);
}

}  // namespace subsample
