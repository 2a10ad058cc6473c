// Randomized variable-density subsampling baselines and the image-adaptive
// n-term approximation.
//
// Lustig-style density: indices within normalized radius r of the spectrum
// center are always sampled; the rest are drawn with weight (1 - t)^d, where t
// is the distance to the center divided by the largest distance.
//
// Roman-style multi-level density: the region outside r is split into N annuli
// of equal radial width; level k (0-based) is sampled uniformly with density
// exp(-a ((k + 1/2) / N)^b), where b is found by bisection so that exactly n
// indices are used in total.
#ifndef SUBSAMPLE_BASELINES_HPP
#define SUBSAMPLE_BASELINES_HPP

#include "subsample/core.hpp"
#include "subsample/criteria.hpp"
#include "subsample/transforms.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace subsample {

struct DensityMap {
  Eigen::VectorXd w;
  std::vector<Index> fully_sampled;
};

struct LustigParams {
  double r = 0.0;  // [0, 0.5]
  double d = 0.0;  // >= 0
};

struct RomanParams {
  double r = 0.0;   // [0, 0.5]
  int levels = 100; // N
  double a = 1.0;   // > 0
  double b = 1.0;   // output of roman_levels
};

struct RomanLevels {
  std::vector<std::vector<Index>> members;  // indices of each annulus
  std::vector<Index> quotas;
  std::vector<Index> fully_sampled;
  double b = 1.0;      // exponent found by the search
  double scale = 1.0;  // < 1 only when no b reaches n (small a)
};

/// Normalized distance t in [0, 1] of every index to the spectrum center:
/// the fft-shifted DC for the DFT, index 0 / the (0,0) corner otherwise.
Eigen::VectorXd spectral_distance(const TransformSpec& spec);

DensityMap lustig_density(const TransformSpec& spec, const LustigParams& params);

/// Throws Infeasible when n is smaller than the fully sampled region.
RomanLevels roman_levels(const TransformSpec& spec, const RomanParams& params, Index n);

/// All fully sampled indices plus weighted sampling without replacement
/// (Efraimidis-Spirakis keys). Deterministic in `seed`.
IndexSet draw_mask(const DensityMap& dm, Index n, std::uint64_t seed);

/// Fully sampled indices plus `quotas[k]` uniform picks from each level.
IndexSet draw_mask(const RomanLevels& levels, Index n, std::uint64_t seed);

IndexSet uniform_random_mask(Index p, Index n, std::uint64_t seed);

enum class BaselineFamily { Lustig, Roman, Uniform };

const char* to_string(BaselineFamily f);
BaselineFamily parse_baseline_family(const std::string& name);

struct BaselineGrid {
  std::vector<double> r;
  std::vector<double> d;  // Lustig
  std::vector<double> a;  // Roman
  int levels = 100;       // Roman N

  /// r in {0, 0.025, ..., 0.5}, d in {0, 0.25, ..., 10}, a in {0.05, 0.1, ..., 8, 9, ..., 25}.
  static BaselineGrid defaults();
};

struct TunedBaseline {
  BaselineFamily family = BaselineFamily::Uniform;
  LustigParams lustig;
  RomanParams roman;
  IndexSet mask;
  double train_score = 0.0;  // mean captured energy on the scoring subsample
  std::uint64_t draw_seed = 0;
};

/// Derived per-(grid point, draw) seed; stable for a given binary.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Sweeps the grid, draws `draws` masks per point and keeps the one with the
/// highest mean captured energy on a fixed random subsample of at most
/// `score_signals` rows of `train`.
TunedBaseline tune_baseline(BaselineFamily family, const BaselineGrid& grid, const EnergyTable& train,
                            const TransformSpec& spec, Index n, int draws, std::uint64_t seed,
                            std::size_t score_signals = 100);

TunedBaseline tune_baseline(BaselineFamily family, const BaselineGrid& grid, const TrainingSet& train,
                            const TransformSpec& spec, Index n, int draws, std::uint64_t seed,
                            std::size_t score_signals = 100);

/// Keeps the n largest-magnitude coefficients of x (smaller index on ties) and
/// synthesizes (real part; see adjoint). Throws BadBudget unless 0 <= n <= p.
Eigen::VectorXd adaptive_nterm(const TransformSpec& spec, const Signal& x, Index n,
                               double* discarded_imag_norm = nullptr);

}  // namespace subsample

#endif  // SUBSAMPLE_BASELINES_HPP
