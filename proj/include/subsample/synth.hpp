// Synthetic signal ensembles with known compressibility.
//
// powerlaw-dct: DCT-II coefficients c_i = sigma_i g_i with sigma_i = (1 + rho_i)^-decay,
//   g_i standard normal, rho_i the coefficient index (1D) or radial index (2D).
// twocluster-hadamard: Hadamard coefficients concentrated on the low band [0, p/16)
//   and one mid band of width p/16 starting at a random offset in [p/8, p/2);
//   a per-signal fraction u ~ U(0.3, 0.7) of the energy sits in the low band.
// Every signal is unit-normalized.
#ifndef SUBSAMPLE_SYNTH_HPP
#define SUBSAMPLE_SYNTH_HPP

#include "subsample/io.hpp"
#include "subsample/transforms.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace subsample {

enum class Ensemble { PowerLawDct, TwoClusterHadamard };

const char* to_string(Ensemble e);
Ensemble parse_ensemble(const std::string& name);

/// Standard normal via Box-Muller on raw 64-bit draws (platform independent).
class Gaussian {
 public:
  double operator()(std::mt19937_64& rng);

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Uniform in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

RawSignals synth_powerlaw_dct(Index p, Index m, std::uint64_t seed, double decay = 1.2,
                              std::optional<Dims2> dims = std::nullopt);
RawSignals synth_two_cluster_hadamard(Index p, Index m, std::uint64_t seed);
RawSignals synth(Ensemble e, Index p, Index m, std::uint64_t seed);

/// Transform the ensemble is sparse in.
TransformSpec native_transform(Ensemble e, Index p);

}  // namespace subsample

#endif  // SUBSAMPLE_SYNTH_HPP
