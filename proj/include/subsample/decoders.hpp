// Reconstruction from subsampled coefficients: the linear (zero-fill + adjoint)
// decoder and an equality-constrained l1 (basis pursuit) decoder.
#ifndef SUBSAMPLE_DECODERS_HPP
#define SUBSAMPLE_DECODERS_HPP

#include "subsample/core.hpp"
#include "subsample/transforms.hpp"

namespace subsample {

struct Measurement {
  Eigen::VectorXcd b;  // coefficients on omega, in mask order
  IndexSet omega;
  TransformSpec spec;
};

Measurement measure(const TransformSpec& spec, const IndexSet& omega, const Eigen::Ref<const Eigen::VectorXd>& x);
Measurement measure(const TransformSpec& spec, const IndexSet& omega, const Signal& x);

/// Zero-filled coefficient vector of a measurement.
Coefficients zero_fill(const Measurement& msr);

/// x_hat = Psi^* P_omega^T b (real part). For unit-norm x,
/// ||x - x_hat||^2 + discarded_imag^2 = 1 - ||P_omega Psi x||^2.
Eigen::VectorXd linear_decode(const Measurement& msr, double* discarded_imag_norm = nullptr);

struct BpConfig {
  TransformSpec sparsity;  // Phi, orthonormal
  int max_iters = 2000;
  double feas_tol = 1e-8;
  double step_tol = 1e-9;
  double threshold = 0.0;  // soft-threshold level; 0 picks ||b||_2 / sqrt(n)
};

struct BpResult {
  Eigen::VectorXd x;  // Phi^* z
  Eigen::VectorXd z;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // ||P_omega Psi Phi^* z - b||_2
};

/// Douglas-Rachford splitting for min ||z||_1 s.t. P_omega Psi Phi^* z = b,
/// alternating soft-thresholding with exact projection onto the constraint.
/// Real measurement transforms only (DomainError for the DFT).
BpResult bp_decode(const Measurement& msr, const BpConfig& cfg);

/// 10 log10(peak^2 / MSE); +infinity when MSE < 1e-300. DomainError on peak <= 0.
double psnr_from_error(double squared_error, Index p, double peak);
double psnr(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xhat, double peak);

}  // namespace subsample

#endif  // SUBSAMPLE_DECODERS_HPP
