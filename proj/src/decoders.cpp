#include "subsample/decoders.hpp"

#include <cmath>
#include <limits>

namespace subsample {

Measurement measure(const TransformSpec& spec, const IndexSet& omega, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (omega.dim() != spec.p) throw Error(ErrorCode::DimensionMismatch, "mask dimension != transform size");
  const Coefficients c = forward(spec, x);
  Measurement msr{Eigen::VectorXcd(static_cast<Index>(omega.size())), omega, spec};
  for (std::size_t l = 0; l < omega.size(); ++l) msr.b(static_cast<Index>(l)) = c(omega.indices()[l]);
  return msr;
}

Measurement measure(const TransformSpec& spec, const IndexSet& omega, const Signal& x) {
  return measure(spec, omega, x.values());
}

Coefficients zero_fill(const Measurement& msr) {
  if (msr.b.size() != static_cast<Index>(msr.omega.size()))
    throw Error(ErrorCode::DimensionMismatch, "measurement length != mask size");
  Coefficients c = Coefficients::Zero(msr.spec.p);
  for (std::size_t l = 0; l < msr.omega.size(); ++l) c(msr.omega.indices()[l]) = msr.b(static_cast<Index>(l));
  return c;
}

Eigen::VectorXd linear_decode(const Measurement& msr, double* discarded_imag_norm) {
  return adjoint(msr.spec, zero_fill(msr), discarded_imag_norm);
}

namespace {

// Projection of z onto {z : P_omega Psi Phi^* z = b}. The rows of P_omega Psi Phi^*
// are orthonormal, so the projection overwrites the measured coefficients.
Eigen::VectorXd project(const Measurement& msr, const TransformSpec& phi, const Eigen::VectorXd& z) {
  const Eigen::VectorXd x = adjoint(phi, z.cast<std::complex<double>>());
  Coefficients c = forward(msr.spec, x);
  for (std::size_t l = 0; l < msr.omega.size(); ++l) c(msr.omega.indices()[l]) = msr.b(static_cast<Index>(l));
  return forward(phi, adjoint(msr.spec, c)).real();
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double a) { return std::copysign(std::max(std::abs(a) - t, 0.0), a); });
}

double residual(const Measurement& msr, const TransformSpec& phi, const Eigen::VectorXd& z) {
  const Coefficients c = forward(msr.spec, adjoint(phi, z.cast<std::complex<double>>()));
  double s = 0.0;
  for (std::size_t l = 0; l < msr.omega.size(); ++l)
    s += std::norm(c(msr.omega.indices()[l]) - msr.b(static_cast<Index>(l)));
  return std::sqrt(s);
}

}  // namespace

BpResult bp_decode(const Measurement& msr, const BpConfig& cfg) {
  if (!msr.spec.is_real() || !cfg.sparsity.is_real())
    throw Error(ErrorCode::DomainError, "basis pursuit supports real transforms only");
  if (cfg.sparsity.p != msr.spec.p) throw Error(ErrorCode::DimensionMismatch, "sparsity basis size != transform size");
  if (!(cfg.feas_tol > 0.0 && cfg.step_tol > 0.0)) throw Error(ErrorCode::DomainError, "tolerances must be > 0");
  if (msr.b.size() != static_cast<Index>(msr.omega.size()))
    throw Error(ErrorCode::DimensionMismatch, "measurement length != mask size");
  const auto& phi = cfg.sparsity;
  const double n = std::max<double>(1.0, static_cast<double>(msr.b.size()));
  const double gamma = cfg.threshold > 0.0 ? cfg.threshold : msr.b.norm() / std::sqrt(n);

  BpResult out;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(msr.spec.p);
  Eigen::VectorXd z = project(msr, phi, y);
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Eigen::VectorXd step = soft_threshold(2.0 * z - y, gamma) - z;
    y += step;
    z = project(msr, phi, y);
    out.iterations = k + 1;
    if (step.norm() <= cfg.step_tol) {
      out.converged = true;
      break;
    }
  }
  out.z = z;
  out.x = adjoint(phi, z.cast<std::complex<double>>());
  out.residual = residual(msr, phi, z);
  if (out.residual > cfg.feas_tol) out.converged = false;
  return out;
}

double psnr_from_error(double squared_error, Index p, double peak) {
  if (!(peak > 0.0)) throw Error(ErrorCode::DomainError, "peak must be > 0");
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "psnr needs p >= 1");
  const double mse = squared_error / static_cast<double>(p);
  if (mse < 1e-300) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xhat, double peak) {
  if (x.size() != xhat.size()) throw Error(ErrorCode::DimensionMismatch, "psnr inputs differ in length");
  return psnr_from_error((x - xhat).squaredNorm(), x.size(), peak);
}

}  // namespace subsample
