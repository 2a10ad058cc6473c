// Orthonormal analysis/synthesis operators (Hadamard, DCT-II, DFT, Daubechies-4)
// with fast 1D kernels, separable 2D application and the per-signal energy table.
#ifndef SUBSAMPLE_TRANSFORMS_HPP
#define SUBSAMPLE_TRANSFORMS_HPP

#include "subsample/core.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

namespace subsample {

enum class TransformKind { Hadamard, DCT2, DFT, Daub4, Identity };

const char* to_string(TransformKind kind);
TransformKind parse_transform_kind(const std::string& name);

/// Complex-valued coefficient vector; real transforms leave the imaginary part zero.
using Coefficients = Eigen::VectorXcd;

struct TransformSpec {
  TransformKind kind = TransformKind::DCT2;
  Index p = 0;
  std::optional<Dims2> dims2;  // set for separable 2D transforms
  int levels = 0;              // wavelet only; 0 selects the default

  static TransformSpec make_1d(TransformKind kind, Index p, int levels = 0);
  static TransformSpec make_2d(TransformKind kind, Index rows, Index cols, int levels = 0);

  bool is_2d() const { return dims2.has_value(); }
  bool is_real() const { return kind != TransformKind::DFT; }
  /// Wavelet levels after applying the default rule.
  int effective_levels() const;

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

/// Throws DimensionMismatch when the spec's shape constraints are violated.
void validate(const TransformSpec& spec);

/// e.g. "dct2:256", "daub4:64x64:L4".
std::string to_string(const TransformSpec& spec);
TransformSpec parse_transform_spec(const std::string& text);

Coefficients forward(const TransformSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);
Coefficients forward(const TransformSpec& spec, const Signal& s);

Eigen::VectorXcd adjoint_complex(const TransformSpec& spec, const Coefficients& c);

/// Real part of the adjoint. For the DFT the discarded imaginary norm is
/// written to `discarded_imag_norm` when given.
Eigen::VectorXd adjoint(const TransformSpec& spec, const Coefficients& c,
                        double* discarded_imag_norm = nullptr);

/// e(j, i) = |<psi_i, x_j>|^2, one row per signal.
struct EnergyTable {
  Eigen::MatrixXd e;

  Index rows() const { return e.rows(); }  // m
  Index cols() const { return e.cols(); }  // p
};

EnergyTable energy_table(const TransformSpec& spec, const TrainingSet& ts);
EnergyTable energy_table_from_matrix(Eigen::MatrixXd e);

/// Parent map of the wavelet coefficient tree (parent[root] == -1, root == 0).
std::vector<Index> wavelet_parents(const TransformSpec& spec);
RootedConnectedTree wavelet_tree(const TransformSpec& spec, Index n);

namespace kernels {

/// In-place orthonormal Walsh-Hadamard transform, natural (Sylvester) ordering.
/// Self-inverse. Size must be a power of two.
template <typename Derived>
void fwht(Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Index p = v.size();
  for (Index h = 1; h < p; h *= 2) {
    for (Index i = 0; i < p; i += 2 * h) {
      for (Index j = i; j < i + h; ++j) {
        const Scalar a = v(j);
        const Scalar b = v(j + h);
        v(j) = a + b;
        v(j + h) = a - b;
      }
    }
  }
  v *= 1.0 / std::sqrt(static_cast<double>(p));
}

inline constexpr std::array<double, 4> daub4_lowpass() {
  // (1+sqrt3, 3+sqrt3, 3-sqrt3, 1-sqrt3) / (4 sqrt2)
  constexpr double s3 = 1.7320508075688772935;
  constexpr double d = 5.6568542494923801952;
  return {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
}

inline constexpr std::array<double, 4> daub4_highpass() {
  constexpr auto h = daub4_lowpass();
  return {h[3], -h[2], h[1], -h[0]};
}

/// One periodic Daubechies-4 analysis step on the first `len` entries:
/// output is [approximation | detail].
template <typename Scalar>
void daub4_step(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, Index len,
                Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& scratch) {
  constexpr auto h = daub4_lowpass();
  constexpr auto g = daub4_highpass();
  const Index half = len / 2;
  scratch.resize(len);
  for (Index k = 0; k < half; ++k) {
    Scalar a(0), d(0);
    for (int i = 0; i < 4; ++i) {
      const Scalar x = v((2 * k + i) % len);
      a += h[static_cast<std::size_t>(i)] * x;
      d += g[static_cast<std::size_t>(i)] * x;
    }
    scratch(k) = a;
    scratch(half + k) = d;
  }
  v.head(len) = scratch;
}

/// Inverse of daub4_step (the transpose, since the step is orthonormal).
template <typename Scalar>
void daub4_inverse_step(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, Index len,
                        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& scratch) {
  constexpr auto h = daub4_lowpass();
  constexpr auto g = daub4_highpass();
  const Index half = len / 2;
  scratch.setZero(len);
  for (Index k = 0; k < half; ++k) {
    const Scalar a = v(k);
    const Scalar d = v(half + k);
    for (int i = 0; i < 4; ++i)
      scratch((2 * k + i) % len) += h[static_cast<std::size_t>(i)] * a + g[static_cast<std::size_t>(i)] * d;
  }
  v.head(len) = scratch;
}

}  // namespace kernels

}  // namespace subsample

#endif  // SUBSAMPLE_TRANSFORMS_HPP
