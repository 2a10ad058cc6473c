#include "subsample/synth.hpp"

#include <cmath>
#include <numbers>

namespace subsample {

const char* to_string(Ensemble e) {
  switch (e) {
    case Ensemble::PowerLawDct: return "powerlaw-dct";
    case Ensemble::TwoClusterHadamard: return "twocluster-hadamard";
  }
  return "?";
}

Ensemble parse_ensemble(const std::string& name) {
  if (name == "powerlaw-dct" || name == "powerlaw") return Ensemble::PowerLawDct;
  if (name == "twocluster-hadamard" || name == "twocluster") return Ensemble::TwoClusterHadamard;
  throw Error(ErrorCode::ParseError, "unknown ensemble '" + name + "'");
}

double Gaussian::operator()(std::mt19937_64& rng) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

namespace {

Eigen::VectorXd unit(Eigen::VectorXd v) {
  const double n = v.norm();
  return n > 0.0 ? Eigen::VectorXd(v / n) : v;
}

}  // namespace

RawSignals synth_powerlaw_dct(Index p, Index m, std::uint64_t seed, double decay, std::optional<Dims2> dims) {
  if (p < 1 || m < 0) throw Error(ErrorCode::DomainError, "p must be >= 1 and m >= 0");
  if (!(decay >= 0.0)) throw Error(ErrorCode::DomainError, "decay must be >= 0");
  const TransformSpec spec = dims ? TransformSpec::make_2d(TransformKind::DCT2, dims->rows, dims->cols)
                                  : TransformSpec::make_1d(TransformKind::DCT2, p);
  if (spec.p != p) throw Error(ErrorCode::DimensionMismatch, "rows*cols != p");
  Eigen::VectorXd sigma(p);
  for (Index i = 0; i < p; ++i) {
    double rho = static_cast<double>(i);
    if (dims) rho = std::hypot(static_cast<double>(i / dims->cols), static_cast<double>(i % dims->cols));
    sigma(i) = std::pow(1.0 + rho, -decay);
  }
  std::mt19937_64 rng(seed);
  Gaussian g;
  RawSignals out;
  out.dims = dims;
  for (Index j = 0; j < m; ++j) {
    Coefficients c(p);
    for (Index i = 0; i < p; ++i) c(i) = sigma(i) * g(rng);
    out.rows.push_back(unit(adjoint(spec, c)));
  }
  return out;
}

RawSignals synth_two_cluster_hadamard(Index p, Index m, std::uint64_t seed) {
  if (p < 32 || (p & (p - 1)) != 0) throw Error(ErrorCode::DimensionMismatch, "two-cluster ensemble needs p a power of 2, >= 32");
  if (m < 0) throw Error(ErrorCode::DomainError, "m must be >= 0");
  const TransformSpec spec = TransformSpec::make_1d(TransformKind::Hadamard, p);
  const Index w = p / 16;
  std::mt19937_64 rng(seed);
  Gaussian g;
  RawSignals out;
  for (Index j = 0; j < m; ++j) {
    const Index start = p / 8 + static_cast<Index>(uniform01(rng) * static_cast<double>(p / 2 - p / 8 - w + 1));
    const double u = 0.3 + 0.4 * uniform01(rng);
    Eigen::VectorXd low(w), mid(w);
    for (Index i = 0; i < w; ++i) low(i) = g(rng);
    for (Index i = 0; i < w; ++i) mid(i) = g(rng);
    Coefficients c = Coefficients::Zero(p);
    c.segment(0, w) = (std::sqrt(u) * unit(low)).cast<std::complex<double>>();
    c.segment(start, w) = (std::sqrt(1.0 - u) * unit(mid)).cast<std::complex<double>>();
    out.rows.push_back(unit(adjoint(spec, c)));
  }
  return out;
}

RawSignals synth(Ensemble e, Index p, Index m, std::uint64_t seed) {
  return e == Ensemble::PowerLawDct ? synth_powerlaw_dct(p, m, seed) : synth_two_cluster_hadamard(p, m, seed);
}

TransformSpec native_transform(Ensemble e, Index p) {
  return TransformSpec::make_1d(e == Ensemble::PowerLawDct ? TransformKind::DCT2 : TransformKind::Hadamard, p);
}

}  // namespace subsample
