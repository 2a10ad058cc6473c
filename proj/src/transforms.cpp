#include "subsample/transforms.hpp"

#include "subsample/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <numbers>
#include <sstream>
#include <vector>

namespace subsample {

namespace {

using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMapC =
    Eigen::Map<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

bool is_pow2(Index v) { return v > 0 && (v & (v - 1)) == 0; }

int floor_log2(Index v) {
  int l = 0;
  while ((Index{1} << (l + 1)) <= v) ++l;
  return l;
}

bool wavelet_levels_ok(Index len, int levels) {
  if (levels < 1) return false;
  const Index block = Index{1} << levels;
  return len % block == 0 && len >= 4 * (block / 2);
}

int clamp_levels(Index len, int wanted) {
  int l = wanted;
  while (l > 1 && !wavelet_levels_ok(len, l)) --l;
  return l;
}

// ---- 1D kernels -------------------------------------------------------------

void dft_inplace(Eigen::VectorXcd& v, bool inverse) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::complex<double>> in(v.data(), v.data() + n), out;
  Eigen::FFT<double> fft;
  const double s = std::sqrt(static_cast<double>(n));
  if (!inverse) {
    fft.fwd(out, in);
    for (std::size_t k = 0; k < n; ++k) v(static_cast<Index>(k)) = out[k] / s;
  } else {
    fft.inv(out, in);  // includes 1/n
    for (std::size_t k = 0; k < n; ++k) v(static_cast<Index>(k)) = out[k] * s;
  }
}

// Orthonormal DCT-II through one length-N complex FFT of the even/odd reordered input.
void dct2_inplace(Eigen::VectorXd& x) {
  const Index n = x.size();
  std::vector<std::complex<double>> v(static_cast<std::size_t>(n)), spec;
  for (Index k = 0; 2 * k < n; ++k) v[static_cast<std::size_t>(k)] = x(2 * k);
  for (Index k = 0; 2 * k + 1 < n; ++k) v[static_cast<std::size_t>(n - 1 - k)] = x(2 * k + 1);
  Eigen::FFT<double> fft;
  fft.fwd(spec, v);
  const double a0 = std::sqrt(1.0 / static_cast<double>(n));
  const double ak = std::sqrt(2.0 / static_cast<double>(n));
  for (Index k = 0; k < n; ++k) {
    const double theta = -std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
    const double y = (spec[static_cast<std::size_t>(k)] * std::polar(1.0, theta)).real();
    x(k) = y * (k == 0 ? a0 : ak);
  }
}

void idct2_inplace(Eigen::VectorXd& c) {
  const Index n = c.size();
  const double a0 = std::sqrt(1.0 / static_cast<double>(n));
  const double ak = std::sqrt(2.0 / static_cast<double>(n));
  Eigen::VectorXd y(n + 1);
  for (Index k = 0; k < n; ++k) y(k) = c(k) / (k == 0 ? a0 : ak);
  y(n) = 0.0;
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n)), v;
  for (Index k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
    spec[static_cast<std::size_t>(k)] = std::polar(1.0, theta) * std::complex<double>(y(k), -y(n - k));
  }
  Eigen::FFT<double> fft;
  fft.inv(v, spec);
  for (Index k = 0; 2 * k < n; ++k) c(2 * k) = v[static_cast<std::size_t>(k)].real();
  for (Index k = 0; 2 * k + 1 < n; ++k) c(2 * k + 1) = v[static_cast<std::size_t>(n - 1 - k)].real();
}

void daub4_1d(Eigen::VectorXd& v, int levels, bool inverse) {
  Eigen::VectorXd scratch;
  if (!inverse) {
    for (int l = 0; l < levels; ++l) kernels::daub4_step(v, v.size() >> l, scratch);
  } else {
    for (int l = levels - 1; l >= 0; --l) kernels::daub4_inverse_step(v, v.size() >> l, scratch);
  }
}

void real_1d(TransformKind kind, Eigen::VectorXd& v, bool inverse) {
  switch (kind) {
    case TransformKind::Hadamard: kernels::fwht(v); break;
    case TransformKind::DCT2: inverse ? idct2_inplace(v) : dct2_inplace(v); break;
    case TransformKind::Identity: break;
    default: throw Error(ErrorCode::DomainError, "not a separable real 1D kernel");
  }
}

// ---- dimension dispatch ------------------------------------------------------

template <typename Map, typename Vec, typename Fn>
void each_row_then_col(Map& mat, Index rows, Index cols, Vec& buf, Fn&& fn) {
  buf.resize(cols);
  for (Index r = 0; r < rows; ++r) {
    buf = mat.row(r).head(cols).transpose();
    fn(buf);
    mat.row(r).head(cols) = buf.transpose();
  }
  buf.resize(rows);
  for (Index c = 0; c < cols; ++c) {
    buf = mat.col(c).head(rows);
    fn(buf);
    mat.col(c).head(rows) = buf;
  }
}

template <typename Map, typename Vec, typename Fn>
void each_col_then_row(Map& mat, Index rows, Index cols, Vec& buf, Fn&& fn) {
  buf.resize(rows);
  for (Index c = 0; c < cols; ++c) {
    buf = mat.col(c).head(rows);
    fn(buf);
    mat.col(c).head(rows) = buf;
  }
  buf.resize(cols);
  for (Index r = 0; r < rows; ++r) {
    buf = mat.row(r).head(cols).transpose();
    fn(buf);
    mat.row(r).head(cols) = buf.transpose();
  }
}

void apply_real(const TransformSpec& spec, Eigen::VectorXd& v, bool inverse) {
  const int levels = spec.effective_levels();
  if (!spec.is_2d()) {
    if (spec.kind == TransformKind::Daub4)
      daub4_1d(v, levels, inverse);
    else
      real_1d(spec.kind, v, inverse);
    return;
  }
  const Index R = spec.dims2->rows, C = spec.dims2->cols;
  RowMajorMap mat(v.data(), R, C);
  Eigen::VectorXd buf, scratch;
  if (spec.kind != TransformKind::Daub4) {
    each_row_then_col(mat, R, C, buf, [&](Eigen::VectorXd& b) { real_1d(spec.kind, b, inverse); });
    return;
  }
  // Mallat decomposition: one step on rows and columns of the shrinking approximation block.
  if (!inverse) {
    for (int l = 0; l < levels; ++l) {
      each_row_then_col(mat, R >> l, C >> l, buf,
                        [&](Eigen::VectorXd& b) { kernels::daub4_step(b, b.size(), scratch); });
    }
  } else {
    for (int l = levels - 1; l >= 0; --l) {
      each_col_then_row(mat, R >> l, C >> l, buf,
                        [&](Eigen::VectorXd& b) { kernels::daub4_inverse_step(b, b.size(), scratch); });
    }
  }
}

void apply_dft(const TransformSpec& spec, Eigen::VectorXcd& v, bool inverse) {
  if (!spec.is_2d()) {
    dft_inplace(v, inverse);
    return;
  }
  const Index R = spec.dims2->rows, C = spec.dims2->cols;
  RowMajorMapC mat(v.data(), R, C);
  Eigen::VectorXcd buf;
  each_row_then_col(mat, R, C, buf, [&](Eigen::VectorXcd& b) { dft_inplace(b, inverse); });
}

void check_size(const TransformSpec& spec, Index n) {
  if (n != spec.p)
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(n) + " does not match transform size " + std::to_string(spec.p));
}

}  // namespace

const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Hadamard: return "hadamard";
    case TransformKind::DCT2: return "dct2";
    case TransformKind::DFT: return "dft";
    case TransformKind::Daub4: return "daub4";
    case TransformKind::Identity: return "identity";
  }
  return "?";
}

TransformKind parse_transform_kind(const std::string& name) {
  if (name == "hadamard") return TransformKind::Hadamard;
  if (name == "dct2" || name == "dct") return TransformKind::DCT2;
  if (name == "dft" || name == "fourier") return TransformKind::DFT;
  if (name == "daub4" || name == "wavelet") return TransformKind::Daub4;
  if (name == "identity") return TransformKind::Identity;
  throw Error(ErrorCode::ParseError, "unknown transform '" + name + "'");
}

TransformSpec TransformSpec::make_1d(TransformKind kind, Index p, int levels) {
  TransformSpec s;
  s.kind = kind;
  s.p = p;
  s.levels = levels;
  validate(s);
  return s;
}

TransformSpec TransformSpec::make_2d(TransformKind kind, Index rows, Index cols, int levels) {
  TransformSpec s;
  s.kind = kind;
  s.p = rows * cols;
  s.dims2 = Dims2{rows, cols};
  s.levels = levels;
  validate(s);
  return s;
}

int TransformSpec::effective_levels() const {
  if (kind != TransformKind::Daub4) return 0;
  if (levels > 0) return levels;
  if (!is_2d()) return clamp_levels(p, std::max(1, floor_log2(p) - 2));
  return std::min(clamp_levels(dims2->rows, 4), clamp_levels(dims2->cols, 4));
}

void validate(const TransformSpec& spec) {
  auto bad = [&](const std::string& why) { throw Error(ErrorCode::DimensionMismatch, to_string(spec.kind) + std::string(": ") + why); };
  if (spec.p < 1) bad("size must be >= 1");
  std::vector<Index> lens;
  if (spec.is_2d()) {
    if (spec.dims2->rows < 1 || spec.dims2->cols < 1 || spec.dims2->rows * spec.dims2->cols != spec.p)
      bad("rows*cols must equal p");
    lens = {spec.dims2->rows, spec.dims2->cols};
  } else {
    lens = {spec.p};
  }
  for (Index len : lens) {
    if (spec.kind == TransformKind::Hadamard && !is_pow2(len)) bad("each dimension must be a power of two");
    if (spec.kind == TransformKind::Daub4) {
      const int l = spec.effective_levels();
      if (!wavelet_levels_ok(len, l))
        bad("each dimension must be divisible by 2^levels and >= 4*2^(levels-1) (levels=" + std::to_string(l) + ")");
    }
  }
}

std::string to_string(const TransformSpec& spec) {
  std::ostringstream os;
  os << to_string(spec.kind) << ':';
  if (spec.is_2d())
    os << spec.dims2->rows << 'x' << spec.dims2->cols;
  else
    os << spec.p;
  if (spec.kind == TransformKind::Daub4) os << ":L" << spec.effective_levels();
  return os.str();
}

TransformSpec parse_transform_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorCode::ParseError, "transform spec '" + text + "'");
  const auto kind = parse_transform_kind(parts[0]);
  int levels = 0;
  try {
    if (parts.size() == 3) {
      if (parts[2].empty() || parts[2][0] != 'L') throw Error(ErrorCode::ParseError, "levels must look like L4");
      levels = std::stoi(parts[2].substr(1));
    }
    const auto x = parts[1].find('x');
    if (x == std::string::npos) return TransformSpec::make_1d(kind, std::stoll(parts[1]), levels);
    return TransformSpec::make_2d(kind, std::stoll(parts[1].substr(0, x)), std::stoll(parts[1].substr(x + 1)), levels);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "transform spec '" + text + "'");
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::ParseError, "transform spec '" + text + "'");
  }
}

Coefficients forward(const TransformSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_size(spec, x.size());
  if (spec.is_real()) {
    Eigen::VectorXd v = x;
    apply_real(spec, v, false);
    return v.cast<std::complex<double>>();
  }
  Eigen::VectorXcd v = x.cast<std::complex<double>>();
  apply_dft(spec, v, false);
  return v;
}

Coefficients forward(const TransformSpec& spec, const Signal& s) { return forward(spec, s.values()); }

Eigen::VectorXcd adjoint_complex(const TransformSpec& spec, const Coefficients& c) {
  check_size(spec, c.size());
  if (!spec.is_real()) {
    Eigen::VectorXcd v = c;
    apply_dft(spec, v, true);
    return v;
  }
  Eigen::VectorXd re = c.real(), im = c.imag();
  apply_real(spec, re, true);
  if (!im.isZero(0.0)) apply_real(spec, im, true);
  Eigen::VectorXcd out(c.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

Eigen::VectorXd adjoint(const TransformSpec& spec, const Coefficients& c, double* discarded_imag_norm) {
  check_size(spec, c.size());
  if (spec.is_real()) {
    Eigen::VectorXd re = c.real();
    apply_real(spec, re, true);
    if (discarded_imag_norm) {
      Eigen::VectorXd im = c.imag();
      apply_real(spec, im, true);
      *discarded_imag_norm = im.norm();
    }
    return re;
  }
  const Eigen::VectorXcd v = adjoint_complex(spec, c);
  if (discarded_imag_norm) *discarded_imag_norm = v.imag().norm();
  return v.real();
}

EnergyTable energy_table(const TransformSpec& spec, const TrainingSet& ts) {
  check_size(spec, ts.dim());
  EnergyTable et;
  et.e.resize(static_cast<Index>(ts.size()), spec.p);
  parallel_for(ts.size(), [&](std::size_t j) {
    et.e.row(static_cast<Index>(j)) = forward(spec, ts[j]).cwiseAbs2().transpose();
  });
  return et;
}

EnergyTable energy_table_from_matrix(Eigen::MatrixXd e) {
  if (e.rows() < 1 || e.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "energy table must be non-empty");
  if (!e.allFinite() || e.minCoeff() < 0.0) throw Error(ErrorCode::DomainError, "energies must be finite and >= 0");
  return EnergyTable{std::move(e)};
}

std::vector<Index> wavelet_parents(const TransformSpec& spec) {
  if (spec.kind != TransformKind::Daub4) throw Error(ErrorCode::DomainError, "wavelet tree needs a daub4 transform");
  const int L = spec.effective_levels();
  std::vector<Index> parent(static_cast<std::size_t>(spec.p), 0);
  if (!spec.is_2d()) {
    const Index A = spec.p >> L;
    for (Index i = 0; i < spec.p; ++i) {
      Index par;
      if (i < A)
        par = 0;
      else if (i < 2 * A)
        par = i - A;
      else {
        Index band = 2 * A;
        while (2 * band <= i) band *= 2;
        par = band / 2 + (i - band) / 2;
      }
      parent[static_cast<std::size_t>(i)] = par;
    }
  } else {
    const Index R = spec.dims2->rows, C = spec.dims2->cols;
    const Index Ar = R >> L, Ac = C >> L;
    for (Index r = 0; r < R; ++r) {
      for (Index c = 0; c < C; ++c) {
        Index pr, pc;
        if (r < Ar && c < Ac) {
          pr = 0;
          pc = 0;
        } else if (r < 2 * Ar && c < 2 * Ac) {
          pr = r % Ar;
          pc = c % Ac;
        } else {
          pr = r / 2;
          pc = c / 2;
        }
        parent[static_cast<std::size_t>(r * C + c)] = pr * C + pc;
      }
    }
  }
  parent[0] = -1;
  return parent;
}

RootedConnectedTree wavelet_tree(const TransformSpec& spec, Index n) {
  return RootedConnectedTree{wavelet_parents(spec), 0, n};
}

}  // namespace subsample
