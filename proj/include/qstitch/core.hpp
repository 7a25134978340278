// Copyright 2026 The qstitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qstitch {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cxd cxi{0.0, 1.0};

/*******************************************************************************
 * ERRORS
 ******************************************************************************/

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Mismatched matrix/site dimensions or out-of-range windows.
struct DimensionError : Error {
  using Error::Error;
};
/// Invalid or inconsistent configuration values.
struct ConfigError : Error {
  using Error::Error;
};
/// Numerical failure (degenerate estimate, invalid state, non-convergence).
struct NumericalError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DimensionError(what);
}

/*******************************************************************************
 * DENSE LINEAR ALGEBRA HELPERS
 ******************************************************************************/

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat kron(const std::vector<Mat>& factors) {
  require(!factors.empty(), "kron: empty factor list");
  Mat out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

/// Total dimension of a chain with the given per-site local dimensions.
inline Eigen::Index total_dim(const std::vector<int>& dims) {
  Eigen::Index d = 1;
  for (int x : dims) d *= x;
  return d;
}

/// Embeds `op` (acting on `positions`, in that order) into a chain of sites
/// with local dimensions `dims`; identity elsewhere. Site 0 is the most
/// significant tensor factor.
inline Mat embed(const Mat& op, const std::vector<int>& positions,
                 const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  Eigen::Index op_dim = 1;
  for (int p : positions) {
    require(p >= 0 && p < n, "embed: position out of range");
    op_dim *= dims[p];
  }
  require(op.rows() == op_dim && op.cols() == op_dim,
          "embed: operator dimension does not match positions");
  const Eigen::Index dim = total_dim(dims);

  // Strides of each site index in the full (site-major) flattening.
  std::vector<Eigen::Index> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  // Strides of the positions inside the operator's own flattening.
  const int k = static_cast<int>(positions.size());
  std::vector<Eigen::Index> op_stride(k, 1);
  for (int s = k - 2; s >= 0; --s)
    op_stride[s] = op_stride[s + 1] * dims[positions[s + 1]];

  std::vector<bool> on(n, false);
  for (int p : positions) on[p] = true;
  Eigen::Index rest_dim = 1;
  for (int s = 0; s < n; ++s)
    if (!on[s]) rest_dim *= dims[s];

  // Enumerate the identity-factor configurations once and scatter op blocks.
  Mat out = Mat::Zero(dim, dim);
  std::vector<int> rest_sites;
  for (int s = 0; s < n; ++s)
    if (!on[s]) rest_sites.push_back(s);

  for (Eigen::Index r = 0; r < rest_dim; ++r) {
    Eigen::Index base = 0;
    Eigen::Index tmp = r;
    for (int s = static_cast<int>(rest_sites.size()) - 1; s >= 0; --s) {
      const int site = rest_sites[s];
      base += (tmp % dims[site]) * stride[site];
      tmp /= dims[site];
    }
    for (Eigen::Index i = 0; i < op_dim; ++i) {
      Eigen::Index row = base;
      Eigen::Index ti = i;
      for (int s = k - 1; s >= 0; --s) {
        row += (ti % dims[positions[s]]) * stride[positions[s]];
        ti /= dims[positions[s]];
      }
      for (Eigen::Index j = 0; j < op_dim; ++j) {
        const cxd v = op(i, j);
        if (v == cxd{0.0, 0.0}) continue;
        Eigen::Index col = base;
        Eigen::Index tj = j;
        for (int s = k - 1; s >= 0; --s) {
          col += (tj % dims[positions[s]]) * stride[positions[s]];
          tj /= dims[positions[s]];
        }
        out(row, col) += v;
      }
    }
  }
  return out;
}

/// Partial trace keeping the sites in `keep` (ascending), over a chain with
/// per-site dimensions `dims`.
inline Mat partial_trace(const Mat& rho, const std::vector<int>& keep,
                         const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  require(rho.rows() == rho.cols(), "partial_trace: non-square input");
  require(rho.rows() == total_dim(dims), "partial_trace: dimension mismatch");
  for (std::size_t i = 1; i < keep.size(); ++i)
    require(keep[i - 1] < keep[i], "partial_trace: keep must be ascending");

  std::vector<bool> kept(n, false);
  for (int s : keep) {
    require(s >= 0 && s < n, "partial_trace: site out of range");
    kept[s] = true;
  }

  std::vector<Eigen::Index> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  Eigen::Index keep_dim = 1;
  for (int s : keep) keep_dim *= dims[s];
  Eigen::Index rest_dim = rho.rows() / keep_dim;

  std::vector<int> rest_sites;
  for (int s = 0; s < n; ++s)
    if (!kept[s]) rest_sites.push_back(s);

  auto offset = [&](const std::vector<int>& sites, Eigen::Index flat) {
    Eigen::Index off = 0;
    for (int s = static_cast<int>(sites.size()) - 1; s >= 0; --s) {
      off += (flat % dims[sites[s]]) * stride[sites[s]];
      flat /= dims[sites[s]];
    }
    return off;
  };

  Mat out = Mat::Zero(keep_dim, keep_dim);
  for (Eigen::Index r = 0; r < rest_dim; ++r) {
    const Eigen::Index base = offset(rest_sites, r);
    for (Eigen::Index i = 0; i < keep_dim; ++i) {
      const Eigen::Index row = base + offset(keep, i);
      for (Eigen::Index j = 0; j < keep_dim; ++j)
        out(i, j) += rho(row, base + offset(keep, j));
    }
  }
  return out;
}

/// Reorders the tensor factors of `rho`: factor `s` of the output is factor
/// `perm[s]` of the input. `dims` are the input per-site dimensions.
inline Mat permute_sites(const Mat& rho, const std::vector<int>& perm,
                         const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  require(static_cast<int>(perm.size()) == n, "permute_sites: size mismatch");
  std::vector<Eigen::Index> in_stride(n, 1);
  for (int s = n - 2; s >= 0; --s) in_stride[s] = in_stride[s + 1] * dims[s + 1];
  std::vector<int> out_dims(n);
  for (int s = 0; s < n; ++s) out_dims[s] = dims[perm[s]];

  const Eigen::Index dim = total_dim(dims);
  require(rho.rows() == dim && rho.cols() == dim, "permute_sites: dim mismatch");

  std::vector<Eigen::Index> map(dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    // Decompose the output index and reassemble in the input layout.
    Eigen::Index rem = idx, in_idx = 0;
    for (int s = n - 1; s >= 0; --s) {
      in_idx += (rem % out_dims[s]) * in_stride[perm[s]];
      rem /= out_dims[s];
    }
    map[idx] = in_idx;
  }
  Mat out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) out(i, j) = rho(map[i], map[j]);
  return out;
}

/// Vector version of permute_sites.
inline Vec permute_sites(const Vec& v, const std::vector<int>& perm,
                         const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  require(static_cast<int>(perm.size()) == n, "permute_sites: size mismatch");
  std::vector<Eigen::Index> in_stride(n, 1);
  for (int s = n - 2; s >= 0; --s) in_stride[s] = in_stride[s + 1] * dims[s + 1];
  std::vector<int> out_dims(n);
  for (int s = 0; s < n; ++s) out_dims[s] = dims[perm[s]];
  const Eigen::Index dim = total_dim(dims);
  require(v.size() == dim, "permute_sites: dim mismatch");
  Vec out(dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index rem = idx, in_idx = 0;
    for (int s = n - 1; s >= 0; --s) {
      in_idx += (rem % out_dims[s]) * in_stride[perm[s]];
      rem /= out_dims[s];
    }
    out(idx) = v(in_idx);
  }
  return out;
}

/*******************************************************************************
 * DETERMINISTIC RNG STREAMS
 *
 * Counter-based streams keyed on (seed, index) so that shot-level work is
 * order-independent and reproducible across platforms. std:: distributions
 * are avoided on purpose: their output is implementation-defined.
 ******************************************************************************/

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {
    // Warm up so that small consecutive seeds decorrelate.
    splitmix64(state_);
    splitmix64(state_);
  }

  static RngStream for_index(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    return RngStream(a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), multiply-shift with bias rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        m = static_cast<__uint128_t>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  cxd gaussian_cxd() { return {gaussian(), gaussian()}; }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Random Hermitian matrix with iid standard complex Gaussian entries above
/// the diagonal (GUE-like scaling is not needed; callers normalize).
inline Mat random_hermitian(Eigen::Index dim, RngStream& rng) {
  Mat a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = rng.gaussian_cxd();
  return hermitize(a);
}

/// Random density matrix from a Wishart factor with `rank` columns.
inline Mat random_density(Eigen::Index dim, RngStream& rng, Eigen::Index rank = 0) {
  if (rank <= 0) rank = dim;
  Mat g(dim, rank);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) g(i, j) = rng.gaussian_cxd();
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

/// Haar-ish random unitary from the QR of a Gaussian matrix.
inline Mat random_unitary(Eigen::Index dim, RngStream& rng) {
  Mat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.gaussian_cxd();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    cxd d = r(k, k);
    q.col(k) *= (std::abs(d) > 0 ? d / std::abs(d) : cxd{1.0, 0.0});
  }
  return q;
}

/*******************************************************************************
 * SMALL NUMERIC UTILITIES
 ******************************************************************************/

inline double median(std::vector<double> v) {
  if (v.empty()) throw NumericalError("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Linear-interpolation quantile, q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw NumericalError("quantile of empty set");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline std::vector<double> logspace(double lo, double hi, int count) {
  require(count >= 1 && lo > 0 && hi > 0, "logspace: bad arguments");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double la = std::log10(lo), lb = std::log10(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::pow(10.0, la + (lb - la) * i / (count - 1));
  return out;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_slope: bad input");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace qstitch
