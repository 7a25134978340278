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

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <json.hpp>

#include "qstitch/choi.hpp"
#include "qstitch/core.hpp"

namespace qstitch {

using RowMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

/// Relative singular-value truncation with an optional hard bond cap
/// (0 = unbounded).
struct TruncationPolicy {
  double relative_threshold = 1e-7;
  int max_bond = 0;

  void check() const {
    require(relative_threshold > 0.0 && relative_threshold < 1.0,
            "TruncationPolicy: relative_threshold outside (0, 1)");
  }
};

/**
 * Rank-4 site tensor of an MPO on the doubled chain, physical dimension 4
 * on both the row (ket) and column (bra) leg. Layout is row-major over
 * (left bond, row, col, right bond).
 */
struct SiteTensor {
  int dl = 1;
  int dr = 1;
  std::vector<cxd> a;

  SiteTensor() = default;
  SiteTensor(int dl_, int dr_) : dl(dl_), dr(dr_), a(static_cast<std::size_t>(dl_) * 16 * dr_) {}

  cxd& at(int l, int r, int c, int t) {
    return a[static_cast<std::size_t>(((l * 4 + r) * 4 + c)) * dr + t];
  }
  cxd at(int l, int r, int c, int t) const {
    return a[static_cast<std::size_t>(((l * 4 + r) * 4 + c)) * dr + t];
  }

  /// (dl*16) x dr view, rows grouped as (l, r, c).
  ConstRowMap left_matrix() const { return ConstRowMap(a.data(), dl * 16, dr); }
  /// dl x (16*dr) view, cols grouped as (r, c, t).
  ConstRowMap right_matrix() const { return ConstRowMap(a.data(), dl, 16 * dr); }

  /// Da x Dr slice at fixed physical (r, c).
  Mat phys_slice(int r, int c) const {
    Mat out(dl, dr);
    for (int l = 0; l < dl; ++l)
      for (int t = 0; t < dr; ++t) out(l, t) = at(l, r, c, t);
    return out;
  }
};

/// Matrix-product operator for a global Choi state on n doubled sites.
struct MpoChoi {
  std::vector<SiteTensor> sites;

  int n() const { return static_cast<int>(sites.size()); }

  std::vector<int> bond_dims() const {
    std::vector<int> out;
    for (int i = 0; i + 1 < n(); ++i) out.push_back(sites[static_cast<std::size_t>(i)].dr);
    return out;
  }

  int max_bond_dim() const {
    int m = 1;
    for (const auto& s : sites) m = std::max(m, std::max(s.dl, s.dr));
    return m;
  }

  void check_shape() const {
    require(!sites.empty(), "MpoChoi: empty");
    require(sites.front().dl == 1 && sites.back().dr == 1,
            "MpoChoi: boundary bonds must have dimension 1");
    for (int i = 0; i + 1 < n(); ++i)
      require(sites[static_cast<std::size_t>(i)].dr == sites[static_cast<std::size_t>(i + 1)].dl,
              "MpoChoi: mismatched bond dimensions");
  }
};

/**
 * A linear map on the operator space of `width` contiguous doubled sites.
 * Conjugation form stores A with X -> A X A^dagger; the general form stores
 * the full superoperator with column-stacked vec index (r + c * 4^width).
 */
struct LocalSuperop {
  enum class Kind { Conjugation, General };
  Kind kind = Kind::Conjugation;
  int first_site = 0;
  int width = 1;
  Mat op;

  static LocalSuperop conjugation(int first_site, int width, Mat a) {
    Eigen::Index d = 1;
    for (int i = 0; i < width; ++i) d *= 4;
    require(a.rows() == d && a.cols() == d, "LocalSuperop: conjugation dim mismatch");
    require(width >= 1 && width <= 3, "LocalSuperop: width outside [1, 3]");
    return LocalSuperop{Kind::Conjugation, first_site, width, std::move(a)};
  }

  static LocalSuperop general(int first_site, int width, Mat s) {
    Eigen::Index d = 1;
    for (int i = 0; i < width; ++i) d *= 16;
    require(s.rows() == d && s.cols() == d, "LocalSuperop: superop dim mismatch");
    require(width >= 1 && width <= 3, "LocalSuperop: width outside [1, 3]");
    return LocalSuperop{Kind::General, first_site, width, std::move(s)};
  }
};

/*******************************************************************************
 * CONSTRUCTION
 ******************************************************************************/

/// Choi state of the identity channel: a product of Bell pairs, bond dim 1.
inline MpoChoi bell_product_mpo(int n) {
  require(n >= 1, "bell_product_mpo: n < 1");
  const Vec phi = bell_vec();
  MpoChoi m;
  m.sites.resize(static_cast<std::size_t>(n));
  for (auto& s : m.sites) {
    s = SiteTensor(1, 1);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) s.at(0, r, c, 0) = phi(r) * std::conj(phi(c));
  }
  return m;
}

/*******************************************************************************
 * TRACE, OVERLAP, PURITY
 ******************************************************************************/

inline cxd mpo_trace(const MpoChoi& m) {
  Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(1);
  for (const auto& s : m.sites) {
    Mat tr = Mat::Zero(s.dl, s.dr);
    for (int r = 0; r < 4; ++r) tr += s.phys_slice(r, r);
    v = v * tr;
  }
  return v(0);
}

/// Tr[J_a J_b] by a two-layer transfer contraction.
inline double overlap(const MpoChoi& a, const MpoChoi& b) {
  require(a.n() == b.n(), "overlap: size mismatch");
  Mat v = Mat::Ones(1, 1);
  for (int i = 0; i < a.n(); ++i) {
    const auto& ta = a.sites[static_cast<std::size_t>(i)];
    const auto& tb = b.sites[static_cast<std::size_t>(i)];
    Mat next = Mat::Zero(ta.dr, tb.dr);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        next += ta.phys_slice(r, c).transpose() * v * tb.phys_slice(c, r);
    v = next;
  }
  return v(0, 0).real();
}

/// Choi state purity Tr[J^2].
inline double purity(const MpoChoi& m) { return overlap(m, m); }

/*******************************************************************************
 * MERGE / SPLIT PRIMITIVES
 ******************************************************************************/

namespace detail {

/// Dense blob of `width` merged sites, row-major over
/// (l, rc_0, rc_1, ..., rc_{width-1}, t) with rc_i = r_i * 4 + c_i.
struct Blob {
  int dl = 1;
  int dr = 1;
  int width = 0;
  std::vector<cxd> a;

  std::size_t phys_size() const {
    std::size_t p = 1;
    for (int i = 0; i < width; ++i) p *= 16;
    return p;
  }
};

inline Blob merge_sites(const MpoChoi& m, int first, int width) {
  require(first >= 0 && width >= 1 && first + width <= m.n(), "merge_sites: range");
  Blob b;
  b.dl = m.sites[static_cast<std::size_t>(first)].dl;
  b.width = 1;
  b.dr = m.sites[static_cast<std::size_t>(first)].dr;
  const auto& s0 = m.sites[static_cast<std::size_t>(first)];
  b.a.assign(s0.a.begin(), s0.a.end());
  for (int k = 1; k < width; ++k) {
    const auto& sk = m.sites[static_cast<std::size_t>(first + k)];
    ConstRowMap lhs(b.a.data(), static_cast<Eigen::Index>(b.a.size()) / b.dr, b.dr);
    RowMat prod = lhs * sk.right_matrix();
    b.a.assign(prod.data(), prod.data() + prod.size());
    b.dr = sk.dr;
    b.width += 1;
  }
  return b;
}

inline int truncated_rank(const RVec& sv, const TruncationPolicy& policy) {
  int rank = 0;
  const double cutoff = sv.size() > 0 ? sv(0) * policy.relative_threshold : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  if (policy.max_bond > 0) rank = std::min(rank, policy.max_bond);
  return std::max(rank, 1);
}

/// Splits a blob back into site tensors by repeated thin SVD, truncating
/// each new bond under the policy.
inline std::vector<SiteTensor> split_blob(Blob b, const TruncationPolicy& policy) {
  std::vector<SiteTensor> out;
  while (b.width > 1) {
    const Eigen::Index rows = static_cast<Eigen::Index>(b.dl) * 16;
    const Eigen::Index cols = static_cast<Eigen::Index>(b.a.size()) / rows;
    ConstRowMap mat(b.a.data(), rows, cols);
    Eigen::BDCSVD<Mat> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int rank = truncated_rank(svd.singularValues(), policy);
    SiteTensor site(b.dl, rank);
    RowMap(site.a.data(), rows, rank) = svd.matrixU().leftCols(rank);
    out.push_back(std::move(site));
    RowMat rest = svd.singularValues().head(rank).asDiagonal() *
                  svd.matrixV().leftCols(rank).adjoint();
    b.a.assign(rest.data(), rest.data() + rest.size());
    b.dl = rank;
    b.width -= 1;
  }
  SiteTensor last(b.dl, b.dr);
  last.a = std::move(b.a);
  out.push_back(std::move(last));
  return out;
}

/// In-place application of the superoperator to the merged physical legs:
/// for every (l, t) pair the 4^w x 4^w operator X is mapped through `op`.
inline void apply_to_blob(Blob& b, const LocalSuperop& op) {
  const int w = b.width;
  Eigen::Index pd = 1;
  for (int i = 0; i < w; ++i) pd *= 4;
  const Eigen::Index vec_dim = pd * pd;
  const std::size_t phys = b.phys_size();
  std::vector<std::size_t> gather(static_cast<std::size_t>(vec_dim));
  // vec index v = R + C * pd -> interleaved physical index (rc_0 ... rc_{w-1}).
  for (Eigen::Index v = 0; v < vec_dim; ++v) {
    Eigen::Index r = v % pd, c = v / pd;
    std::size_t idx = 0;
    for (int s = 0; s < w; ++s) {
      const int shift = 2 * (w - 1 - s);
      const int rs = static_cast<int>((r >> shift) & 3);
      const int cs = static_cast<int>((c >> shift) & 3);
      idx = idx * 16 + static_cast<std::size_t>(rs * 4 + cs);
    }
    gather[static_cast<std::size_t>(v)] = idx;
  }

  Vec x(vec_dim), y(vec_dim);
  Mat xm(pd, pd);
  for (int l = 0; l < b.dl; ++l) {
    for (int t = 0; t < b.dr; ++t) {
      const std::size_t base = (static_cast<std::size_t>(l) * phys) * b.dr + t;
      for (Eigen::Index v = 0; v < vec_dim; ++v)
        x(v) = b.a[base + gather[static_cast<std::size_t>(v)] * b.dr];
      if (op.kind == LocalSuperop::Kind::General) {
        y = op.op * x;
      } else {
        Eigen::Map<Mat>(xm.data(), pd, pd) = Eigen::Map<Mat>(x.data(), pd, pd);
        Mat ym = op.op * xm * op.op.adjoint();
        y = Eigen::Map<Vec>(ym.data(), vec_dim);
      }
      for (Eigen::Index v = 0; v < vec_dim; ++v)
        b.a[base + gather[static_cast<std::size_t>(v)] * b.dr] = y(v);
    }
  }
}

}  // namespace detail

/*******************************************************************************
 * SUPEROP APPLICATION AND COMPRESSION
 ******************************************************************************/

inline MpoChoi apply_superop(const MpoChoi& m, const LocalSuperop& op,
                             const TruncationPolicy& policy) {
  policy.check();
  require(op.first_site >= 0 && op.first_site + op.width <= m.n(),
          "apply_superop: support out of range");
  MpoChoi out = m;
  detail::Blob blob = detail::merge_sites(m, op.first_site, op.width);
  detail::apply_to_blob(blob, op);
  std::vector<SiteTensor> split = detail::split_blob(std::move(blob), policy);
  for (int k = 0; k < op.width; ++k)
    out.sites[static_cast<std::size_t>(op.first_site + k)] = std::move(split[static_cast<std::size_t>(k)]);
  return out;
}

/**
 * Left-canonical QR sweep followed by a right-to-left SVD truncation sweep.
 * Retained singular values at every bond are >= relative_threshold times the
 * largest one there; bonds are capped at max_bond when set.
 */
inline MpoChoi compress(const MpoChoi& m, const TruncationPolicy& policy) {
  policy.check();
  MpoChoi out = m;
  const int n = out.n();
  if (n == 1) return out;

  // Left-to-right QR: makes every tensor but the last a left isometry.
  for (int i = 0; i + 1 < n; ++i) {
    auto& s = out.sites[static_cast<std::size_t>(i)];
    const Eigen::Index rows = static_cast<Eigen::Index>(s.dl) * 16;
    Eigen::HouseholderQR<Mat> qr(Mat(s.left_matrix()));
    const Eigen::Index k = std::min(rows, static_cast<Eigen::Index>(s.dr));
    Mat q = Mat(qr.householderQ()).leftCols(k);
    Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    SiteTensor ns(s.dl, static_cast<int>(k));
    RowMap(ns.a.data(), rows, k) = q;
    auto& nxt = out.sites[static_cast<std::size_t>(i + 1)];
    RowMat carried = r * nxt.right_matrix();
    SiteTensor nn(static_cast<int>(k), nxt.dr);
    nn.a.assign(carried.data(), carried.data() + carried.size());
    s = std::move(ns);
    nxt = std::move(nn);
  }

  // Right-to-left SVD with truncation.
  for (int i = n - 1; i >= 1; --i) {
    auto& s = out.sites[static_cast<std::size_t>(i)];
    Eigen::BDCSVD<Mat> svd(Mat(s.right_matrix()), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int rank = detail::truncated_rank(svd.singularValues(), policy);
    SiteTensor ns(rank, s.dr);
    RowMap(ns.a.data(), rank, static_cast<Eigen::Index>(16) * s.dr) =
        svd.matrixV().leftCols(rank).adjoint();
    Mat us = svd.matrixU().leftCols(rank) * svd.singularValues().head(rank).asDiagonal();
    auto& prv = out.sites[static_cast<std::size_t>(i - 1)];
    RowMat carried = prv.left_matrix() * us;
    SiteTensor np(prv.dl, rank);
    np.a.assign(carried.data(), carried.data() + carried.size());
    s = std::move(ns);
    prv = std::move(np);
  }
  return out;
}

/*******************************************************************************
 * MARGINALS AND DENSE CONVERSION
 ******************************************************************************/

namespace detail {

inline Mat transfer_trace(const SiteTensor& s) {
  Mat tr = Mat::Zero(s.dl, s.dr);
  for (int r = 0; r < 4; ++r) tr += s.phys_slice(r, r);
  return tr;
}

/// Dense marginal on window [first, first+len), open physical legs kept in
/// interleaved (r_i, c_i) order. Contracts the two window halves inward so
/// intermediates stay at most 16^ceil(len/2) x bond.
inline Mat dense_marginal_impl(const MpoChoi& m, int first, int len) {
  require(first >= 0 && len >= 1 && first + len <= m.n(), "marginal: window out of range");
  Eigen::RowVectorXcd lenv = Eigen::RowVectorXcd::Ones(1);
  for (int i = 0; i < first; ++i) lenv = lenv * transfer_trace(m.sites[static_cast<std::size_t>(i)]);
  Vec renv = Vec::Ones(1);
  for (int i = m.n() - 1; i >= first + len; --i)
    renv = transfer_trace(m.sites[static_cast<std::size_t>(i)]) * renv;

  const int half = (len + 1) / 2;

  // Left part: W_L[(rc_0..rc_{half-1}), b] starting from lenv.
  RowMat wl = RowMat::Zero(1, lenv.size());
  wl.row(0) = lenv;
  for (int k = 0; k < half; ++k) {
    const auto& s = m.sites[static_cast<std::size_t>(first + k)];
    RowMat next = RowMat::Zero(wl.rows() * 16, s.dr);
    for (int rc = 0; rc < 16; ++rc) {
      Mat slice = s.phys_slice(rc / 4, rc % 4);
      for (Eigen::Index g = 0; g < wl.rows(); ++g)
        next.row(g * 16 + rc) = wl.row(g) * slice;
    }
    wl = std::move(next);
  }

  // Right part: W_R[b, (rc_half..rc_{len-1})] ending at renv.
  RowMat wr = RowMat::Zero(renv.size(), 1);
  wr.col(0) = renv;
  for (int k = len - 1; k >= half; --k) {
    const auto& s = m.sites[static_cast<std::size_t>(first + k)];
    RowMat next = RowMat::Zero(s.dl, wr.cols() * 16);
    for (int rc = 0; rc < 16; ++rc) {
      Mat slice = s.phys_slice(rc / 4, rc % 4);
      for (Eigen::Index g = 0; g < wr.cols(); ++g)
        next.col(rc * wr.cols() + g) = slice * wr.col(g);
    }
    wr = std::move(next);
  }

  RowMat joined = wl * wr;  // rows (rc_0..rc_{half-1}), cols (rc_half..rc_{len-1})

  // Regroup interleaved (r_i, c_i) pairs into row index (r_0..r_{len-1}) and
  // column index (c_0..c_{len-1}).
  Eigen::Index dim = 1;
  for (int i = 0; i < len; ++i) dim *= 4;
  Mat out(dim, dim);
  for (Eigen::Index ri = 0; ri < dim; ++ri) {
    for (Eigen::Index ci = 0; ci < dim; ++ci) {
      Eigen::Index rowidx = 0, colidx = 0;
      for (int s = 0; s < len; ++s) {
        const int shift = 2 * (len - 1 - s);
        const int r = static_cast<int>((ri >> shift) & 3);
        const int c = static_cast<int>((ci >> shift) & 3);
        if (s < half)
          rowidx = rowidx * 16 + static_cast<Eigen::Index>(r * 4 + c);
        else
          colidx = colidx * 16 + static_cast<Eigen::Index>(r * 4 + c);
      }
      out(ri, ci) = joined(rowidx, colidx);
    }
  }
  return out;
}

inline constexpr int kDenseSiteCap = 5;

}  // namespace detail

/// Reduced Choi state on a contiguous window of at most 3 sites; the trace
/// is taken over both in and out factors of the complement.
inline DenseChoi window_marginal(const MpoChoi& m, int first, int len) {
  require(len >= 1 && len <= 3, "window_marginal: window larger than 3 sites");
  return DenseChoi{detail::dense_marginal_impl(m, first, len), first, len};
}

inline DenseChoi dense_from_mpo(const MpoChoi& m) {
  require(m.n() <= detail::kDenseSiteCap, "dense_from_mpo: n too large for dense form");
  return DenseChoi{detail::dense_marginal_impl(m, 0, m.n()), 0, m.n()};
}

/// Exact MPO of a dense window Choi; singular values below 1e-13 relative
/// are treated as numerical zeros.
inline MpoChoi mpo_from_dense(const DenseChoi& j) {
  require(j.site_count <= detail::kDenseSiteCap, "mpo_from_dense: n too large");
  require(j.m.rows() == j.dim(), "mpo_from_dense: dimension mismatch");
  const int n = j.site_count;

  detail::Blob blob;
  blob.dl = 1;
  blob.dr = 1;
  blob.width = n;
  blob.a.resize(blob.phys_size());
  const Eigen::Index dim = j.dim();
  for (Eigen::Index ri = 0; ri < dim; ++ri) {
    for (Eigen::Index ci = 0; ci < dim; ++ci) {
      std::size_t idx = 0;
      for (int s = 0; s < n; ++s) {
        const int shift = 2 * (n - 1 - s);
        const int r = static_cast<int>((ri >> shift) & 3);
        const int c = static_cast<int>((ci >> shift) & 3);
        idx = idx * 16 + static_cast<std::size_t>(r * 4 + c);
      }
      blob.a[idx] = j.m(ri, ci);
    }
  }
  TruncationPolicy exact{1e-13, 0};
  MpoChoi out;
  out.sites = detail::split_blob(std::move(blob), exact);
  return out;
}

/*******************************************************************************
 * WEIGHT-RESOLVED DIAGONAL SUMS
 *
 * G_k = sum over diagonal process-matrix entries chi_aa with Pauli weight of
 * the row word at most k, computed with a transfer contraction that carries a
 * saturating weight counter (bucket k_max+1 collects all weights > k_max).
 ******************************************************************************/

inline std::vector<double> weight_resolved_diagonals(const MpoChoi& m, int k_max) {
  require(k_max >= 0 && k_max <= m.n(), "weight_resolved_diagonals: k_max > n");
  const Mat& basis = bell_basis();
  const int buckets = k_max + 2;
  std::vector<Eigen::RowVectorXcd> state(static_cast<std::size_t>(buckets));
  state[0] = Eigen::RowVectorXcd::Ones(1);
  for (int b = 1; b < buckets; ++b) state[static_cast<std::size_t>(b)] = Eigen::RowVectorXcd::Zero(1);

  for (const auto& s : m.sites) {
    // m_mu[l, t] = <mu| T |mu> in the single-site Bell basis.
    std::vector<Mat> mm(4, Mat::Zero(s.dl, s.dr));
    for (int mu = 0; mu < 4; ++mu)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          const cxd w = std::conj(basis(r, mu)) * basis(c, mu);
          if (w == cxd{0.0, 0.0}) continue;
          mm[static_cast<std::size_t>(mu)] += w * s.phys_slice(r, c);
        }
    std::vector<Eigen::RowVectorXcd> next(static_cast<std::size_t>(buckets),
                                          Eigen::RowVectorXcd::Zero(s.dr));
    for (int b = 0; b < buckets; ++b) {
      if (state[static_cast<std::size_t>(b)].size() == 0) continue;
      next[static_cast<std::size_t>(b)] += state[static_cast<std::size_t>(b)] * mm[0];
      const int b2 = std::min(b + 1, buckets - 1);
      for (int mu = 1; mu < 4; ++mu)
        next[static_cast<std::size_t>(b2)] += state[static_cast<std::size_t>(b)] * mm[static_cast<std::size_t>(mu)];
    }
    state = std::move(next);
  }

  std::vector<double> g(static_cast<std::size_t>(k_max + 1));
  double acc = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    acc += state[static_cast<std::size_t>(k)](0).real();
    g[static_cast<std::size_t>(k)] = acc;
  }
  return g;
}

/*******************************************************************************
 * SERIALIZATION
 *
 * Container layout: one line of JSON header followed by raw little-endian
 * doubles, interleaved re/im, row-major over (l, r, c, t) per site.
 ******************************************************************************/

inline void save_mpo(const MpoChoi& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_mpo: cannot open " + path);
  nlohmann::json header{{"format", "qstitch-mpo"},
                        {"version", 1},
                        {"n", m.n()},
                        {"bond_dims", m.bond_dims()},
                        {"phys_dims", std::vector<int>{4, 4}}};
  f << header.dump() << "\n";
  for (const auto& s : m.sites) {
    for (const cxd& v : s.a) {
      const double re = v.real(), im = v.imag();
      f.write(reinterpret_cast<const char*>(&re), sizeof(double));
      f.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  }
  if (!f) throw IoError("save_mpo: write failed for " + path);
}

inline MpoChoi load_mpo(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_mpo: cannot open " + path);
  std::string line;
  std::getline(f, line);
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.value("format", "") != "qstitch-mpo")
    throw IoError("load_mpo: not a qstitch MPO file");
  const int n = header.at("n").get<int>();
  const auto bonds = header.at("bond_dims").get<std::vector<int>>();
  require(static_cast<int>(bonds.size()) == std::max(n - 1, 0), "load_mpo: bad header");
  MpoChoi m;
  for (int i = 0; i < n; ++i) {
    const int dl = (i == 0) ? 1 : bonds[static_cast<std::size_t>(i - 1)];
    const int dr = (i == n - 1) ? 1 : bonds[static_cast<std::size_t>(i)];
    SiteTensor s(dl, dr);
    for (cxd& v : s.a) {
      double re = 0, im = 0;
      f.read(reinterpret_cast<char*>(&re), sizeof(double));
      f.read(reinterpret_cast<char*>(&im), sizeof(double));
      v = cxd{re, im};
    }
    if (!f) throw IoError("load_mpo: truncated payload in " + path);
    m.sites.push_back(std::move(s));
  }
  return m;
}

}  // namespace qstitch
