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

#include <string>
#include <vector>

#include <json.hpp>

#include "qstitch/core.hpp"
#include "qstitch/pauli.hpp"

namespace qstitch {

inline constexpr double kChoiTol = 1e-10;

/// One doubled site carries an (in, out) qubit pair; tensor order is
/// (in, out) per site with sites ascending.
inline constexpr int kDoubledDim = 4;

inline Eigen::Index doubled_dim(int sites) {
  Eigen::Index d = 1;
  for (int i = 0; i < sites; ++i) d *= kDoubledDim;
  return d;
}

/// Dense operator on a chain of identical local dimensions.
struct DenseOperator {
  Mat m;
  int site_count = 0;
  int local_dim = 2;

  void check() const {
    Eigen::Index d = 1;
    for (int i = 0; i < site_count; ++i) d *= local_dim;
    require(m.rows() == d && m.cols() == d, "DenseOperator: dimension mismatch");
  }
};

/**
 * Exact Choi state on a contiguous window of doubled sites. Valid instances
 * are Hermitian, PSD and unit trace within kChoiTol.
 */
struct DenseChoi {
  Mat m;
  int first_site = 0;  // 0-based global index of the leftmost window site
  int site_count = 0;

  Eigen::Index dim() const { return doubled_dim(site_count); }

  void validate(double tol = kChoiTol) const {
    require(m.rows() == m.cols() && m.rows() == dim(), "DenseChoi: dimension mismatch");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw NumericalError("DenseChoi: not Hermitian within tolerance");
    if (std::abs(m.trace().real() - 1.0) > tol || std::abs(m.trace().imag()) > tol)
      throw NumericalError("DenseChoi: trace != 1 within tolerance");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
      throw NumericalError("DenseChoi: negative eigenvalue beyond tolerance");
  }

  /// True when tr_out equals I/2^k within tol, i.e. the window Choi of a
  /// trace-preserving channel (window marginals of a global CPTP Choi
  /// satisfy this too).
  bool is_channel_marginal(double tol = 1e-8) const {
    std::vector<int> dims(static_cast<std::size_t>(2 * site_count), 2);
    std::vector<int> keep;
    for (int s = 0; s < site_count; ++s) keep.push_back(2 * s);  // "in" qubits
    Mat in_marg = partial_trace(m, keep, dims);
    const Eigen::Index d = in_marg.rows();
    Mat target = Mat::Identity(d, d) / static_cast<double>(d);
    return (in_marg - target).cwiseAbs().maxCoeff() <= tol;
  }
};

/// Choi state in the Pauli product basis, chi_{ab} = <a|J|b>.
struct ProcessMatrix {
  Mat m;
  int site_count = 0;
};

/*******************************************************************************
 * BELL BASIS
 ******************************************************************************/

/// |Phi> = (|00> + |11>)/sqrt(2) on one doubled site, (in, out) order.
inline Vec bell_vec() {
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

/// Columns are (sigma_mu x I)|Phi>, mu in {I, X, Y, Z}: the single-site
/// orthonormal basis in which the Choi state becomes the process matrix.
inline const Mat& bell_basis() {
  static const Mat b = [] {
    Mat out(4, 4);
    const Vec phi = bell_vec();
    for (int mu = 0; mu < 4; ++mu) {
      Mat op = kron(pauli_matrix_1q(static_cast<Pauli>(mu)), Mat::Identity(2, 2));
      out.col(mu) = op * phi;
    }
    return out;
  }();
  return b;
}

inline Mat bell_basis_n(int sites) {
  Mat b = bell_basis();
  Mat out = b;
  for (int i = 1; i < sites; ++i) out = kron(out, b);
  return out;
}

/// Choi state of the identity channel on `sites` doubled sites.
inline DenseChoi bell_product_choi(int sites, int first_site = 0) {
  Vec v = bell_vec();
  Vec full = v;
  for (int i = 1; i < sites; ++i) {
    Vec next(full.size() * 4);
    for (Eigen::Index a = 0; a < full.size(); ++a)
      for (Eigen::Index b = 0; b < 4; ++b) next(a * 4 + b) = full(a) * v(b);
    full = next;
  }
  return DenseChoi{full * full.adjoint(), first_site, sites};
}

/*******************************************************************************
 * CHOI <-> PROCESS MATRIX
 ******************************************************************************/

inline ProcessMatrix choi_to_process(const DenseChoi& j) {
  require(j.m.rows() == j.dim(), "choi_to_process: dimension mismatch");
  const Mat b = bell_basis_n(j.site_count);
  return ProcessMatrix{b.adjoint() * j.m * b, j.site_count};
}

inline DenseChoi process_to_choi(const ProcessMatrix& chi, int first_site = 0) {
  require(chi.m.rows() == chi.m.cols() && chi.m.rows() == doubled_dim(chi.site_count),
          "process_to_choi: dimension mismatch");
  if ((chi.m - chi.m.adjoint()).cwiseAbs().maxCoeff() > kChoiTol)
    throw NumericalError("process_to_choi: input not Hermitian");
  const Mat b = bell_basis_n(chi.site_count);
  return DenseChoi{b * chi.m * b.adjoint(), first_site, chi.site_count};
}

/// Partial trace of a window Choi onto a sub-window (global site indices,
/// contiguous, contained in the source window).
inline DenseChoi choi_marginal(const DenseChoi& j, int first_site, int site_count) {
  require(first_site >= j.first_site &&
              first_site + site_count <= j.first_site + j.site_count && site_count >= 1,
          "choi_marginal: window not contained");
  std::vector<int> dims(static_cast<std::size_t>(j.site_count), kDoubledDim);
  std::vector<int> keep;
  for (int s = 0; s < site_count; ++s) keep.push_back(first_site - j.first_site + s);
  return DenseChoi{partial_trace(j.m, keep, dims), first_site, site_count};
}

/*******************************************************************************
 * JSON SERIALIZATION
 *
 * Process matrices key entries by the row/column Pauli words joined with '|';
 * coefficient maps key by the word itself. Values are [re, im] pairs.
 ******************************************************************************/

inline nlohmann::json process_to_json(const ProcessMatrix& chi, double drop_below = 0.0) {
  nlohmann::json entries = nlohmann::json::object();
  const std::uint64_t count = std::uint64_t{1} << (2 * chi.site_count);
  for (std::uint64_t a = 0; a < count; ++a) {
    for (std::uint64_t b = 0; b < count; ++b) {
      const cxd v = chi.m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (std::abs(v) <= drop_below) continue;
      const std::string key = PauliString::from_index(chi.site_count, a).str() + "|" +
                              PauliString::from_index(chi.site_count, b).str();
      entries[key] = {v.real(), v.imag()};
    }
  }
  return nlohmann::json{{"sites", chi.site_count}, {"entries", entries}};
}

inline ProcessMatrix process_from_json(const nlohmann::json& js) {
  ProcessMatrix chi;
  chi.site_count = js.at("sites").get<int>();
  const Eigen::Index dim = doubled_dim(chi.site_count);
  chi.m = Mat::Zero(dim, dim);
  for (const auto& [key, val] : js.at("entries").items()) {
    const auto bar = key.find('|');
    require(bar != std::string::npos, "process_from_json: malformed key");
    const auto a = PauliString(key.substr(0, bar)).index();
    const auto b = PauliString(key.substr(bar + 1)).index();
    chi.m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
        cxd{val.at(0).get<double>(), val.at(1).get<double>()};
  }
  return chi;
}

inline nlohmann::json coefficients_to_json(const PauliCoefficients& c) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [key, val] : c.coeffs) entries[key] = {val, 0.0};
  return nlohmann::json{{"qubits", c.qubit_count}, {"entries", entries}};
}

inline PauliCoefficients coefficients_from_json(const nlohmann::json& js) {
  PauliCoefficients c;
  c.qubit_count = js.at("qubits").get<int>();
  for (const auto& [key, val] : js.at("entries").items())
    c.coeffs[key] = val.at(0).get<double>();
  return c;
}

}  // namespace qstitch
