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

#include <array>
#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qstitch/choi.hpp"
#include "qstitch/core.hpp"
#include "qstitch/mpo.hpp"
#include "qstitch/records.hpp"

namespace qstitch {

/*******************************************************************************
 * MODEL SPECIFICATIONS
 ******************************************************************************/

/// Heisenberg chain with unit Z fields, exchange (XX + YY + ZZ)/2 on every
/// bond and local dephasing jump operators sqrt(gamma_z) Z_i.
struct LindbladSpec {
  int n = 1;
  double gamma_z = 1.0;

  void check() const {
    require(n >= 1, "LindbladSpec: n < 1");
    if (gamma_z < 0) throw ConfigError("LindbladSpec: gamma_z < 0");
  }
};

/// First-order Trotter evolution parameters.
struct EvolutionParams {
  double dt = 1e-3;
  double t_final = 0.0;

  void check() const {
    if (!(dt > 0.0) || (t_final > 0.0 && dt > t_final + 1e-15))
      throw ConfigError("EvolutionParams: need 0 < dt <= t_final");
  }
};

/**
 * Single layer of two-qubit gates exp(i*angle*(XX+YY)) on even bonds
 * (0-indexed), followed by a coherent-noise layer
 * exp(i*eps*(a1 XX + a2 YY + a3 ZZ)) on even then odd bonds with eps = r*gamma
 * and per-bond coefficients a_k drawn uniformly from [0, 1), followed by
 * single-qubit Z dephasing of strength gamma on every site.
 */
struct CircuitSpec {
  int n = 2;
  double base_angle = std::numbers::pi / 4;
  double gamma = 0.0;
  double r = 1.0;
  std::uint64_t alpha_seed = 0;
  std::vector<std::array<double, 3>> alphas;  // one triple per bond

  double epsilon() const { return r * gamma; }
  bool is_ideal_unitary() const { return gamma == 0.0 && epsilon() == 0.0; }

  static CircuitSpec make(int n, double gamma, double r, std::uint64_t alpha_seed,
                          double base_angle = std::numbers::pi / 4) {
    CircuitSpec s;
    s.n = n;
    s.base_angle = base_angle;
    s.gamma = gamma;
    s.r = r;
    s.alpha_seed = alpha_seed;
    RngStream rng(alpha_seed);
    for (int b = 0; b + 1 < n; ++b)
      s.alphas.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    s.check();
    return s;
  }

  void check() const {
    require(n >= 1, "CircuitSpec: n < 1");
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("CircuitSpec: gamma outside [0, 1]");
    require(static_cast<int>(alphas.size()) == std::max(n - 1, 0),
            "CircuitSpec: one alpha triple per bond required");
    for (const auto& a : alphas)
      for (double x : a)
        if (x < 0.0 || x >= 1.0) throw ConfigError("CircuitSpec: alpha outside [0, 1)");
  }
};

/*******************************************************************************
 * GATE AND SUPEROPERATOR BUILDING BLOCKS
 ******************************************************************************/

namespace detail {

inline const Mat& sx() { return pauli_matrix_1q(Pauli::X); }
inline const Mat& sy() { return pauli_matrix_1q(Pauli::Y); }
inline const Mat& sz() { return pauli_matrix_1q(Pauli::Z); }

/// exp(i angle (a1 XX + a2 YY + a3 ZZ)) on two qubits.
inline Mat bond_gate(double angle, double a1, double a2, double a3) {
  Mat h = a1 * kron(sx(), sx()) + a2 * kron(sy(), sy()) + a3 * kron(sz(), sz());
  Mat g = (cxi * angle * h).exp();
  return g;
}

/// Column-stacked conjugation superoperator X -> A X B.
inline Mat sandwich_superop(const Mat& a, const Mat& b) {
  return kron(b.transpose(), a);
}

inline Mat conjugation_superop(const Mat& g) { return sandwich_superop(g, g.adjoint()); }

/// Lindblad generator on a dense Hilbert space: -i[H, .] + sum_k D[L_k].
inline Mat lindblad_superop(const Mat& h, const std::vector<Mat>& jumps) {
  const Eigen::Index d = h.rows();
  const Mat id = Mat::Identity(d, d);
  Mat gen = -cxi * (sandwich_superop(h, id) - sandwich_superop(id, h));
  for (const Mat& l : jumps) {
    const Mat ll = l.adjoint() * l;
    gen += sandwich_superop(l, l.adjoint()) - 0.5 * sandwich_superop(ll, id) -
           0.5 * sandwich_superop(id, ll);
  }
  return gen;
}

/// Interleaves a block-layout Choi (in_1..in_n, out_1..out_n) into the
/// site-major (in_i, out_i) order used throughout.
inline Mat interleave_choi(const Mat& block, int n) {
  std::vector<int> dims(static_cast<std::size_t>(2 * n), 2);
  std::vector<int> perm;
  for (int i = 0; i < n; ++i) {
    perm.push_back(i);
    perm.push_back(n + i);
  }
  return permute_sites(block, perm, dims);
}

/// Choi state of the channel with superoperator `s` acting on n qubits.
inline DenseChoi choi_from_superop(const Mat& s, int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  require(s.rows() == d * d && s.cols() == d * d, "choi_from_superop: dim mismatch");
  Mat block(d * d, d * d);
  const double norm = 1.0 / static_cast<double>(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      // Lambda(|j><k|) = unvec of column j + k*d.
      Eigen::Map<const Mat> lam(s.col(j + k * d).data(), d, d);
      for (Eigen::Index o = 0; o < d; ++o)
        for (Eigen::Index op = 0; op < d; ++op)
          block(j * d + o, k * d + op) = norm * lam(o, op);
    }
  }
  return DenseChoi{interleave_choi(block, n), 0, n};
}

/// Full-chain superoperator of the noisy shallow circuit.
inline Mat circuit_superop(const CircuitSpec& spec) {
  spec.check();
  const int n = spec.n;
  const Eigen::Index d = Eigen::Index{1} << n;
  const std::vector<int> dims(static_cast<std::size_t>(n), 2);

  auto layer_unitary = [&](bool even_bonds, double angle, bool use_alphas) {
    Mat u = Mat::Identity(d, d);
    for (int b = even_bonds ? 0 : 1; b + 1 < n; b += 2) {
      const auto& a = spec.alphas[static_cast<std::size_t>(b)];
      Mat g = use_alphas ? bond_gate(angle, a[0], a[1], a[2]) : bond_gate(angle, 1.0, 1.0, 0.0);
      u = embed(g, {b, b + 1}, dims) * u;
    }
    return u;
  };

  Mat s = conjugation_superop(layer_unitary(true, spec.base_angle, false));
  if (spec.epsilon() != 0.0) {
    s = conjugation_superop(layer_unitary(true, spec.epsilon(), true)) * s;
    s = conjugation_superop(layer_unitary(false, spec.epsilon(), true)) * s;
  }
  if (spec.gamma != 0.0) {
    for (int i = 0; i < n; ++i) {
      Mat z = embed(sz(), {i}, dims);
      Mat dephase = (1.0 - spec.gamma) * Mat::Identity(d * d, d * d) +
                    spec.gamma * conjugation_superop(z);
      s = dephase * s;
    }
  }
  return s;
}

inline Mat lindblad_chain_superop(const LindbladSpec& spec) {
  spec.check();
  const int n = spec.n;
  const Eigen::Index d = Eigen::Index{1} << n;
  const std::vector<int> dims(static_cast<std::size_t>(n), 2);
  Mat h = Mat::Zero(d, d);
  for (int i = 0; i < n; ++i) h += embed(sz(), {i}, dims);
  for (int i = 0; i + 1 < n; ++i) {
    h += 0.5 * embed(kron(sx(), sx()), {i, i + 1}, dims);
    h += 0.5 * embed(kron(sy(), sy()), {i, i + 1}, dims);
    h += 0.5 * embed(kron(sz(), sz()), {i, i + 1}, dims);
  }
  std::vector<Mat> jumps;
  for (int i = 0; i < n; ++i)
    jumps.push_back(std::sqrt(spec.gamma_z) * embed(sz(), {i}, dims));
  return lindblad_superop(h, jumps);
}

}  // namespace detail

/*******************************************************************************
 * DENSE ORACLE
 *
 * Independent brute-force route: builds the exact channel superoperator and
 * exponentiates/composes it, bypassing all tensor-network machinery.
 ******************************************************************************/

inline DenseChoi dense_channel_oracle(const LindbladSpec& spec, double t) {
  require(spec.n <= 4, "dense_channel_oracle: n > 4");
  require(t >= 0.0, "dense_channel_oracle: negative time");
  Mat gen = detail::lindblad_chain_superop(spec);
  Mat s = (t * gen).exp();
  return detail::choi_from_superop(s, spec.n);
}

inline DenseChoi dense_channel_oracle(const CircuitSpec& spec) {
  require(spec.n <= 4, "dense_channel_oracle: n > 4");
  return detail::choi_from_superop(detail::circuit_superop(spec), spec.n);
}

/*******************************************************************************
 * MPO SIMULATION
 ******************************************************************************/

/**
 * TEBD evolution of the Choi state on the doubled chain. Every generator
 * acts as (identity x A) on the (in, out) pair of a site; one first-order
 * Trotter step applies the exactly exponentiated single-site superoperators,
 * then the even-bond and odd-bond exchange conjugations.
 */
inline MpoChoi lindblad_choi_evolve(const LindbladSpec& spec, const EvolutionParams& params,
                                    const TruncationPolicy& policy) {
  spec.check();
  params.check();
  policy.check();
  const int n = spec.n;
  MpoChoi state = bell_product_mpo(n);
  if (params.t_final <= 0.0) return state;

  const Mat id2 = Mat::Identity(2, 2);
  const Mat hz = kron(id2, detail::sz());   // field on the "out" qubit
  const Mat lz = kron(id2, detail::sz());   // jump operator, doubled site
  Mat hex = Mat::Zero(16, 16);
  {
    const std::vector<int> dims{2, 2, 2, 2};  // (in_i, out_i, in_j, out_j)
    hex += 0.5 * embed(kron(detail::sx(), detail::sx()), {1, 3}, dims);
    hex += 0.5 * embed(kron(detail::sy(), detail::sy()), {1, 3}, dims);
    hex += 0.5 * embed(kron(detail::sz(), detail::sz()), {1, 3}, dims);
  }

  auto step_ops = [&](double dt) {
    Mat single_gen = detail::lindblad_superop(hz, {std::sqrt(spec.gamma_z) * lz});
    Mat single = (dt * single_gen).exp();
    Mat bond_u = (-cxi * dt * hex).exp();
    return std::pair<Mat, Mat>(single, bond_u);
  };

  int steps = static_cast<int>(std::floor(params.t_final / params.dt + 1e-9));
  double remainder = params.t_final - steps * params.dt;
  if (remainder < 1e-12) remainder = 0.0;

  auto [single, bond_u] = step_ops(params.dt);
  auto do_step = [&](const Mat& s1, const Mat& u2) {
    for (int i = 0; i < n; ++i)
      state = apply_superop(state, LocalSuperop::general(i, 1, s1), policy);
    for (int b = 0; b + 1 < n; b += 2)
      state = apply_superop(state, LocalSuperop::conjugation(b, 2, u2), policy);
    for (int b = 1; b + 1 < n; b += 2)
      state = apply_superop(state, LocalSuperop::conjugation(b, 2, u2), policy);
    state = compress(state, policy);
  };

  for (int k = 0; k < steps; ++k) do_step(single, bond_u);
  if (remainder > 0.0) {
    auto [s1, u2] = step_ops(remainder);
    do_step(s1, u2);
  }
  return state;
}

/// Choi state of the noisy shallow circuit as an MPO.
inline MpoChoi circuit_choi(const CircuitSpec& spec, const TruncationPolicy& policy) {
  spec.check();
  policy.check();
  const int n = spec.n;
  MpoChoi state = bell_product_mpo(n);
  const std::vector<int> dims{2, 2, 2, 2};

  auto apply_bond_layer = [&](bool even_bonds, double angle, bool use_alphas) {
    for (int b = even_bonds ? 0 : 1; b + 1 < n; b += 2) {
      const auto& a = spec.alphas[static_cast<std::size_t>(b)];
      Mat g = use_alphas ? detail::bond_gate(angle, a[0], a[1], a[2])
                         : detail::bond_gate(angle, 1.0, 1.0, 0.0);
      Mat u = embed(g, {1, 3}, dims);
      state = apply_superop(state, LocalSuperop::conjugation(b, 2, u), policy);
    }
  };

  apply_bond_layer(true, spec.base_angle, false);
  if (spec.epsilon() != 0.0) {
    apply_bond_layer(true, spec.epsilon(), true);
    apply_bond_layer(false, spec.epsilon(), true);
  }
  if (spec.gamma != 0.0) {
    const Mat zd = kron(Mat::Identity(2, 2), detail::sz());
    Mat dephase = (1.0 - spec.gamma) * Mat::Identity(16, 16) +
                  spec.gamma * detail::sandwich_superop(zd, zd.adjoint());
    for (int i = 0; i < n; ++i)
      state = apply_superop(state, LocalSuperop::general(i, 1, dephase), policy);
  }
  return compress(state, policy);
}

/*******************************************************************************
 * BORN-RULE SAMPLING
 ******************************************************************************/

namespace detail {

/// Transfer matrix of Tr[(x_site P) J] for a single-site operator P.
inline Mat sandwich_transfer(const SiteTensor& t, const Mat& p) {
  Mat out = Mat::Zero(t.dl, t.dr);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      if (p(r, c) == cxd{0.0, 0.0}) continue;
      out += p(r, c) * t.phys_slice(c, r);
    }
  return out;
}

}  // namespace detail

/**
 * Draws measurement records from the Choi state: input eigenstates uniform
 * over the 6 Pauli eigenstates, output bases uniform over X/Y/Z, output signs
 * from the Born distribution via sequential conditional sampling with cached
 * right environments. Shot k uses the RNG stream (seed, k), so results do not
 * depend on evaluation order.
 */
inline std::vector<ShotRecord> sample_records(const MpoChoi& m, int shots, std::uint64_t seed) {
  require(shots >= 1, "sample_records: shots < 1");
  const double tr_dev = std::abs(mpo_trace(m) - cxd{1.0, 0.0});
  if (tr_dev > 1e-4)
    throw NumericalError("sample_records: MPO trace deviates from 1 by " + std::to_string(tr_dev));
  const int n = m.n();
  const Pauli bases[3] = {Pauli::X, Pauli::Y, Pauli::Z};

  std::vector<ShotRecord> out;
  out.reserve(static_cast<std::size_t>(shots));
  for (int shot = 0; shot < shots; ++shot) {
    RngStream rng = RngStream::for_index(seed, static_cast<std::uint64_t>(shot));
    ShotRecord rec;
    rec.sites.resize(static_cast<std::size_t>(n));
    for (auto& s : rec.sites) {
      s.in_basis = bases[rng.uniform_int(3)];
      s.in_sign = rng.uniform_int(2) == 0 ? 1 : -1;
      s.out_basis = bases[rng.uniform_int(3)];
    }

    // Input projectors enter transposed (conjugated) on the "in" factor.
    std::vector<Mat> in_proj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto& s = rec.sites[static_cast<std::size_t>(i)];
      Vec psi = basis_eigenstate(s.in_basis, s.in_sign);
      in_proj[static_cast<std::size_t>(i)] = (psi * psi.adjoint()).conjugate();
    }

    std::vector<Mat> renv(static_cast<std::size_t>(n + 1));
    renv[static_cast<std::size_t>(n)] = Mat::Ones(1, 1);
    for (int i = n - 1; i >= 0; --i) {
      Mat marg = kron(in_proj[static_cast<std::size_t>(i)], Mat::Identity(2, 2));
      renv[static_cast<std::size_t>(i)] =
          detail::sandwich_transfer(m.sites[static_cast<std::size_t>(i)], marg) *
          renv[static_cast<std::size_t>(i + 1)];
    }

    Mat lenv = Mat::Ones(1, 1);
    for (int i = 0; i < n; ++i) {
      auto& s = rec.sites[static_cast<std::size_t>(i)];
      double w[2];
      Mat trans[2];
      for (int b = 0; b < 2; ++b) {
        Vec phi = basis_eigenstate(s.out_basis, b == 0 ? 1 : -1);
        Mat proj = kron(in_proj[static_cast<std::size_t>(i)], Mat(phi * phi.adjoint()));
        trans[b] = detail::sandwich_transfer(m.sites[static_cast<std::size_t>(i)], proj);
        w[b] = std::max((lenv * trans[b] * renv[static_cast<std::size_t>(i + 1)])(0, 0).real(), 0.0);
      }
      const double tot = w[0] + w[1];
      const double p_plus = tot > 0.0 ? w[0] / tot : 0.5;
      const int pick = rng.uniform() < p_plus ? 0 : 1;
      s.out_sign = pick == 0 ? 1 : -1;
      lenv = lenv * trans[pick];
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace qstitch
