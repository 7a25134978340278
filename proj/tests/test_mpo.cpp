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

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>

#include <unsupported/Eigen/MatrixFunctions>

#include "qstitch/mpo.hpp"
#include "qstitch/pauli.hpp"

using namespace qstitch;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

Mat dephasing_superop_1site(double gamma) {
  const Mat zd = kron(Mat::Identity(2, 2), pauli_matrix_1q(Pauli::Z));
  return (1.0 - gamma) * Mat::Identity(16, 16) + gamma * kron(zd.conjugate(), zd);
}

/// Random pure global Choi: Bell pairs pushed through random two-site
/// unitary conjugations on the doubled chain.
MpoChoi random_circuit_mpo(int n, RngStream& rng, const TruncationPolicy& policy) {
  MpoChoi m = bell_product_mpo(n);
  for (int pass = 0; pass < 2; ++pass)
    for (int b = pass % 2; b + 1 < n; b += 2) {
      Mat u = random_unitary(16, rng);
      m = apply_superop(m, LocalSuperop::conjugation(b, 2, u), policy);
    }
  return m;
}

}  // namespace

TEST_CASE("bell_product_mpo") {
  SECTION("n=1 dense form and purity") {
    MpoChoi m = bell_product_mpo(1);
    REQUIRE(max_abs_diff(dense_from_mpo(m).m, bell_product_choi(1).m) < 1e-14);
    REQUIRE(purity(m) == Catch::Approx(1.0));
  }
  SECTION("n=3 one-site marginal is a Bell pair") {
    MpoChoi m = bell_product_mpo(3);
    REQUIRE(max_abs_diff(window_marginal(m, 1, 1).m, bell_product_choi(1).m) < 1e-14);
  }
  SECTION("n=2 identity channel has G_0 = 1") {
    auto g = weight_resolved_diagonals(bell_product_mpo(2), 0);
    REQUIRE(g[0] == Catch::Approx(1.0));
  }
  SECTION("n < 1 rejected") { REQUIRE_THROWS_AS(bell_product_mpo(0), DimensionError); }
}

TEST_CASE("apply_superop") {
  TruncationPolicy policy;
  SECTION("identity superop leaves the state unchanged") {
    MpoChoi m = bell_product_mpo(3);
    MpoChoi out = apply_superop(m, LocalSuperop::general(1, 1, Mat::Identity(16, 16)), policy);
    REQUIRE(max_abs_diff(dense_from_mpo(out).m, dense_from_mpo(m).m) < 1e-13);
  }
  SECTION("single-site Z conjugation against dense") {
    MpoChoi m = bell_product_mpo(1);
    const Mat zd = kron(Mat::Identity(2, 2), pauli_matrix_1q(Pauli::Z));
    MpoChoi out = apply_superop(m, LocalSuperop::conjugation(0, 1, zd), policy);
    Mat expected = zd * bell_product_choi(1).m * zd.adjoint();
    REQUIRE(max_abs_diff(dense_from_mpo(out).m, expected) < 1e-14);
  }
  SECTION("two-site iSWAP conjugation against a 16x16 dense oracle") {
    // iSWAP embedded on the out qubits of the (in,out,in,out) doubled pair.
    Mat iswap = Mat::Zero(4, 4);
    iswap(0, 0) = 1;
    iswap(3, 3) = 1;
    iswap(1, 2) = cxi;
    iswap(2, 1) = cxi;
    Mat u = embed(iswap, {1, 3}, {2, 2, 2, 2});
    MpoChoi out = apply_superop(bell_product_mpo(2), LocalSuperop::conjugation(0, 2, u), policy);
    Mat expected = u * bell_product_choi(2).m * u.adjoint();
    REQUIRE(max_abs_diff(dense_from_mpo(out).m, expected) < 1e-13);
  }
  SECTION("support out of range") {
    REQUIRE_THROWS_AS(apply_superop(bell_product_mpo(2),
                                    LocalSuperop::conjugation(1, 2, Mat::Identity(16, 16)),
                                    policy),
                      DimensionError);
  }
}

TEST_CASE("compress") {
  TruncationPolicy policy;
  SECTION("bond-dim-1 MPO keeps its dense form and bonds") {
    MpoChoi m = bell_product_mpo(3);
    MpoChoi c = compress(m, policy);
    REQUIRE(c.bond_dims() == std::vector<int>{1, 1});
    REQUIRE(max_abs_diff(dense_from_mpo(c).m, dense_from_mpo(m).m) < 1e-14);
  }
  SECTION("zero-padded bonds are removed") {
    MpoChoi m = bell_product_mpo(3);
    MpoChoi padded;
    padded.sites.resize(3);
    padded.sites[0] = SiteTensor(1, 3);
    padded.sites[1] = SiteTensor(3, 3);
    padded.sites[2] = SiteTensor(3, 1);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        padded.sites[0].at(0, r, c, 0) = m.sites[0].at(0, r, c, 0);
        padded.sites[1].at(0, r, c, 0) = m.sites[1].at(0, r, c, 0);
        padded.sites[2].at(0, r, c, 0) = m.sites[2].at(0, r, c, 0);
      }
    MpoChoi c = compress(padded, policy);
    REQUIRE(c.bond_dims() == std::vector<int>{1, 1});
    REQUIRE(max_abs_diff(dense_from_mpo(c).m, dense_from_mpo(m).m) < 1e-13);
  }
  SECTION("random n=4 MPO at threshold 1e-7 stays within 1e-5 in Frobenius") {
    RngStream rng(19);
    MpoChoi m = random_circuit_mpo(4, rng, TruncationPolicy{1e-14, 0});
    Mat before = dense_from_mpo(m).m;
    MpoChoi c = compress(m, TruncationPolicy{1e-7, 0});
    REQUIRE((dense_from_mpo(c).m - before).norm() < 1e-5);
  }
  SECTION("max_bond cap is honored") {
    RngStream rng(23);
    MpoChoi m = random_circuit_mpo(4, rng, TruncationPolicy{1e-14, 0});
    MpoChoi c = compress(m, TruncationPolicy{1e-14, 3});
    for (int b : c.bond_dims()) REQUIRE(b <= 3);
  }
}

TEST_CASE("window_marginal") {
  SECTION("Bell product windows") {
    MpoChoi m = bell_product_mpo(4);
    REQUIRE(max_abs_diff(window_marginal(m, 2, 1).m, bell_product_choi(1).m) < 1e-14);
    REQUIRE(max_abs_diff(window_marginal(m, 0, 3).m, bell_product_choi(3).m) < 1e-14);
  }
  SECTION("marginal of an entangled chain against dense partial trace") {
    RngStream rng(29);
    MpoChoi m = random_circuit_mpo(4, rng, TruncationPolicy{1e-14, 0});
    Mat dense = dense_from_mpo(m).m;
    DenseChoi full{dense, 0, 4};
    for (int first = 0; first <= 2; ++first) {
      DenseChoi expect = choi_marginal(full, first, 2);
      REQUIRE(max_abs_diff(window_marginal(m, first, 2).m, expect.m) < 1e-12);
    }
  }
  SECTION("windows above 3 sites are rejected") {
    MpoChoi m = bell_product_mpo(5);
    REQUIRE_THROWS_AS(window_marginal(m, 0, 4), DimensionError);
  }
}

TEST_CASE("purity") {
  SECTION("Bell product") { REQUIRE(purity(bell_product_mpo(5)) == Catch::Approx(1.0)); }
  SECTION("single-qubit dephasing gamma=0.3 gives 0.58") {
    MpoChoi m = apply_superop(bell_product_mpo(1),
                              LocalSuperop::general(0, 1, dephasing_superop_1site(0.3)),
                              TruncationPolicy{});
    REQUIRE(purity(m) == Catch::Approx(0.58).epsilon(1e-10));
  }
  SECTION("two independent dephasing sites multiply") {
    MpoChoi m = bell_product_mpo(2);
    for (int i = 0; i < 2; ++i)
      m = apply_superop(m, LocalSuperop::general(i, 1, dephasing_superop_1site(0.3)),
                        TruncationPolicy{});
    REQUIRE(purity(m) == Catch::Approx(0.58 * 0.58).epsilon(1e-10));
  }
}

TEST_CASE("overlap") {
  SECTION("overlap(Bell, Bell) = 1") {
    REQUIRE(overlap(bell_product_mpo(3), bell_product_mpo(3)) == Catch::Approx(1.0));
  }
  SECTION("orthogonal pure Chois") {
    const Mat xd = kron(Mat::Identity(2, 2), pauli_matrix_1q(Pauli::X));
    MpoChoi jx = apply_superop(bell_product_mpo(1), LocalSuperop::conjugation(0, 1, xd),
                               TruncationPolicy{});
    REQUIRE(std::abs(overlap(jx, bell_product_mpo(1))) < 1e-14);
  }
  SECTION("overlap(a, a) equals purity(a)") {
    RngStream rng(31);
    MpoChoi m = random_circuit_mpo(3, rng, TruncationPolicy{1e-14, 0});
    REQUIRE(std::abs(overlap(m, m) - purity(m)) < 1e-10);
  }
  SECTION("size mismatch rejected") {
    REQUIRE_THROWS_AS(overlap(bell_product_mpo(2), bell_product_mpo(3)), DimensionError);
  }
}

TEST_CASE("weight_resolved_diagonals") {
  SECTION("identity channel saturates at 1 for every k") {
    auto g = weight_resolved_diagonals(bell_product_mpo(4), 3);
    for (double v : g) REQUIRE(v == Catch::Approx(1.0));
  }
  SECTION("single-qubit dephasing gamma=0.3") {
    MpoChoi m = apply_superop(bell_product_mpo(1),
                              LocalSuperop::general(0, 1, dephasing_superop_1site(0.3)),
                              TruncationPolicy{});
    auto g = weight_resolved_diagonals(m, 1);
    REQUIRE(g[0] == Catch::Approx(0.7).epsilon(1e-12));
    REQUIRE(g[1] == Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("random n=4 chain against exhaustive enumeration") {
    RngStream rng(37);
    MpoChoi m = random_circuit_mpo(4, rng, TruncationPolicy{1e-14, 0});
    auto g = weight_resolved_diagonals(m, 4);

    ProcessMatrix chi = choi_to_process(dense_from_mpo(m));
    std::vector<double> brute(5, 0.0);
    for (std::uint64_t idx = 0; idx < 256; ++idx) {
      const int w = pauli_weight(PauliString::from_index(4, idx));
      brute[static_cast<std::size_t>(w)] += chi.m(static_cast<Eigen::Index>(idx),
                                                  static_cast<Eigen::Index>(idx)).real();
    }
    double acc = 0.0;
    for (int k = 0; k <= 4; ++k) {
      acc += brute[static_cast<std::size_t>(k)];
      REQUIRE(g[static_cast<std::size_t>(k)] == Catch::Approx(acc).margin(1e-8));
      if (k > 0) REQUIRE(g[static_cast<std::size_t>(k)] >= g[static_cast<std::size_t>(k - 1)] - 1e-12);
    }
    REQUIRE(g[4] == Catch::Approx(1.0).margin(1e-8));
  }
  SECTION("k_max > n rejected") {
    REQUIRE_THROWS_AS(weight_resolved_diagonals(bell_product_mpo(2), 3), DimensionError);
  }
}

TEST_CASE("dense round trips") {
  SECTION("Bell product n=2") {
    MpoChoi m = bell_product_mpo(2);
    MpoChoi back = mpo_from_dense(dense_from_mpo(m));
    REQUIRE(max_abs_diff(dense_from_mpo(back).m, dense_from_mpo(m).m) < 1e-13);
  }
  SECTION("random n=3 Choi") {
    RngStream rng(43);
    DenseChoi j{random_density(64, rng), 0, 3};
    MpoChoi m = mpo_from_dense(j);
    REQUIRE(max_abs_diff(dense_from_mpo(m).m, j.m) < 1e-10);
  }
  SECTION("rank-1 Choi of a Schmidt-rank-2 state has bond dimension 4") {
    Vec psi = Vec::Zero(16);
    // (|0>|1> + |2>|3>)/sqrt(2) over two 4-dimensional doubled sites.
    psi(0 * 4 + 1) = 1.0 / std::sqrt(2.0);
    psi(2 * 4 + 3) = 1.0 / std::sqrt(2.0);
    DenseChoi j{psi * psi.adjoint(), 0, 2};
    MpoChoi m = mpo_from_dense(j);
    for (int b : m.bond_dims()) REQUIRE(b <= 4);
    REQUIRE(max_abs_diff(dense_from_mpo(m).m, j.m) < 1e-12);
  }
  SECTION("n too large rejected") {
    REQUIRE_THROWS_AS(dense_from_mpo(bell_product_mpo(6)), DimensionError);
  }
}

TEST_CASE("trace preservation along a pipeline") {
  // Relative-threshold truncation only: a hard cap that bites large singular
  // values is allowed to break the trace, this invariant is about eps_rel.
  RngStream rng(47);
  TruncationPolicy policy{1e-7, 0};
  MpoChoi m = bell_product_mpo(5);
  for (int step = 0; step < 3; ++step) {
    for (int b = step % 2; b + 1 < 5; b += 2) {
      Mat u = (cxi * 0.1 * random_hermitian(16, rng)).exp();
      m = apply_superop(m, LocalSuperop::conjugation(b, 2, u), policy);
    }
    for (int i = 0; i < 5; ++i)
      m = apply_superop(m, LocalSuperop::general(i, 1, dephasing_superop_1site(0.05)), policy);
    m = compress(m, policy);
  }
  REQUIRE(std::abs(mpo_trace(m) - cxd{1.0, 0.0}) < 1e-6);
}

TEST_CASE("marginal consistency across nested windows") {
  RngStream rng(53);
  MpoChoi m = random_circuit_mpo(6, rng, TruncationPolicy{1e-12, 0});
  for (int first = 0; first + 3 <= 6; ++first) {
    DenseChoi big = window_marginal(m, first, 3);
    for (int sub_first = first; sub_first + 2 <= first + 3; ++sub_first) {
      DenseChoi small = window_marginal(m, sub_first, 2);
      DenseChoi cut = choi_marginal(big, sub_first, 2);
      REQUIRE(max_abs_diff(small.m, cut.m) < 1e-8);
    }
  }
}

TEST_CASE("purity is invariant under single-site unitary conjugation") {
  RngStream rng(59);
  MpoChoi m = random_circuit_mpo(3, rng, TruncationPolicy{1e-12, 0});
  const double before = purity(m);
  Mat u = random_unitary(4, rng);
  MpoChoi rotated = apply_superop(m, LocalSuperop::conjugation(1, 1, u), TruncationPolicy{});
  REQUIRE(std::abs(purity(rotated) - before) < 1e-10);
}

TEST_CASE("MPO container file round trip") {
  RngStream rng(61);
  MpoChoi m = random_circuit_mpo(4, rng, TruncationPolicy{1e-12, 0});
  const std::string path = "mpo_roundtrip.qmpo";
  save_mpo(m, path);
  MpoChoi back = load_mpo(path);
  std::remove(path.c_str());
  REQUIRE(back.n() == m.n());
  REQUIRE(back.bond_dims() == m.bond_dims());
  REQUIRE(max_abs_diff(dense_from_mpo(back).m, dense_from_mpo(m).m) < 1e-14);
}
