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

#include "qstitch/choi.hpp"
#include "qstitch/pauli.hpp"

using namespace qstitch;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

DenseChoi dephasing_choi_1q(double gamma) {
  const Mat z = pauli_matrix_1q(Pauli::Z);
  const Mat noise = kron(Mat::Identity(2, 2), z);
  DenseChoi bell = bell_product_choi(1);
  Mat j = (1.0 - gamma) * bell.m + gamma * noise * bell.m * noise.adjoint();
  return DenseChoi{j, 0, 1};
}

}  // namespace

TEST_CASE("pauli_matrix on small words") {
  REQUIRE(max_abs_diff(pauli_matrix(PauliString("I")), Mat::Identity(2, 2)) == 0.0);

  Mat z(2, 2);
  z << 1, 0, 0, -1;
  REQUIRE(max_abs_diff(pauli_matrix(PauliString("Z")), z) == 0.0);

  // Kronecker product X (x) Z by hand.
  Mat xz = Mat::Zero(4, 4);
  xz(0, 2) = 1;
  xz(1, 3) = -1;
  xz(2, 0) = 1;
  xz(3, 1) = -1;
  REQUIRE(max_abs_diff(pauli_matrix(PauliString("XZ")), xz) == 0.0);

  for (std::uint64_t idx = 0; idx < 64; ++idx) {
    const PauliString s = PauliString::from_index(3, idx);
    REQUIRE(max_abs_diff(pauli_matrix(s),
                         kron({pauli_matrix_1q(s.at(0)), pauli_matrix_1q(s.at(1)),
                               pauli_matrix_1q(s.at(2))})) < 1e-15);
  }
}

TEST_CASE("pauli_weight") {
  REQUIRE(pauli_weight(PauliString("III")) == 0);
  REQUIRE(pauli_weight(PauliString("IXI")) == 1);
  REQUIRE(pauli_weight(PauliString("XYZ")) == 3);
}

TEST_CASE("string ordering and indexing") {
  REQUIRE(PauliString("IXZ").index() == 0 * 16 + 1 * 4 + 3);
  REQUIRE(PauliString::from_index(3, 0).str() == "III");
  REQUIRE(PauliString::from_index(2, 7).str() == "XZ");
  REQUIRE(PauliString("IX") < PauliString("XI"));  // site 0 most significant
}

TEST_CASE("pauli orthogonality Tr[P_s P_t] = 2^n delta_st") {
  for (int len = 1; len <= 3; ++len) {
    const std::uint64_t count = 1ULL << (2 * len);
    for (std::uint64_t a = 0; a < count; ++a) {
      const Mat pa = pauli_matrix(PauliString::from_index(len, a));
      for (std::uint64_t b = 0; b < count; ++b) {
        const cxd tr = pauli_trace(PauliString::from_index(len, b), pa);
        const double expected = (a == b) ? std::pow(2.0, len) : 0.0;
        REQUIRE(std::abs(tr - cxd{expected, 0.0}) < 1e-12);
      }
    }
  }
}

TEST_CASE("choi_to_process on reference channels") {
  SECTION("identity channel") {
    ProcessMatrix chi = choi_to_process(bell_product_choi(1));
    Mat expected = Mat::Zero(4, 4);
    expected(0, 0) = 1.0;
    REQUIRE(max_abs_diff(chi.m, expected) < 1e-12);
  }
  SECTION("full dephasing") {
    ProcessMatrix chi = choi_to_process(dephasing_choi_1q(0.5));
    Mat expected = Mat::Zero(4, 4);
    expected(0, 0) = 0.5;
    expected(3, 3) = 0.5;
    REQUIRE(max_abs_diff(chi.m, expected) < 1e-12);
  }
  SECTION("unitary X channel") {
    const Mat x = pauli_matrix_1q(Pauli::X);
    const Mat op = kron(Mat::Identity(2, 2), x);
    DenseChoi bell = bell_product_choi(1);
    DenseChoi jx{op * bell.m * op.adjoint(), 0, 1};
    ProcessMatrix chi = choi_to_process(jx);
    Mat expected = Mat::Zero(4, 4);
    expected(1, 1) = 1.0;
    REQUIRE(max_abs_diff(chi.m, expected) < 1e-12);
  }
}

TEST_CASE("process_to_choi inverts choi_to_process") {
  SECTION("chi_II = 1 gives the Bell projector") {
    ProcessMatrix chi{Mat::Zero(4, 4), 1};
    chi.m(0, 0) = 1.0;
    REQUIRE(max_abs_diff(process_to_choi(chi).m, bell_product_choi(1).m) < 1e-12);
  }
  SECTION("chi_ZZ = 1 gives the Z-conjugation Choi") {
    ProcessMatrix chi{Mat::Zero(4, 4), 1};
    chi.m(3, 3) = 1.0;
    const Mat z = kron(Mat::Identity(2, 2), pauli_matrix_1q(Pauli::Z));
    Mat expected = z * bell_product_choi(1).m * z.adjoint();
    REQUIRE(max_abs_diff(process_to_choi(chi).m, expected) < 1e-12);
  }
  SECTION("round trip on random Hermitian unit-trace matrices") {
    RngStream rng(41);
    for (int sites = 1; sites <= 2; ++sites) {
      const Eigen::Index dim = doubled_dim(sites);
      Mat h = random_hermitian(dim, rng);
      h /= h.trace().real();
      DenseChoi j{h, 0, sites};
      DenseChoi back = process_to_choi(choi_to_process(j));
      REQUIRE(max_abs_diff(back.m, j.m) < 1e-10);
      REQUIRE(std::abs(choi_to_process(j).m.trace() - cxd{1.0, 0.0}) < 1e-10);
    }
  }
  SECTION("non-Hermitian input is rejected") {
    ProcessMatrix chi{Mat::Zero(4, 4), 1};
    chi.m(0, 1) = 1.0;
    REQUIRE_THROWS_AS(process_to_choi(chi), NumericalError);
  }
}

TEST_CASE("CPTP process matrix has real diagonal summing to 1") {
  ProcessMatrix chi = choi_to_process(dephasing_choi_1q(0.3));
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    REQUIRE(std::abs(chi.m(i, i).imag()) < 1e-14);
    sum += chi.m(i, i).real();
  }
  REQUIRE(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("pauli_expand") {
  SECTION("identity / 2") {
    PauliCoefficients c = pauli_expand(0.5 * Mat::Identity(2, 2));
    REQUIRE(c.coeffs.at("I") == Catch::Approx(0.5));
    REQUIRE(c.coeffs.at("X") == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(c.coeffs.at("Z") == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("projector |0><0| = (I + Z)/2") {
    Mat p = Mat::Zero(2, 2);
    p(0, 0) = 1.0;
    PauliCoefficients c = pauli_expand(p);
    REQUIRE(c.coeffs.at("I") == Catch::Approx(0.5));
    REQUIRE(c.coeffs.at("Z") == Catch::Approx(0.5));
  }
  SECTION("round trip on random Hermitian 4x4") {
    RngStream rng(7);
    Mat h = random_hermitian(4, rng);
    REQUIRE(max_abs_diff(pauli_assemble(pauli_expand(h)), h) < 1e-12);
  }
  SECTION("non-square input rejected") {
    REQUIRE_THROWS_AS(pauli_expand(Mat::Zero(2, 3)), DimensionError);
  }
}

TEST_CASE("pauli_assemble") {
  PauliCoefficients c;
  c.qubit_count = 1;
  c.coeffs["I"] = 0.5;
  REQUIRE(max_abs_diff(pauli_assemble(c), 0.5 * Mat::Identity(2, 2)) < 1e-15);

  c.coeffs["Z"] = 0.5;
  Mat expected = Mat::Zero(2, 2);
  expected(0, 0) = 1.0;
  REQUIRE(max_abs_diff(pauli_assemble(c), expected) < 1e-15);

  SECTION("assemble then expand on random coefficient maps, 2 qubits") {
    RngStream rng(11);
    PauliCoefficients r;
    r.qubit_count = 2;
    for (std::uint64_t idx = 0; idx < 16; ++idx)
      r.coeffs[PauliString::from_index(2, idx).str()] = rng.gaussian();
    PauliCoefficients back = pauli_expand(pauli_assemble(r));
    for (const auto& [k, v] : r.coeffs) REQUIRE(back.coeffs.at(k) == Catch::Approx(v).margin(1e-12));
  }
  SECTION("inconsistent string lengths rejected") {
    PauliCoefficients bad;
    bad.qubit_count = 2;
    bad.coeffs["X"] = 1.0;
    REQUIRE_THROWS_AS(pauli_assemble(bad), DimensionError);
  }
}

TEST_CASE("JSON round trips") {
  RngStream rng(3);
  SECTION("process matrix") {
    Mat h = random_hermitian(4, rng);
    h /= h.trace().real();
    ProcessMatrix chi = choi_to_process(DenseChoi{h, 0, 1});
    ProcessMatrix back = process_from_json(process_to_json(chi));
    REQUIRE(back.site_count == chi.site_count);
    REQUIRE(max_abs_diff(back.m, chi.m) < 1e-14);
  }
  SECTION("coefficient map") {
    PauliCoefficients c = pauli_expand(random_hermitian(4, rng));
    PauliCoefficients back = coefficients_from_json(coefficients_to_json(c));
    REQUIRE(back.qubit_count == c.qubit_count);
    for (const auto& [k, v] : c.coeffs) REQUIRE(back.coeffs.at(k) == Catch::Approx(v));
  }
}
