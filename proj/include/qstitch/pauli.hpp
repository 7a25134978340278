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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qstitch/core.hpp"

namespace qstitch {

/** Letters for the single-qubit Pauli operators, ordered I < X < Y < Z. */
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw ConfigError(std::string("invalid Pauli letter: ") + c);
  }
}

inline const Mat& pauli_matrix_1q(Pauli p) {
  static const Mat mats[4] = {
      (Mat(2, 2) << 1, 0, 0, 1).finished(),
      (Mat(2, 2) << 0, 1, 1, 0).finished(),
      (Mat(2, 2) << 0, -cxi, cxi, 0).finished(),
      (Mat(2, 2) << 1, 0, 0, -1).finished(),
  };
  return mats[static_cast<int>(p)];
}

/**
 * A word over {I, X, Y, Z}, one letter per qubit. Site 0 is the most
 * significant tensor factor; strings enumerate in mixed-radix order with
 * I < X < Y < Z, which coincides with lexicographic order of the text form.
 */
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::string letters) : letters_(std::move(letters)) {
    for (char c : letters_) pauli_from_char(c);
  }

  static PauliString identity(int length) {
    return PauliString(std::string(static_cast<std::size_t>(length), 'I'));
  }

  /// Inverse of index(): the idx-th string of the given length.
  static PauliString from_index(int length, std::uint64_t idx) {
    std::string s(static_cast<std::size_t>(length), 'I');
    for (int i = length - 1; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = "IXYZ"[idx & 3];
      idx >>= 2;
    }
    return PauliString(s);
  }

  int size() const { return static_cast<int>(letters_.size()); }
  Pauli at(int i) const { return pauli_from_char(letters_[static_cast<std::size_t>(i)]); }
  const std::string& str() const { return letters_; }

  /// Mixed-radix rank with site 0 most significant.
  std::uint64_t index() const {
    std::uint64_t idx = 0;
    for (char c : letters_) idx = (idx << 2) | static_cast<std::uint64_t>(pauli_from_char(c));
    return idx;
  }

  auto operator<=>(const PauliString& o) const = default;

 private:
  std::string letters_;
};

/// Number of non-identity letters.
inline int pauli_weight(const PauliString& s) {
  int w = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s.at(i) != Pauli::I) ++w;
  return w;
}

/*******************************************************************************
 * SPARSE PAULI ACTION
 *
 * P|c> = phase(c) |row(c)>: every Pauli string is a signed permutation in the
 * computational basis, so traces against dense matrices cost O(2^m) instead of
 * O(4^m).
 ******************************************************************************/

struct PauliAction {
  std::vector<Eigen::Index> row;  // row(c)
  std::vector<cxd> phase;         // phase(c)
};

inline PauliAction pauli_action(const PauliString& s) {
  const int m = s.size();
  const Eigen::Index dim = Eigen::Index{1} << m;
  PauliAction act;
  act.row.resize(static_cast<std::size_t>(dim));
  act.phase.resize(static_cast<std::size_t>(dim));
  for (Eigen::Index c = 0; c < dim; ++c) {
    Eigen::Index r = 0;
    cxd ph{1.0, 0.0};
    for (int q = 0; q < m; ++q) {
      const int bit = static_cast<int>((c >> (m - 1 - q)) & 1);
      int out_bit = bit;
      switch (s.at(q)) {
        case Pauli::I: break;
        case Pauli::X: out_bit = 1 - bit; break;
        case Pauli::Y:
          out_bit = 1 - bit;
          ph *= (out_bit == 1) ? cxi : -cxi;
          break;
        case Pauli::Z:
          if (bit == 1) ph = -ph;
          break;
      }
      r = (r << 1) | out_bit;
    }
    act.row[static_cast<std::size_t>(c)] = r;
    act.phase[static_cast<std::size_t>(c)] = ph;
  }
  return act;
}

/// Dense matrix of the Pauli word (Kronecker product, site 0 leftmost).
inline Mat pauli_matrix(const PauliString& s) {
  const Eigen::Index dim = Eigen::Index{1} << s.size();
  Mat out = Mat::Zero(dim, dim);
  const PauliAction act = pauli_action(s);
  for (Eigen::Index c = 0; c < dim; ++c)
    out(act.row[static_cast<std::size_t>(c)], c) = act.phase[static_cast<std::size_t>(c)];
  return out;
}

/// Tr[P_s A] without materializing P_s.
inline cxd pauli_trace(const PauliString& s, const Mat& a) {
  const PauliAction act = pauli_action(s);
  cxd t{0.0, 0.0};
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    t += act.phase[static_cast<std::size_t>(c)] * a(c, act.row[static_cast<std::size_t>(c)]);
  return t;
}

/*******************************************************************************
 * PAULI-BASIS EXPANSION
 ******************************************************************************/

/**
 * Real expansion coefficients of a Hermitian operator over Pauli words,
 * c_a = Tr[P_a A] / 2^m. Keys sort in the canonical enumeration order.
 */
struct PauliCoefficients {
  int qubit_count = 0;
  std::map<std::string, double> coeffs;
};

inline PauliCoefficients pauli_expand(const Mat& a) {
  require(a.rows() == a.cols(), "pauli_expand: non-square input");
  int m = 0;
  while ((Eigen::Index{1} << m) < a.rows()) ++m;
  require((Eigen::Index{1} << m) == a.rows(), "pauli_expand: dimension not a power of 2");
  PauliCoefficients out;
  out.qubit_count = m;
  const std::uint64_t count = std::uint64_t{1} << (2 * m);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const PauliString s = PauliString::from_index(m, idx);
    const double c = pauli_trace(s, a).real() / static_cast<double>(Eigen::Index{1} << m);
    out.coeffs[s.str()] = c;
  }
  return out;
}

inline Mat pauli_assemble(const PauliCoefficients& c) {
  const Eigen::Index dim = Eigen::Index{1} << c.qubit_count;
  Mat out = Mat::Zero(dim, dim);
  for (const auto& [key, val] : c.coeffs) {
    require(static_cast<int>(key.size()) == c.qubit_count,
            "pauli_assemble: inconsistent string length");
    const PauliAction act = pauli_action(PauliString(key));
    for (Eigen::Index col = 0; col < dim; ++col)
      out(act.row[static_cast<std::size_t>(col)], col) +=
          val * act.phase[static_cast<std::size_t>(col)];
  }
  return out;
}

}  // namespace qstitch
