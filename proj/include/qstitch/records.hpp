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

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qstitch/core.hpp"
#include "qstitch/pauli.hpp"

namespace qstitch {

/// Normalized eigenstate |basis, sign> of a single-qubit Pauli operator.
inline Vec basis_eigenstate(Pauli basis, int sign) {
  require(sign == 1 || sign == -1, "basis_eigenstate: sign must be +-1");
  Vec v(2);
  const double s = 1.0 / std::sqrt(2.0);
  switch (basis) {
    case Pauli::X: v << s, (sign > 0 ? s : -s); break;
    case Pauli::Y: v << s, (sign > 0 ? cxd{0, s} : cxd{0, -s}); break;
    case Pauli::Z:
      v << (sign > 0 ? 1.0 : 0.0), (sign > 0 ? 0.0 : 1.0);
      break;
    default: throw ConfigError("basis_eigenstate: basis must be X, Y or Z");
  }
  return v;
}

/**
 * One experimental shot: per site, the prepared Pauli eigenstate and the
 * measured basis/outcome (the (U, V, b) triple in basis/sign form).
 */
struct ShotRecord {
  struct Site {
    Pauli in_basis = Pauli::Z;
    int in_sign = 1;
    Pauli out_basis = Pauli::Z;
    int out_sign = 1;
  };
  std::vector<Site> sites;

  int n() const { return static_cast<int>(sites.size()); }
};

/*******************************************************************************
 * JSON-LINES FORMAT
 *
 * One shot per line: {"in": [["Z",1],["X",-1],...], "out": [["Y",1],...]}
 ******************************************************************************/

inline nlohmann::json record_to_json(const ShotRecord& r) {
  nlohmann::json in = nlohmann::json::array(), out = nlohmann::json::array();
  for (const auto& s : r.sites) {
    in.push_back({std::string(1, pauli_char(s.in_basis)), s.in_sign});
    out.push_back({std::string(1, pauli_char(s.out_basis)), s.out_sign});
  }
  return nlohmann::json{{"in", in}, {"out", out}};
}

inline ShotRecord record_from_json(const nlohmann::json& js) {
  const auto& in = js.at("in");
  const auto& out = js.at("out");
  require(in.size() == out.size(), "record_from_json: in/out length mismatch");
  ShotRecord r;
  for (std::size_t i = 0; i < in.size(); ++i) {
    ShotRecord::Site s;
    s.in_basis = pauli_from_char(in[i].at(0).get<std::string>().at(0));
    s.in_sign = in[i].at(1).get<int>();
    s.out_basis = pauli_from_char(out[i].at(0).get<std::string>().at(0));
    s.out_sign = out[i].at(1).get<int>();
    r.sites.push_back(s);
  }
  return r;
}

inline void write_records(std::ostream& os, const std::vector<ShotRecord>& records) {
  for (const auto& r : records) os << record_to_json(r).dump() << "\n";
}

inline std::vector<ShotRecord> read_records(std::istream& is) {
  std::vector<ShotRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace qstitch
