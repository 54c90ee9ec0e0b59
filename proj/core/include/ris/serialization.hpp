// Copyright 2026 The robust-is Authors
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

#ifndef RIS_SERIALIZATION_HPP
#define RIS_SERIALIZATION_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ris/band_linalg.hpp"
#include "ris/models.hpp"
#include "ris/proposal.hpp"

namespace ris {

// Proposal documents:
//   {"kind": "gaussian", "mean": [...], "precision": {"storage", "block_size", "diag_blocks", "sub_blocks"}}
//   {"kind": "mixture", "pi": p, "components": [heavy, fitted]}
[[nodiscard]] std::string to_json(const SymBandMatrix& a);
[[nodiscard]] std::string to_json(const GaussianProposal& g);
[[nodiscard]] std::string to_json(const MixtureProposal& g);
[[nodiscard]] SymBandMatrix band_matrix_from_json(const std::string& text);
[[nodiscard]] GaussianProposal gaussian_from_json(const std::string& text);
[[nodiscard]] MixtureProposal mixture_from_json(const std::string& text);

/// Simulated or user-supplied data set: {type, y, X, Z, params, seed}.
/// type is "poisson_ssm" (one series, X empty), "panel_poisson" (one series
/// per panel, X per panel) or "glmm_poisson" (one cluster per entry, X and Z
/// per cluster; params must hold "beta" and "Q" row-major).
struct Dataset {
  std::string type;
  std::vector<std::vector<int>> y;
  std::vector<Matrix> x;
  std::vector<Matrix> z;
  std::map<std::string, std::vector<double>> params;
  std::uint64_t seed = 0;
};

[[nodiscard]] std::string to_json(const Dataset& d);
[[nodiscard]] Dataset dataset_from_json(const std::string& text);

/// Panel view of a "panel_poisson" data set.
[[nodiscard]] PanelData to_panel_data(const Dataset& d);

}  // namespace ris

#endif  // RIS_SERIALIZATION_HPP
