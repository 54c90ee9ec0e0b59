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

#include "ris/serialization.hpp"

#include <json.hpp>

#include "ris/error.hpp"

namespace ris {
namespace {

using json = nlohmann::json;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json& j) {
  require(j.is_array(), "expected a matrix as an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    require(static_cast<Eigen::Index>(j[r].size()) == cols, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json band_json(const SymBandMatrix& a) {
  return json{{"storage", a.storage() == Storage::kDense ? "dense" : "banded"},
              {"block_size", a.block_size()},
              {"num_blocks", a.num_blocks()},
              {"diag_blocks", a.diag_storage()},
              {"sub_blocks", a.sub_storage()}};
}

SymBandMatrix band_from(const json& j) {
  const auto storage = j.at("storage").get<std::string>() == "dense" ? Storage::kDense : Storage::kBanded;
  SymBandMatrix a(j.at("num_blocks").get<std::size_t>(), j.at("block_size").get<std::size_t>(), storage);
  const auto diag = j.at("diag_blocks").get<std::vector<double>>();
  const auto sub = j.at("sub_blocks").get<std::vector<double>>();
  const std::size_t m2 = a.block_size() * a.block_size();
  require(diag.size() == a.num_blocks() * m2, "precision: diag_blocks has the wrong length");
  require(sub.size() == (a.num_blocks() - 1) * m2, "precision: sub_blocks has the wrong length");
  for (std::size_t t = 0; t < a.num_blocks(); ++t) {
    auto dst = a.diag_block(t);
    std::copy_n(diag.begin() + static_cast<std::ptrdiff_t>(t * m2), m2, dst.begin());
    if (t + 1 < a.num_blocks()) {
      auto sdst = a.sub_block(t);
      std::copy_n(sub.begin() + static_cast<std::ptrdiff_t>(t * m2), m2, sdst.begin());
    }
  }
  return a;
}

json gaussian_json(const GaussianProposal& g) {
  return json{{"kind", "gaussian"}, {"mean", vector_json(g.mean())}, {"precision", band_json(g.precision())}};
}

GaussianProposal gaussian_from(const json& j) {
  require(j.at("kind").get<std::string>() == "gaussian", "expected a gaussian proposal");
  return GaussianProposal(vector_from(j.at("mean")), band_from(j.at("precision")));
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string to_json(const SymBandMatrix& a) { return band_json(a).dump(); }
std::string to_json(const GaussianProposal& g) { return gaussian_json(g).dump(); }

std::string to_json(const MixtureProposal& g) {
  const json j{{"kind", "mixture"},
               {"pi", g.pi()},
               {"components", json::array({gaussian_json(g.heavy()), gaussian_json(g.fitted())})}};
  return j.dump();
}

SymBandMatrix band_matrix_from_json(const std::string& text) {
  return guarded([&] { return band_from(parse(text)); });
}

GaussianProposal gaussian_from_json(const std::string& text) {
  return guarded([&] { return gaussian_from(parse(text)); });
}

MixtureProposal mixture_from_json(const std::string& text) {
  return guarded([&] {
    const json j = parse(text);
    require(j.at("kind").get<std::string>() == "mixture", "expected a mixture proposal");
    const json& c = j.at("components");
    require(c.size() == 2, "mixture needs exactly two components");
    return MixtureProposal(j.at("pi").get<double>(), gaussian_from(c[0]), gaussian_from(c[1]));
  });
}

// ---------------------------------------------------------------------------

std::string to_json(const Dataset& d) {
  json x = json::array();
  for (const auto& m : d.x) x.push_back(matrix_json(m));
  json z = json::array();
  for (const auto& m : d.z) z.push_back(matrix_json(m));
  const json j{{"type", d.type}, {"y", d.y}, {"X", x}, {"Z", z}, {"params", d.params}, {"seed", d.seed}};
  return j.dump(1);
}

Dataset dataset_from_json(const std::string& text) {
  return guarded([&] {
    const json j = parse(text);
    Dataset d;
    d.type = j.at("type").get<std::string>();
    require(d.type == "poisson_ssm" || d.type == "panel_poisson" || d.type == "glmm_poisson",
            "unknown dataset type '" + d.type + "'");
    d.y = j.at("y").get<std::vector<std::vector<int>>>();
    if (j.contains("X"))
      for (const auto& m : j.at("X")) d.x.push_back(matrix_from(m));
    if (j.contains("Z"))
      for (const auto& m : j.at("Z")) d.z.push_back(matrix_from(m));
    if (j.contains("params")) d.params = j.at("params").get<std::map<std::string, std::vector<double>>>();
    if (j.contains("seed")) d.seed = j.at("seed").get<std::uint64_t>();
    require(!d.y.empty(), "dataset has no observations");
    if (d.type != "poisson_ssm") require(d.x.size() == d.y.size(), "dataset needs one X per series");
    if (d.type == "glmm_poisson") require(d.z.size() == d.y.size(), "dataset needs one Z per cluster");
    return d;
  });
}

PanelData to_panel_data(const Dataset& d) {
  require(d.type == "panel_poisson", "to_panel_data: dataset is not a panel");
  PanelData p;
  p.family = PanelFamily::kPoisson;
  p.counts = d.y;
  p.covariates = d.x;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    require(static_cast<std::size_t>(d.x[i].rows()) == d.y[i].size(), "to_panel_data: X rows must match y length");
  }
  return p;
}

}  // namespace ris
