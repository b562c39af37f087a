// Copyright 2026 The isotns Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isotns/lattice.hpp"

namespace isotns {

using json = nlohmann::json;

inline json complex_to_json(cplx z) {
    return json::array({z.real(), z.imag()});
}

inline cplx complex_from_json(const json &j) {
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
            "complex entries must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

/// {leg_labels, shape, data} with data a flat row-major list of [re, im].
inline json tensor_to_json(const DenseTensor &t) {
    json data = json::array();
    for (const auto &z : t.data()) {
        data.push_back(complex_to_json(z));
    }
    return {{"leg_labels", t.labels()}, {"shape", t.shape()}, {"data", std::move(data)}};
}

inline DenseTensor tensor_from_json(const json &j) {
    require(j.is_object() && j.contains("leg_labels") && j.contains("shape") && j.contains("data"),
            "tensor record needs leg_labels, shape and data");
    std::vector<cplx> data;
    for (const auto &z : j.at("data")) {
        data.push_back(complex_from_json(z));
    }
    return DenseTensor(j.at("leg_labels").get<std::vector<std::string>>(),
                       j.at("shape").get<std::vector<std::size_t>>(), std::move(data));
}

/// Rows of [re, im] pairs.
inline json matrix_to_json(const Matrix &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(complex_to_json(m(i, k)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json &j) {
    require(j.is_array() && !j.empty() && j[0].is_array(), "matrix must be a non-empty list of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        require(j[static_cast<std::size_t>(i)].is_array() &&
                    static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) == cols,
                "matrix rows must have equal length");
        for (Eigen::Index k = 0; k < cols; ++k) {
            m(i, k) = complex_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        }
    }
    return m;
}

inline json site_to_json(const SiteTensor &s, Site where) {
    json j{{"m", where.m}, {"n", where.n}, {"role", role_name(s.role())}, {"tensor", tensor_to_json(s.tensor())}};
    if (s.w_delta) {
        j["w_delta"] = *s.w_delta;
    }
    return j;
}

inline json lattice_to_json(const IsoTnsLattice &l) {
    json sites = json::array();
    for (int m = 0; m < l.nx(); ++m) {
        for (int n = 0; n < l.ny(); ++n) {
            sites.push_back(site_to_json(l.site(m, n), {m, n}));
        }
    }
    return {{"nx", l.nx()}, {"ny", l.ny()}, {"sites", std::move(sites)}};
}

inline IsoTnsLattice lattice_from_json(const json &j) {
    require(j.is_object() && j.contains("nx") && j.contains("ny") && j.contains("sites"),
            "lattice record needs nx, ny and sites");
    const int nx = j.at("nx").get<int>();
    const int ny = j.at("ny").get<int>();
    require(nx >= 1 && ny >= 1, "lattice dimensions must be positive");
    std::vector<std::optional<SiteTensor>> slots(static_cast<std::size_t>(nx * ny));
    for (const auto &e : j.at("sites")) {
        const int m = e.at("m").get<int>();
        const int n = e.at("n").get<int>();
        require(m >= 0 && n >= 0 && m < nx && n < ny, "site coordinate outside the lattice");
        auto &slot = slots[static_cast<std::size_t>(m * ny + n)];
        require(!slot, "site listed twice");
        SiteTensor s(tensor_from_json(e.at("tensor")), role_from_name(e.value("role", std::string("custom"))));
        if (e.contains("w_delta")) {
            s.w_delta = e.at("w_delta").get<double>();
        }
        slot = std::move(s);
    }
    std::vector<SiteTensor> sites;
    for (auto &s : slots) {
        require(s.has_value(), "lattice record is missing a site");
        sites.push_back(std::move(*s));
    }
    return IsoTnsLattice(nx, ny, std::move(sites));
}

/// {n_qubits, layers: [[{pair: [q, q + 1], unitary}]]}.
inline json circuit_to_json(const BrickworkCircuit &c) {
    json layers = json::array();
    for (const auto &layer : c.layers) {
        json gates = json::array();
        for (const auto &g : layer) {
            gates.push_back({{"pair", {g.qubit, g.qubit + 1}}, {"unitary", matrix_to_json(g.unitary)}});
        }
        layers.push_back(std::move(gates));
    }
    return {{"n_qubits", c.n_qubits}, {"layers", std::move(layers)}};
}

inline BrickworkCircuit circuit_from_json(const json &j) {
    require(j.is_object() && j.contains("n_qubits") && j.contains("layers"), "circuit needs n_qubits and layers");
    BrickworkCircuit c;
    c.n_qubits = j.at("n_qubits").get<int>();
    for (const auto &layer : j.at("layers")) {
        std::vector<BrickworkGate> gates;
        for (const auto &g : layer) {
            const auto pair = g.at("pair").get<std::vector<int>>();
            require(pair.size() == 2 && pair[1] == pair[0] + 1, "gate pair must be [q, q + 1]");
            gates.push_back({pair[0], matrix_from_json(g.at("unitary"))});
        }
        c.layers.push_back(std::move(gates));
    }
    c.validate();
    return c;
}

}  // namespace isotns
