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

#include <map>
#include <set>
#include <vector>

#include "isotns/frontier.hpp"

namespace isotns {

inline constexpr std::size_t kStateCap = std::size_t{1} << 20;
inline constexpr std::size_t kFrontierCap = std::size_t{1} << 12;

/// Local observable O on the physical leg of one site.
struct Observable {
    Site site;
    Matrix op;

    void validate(const IsoTnsLattice &l) const {
        require(l.contains(site), "Observable: site outside the lattice");
        require(static_cast<std::size_t>(op.rows()) == l.site(site).dims().phys && op.rows() == op.cols(),
                "Observable: operator must be d x d for the site's physical dimension");
        require(max_abs(op - op.adjoint()) <= kDefaultTol, "Observable: operator is not Hermitian");
    }
};

/// Computational-basis diagonal observable with the given eigenvalues.
inline Matrix diagonal_observable(const std::vector<double> &values) {
    Matrix o = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        o(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
    }
    return o;
}

/// Global state; amplitudes are row-major over `sites`, which follow the causal order.
struct StateVector {
    std::vector<Site> sites;
    std::vector<std::size_t> dims;
    std::vector<cplx> amps;

    double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps) {
            s += std::norm(a);
        }
        return s;
    }
};

/// Mixed-radix index of an outcome over `dims` (first entry most significant).
inline std::size_t outcome_index(const std::vector<std::size_t> &dims, const std::vector<std::size_t> &outcome) {
    require(dims.size() == outcome.size(), "outcome_index: length mismatch");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        idx = idx * dims[k] + outcome[k];
    }
    return idx;
}

inline std::vector<std::size_t> outcome_digits(const std::vector<std::size_t> &dims, std::size_t index) {
    std::vector<std::size_t> out(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    return out;
}

/// Union of the past light cones {(k, l): k <= m, l <= n}, in causal order.
inline std::vector<Site> past_light_cone(const IsoTnsLattice &l, const std::vector<Site> &targets) {
    std::vector<Site> out;
    for (Site s : l.causal_order()) {
        for (Site t : targets) {
            if (s.m <= t.m && s.n <= t.n) {
                out.push_back(s);
                break;
            }
        }
    }
    return out;
}

/// Physical reduced density matrix of `targets` (row-major in the given order),
/// obtained by evolving the ancilla density matrix through the past light cone.
inline Matrix reduced_density(const IsoTnsLattice &l, const std::vector<Site> &targets,
                              std::size_t cap = kFrontierCap) {
    require(!targets.empty(), "reduced_density: no target sites");
    std::vector<bool> in_set(l.num_sites(), false), is_target(l.num_sites(), false);
    for (Site t : targets) {
        require(l.contains(t), "reduced_density: target outside the lattice");
        require(!is_target[l.index(t)], "reduced_density: repeated target");
        is_target[l.index(t)] = true;
    }
    const auto cone = past_light_cone(l, targets);
    for (Site s : cone) {
        in_set[l.index(s)] = true;
    }
    const LegIds ids{l.num_sites()};
    MixedFrontier f(cap);
    for (Site s : cone) {
        const std::size_t i = l.index(s);
        const SiteTensor &v = l.site(s);
        const auto in = input_legs(l, s);
        const auto outs = output_legs(l, s);
        std::vector<Leg> kept;
        std::vector<int> dropped;
        for (const auto &g : outs) {
            const Site c = consumer_of(l, g.id);
            if (in_set[l.index(c)]) {
                kept.push_back(g);
            } else {
                dropped.push_back(g.id);
            }
        }
        if (is_target[i]) {
            std::vector<Leg> out_legs{{ids.phys(i), v.dims().phys}};
            out_legs.insert(out_legs.end(), outs.begin(), outs.end());
            f.apply(in, out_legs, {v.isometry()});
            f.trace_out(dropped);
        } else if (kept.empty()) {
            // Trace preservation: the site only discards its inputs.
            f.trace_out(in);
        } else {
            f.apply(in, outs, v.kraus());
            f.trace_out(dropped);
        }
    }
    std::vector<int> order;
    for (Site t : targets) {
        order.push_back(ids.phys(l.index(t)));
    }
    return f.ordered(order);
}

/// <O> at one site by channel evolution over its past light cone.
inline double expectation_exact(const IsoTnsLattice &l, const Observable &obs, std::size_t cap = kFrontierCap) {
    obs.validate(l);
    const Matrix rho = reduced_density(l, {obs.site}, cap);
    return (rho * obs.op).trace().real();
}

/// Applies every site isometry in causal order to the trivial boundary state.
inline StateVector full_state(const IsoTnsLattice &l, std::size_t cap = kStateCap) {
    const double log2 = l.log2_phys_dim();
    if (log2 > std::log2(static_cast<double>(cap)) + 1e-9) {
        throw CapExceeded("full_state: physical dimension 2^" + std::to_string(log2) + " exceeds cap " +
                          std::to_string(cap));
    }
    const LegIds ids{l.num_sites()};
    PureFrontier f(cap);
    StateVector sv;
    for (Site s : l.causal_order()) {
        const std::size_t i = l.index(s);
        const SiteTensor &v = l.site(s);
        std::vector<Leg> out_legs{{ids.phys(i), v.dims().phys}};
        const auto outs = output_legs(l, s);
        out_legs.insert(out_legs.end(), outs.begin(), outs.end());
        f.apply(input_legs(l, s), out_legs, v.isometry());
        sv.sites.push_back(s);
        sv.dims.push_back(v.dims().phys);
    }
    std::vector<int> order;
    for (Site s : sv.sites) {
        order.push_back(ids.phys(l.index(s)));
    }
    f.move_to_front(order);
    sv.amps = f.amplitudes();
    return sv;
}

/// Computational-basis outcome probabilities, indexed like StateVector::amps.
inline std::vector<double> born_distribution(const IsoTnsLattice &l, std::size_t cap = kStateCap) {
    const StateVector sv = full_state(l, cap);
    std::vector<double> p(sv.amps.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = std::norm(sv.amps[k]);
    }
    return p;
}

/// <O> at obs.site on the state projected onto the given physical kets and
/// renormalized.
inline double postselected_expectation(const IsoTnsLattice &l, const std::map<Site, Vector> &postselect,
                                       const Observable &obs, std::size_t cap = kFrontierCap) {
    obs.validate(l);
    require(!postselect.count(obs.site), "postselected_expectation: observable site is postselected");
    std::vector<Site> targets{obs.site};
    for (const auto &[s, ket] : postselect) {
        require(l.contains(s), "postselected_expectation: site outside the lattice");
        require(static_cast<std::size_t>(ket.size()) == l.site(s).dims().phys,
                "postselected_expectation: ket dimension does not match the site");
        targets.push_back(s);
    }
    const auto cone = past_light_cone(l, targets);
    std::vector<bool> in_set(l.num_sites(), false);
    for (Site s : cone) {
        in_set[l.index(s)] = true;
    }
    const LegIds ids{l.num_sites()};
    MixedFrontier f(cap);
    for (Site s : cone) {
        const std::size_t i = l.index(s);
        const SiteTensor &v = l.site(s);
        const auto in = input_legs(l, s);
        const auto outs = output_legs(l, s);
        std::vector<int> dropped;
        for (const auto &g : outs) {
            if (!in_set[l.index(consumer_of(l, g.id))]) {
                dropped.push_back(g.id);
            }
        }
        if (s == obs.site) {
            std::vector<Leg> out_legs{{ids.phys(i), v.dims().phys}};
            out_legs.insert(out_legs.end(), outs.begin(), outs.end());
            f.apply(in, out_legs, {v.isometry()});
        } else if (auto it = postselect.find(s); it != postselect.end()) {
            Matrix k = Matrix::Zero(static_cast<Eigen::Index>(v.dims().out()), static_cast<Eigen::Index>(v.dims().in()));
            for (std::size_t x = 0; x < v.dims().phys; ++x) {
                k += std::conj(it->second(static_cast<Eigen::Index>(x))) * v.kraus(x);
            }
            f.apply(in, outs, {k});
        } else {
            f.apply(in, outs, v.kraus());
        }
        f.trace_out(dropped);
    }
    const Matrix rho = f.ordered({ids.phys(l.index(obs.site))});
    const double norm = rho.trace().real();
    if (!(norm > 1e-12)) {
        throw PreconditionError("postselected_expectation: postselection probability " + std::to_string(norm) +
                                " is below 1e-12");
    }
    return (rho * obs.op).trace().real() / norm;
}

/// <O_n> for a chain of MPS isometries, each (d_k * Dout_k) x Din_k with Din_0 = 1
/// and Dout_last = 1.
inline double mps_expectation(const std::vector<Matrix> &tensors, std::size_t site, const Matrix &op) {
    require(!tensors.empty(), "mps_expectation: empty chain");
    require(site < tensors.size(), "mps_expectation: site out of range");
    require(tensors.front().cols() == 1, "mps_expectation: the first tensor must be a state");
    std::vector<Eigen::Index> dout(tensors.size());
    for (std::size_t k = 0; k < tensors.size(); ++k) {
        dout[k] = k + 1 < tensors.size() ? tensors[k + 1].cols() : 1;
        require(tensors[k].rows() % dout[k] == 0, "mps_expectation: inconsistent ancilla dimensions");
        require(check_isometry(tensors[k]).ok, "mps_expectation: tensor is not an isometry");
    }
    Matrix rho = Matrix::Ones(1, 1);
    for (std::size_t k = 0; k < site; ++k) {
        const Eigen::Index d = tensors[k].rows() / dout[k];
        Matrix next = Matrix::Zero(dout[k], dout[k]);
        for (Eigen::Index i = 0; i < d; ++i) {
            const Matrix vi = tensors[k].middleRows(i * dout[k], dout[k]);
            next += vi * rho * vi.adjoint();
        }
        rho = std::move(next);
    }
    const Matrix &v = tensors[site];
    const Eigen::Index d = v.rows() / dout[site];
    require(op.rows() == d && op.cols() == d, "mps_expectation: operator dimension mismatch");
    const Matrix full = v * rho * v.adjoint();
    Matrix phys = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            phys(i, j) = full.block(i * dout[site], j * dout[site], dout[site], dout[site]).trace();
        }
    }
    return (phys * op).trace().real();
}

}  // namespace isotns
