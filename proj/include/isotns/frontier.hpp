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

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "isotns/lattice.hpp"

namespace isotns {

/// A leg carried by a frontier: an opaque id and its dimension.
struct Leg {
    int id = 0;
    std::size_t dim = 1;
};

/// Leg ids used by the engines for an N-site lattice: the right bond of site i
/// is 2i, its up bond 2i + 1 and its physical leg 2N + i. Legs of dimension 1
/// are never materialized.
struct LegIds {
    std::size_t num_sites = 0;
    int right(std::size_t i) const {
        return static_cast<int>(2 * i);
    }
    int up(std::size_t i) const {
        return static_cast<int>(2 * i + 1);
    }
    int phys(std::size_t i) const {
        return static_cast<int>(2 * num_sites + i);
    }
};

/// Incoming legs (left, down) of a site that have dimension > 1.
inline std::vector<int> input_legs(const IsoTnsLattice &l, Site s) {
    const LegIds ids{l.num_sites()};
    const auto &d = l.site(s).dims();
    std::vector<int> in;
    if (d.left > 1) {
        in.push_back(ids.right(l.index(s.m - 1, s.n)));
    }
    if (d.down > 1) {
        in.push_back(ids.up(l.index(s.m, s.n - 1)));
    }
    return in;
}

/// Outgoing legs (right, up) of a site that have dimension > 1.
inline std::vector<Leg> output_legs(const IsoTnsLattice &l, Site s) {
    const LegIds ids{l.num_sites()};
    const auto &d = l.site(s).dims();
    std::vector<Leg> out;
    if (d.right > 1) {
        out.push_back({ids.right(l.index(s)), d.right});
    }
    if (d.up > 1) {
        out.push_back({ids.up(l.index(s)), d.up});
    }
    return out;
}

/// Site fed by an outgoing bond leg id.
inline Site consumer_of(const IsoTnsLattice &l, int leg) {
    const std::size_t i = static_cast<std::size_t>(leg) / 2;
    const Site s{static_cast<int>(i / static_cast<std::size_t>(l.ny())), static_cast<int>(i % static_cast<std::size_t>(l.ny()))};
    return leg % 2 == 0 ? Site{s.m + 1, s.n} : Site{s.m, s.n + 1};
}

namespace detail {

inline std::size_t product(const std::vector<Leg> &legs) {
    std::size_t p = 1;
    for (const auto &g : legs) {
        p *= g.dim;
    }
    return p;
}

inline std::size_t find_leg(const std::vector<Leg> &legs, int id) {
    for (std::size_t k = 0; k < legs.size(); ++k) {
        if (legs[k].id == id) {
            return k;
        }
    }
    throw InvariantFailure("frontier: leg " + std::to_string(id) + " is not present");
}

/// Permutation that brings `ids` to the front, keeping the others in order.
inline std::vector<std::size_t> front_perm(const std::vector<Leg> &legs, const std::vector<int> &ids) {
    std::vector<std::size_t> perm;
    std::vector<bool> taken(legs.size(), false);
    for (int id : ids) {
        const std::size_t k = find_leg(legs, id);
        require(!taken[k], "frontier: repeated leg id");
        taken[k] = true;
        perm.push_back(k);
    }
    for (std::size_t k = 0; k < legs.size(); ++k) {
        if (!taken[k]) {
            perm.push_back(k);
        }
    }
    return perm;
}

inline bool is_identity_perm(const std::vector<std::size_t> &perm) {
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (perm[k] != k) {
            return false;
        }
    }
    return true;
}

inline std::vector<std::size_t> dims_of(const std::vector<Leg> &legs) {
    std::vector<std::size_t> d;
    d.reserve(legs.size());
    for (const auto &g : legs) {
        d.push_back(g.dim);
    }
    return d;
}

using RowMap = Eigen::Map<Matrix>;
using ConstRowMap = Eigen::Map<const Matrix>;

}  // namespace detail

/// Pure state over a list of legs, row-major in leg order.
class PureFrontier {
  public:
    explicit PureFrontier(std::size_t cap = std::size_t{1} << 20) : cap_(cap), amps_(1, cplx{1.0, 0.0}) {}

    const std::vector<Leg> &legs() const {
        return legs_;
    }
    const std::vector<cplx> &amplitudes() const {
        return amps_;
    }
    std::size_t dim() const {
        return amps_.size();
    }
    bool has_leg(int id) const {
        return std::any_of(legs_.begin(), legs_.end(), [&](const Leg &g) { return g.id == id; });
    }

    void move_to_front(const std::vector<int> &ids) {
        const auto perm = detail::front_perm(legs_, ids);
        if (detail::is_identity_perm(perm)) {
            return;
        }
        const auto dims = detail::dims_of(legs_);
        amps_ = permute_axes(amps_, dims, perm);
        std::vector<Leg> nl;
        for (auto k : perm) {
            nl.push_back(legs_[k]);
        }
        legs_ = std::move(nl);
    }

    /// Applies v: (in legs) -> (out legs); the out legs end up at the front.
    void apply(const std::vector<int> &in_ids, const std::vector<Leg> &out_legs, const Matrix &v) {
        move_to_front(in_ids);
        std::size_t a = 1;
        for (std::size_t k = 0; k < in_ids.size(); ++k) {
            a *= legs_[k].dim;
        }
        const std::size_t o = detail::product(out_legs);
        require(static_cast<std::size_t>(v.cols()) == a && static_cast<std::size_t>(v.rows()) == o,
                "PureFrontier::apply: operator shape does not match the legs");
        const std::size_t r = amps_.size() / a;
        if (o * r > cap_) {
            throw CapExceeded("pure frontier dimension " + std::to_string(o * r) + " exceeds cap " +
                              std::to_string(cap_));
        }
        detail::ConstRowMap psi(amps_.data(), static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r));
        Matrix out = v * psi;
        amps_.assign(out.data(), out.data() + out.size());
        std::vector<Leg> nl = out_legs;
        nl.insert(nl.end(), legs_.begin() + static_cast<std::ptrdiff_t>(in_ids.size()), legs_.end());
        legs_ = std::move(nl);
    }

    /// Squared norms of the slices of the leading leg.
    std::vector<double> leading_marginal() const {
        require(!legs_.empty(), "PureFrontier: no legs");
        const std::size_t d = legs_[0].dim;
        const std::size_t r = amps_.size() / d;
        std::vector<double> p(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < r; ++j) {
                s += std::norm(amps_[i * r + j]);
            }
            p[i] = s;
        }
        return p;
    }

    /// Keeps the slice `value` of the leading leg, drops the leg and rescales by
    /// 1/sqrt(prob).
    void project_leading(std::size_t value, double prob) {
        require(!legs_.empty(), "PureFrontier: no legs");
        require(prob > 0.0, "PureFrontier::project_leading: zero probability");
        const std::size_t d = legs_[0].dim;
        require(value < d, "PureFrontier::project_leading: value out of range");
        const std::size_t r = amps_.size() / d;
        const double f = 1.0 / std::sqrt(prob);
        std::vector<cplx> out(r);
        for (std::size_t j = 0; j < r; ++j) {
            out[j] = amps_[value * r + j] * f;
        }
        amps_ = std::move(out);
        legs_.erase(legs_.begin());
    }

    /// Tensor product with another frontier; its legs go after ours.
    void absorb(const PureFrontier &other) {
        if (other.legs_.empty()) {
            for (auto &x : amps_) {
                x *= other.amps_[0];
            }
            return;
        }
        if (amps_.size() * other.amps_.size() > cap_) {
            throw CapExceeded("pure frontier dimension exceeds cap " + std::to_string(cap_));
        }
        std::vector<cplx> out(amps_.size() * other.amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            for (std::size_t j = 0; j < other.amps_.size(); ++j) {
                out[i * other.amps_.size() + j] = amps_[i] * other.amps_[j];
            }
        }
        amps_ = std::move(out);
        legs_.insert(legs_.end(), other.legs_.begin(), other.legs_.end());
    }

    /// Adds a leg in a basis state.
    void add_basis_leg(Leg leg, std::size_t value) {
        PureFrontier f(cap_);
        f.legs_ = {leg};
        f.amps_.assign(leg.dim, cplx{});
        f.amps_[value] = 1.0;
        absorb(f);
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto &x : amps_) {
            s += std::norm(x);
        }
        return s;
    }

  private:
    std::size_t cap_;
    std::vector<Leg> legs_;
    std::vector<cplx> amps_;
};

/// Density matrix over a list of legs, rows and columns row-major in leg order.
class MixedFrontier {
  public:
    explicit MixedFrontier(std::size_t cap = std::size_t{1} << 12) : cap_(cap), rho_(Matrix::Ones(1, 1)) {}

    const std::vector<Leg> &legs() const {
        return legs_;
    }
    const Matrix &matrix() const {
        return rho_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(rho_.rows());
    }
    std::size_t cap() const {
        return cap_;
    }
    bool has_leg(int id) const {
        return std::any_of(legs_.begin(), legs_.end(), [&](const Leg &g) { return g.id == id; });
    }
    cplx trace() const {
        return rho_.trace();
    }

    void move_to_front(const std::vector<int> &ids) {
        const auto perm = detail::front_perm(legs_, ids);
        if (detail::is_identity_perm(perm)) {
            return;
        }
        auto dims = detail::dims_of(legs_);
        const std::size_t k = dims.size();
        std::vector<std::size_t> full_dims(dims);
        full_dims.insert(full_dims.end(), dims.begin(), dims.end());
        std::vector<std::size_t> full_perm(perm);
        for (auto p : perm) {
            full_perm.push_back(p + k);
        }
        std::vector<cplx> buf(rho_.data(), rho_.data() + rho_.size());
        buf = permute_axes(buf, full_dims, full_perm);
        rho_ = detail::ConstRowMap(buf.data(), rho_.rows(), rho_.cols());
        std::vector<Leg> nl;
        for (auto p : perm) {
            nl.push_back(legs_[p]);
        }
        legs_ = std::move(nl);
    }

    /// Appends a maximally mixed leg.
    void add_mixed_leg(Leg leg) {
        check_cap(dim() * leg.dim);
        rho_ = kron(rho_, identity_matrix(leg.dim) / static_cast<double>(leg.dim));
        legs_.push_back(leg);
    }

    /// rho -> sum_K (K (x) 1) rho (K (x) 1)^dagger with K: (in legs) -> (out legs);
    /// the out legs end up at the front.
    void apply(const std::vector<int> &in_ids, const std::vector<Leg> &out_legs, const std::vector<Matrix> &kraus) {
        move_to_front(in_ids);
        std::size_t a = 1;
        for (std::size_t k = 0; k < in_ids.size(); ++k) {
            a *= legs_[k].dim;
        }
        const std::size_t o = detail::product(out_legs);
        const std::size_t r = dim() / a;
        check_cap(o * r);
        const auto ea = static_cast<Eigen::Index>(a);
        const auto eo = static_cast<Eigen::Index>(o);
        const auto er = static_cast<Eigen::Index>(r);
        Matrix acc = Matrix::Zero(eo * er, eo * er);
        Matrix xt(ea * er, eo * er);
        for (const auto &kop : kraus) {
            require(kop.cols() == ea && kop.rows() == eo, "MixedFrontier::apply: operator shape does not match legs");
            // X = (K (x) 1) rho, viewing rho as a x (r a r).
            Matrix x = kop * detail::ConstRowMap(rho_.data(), ea, er * ea * er);
            // X is (o r) x (a r); (K (x) 1) X^dagger is the conjugated state, viewed as o x (r o r).
            xt = detail::ConstRowMap(x.data(), eo * er, ea * er).adjoint();
            Matrix y = kop * detail::ConstRowMap(xt.data(), ea, er * eo * er);
            acc += detail::ConstRowMap(y.data(), eo * er, eo * er);
        }
        rho_ = std::move(acc);
        std::vector<Leg> nl = out_legs;
        nl.insert(nl.end(), legs_.begin() + static_cast<std::ptrdiff_t>(in_ids.size()), legs_.end());
        legs_ = std::move(nl);
    }

    void trace_out(const std::vector<int> &ids) {
        if (ids.empty()) {
            return;
        }
        move_to_front(ids);
        std::size_t a = 1;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            a *= legs_[k].dim;
        }
        const std::size_t r = dim() / a;
        const auto er = static_cast<Eigen::Index>(r);
        Matrix out = Matrix::Zero(er, er);
        for (std::size_t i = 0; i < a; ++i) {
            const auto off = static_cast<Eigen::Index>(i * r);
            out += rho_.block(off, off, er, er);
        }
        rho_ = std::move(out);
        legs_.erase(legs_.begin(), legs_.begin() + static_cast<std::ptrdiff_t>(ids.size()));
    }

    /// Density matrix with legs in the given order (must name every leg).
    Matrix ordered(const std::vector<int> &ids) {
        require(ids.size() == legs_.size(), "MixedFrontier::ordered: must list every leg");
        move_to_front(ids);
        return rho_;
    }

  private:
    void check_cap(std::size_t d) const {
        if (d > cap_) {
            throw CapExceeded("frontier dimension " + std::to_string(d) + " exceeds cap " + std::to_string(cap_));
        }
    }

    std::size_t cap_;
    std::vector<Leg> legs_;
    Matrix rho_;
};

}  // namespace isotns
