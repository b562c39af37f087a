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

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isotns/channels.hpp"
#include "isotns/random.hpp"

namespace isotns {

/// Single-qubit Pauli matrix: 0 = I, 1 = X, 2 = Y, 3 = Z.
inline Matrix pauli1(int i) {
    Matrix s = Matrix::Zero(2, 2);
    switch (i) {
        case 0:
            s(0, 0) = 1.0;
            s(1, 1) = 1.0;
            break;
        case 1:
            s(0, 1) = 1.0;
            s(1, 0) = 1.0;
            break;
        case 2:
            s(0, 1) = cplx{0.0, -1.0};
            s(1, 0) = cplx{0.0, 1.0};
            break;
        case 3:
            s(0, 0) = 1.0;
            s(1, 1) = -1.0;
            break;
        default:
            throw PreconditionError("pauli1: index must be in [0, 4)");
    }
    return s;
}

/// Two-qubit Pauli sigma_k = P_{k / 4} (x) P_{k % 4}, lexicographic over {I, X, Y, Z}.
inline Matrix pauli(int k) {
    require(k >= 0 && k < 16, "pauli: index must be in [0, 16)");
    return kron(pauli1(k >> 2), pauli1(k & 3));
}

inline Matrix swap_matrix() {
    Matrix s = Matrix::Zero(4, 4);
    s(0, 0) = 1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 3) = 1.0;
    return s;
}

inline bool is_unitary(const Matrix &u, double tol = kDefaultTol) {
    return u.rows() == u.cols() && max_abs(u.adjoint() * u - identity_matrix(static_cast<std::size_t>(u.rows()))) <= tol;
}

inline void require_unitary(const Matrix &u, std::size_t dim, const char *who) {
    require(static_cast<std::size_t>(u.rows()) == dim && static_cast<std::size_t>(u.cols()) == dim,
            std::string(who) + ": unitary has the wrong shape");
    require(is_unitary(u), std::string(who) + ": matrix is not unitary");
}

/// Builds a site from its physical slices V^i (each out x in).
inline SiteTensor site_from_slices(const std::vector<Matrix> &slices, SiteDims dims, SiteRole role,
                                   double tol = kDefaultTol) {
    require(slices.size() == dims.phys, "site_from_slices: need one slice per physical index");
    const auto out = static_cast<Eigen::Index>(dims.out());
    Matrix v(static_cast<Eigen::Index>(dims.phys) * out, static_cast<Eigen::Index>(dims.in()));
    for (std::size_t i = 0; i < slices.size(); ++i) {
        require(slices[i].rows() == out && slices[i].cols() == static_cast<Eigen::Index>(dims.in()),
                "site_from_slices: slice has the wrong shape");
        v.middleRows(static_cast<Eigen::Index>(i) * out, out) = slices[i];
    }
    return SiteTensor::from_isometry(v, dims, role, tol);
}

/// |00>_P (x) W on the virtual pair, for a 4x4 unitary W mapping (l, d) to (r, u).
inline SiteTensor pure_virtual_site(const Matrix &w, SiteRole role) {
    std::vector<Matrix> slices(4, Matrix::Zero(4, 4));
    slices[0] = w;
    return site_from_slices(slices, {4, 2, 2, 2, 2}, role);
}

/// G = |00>_P (x) U_V.
inline SiteTensor gate_tensor(const Matrix &u) {
    require_unitary(u, 4, "gate_tensor");
    return pure_virtual_site(u, SiteRole::gate);
}

/// I = |00>_P (x) SWAP_V.
inline SiteTensor identity_tensor() {
    return pure_virtual_site(swap_matrix(), SiteRole::identity);
}

/// S: moves the incoming pair (l, d) onto the physical legs; outgoing legs have dimension 1.
inline SiteTensor swap_tensor() {
    std::vector<Matrix> slices;
    for (int i = 0; i < 4; ++i) {
        Matrix s = Matrix::Zero(1, 4);
        s(0, i) = 1.0;
        slices.push_back(s);
    }
    return site_from_slices(slices, {4, 2, 2, 1, 1}, SiteRole::swap);
}

/// V = sum_i A^i (x) |i>, i.e. slice V^i = A^i. Requires a trace-preserving set of
/// 16 two-qubit operators.
inline SiteTensor stinespring_site(const std::vector<Matrix> &kraus) {
    require(kraus.size() == 16, "stinespring_site: need 16 Kraus operators");
    for (const auto &k : kraus) {
        require(k.rows() == 4 && k.cols() == 4, "stinespring_site: Kraus operators must be 4x4");
    }
    // Validates trace preservation.
    QuantumChannel(4, 4, kraus, 1.0, kDefaultTol);
    return site_from_slices(kraus, {16, 2, 2, 2, 2}, SiteRole::stinespring);
}

/// Kraus set of E_U(rho) = (1 - p) U rho U^dagger + p Tr(rho) 1/4, indexed 4 * alpha + beta:
/// A^{aa} = g0 U + s |a><a| U and A^{ab} = s |a><b| U with s = sqrt(p / 4).
inline std::vector<Matrix> depolarized_unitary_kraus(const Matrix &u, double p) {
    require_unitary(u, 4, "depolarized_unitary_kraus");
    require(p > 0.0 && p < 1.0, "depolarized_unitary_kraus: p must lie in (0, 1)");
    constexpr double k = 4.0;
    const double s = std::sqrt(p / k);
    const double g0 = (-s + std::sqrt(s * s + k * (1.0 - p))) / k;
    std::vector<Matrix> out;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            Matrix e = Matrix::Zero(4, 4);
            e(a, b) = s;
            Matrix op = e * u;
            if (a == b) {
                op += g0 * u;
            }
            out.push_back(op);
        }
    }
    return out;
}

/// k in the restart channel's injectivity delta = sqrt(p / k^2).
inline constexpr double kRestartK = 2.0;

/// Kraus set of E_res(rho) = (1 - p) |0><0| (x) Tr_1(rho) + p Tr(rho) 1/4, indexed
/// 8 * a1 + 4 * a2 + b: A = c |a1><a2| (x) P_b / sqrt(2), with c^2 = p / 4 except
/// c^2 = 2 (1 - p) + p / 4 for a1 = b = 0. The operators are mutually orthogonal.
inline std::vector<Matrix> depolarized_restart_kraus(double p) {
    require(p > 0.0 && p < 1.0, "depolarized_restart_kraus: p must lie in (0, 1)");
    std::vector<Matrix> out;
    for (int a1 = 0; a1 < 2; ++a1) {
        for (int a2 = 0; a2 < 2; ++a2) {
            for (int b = 0; b < 4; ++b) {
                const double c2 = (a1 == 0 && b == 0) ? 2.0 * (1.0 - p) + p / 4.0 : p / 4.0;
                Matrix e = Matrix::Zero(2, 2);
                e(a1, a2) = 1.0;
                out.push_back(std::sqrt(c2) * kron(e, pauli1(b) / std::sqrt(2.0)));
            }
        }
    }
    return out;
}

/// Jump operators K_ij of the W isometry, returned in the order 00, 01, 10, 11.
inline std::array<Matrix, 4> w_kraus(double delta) {
    require(delta >= 0.0 && delta * delta <= 0.5 + 1e-15, "w_kraus: need 0 <= delta^2 <= 1/2");
    const double a = std::sqrt(std::max(0.0, 0.5 - delta * delta));
    const cplx id{0.0, delta};
    std::array<Matrix, 4> k;
    for (auto &m : k) {
        m = Matrix::Zero(2, 2);
    }
    k[0](0, 0) = a;
    k[0](1, 1) = a + id;
    k[1](1, 0) = id;
    k[2](0, 1) = id;
    k[3](0, 0) = a + id;
    k[3](1, 1) = a;
    return k;
}

/// W = sum_ij |ij> K_ij as a tensor with legs (p0, p1, out, in).
inline DenseTensor w_isometry(double delta) {
    const auto k = w_kraus(delta);
    DenseTensor w = DenseTensor::zeros({"p0", "p1", "out", "in"}, {2, 2, 2, 2});
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t o = 0; o < 2; ++o) {
                for (std::size_t a = 0; a < 2; ++a) {
                    w.at({i, j, o, a}) = k[2 * i + j](static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(a));
                }
            }
        }
    }
    return w;
}

/// Terminal copy map used where an outgoing bond is absent: |a> -> |aa> on the pair.
inline std::array<Matrix, 4> w_end_kraus() {
    std::array<Matrix, 4> k;
    for (auto &m : k) {
        m = Matrix::Zero(1, 2);
    }
    k[0](0, 0) = 1.0;
    k[3](0, 1) = 1.0;
    return k;
}

/// Restriction of a 4 x 4 operator on (l, d) to the given live input dimensions (1 or 2 each).
inline Matrix restrict_inputs(const Matrix &w, std::size_t left, std::size_t down) {
    Matrix out(w.rows(), static_cast<Eigen::Index>(left * down));
    for (std::size_t a = 0; a < left; ++a) {
        for (std::size_t b = 0; b < down; ++b) {
            out.col(static_cast<Eigen::Index>(a * down + b)) = w.col(static_cast<Eigen::Index>(2 * a + b));
        }
    }
    return out;
}

/// Site (K_{i1 j1} on r) (x) (K_{i2 j2} on u) applied after w, physical index
/// 8 i1 + 4 j1 + 2 i2 + j2. Absent outgoing bonds use the terminal copy map.
inline SiteTensor w_dressed_site(const Matrix &w, double delta, SiteDims dims) {
    require(dims.phys == 16, "w_dressed_site: physical dimension must be 16");
    const auto kw = w_kraus(delta);
    const auto ke = w_end_kraus();
    const auto &k1 = dims.right == 2 ? kw : ke;
    const auto &k2 = dims.up == 2 ? kw : ke;
    const Matrix wr = restrict_inputs(w, dims.left, dims.down);
    std::vector<Matrix> slices;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            slices.push_back(kron(k1[a], k2[b]) * wr);
        }
    }
    SiteTensor s = site_from_slices(slices, dims, SiteRole::w_perturbed);
    s.w_delta = delta;
    return s;
}

/// Perturbed gate tensor (W (x) W) U with D = 2, d = 16. Its PEPS flattening is
/// the tensor square of W's, so the site's smallest singular value is delta^2.
inline SiteTensor perturbed_gate_tensor(const Matrix &u, double delta) {
    require_unitary(u, 4, "perturbed_gate_tensor");
    return w_dressed_site(u, delta, {16, 2, 2, 2, 2});
}

/// P^k_U = U sigma_k / 4 with sigma_k the two-qubit Paulis.
inline SiteTensor postselect_gate_projector(const Matrix &u) {
    require_unitary(u, 4, "postselect_gate_projector");
    std::vector<Matrix> slices;
    for (int k = 0; k < 16; ++k) {
        slices.push_back(u * pauli(k) / 4.0);
    }
    return site_from_slices(slices, {16, 2, 2, 2, 2}, SiteRole::postselect);
}

/// P^k = |k0 k1><k2 k3| / 2 with k = 8 k0 + 4 k1 + 2 k2 + k3.
inline SiteTensor maximally_injective_swap_projector() {
    std::vector<Matrix> slices;
    for (int k = 0; k < 16; ++k) {
        Matrix s = Matrix::Zero(4, 4);
        s(k >> 2, k & 3) = 0.5;
        slices.push_back(s);
    }
    return site_from_slices(slices, {16, 2, 2, 2, 2}, SiteRole::postselect);
}

/// Zero-pads the physical leg: V -> V (x) |0...0>, physical index i -> i * (new_phys / phys).
inline SiteTensor pad_physical(const SiteTensor &s, std::size_t new_phys) {
    const auto &dims = s.dims();
    require(new_phys >= dims.phys && new_phys % dims.phys == 0, "pad_physical: new dimension must be a multiple");
    const std::size_t f = new_phys / dims.phys;
    std::vector<Matrix> slices(new_phys, Matrix::Zero(static_cast<Eigen::Index>(dims.out()),
                                                      static_cast<Eigen::Index>(dims.in())));
    for (std::size_t i = 0; i < dims.phys; ++i) {
        slices[i * f] = s.kraus(i);
    }
    SiteDims nd = dims;
    nd.phys = new_phys;
    SiteTensor out = site_from_slices(slices, nd, s.role());
    out.w_delta = s.w_delta;
    return out;
}

/// N_x x N_y grid of sites; site (m, n) sits at column m and row n. Its right leg
/// feeds (m + 1, n) and its up leg feeds (m, n + 1).
class IsoTnsLattice {
  public:
    IsoTnsLattice() = default;

    /// `sites` is indexed m * ny + n.
    IsoTnsLattice(int nx, int ny, std::vector<SiteTensor> sites) : nx_(nx), ny_(ny), sites_(std::move(sites)) {
        require(nx >= 1 && ny >= 1, "IsoTnsLattice: dimensions must be positive");
        require(sites_.size() == static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny),
                "IsoTnsLattice: need nx * ny sites");
        for (int m = 0; m < nx; ++m) {
            for (int n = 0; n < ny; ++n) {
                const auto &d = site(m, n).dims();
                const std::string where = " at (" + std::to_string(m) + ", " + std::to_string(n) + ")";
                if (m == 0) {
                    require(d.left == 1, "IsoTnsLattice: boundary left leg must have dimension 1" + where);
                }
                if (n == 0) {
                    require(d.down == 1, "IsoTnsLattice: boundary down leg must have dimension 1" + where);
                }
                if (m == nx - 1) {
                    require(d.right == 1, "IsoTnsLattice: boundary right leg must have dimension 1" + where);
                } else {
                    require(d.right == site(m + 1, n).dims().left, "IsoTnsLattice: horizontal bond mismatch" + where);
                }
                if (n == ny - 1) {
                    require(d.up == 1, "IsoTnsLattice: boundary up leg must have dimension 1" + where);
                } else {
                    require(d.up == site(m, n + 1).dims().down, "IsoTnsLattice: vertical bond mismatch" + where);
                }
            }
        }
    }

    int nx() const {
        return nx_;
    }
    int ny() const {
        return ny_;
    }
    std::size_t num_sites() const {
        return sites_.size();
    }
    std::size_t index(int m, int n) const {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(n);
    }
    std::size_t index(Site s) const {
        return index(s.m, s.n);
    }
    bool contains(Site s) const {
        return s.m >= 0 && s.n >= 0 && s.m < nx_ && s.n < ny_;
    }
    const SiteTensor &site(int m, int n) const {
        require(contains({m, n}), "IsoTnsLattice::site: coordinate out of range");
        return sites_[index(m, n)];
    }
    const SiteTensor &site(Site s) const {
        return site(s.m, s.n);
    }
    const std::vector<SiteTensor> &sites() const {
        return sites_;
    }

    /// Anti-diagonal sweeps (m + n ascending), m ascending within a diagonal.
    std::vector<Site> causal_order() const {
        std::vector<Site> order;
        order.reserve(sites_.size());
        for (int t = 0; t <= nx_ + ny_ - 2; ++t) {
            for (int m = std::max(0, t - ny_ + 1); m <= std::min(t, nx_ - 1); ++m) {
                order.push_back({m, t - m});
            }
        }
        return order;
    }

    std::size_t max_bond_dim() const {
        std::size_t d = 1;
        for (const auto &s : sites_) {
            d = std::max({d, s.dims().left, s.dims().down, s.dims().right, s.dims().up});
        }
        return d;
    }

    /// log2 of the product of physical dimensions.
    double log2_phys_dim() const {
        double l = 0.0;
        for (const auto &s : sites_) {
            l += std::log2(static_cast<double>(s.dims().phys));
        }
        return l;
    }

  private:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<SiteTensor> sites_;
};

struct BrickworkGate {
    int qubit = 0;  // acts on (qubit, qubit + 1)
    Matrix unitary;
};

/// Nearest-neighbour brickwork circuit; gates in layer t act on pairs (q, q + 1)
/// with q = t (mod 2).
struct BrickworkCircuit {
    int n_qubits = 2;
    std::vector<std::vector<BrickworkGate>> layers;

    void validate() const {
        require(n_qubits >= 2 && n_qubits % 2 == 0, "BrickworkCircuit: qubit count must be even and >= 2");
        for (std::size_t t = 0; t < layers.size(); ++t) {
            std::vector<bool> used(static_cast<std::size_t>(n_qubits), false);
            for (const auto &g : layers[t]) {
                require(g.qubit >= 0 && g.qubit + 1 < n_qubits, "BrickworkCircuit: gate outside the register");
                require(static_cast<std::size_t>(g.qubit % 2) == t % 2,
                        "BrickworkCircuit: gate in layer " + std::to_string(t) + " breaks the brickwork offset");
                require(!used[g.qubit] && !used[g.qubit + 1], "BrickworkCircuit: overlapping gates in a layer");
                used[g.qubit] = used[g.qubit + 1] = true;
                require_unitary(g.unitary, 4, "BrickworkCircuit");
            }
        }
    }

    std::size_t depth() const {
        return layers.size();
    }
};

/// Random full brickwork circuit with Haar two-qubit gates.
inline BrickworkCircuit random_brickwork(int n_qubits, int depth, Rng &rng) {
    BrickworkCircuit c;
    c.n_qubits = n_qubits;
    for (int t = 0; t < depth; ++t) {
        std::vector<BrickworkGate> layer;
        for (int q = t % 2; q + 1 < n_qubits; q += 2) {
            layer.push_back({q, haar_unitary(4, rng)});
        }
        c.layers.push_back(std::move(layer));
    }
    return c;
}

/// Adapts a 4 x 4 virtual operator w (l, d) -> (r, u) to the given boundary
/// dimensions. Dimension-1 inputs are fixed to |0>; the content of a dimension-1
/// output is written to a physical qubit (u to qubit 0, r to qubit 1), d = 4.
inline SiteTensor routed_site(const Matrix &w, SiteDims dims, SiteRole role) {
    require(dims.phys == 4, "routed_site: physical dimension must be 4");
    const Matrix wr = restrict_inputs(w, dims.left, dims.down);
    std::vector<Matrix> slices(4, Matrix::Zero(static_cast<Eigen::Index>(dims.out()), wr.cols()));
    for (std::size_t rv = 0; rv < 2; ++rv) {
        for (std::size_t uv = 0; uv < 2; ++uv) {
            const std::size_t q1 = dims.right == 1 ? rv : 0;
            const std::size_t q0 = dims.up == 1 ? uv : 0;
            const std::size_t r = dims.right == 1 ? 0 : rv;
            const std::size_t u = dims.up == 1 ? 0 : uv;
            slices[2 * q0 + q1].row(static_cast<Eigen::Index>(r * dims.up + u)) +=
                wr.row(static_cast<Eigen::Index>(2 * rv + uv));
        }
    }
    return site_from_slices(slices, dims, role);
}

/// Boundary-adapted identity tensors on an nx x ny grid with D = 2, d = 4.
/// Every physical qudit is |00>.
inline IsoTnsLattice identity_lattice(int nx, int ny) {
    require(nx >= 1 && ny >= 1, "identity_lattice: dimensions must be positive");
    std::vector<SiteTensor> sites;
    for (int m = 0; m < nx; ++m) {
        for (int n = 0; n < ny; ++n) {
            SiteDims d{4, m > 0 ? 2u : 1u, n > 0 ? 2u : 1u, m < nx - 1 ? 2u : 1u, n < ny - 1 ? 2u : 1u};
            sites.push_back(routed_site(swap_matrix(), d, SiteRole::identity));
        }
    }
    return IsoTnsLattice(nx, ny, std::move(sites));
}

/// Physical read-out site of an embedded circuit; its physical index is
/// 2 b_q + b_{q+1} for the pair (qubit, qubit + 1).
struct SwapSite {
    Site site;
    int qubit = 0;
};

struct Embedding {
    IsoTnsLattice lattice;
    std::vector<SwapSite> swap_sites;
    int first_diagonal = 0;
    int swap_diagonal = 0;
};

/// Places a brickwork circuit on an L x L lattice. Qubit q travels along the
/// fixed spatial offset m - n = q - n_qubits / 2 + 1/2; gate layer t sits on
/// anti-diagonal t0 + t and the read-out (swap) sites on the first diagonal
/// T >= t0 + depth of matching parity. Every other site routes its ancillas
/// unchanged. Physical dimension 4 unless `phys` = 16 requests padding.
inline Embedding embed_brickwork(const BrickworkCircuit &c, std::size_t phys = 4) {
    c.validate();
    require(phys == 4 || phys == 16, "embed_brickwork: physical dimension must be 4 or 16");
    const int half = c.n_qubits / 2;
    const int t0 = half - 1 >= 1 ? half - 1 : half + 1;
    const int depth = static_cast<int>(c.depth());
    int tsw = t0 + depth;
    if ((tsw - t0) % 2 != 0) {
        ++tsw;
    }
    const int size = (tsw + half - 1) / 2 + 1;

    // Gate lookup by (diagonal, offset).
    auto gate_at = [&](int t, int x) -> const Matrix * {
        const int layer = t - t0;
        if (layer < 0 || layer >= depth) {
            return nullptr;
        }
        for (const auto &g : c.layers[static_cast<std::size_t>(layer)]) {
            if (g.qubit - half + 1 == x) {
                return &g.unitary;
            }
        }
        return nullptr;
    };

    Embedding e;
    e.first_diagonal = t0;
    e.swap_diagonal = tsw;
    const Matrix sw = swap_matrix();
    std::vector<SiteTensor> sites;
    for (int m = 0; m < size; ++m) {
        for (int n = 0; n < size; ++n) {
            const int t = m + n;
            const int x = m - n;
            SiteDims d{4, m > 0 ? 2u : 1u, n > 0 ? 2u : 1u, (m < size - 1 && t < tsw) ? 2u : 1u,
                       (n < size - 1 && t < tsw) ? 2u : 1u};
            // A dimension-1 input only arrives from outside the grid or past the read-out.
            if (t > tsw) {
                d.left = d.down = 1;
            }
            SiteRole role = SiteRole::identity;
            Matrix w = sw;
            if (const Matrix *u = gate_at(t, x)) {
                w = sw * (*u);
                role = SiteRole::gate;
            }
            const bool readout = t == tsw && x >= 1 - half && x <= half - 1 && ((x + half - 1) % 2 == 0);
            if (readout) {
                role = SiteRole::swap;
                e.swap_sites.push_back({{m, n}, x + half - 1});
            }
            SiteTensor s = routed_site(w, d, role);
            sites.push_back(phys == 16 ? pad_physical(s, 16) : s);
        }
    }
    std::sort(e.swap_sites.begin(), e.swap_sites.end(),
              [](const SwapSite &a, const SwapSite &b) { return a.qubit < b.qubit; });
    e.lattice = IsoTnsLattice(size, size, std::move(sites));
    return e;
}

/// Interior bond dimension D, boundary 1; each site a Haar isometry with
/// physical dimension max(d, ceil(in / out)).
inline IsoTnsLattice random_lattice(int nx, int ny, std::size_t bond, std::size_t phys, Rng &rng) {
    require(nx >= 1 && ny >= 1 && bond >= 1 && phys >= 1, "random_lattice: dimensions must be positive");
    std::vector<SiteTensor> sites;
    for (int m = 0; m < nx; ++m) {
        for (int n = 0; n < ny; ++n) {
            SiteDims d{phys, m > 0 ? bond : 1, n > 0 ? bond : 1, m < nx - 1 ? bond : 1, n < ny - 1 ? bond : 1};
            d.phys = std::max(phys, (d.in() + d.out() - 1) / d.out());
            sites.push_back(SiteTensor::from_isometry(random_isometry(d.phys * d.out(), d.in(), rng), d,
                                                      SiteRole::custom));
        }
    }
    return IsoTnsLattice(nx, ny, std::move(sites));
}

/// Random D = 2, d = 16 lattice whose site channels are (1 - p) E_rand + p depol.
/// Every site then has delta^2 * D_out >= p, so the depolarizing split admits eta = p.
inline IsoTnsLattice random_injective_lattice(int nx, int ny, double p, Rng &rng) {
    require(nx >= 1 && ny >= 1, "random_injective_lattice: dimensions must be positive");
    require(p > 0.0 && p <= 1.0, "random_injective_lattice: p must lie in (0, 1]");
    std::vector<SiteTensor> sites;
    for (int m = 0; m < nx; ++m) {
        for (int n = 0; n < ny; ++n) {
            SiteDims d{16, m > 0 ? 2u : 1u, n > 0 ? 2u : 1u, m < nx - 1 ? 2u : 1u, n < ny - 1 ? 2u : 1u};
            const std::size_t rank = 4;
            const Matrix v = random_isometry(rank * d.out(), d.in(), rng);
            std::vector<Matrix> ks;
            for (std::size_t i = 0; i < rank; ++i) {
                ks.push_back(v.middleRows(static_cast<Eigen::Index>(i * d.out()), static_cast<Eigen::Index>(d.out())));
            }
            const QuantumChannel rand(d.in(), d.out(), ks);
            const QuantumChannel mix =
                mixture({rand, depolarizing_channel_between(d.in(), d.out())}, {1.0 - p, p});
            const QuantumChannel minimal = channel_from_choi(choi(mix), d.in(), d.out());
            std::vector<Matrix> slices(16, Matrix::Zero(static_cast<Eigen::Index>(d.out()),
                                                        static_cast<Eigen::Index>(d.in())));
            for (std::size_t i = 0; i < minimal.kraus().size(); ++i) {
                slices[i] = minimal.kraus()[i];
            }
            const Matrix mixu = haar_unitary(16, rng);
            std::vector<Matrix> mixed(16, Matrix::Zero(slices[0].rows(), slices[0].cols()));
            for (std::size_t a = 0; a < 16; ++a) {
                for (std::size_t b = 0; b < 16; ++b) {
                    mixed[a] += mixu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * slices[b];
                }
            }
            sites.push_back(site_from_slices(mixed, d, SiteRole::custom, 1e-9));
        }
    }
    return IsoTnsLattice(nx, ny, std::move(sites));
}

/// Random-unitary brickwork with a W isometry on every outgoing ancilla,
/// d = 16. Outgoing boundary legs use the terminal copy map, which never
/// reports a reset.
inline IsoTnsLattice w_perturbed_lattice(int nx, int ny, double delta, Rng &rng) {
    require(nx >= 1 && ny >= 1, "w_perturbed_lattice: dimensions must be positive");
    std::vector<SiteTensor> sites;
    for (int m = 0; m < nx; ++m) {
        for (int n = 0; n < ny; ++n) {
            SiteDims d{16, m > 0 ? 2u : 1u, n > 0 ? 2u : 1u, m < nx - 1 ? 2u : 1u, n < ny - 1 ? 2u : 1u};
            sites.push_back(w_dressed_site(haar_unitary(4, rng), delta, d));
        }
    }
    return IsoTnsLattice(nx, ny, std::move(sites));
}

/// Lattice of postselection tensors, d = 16. Sites with both outgoing bonds
/// present carry U sigma_k / 4 (restricted to their live inputs); the rest
/// carry the terminal tensor V^{a B + b} = |b><a| / sqrt(B), B = D_out, which
/// reads the incoming ancillas into the physical index. `unitaries` is
/// indexed like the sites; an empty list means identity everywhere.
inline IsoTnsLattice postselect_gate_lattice(int nx, int ny, const std::vector<Matrix> &unitaries = {}) {
    require(nx >= 1 && ny >= 1, "postselect_gate_lattice: dimensions must be positive");
    require(unitaries.empty() || unitaries.size() == static_cast<std::size_t>(nx * ny),
            "postselect_gate_lattice: need one unitary per site");
    std::vector<SiteTensor> sites;
    for (int m = 0; m < nx; ++m) {
        for (int n = 0; n < ny; ++n) {
            SiteDims d{16, m > 0 ? 2u : 1u, n > 0 ? 2u : 1u, m < nx - 1 ? 2u : 1u, n < ny - 1 ? 2u : 1u};
            const Matrix u = unitaries.empty() ? identity_matrix(4)
                                               : unitaries[static_cast<std::size_t>(m * ny + n)];
            std::vector<Matrix> slices;
            if (d.out() == 4) {
                require_unitary(u, 4, "postselect_gate_lattice");
                for (int k = 0; k < 16; ++k) {
                    slices.push_back(restrict_inputs(u * pauli(k) / 4.0, d.left, d.down));
                }
            } else {
                const std::size_t b_out = d.out();
                slices.assign(16, Matrix::Zero(static_cast<Eigen::Index>(b_out), static_cast<Eigen::Index>(d.in())));
                for (std::size_t a = 0; a < d.in(); ++a) {
                    for (std::size_t b = 0; b < b_out; ++b) {
                        slices[a * b_out + b](static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
                            1.0 / std::sqrt(static_cast<double>(b_out));
                    }
                }
            }
            sites.push_back(site_from_slices(slices, d, SiteRole::postselect));
        }
    }
    return IsoTnsLattice(nx, ny, std::move(sites));
}

}  // namespace isotns
