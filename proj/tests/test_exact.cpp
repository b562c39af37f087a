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

#include <cmath>

#include <gtest/gtest.h>

#include "isotns.hpp"
#include "oracles.hpp"

using namespace isotns;

namespace {

Matrix random_hermitian(std::size_t d, Rng &rng) {
    Matrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a.data()[i] = rng.complex_normal();
    }
    return (a + a.adjoint()) / 2.0;
}

double state_expectation(const StateVector &sv, Site s, const Matrix &op) {
    return (oracle::state_marginal(sv, {oracle::position(sv, s)}) * op).trace().real();
}

// Dense amplitudes of an MPS chain: site k contributes V_k[(p, out), in].
std::vector<cplx> dense_mps(const std::vector<Matrix> &tensors, std::vector<std::size_t> &phys) {
    std::vector<cplx> v{1.0};  // indexed (P, a), a the open ancilla
    std::size_t a_dim = 1;
    phys.clear();
    for (std::size_t k = 0; k < tensors.size(); ++k) {
        const std::size_t dout = k + 1 < tensors.size() ? static_cast<std::size_t>(tensors[k + 1].cols()) : 1;
        const std::size_t d = static_cast<std::size_t>(tensors[k].rows()) / dout;
        const std::size_t n_p = v.size() / a_dim;
        std::vector<cplx> next(n_p * d * dout, cplx{});
        for (std::size_t pp = 0; pp < n_p; ++pp) {
            for (std::size_t a = 0; a < a_dim; ++a) {
                for (std::size_t p = 0; p < d; ++p) {
                    for (std::size_t o = 0; o < dout; ++o) {
                        next[(pp * d + p) * dout + o] +=
                            v[pp * a_dim + a] *
                            tensors[k](static_cast<Eigen::Index>(p * dout + o), static_cast<Eigen::Index>(a));
                    }
                }
            }
        }
        v = std::move(next);
        a_dim = dout;
        phys.push_back(d);
    }
    return v;
}

Matrix column(std::initializer_list<cplx> xs) {
    Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (cplx x : xs) {
        m(i++, 0) = x;
    }
    return m;
}

Vector basis(std::size_t dim, std::size_t k) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(k)) = 1.0;
    return v;
}

// Z on the first of the two virtual qubits read out by a terminal postselection site.
Matrix terminal_z(const SiteDims &d) {
    std::vector<double> z(16, 0.0);
    for (std::size_t a = 0; a < d.in(); ++a) {
        for (std::size_t b = 0; b < d.out(); ++b) {
            const std::size_t first = d.in() == 4 ? a >> 1 : a;
            z[a * d.out() + b] = first == 0 ? 1.0 : -1.0;
        }
    }
    return diagonal_observable(z);
}

}  // namespace

TEST(FullState, SingleSiteState) {
    Rng rng(1);
    const Matrix phi = random_isometry(3, 1, rng);
    const IsoTnsLattice l(1, 1, {SiteTensor::from_isometry(phi, {3, 1, 1, 1, 1}, SiteRole::custom)});
    const StateVector sv = full_state(l);
    ASSERT_EQ(sv.amps.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(std::abs(sv.amps[i] - phi(static_cast<Eigen::Index>(i), 0)), 0.0, 1e-15);
    }
}

TEST(FullState, IdentityLatticeIsAllZeros) {
    const auto p = born_distribution(identity_lattice(2, 2));
    EXPECT_NEAR(p[0], 1.0, 1e-15);
}

TEST(FullState, MatchesBruteForceSummation) {
    Rng rng(2);
    for (const auto &l : {random_lattice(2, 2, 2, 2, rng), random_lattice(2, 3, 2, 2, rng),
                          random_lattice(3, 2, 2, 3, rng), w_perturbed_lattice(2, 2, 0.4, rng)}) {
        const auto got = oracle::raster_amplitudes(l, full_state(l));
        const auto want = oracle::brute_force_amplitudes(l);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            EXPECT_NEAR(std::abs(got[k] - want[k]), 0.0, 1e-12);
        }
    }
}

TEST(FullState, SitesFollowCausalOrderAndAreNormalized) {
    Rng rng(3);
    const IsoTnsLattice l = random_lattice(3, 3, 2, 2, rng);
    const StateVector sv = full_state(l);
    EXPECT_EQ(sv.sites, l.causal_order());
    EXPECT_NEAR(sv.norm_squared(), 1.0, 1e-8);
}

TEST(FullState, EmbeddedBell) {
    BrickworkCircuit c;
    c.n_qubits = 2;
    Matrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    c.layers = {{{0, cnot * kron(h, identity_matrix(2))}}};
    const Embedding e = embed_brickwork(c);
    const StateVector sv = full_state(e.lattice);
    const Matrix rho = oracle::state_marginal(sv, {oracle::position(sv, e.swap_sites[0].site)});
    Matrix bell = Matrix::Zero(4, 4);
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    EXPECT_LT(oracle::trace_distance(rho, bell), 1e-12);

    // The Born table puts weight 1/2 on each correlated swap-site outcome.
    const auto p = born_distribution(e.lattice);
    const std::size_t pos = oracle::position(sv, e.swap_sites[0].site);
    std::vector<double> swap_marginal(4, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        swap_marginal[outcome_digits(sv.dims, k)[pos]] += p[k];
    }
    EXPECT_NEAR(swap_marginal[0], 0.5, 1e-12);
    EXPECT_NEAR(swap_marginal[3], 0.5, 1e-12);
}

TEST(FullState, CapExceeded) {
    Rng rng(4);
    const IsoTnsLattice l = random_injective_lattice(3, 3, 0.5, rng);
    EXPECT_THROW(full_state(l), CapExceeded);
    EXPECT_THROW(full_state(random_lattice(2, 2, 2, 2, rng), 8), CapExceeded);
}

TEST(ExpectationExact, IdentityObservableIsOne) {
    Rng rng(5);
    const IsoTnsLattice l = random_injective_lattice(3, 3, 0.5, rng);
    for (Site s : l.causal_order()) {
        EXPECT_NEAR(expectation_exact(l, {s, identity_matrix(16)}), 1.0, 1e-10);
    }
}

TEST(ExpectationExact, IdentityLatticeZZ) {
    const IsoTnsLattice l = identity_lattice(3, 3);
    const Matrix zz = kron(pauli1(3), pauli1(3));
    for (Site s : l.causal_order()) {
        EXPECT_NEAR(expectation_exact(l, {s, zz}), 1.0, 1e-12);
    }
}

TEST(ExpectationExact, MatchesFullState) {
    Rng rng(6);
    for (int trial = 0; trial < 3; ++trial) {
        const IsoTnsLattice l = random_lattice(3, 3, 2, 2, rng);
        const StateVector sv = full_state(l);
        for (Site s : l.causal_order()) {
            const Matrix o = random_hermitian(l.site(s).dims().phys, rng);
            EXPECT_NEAR(expectation_exact(l, {s, o}), state_expectation(sv, s, o), 1e-8);
        }
    }
}

TEST(ReducedDensity, MatchesFullStateMarginals) {
    Rng rng(7);
    const IsoTnsLattice l = random_lattice(3, 3, 2, 2, rng);
    const StateVector sv = full_state(l);
    const std::vector<std::vector<Site>> sets{{{2, 2}}, {{0, 2}, {2, 0}}, {{1, 1}, {0, 0}}, {{2, 1}, {1, 2}, {0, 1}}};
    for (const auto &targets : sets) {
        std::vector<std::size_t> pos;
        for (Site s : targets) {
            pos.push_back(oracle::position(sv, s));
        }
        EXPECT_LT(oracle::trace_distance(reduced_density(l, targets), oracle::state_marginal(sv, pos)), 1e-8);
    }
    EXPECT_THROW(reduced_density(l, {}), PreconditionError);
    EXPECT_THROW(reduced_density(l, {{0, 0}, {0, 0}}), PreconditionError);
    EXPECT_THROW(reduced_density(l, {{3, 0}}), PreconditionError);
}

TEST(ReducedDensity, FrontierCap) {
    Rng rng(8);
    const IsoTnsLattice l = random_lattice(4, 4, 2, 2, rng);
    EXPECT_THROW(reduced_density(l, {{3, 3}}, 4), CapExceeded);
    EXPECT_NO_THROW(reduced_density(l, {{3, 3}}));
}

TEST(ExpectationExact, RejectsBadObservables) {
    const IsoTnsLattice l = identity_lattice(2, 2);
    EXPECT_THROW(expectation_exact(l, {{2, 0}, identity_matrix(4)}), PreconditionError);
    EXPECT_THROW(expectation_exact(l, {{0, 0}, identity_matrix(2)}), PreconditionError);
    Matrix nh = identity_matrix(4);
    nh(0, 1) = 1.0;
    EXPECT_THROW(expectation_exact(l, {{0, 0}, nh}), PreconditionError);
}

TEST(MpsExpectation, ProductState) {
    const std::vector<Matrix> t{column({1.0, 0.0}), column({0.0, 1.0}), column({1.0, 0.0})};
    EXPECT_NEAR(mps_expectation(t, 0, pauli1(3)), 1.0, 1e-15);
    EXPECT_NEAR(mps_expectation(t, 1, pauli1(3)), -1.0, 1e-15);
    EXPECT_NEAR(mps_expectation(t, 2, pauli1(3)), 1.0, 1e-15);
}

TEST(MpsExpectation, Ghz) {
    Matrix first = Matrix::Zero(4, 1);
    first(0, 0) = first(3, 0) = 1.0 / std::sqrt(2.0);
    Matrix copy = Matrix::Zero(4, 2);
    copy(0, 0) = copy(3, 1) = 1.0;
    const std::vector<Matrix> t{first, copy, identity_matrix(2)};
    EXPECT_NEAR(mps_expectation(t, 1, pauli1(3)), 0.0, 1e-15);
    EXPECT_NEAR(mps_expectation(t, 1, pauli1(1)), 0.0, 1e-15);
    EXPECT_NEAR(mps_expectation(t, 2, identity_matrix(2)), 1.0, 1e-15);
}

TEST(MpsExpectation, RandomChainMatchesDenseContraction) {
    Rng rng(9);
    for (int trial = 0; trial < 3; ++trial) {
        const std::vector<std::size_t> bonds{1, 2, 3, 3, 2, 2, 1};
        std::vector<Matrix> t;
        for (std::size_t k = 0; k < 6; ++k) {
            t.push_back(random_isometry(2 * bonds[k + 1], bonds[k], rng));
        }
        // The last tensor must be a d x Din isometry with d >= Din.
        std::vector<std::size_t> phys;
        const auto psi = dense_mps(t, phys);
        double norm = 0.0;
        for (auto a : psi) {
            norm += std::norm(a);
        }
        EXPECT_NEAR(norm, 1.0, 1e-10);
        StateVector sv;
        sv.dims = phys;
        sv.amps = psi;
        for (std::size_t k = 0; k < 6; ++k) {
            sv.sites.push_back({static_cast<int>(k), 0});
        }
        for (std::size_t k = 0; k < 6; ++k) {
            const Matrix o = random_hermitian(2, rng);
            const double want = (oracle::state_marginal(sv, {k}) * o).trace().real();
            EXPECT_NEAR(mps_expectation(t, k, o), want, 1e-10);
        }
    }
}

TEST(MpsExpectation, Errors) {
    EXPECT_THROW(mps_expectation({}, 0, pauli1(3)), PreconditionError);
    const std::vector<Matrix> t{column({1.0, 0.0})};
    EXPECT_THROW(mps_expectation(t, 1, pauli1(3)), PreconditionError);
    EXPECT_THROW(mps_expectation({identity_matrix(2)}, 0, pauli1(3)), PreconditionError);
    Matrix bad = Matrix::Zero(3, 1);
    bad(0, 0) = 1.0;
    Rng rng(10);
    EXPECT_THROW(mps_expectation({bad, random_isometry(4, 2, rng)}, 0, pauli1(3)), PreconditionError);
}

TEST(BornDistribution, SumsToOneAndMatchesAmplitudes) {
    Rng rng(11);
    const IsoTnsLattice l = random_lattice(3, 3, 2, 2, rng);
    const StateVector sv = full_state(l);
    const auto p = born_distribution(l);
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        EXPECT_GE(p[k], 0.0);
        EXPECT_EQ(p[k], std::norm(sv.amps[k]));
        total += p[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(Postselection, IdentityGatesLeaveZeroAncillas) {
    const IsoTnsLattice l = postselect_gate_lattice(2, 2);
    const Site t{1, 0};
    const Matrix z = terminal_z(l.site(t).dims());
    const std::map<Site, Vector> ps{{{0, 0}, basis(16, 0)}};
    EXPECT_NEAR(postselected_expectation(l, ps, {t, z}), 1.0, 1e-12);
    EXPECT_NEAR(postselected_expectation(l, ps, {t, identity_matrix(16)}), 1.0, 1e-12);
    // Without postselection the maximally injective site depolarizes its outputs.
    EXPECT_NEAR(expectation_exact(l, {t, z}), 0.0, 1e-12);
}

TEST(Postselection, HadamardThenMeasure) {
    Matrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    std::vector<Matrix> us(4, identity_matrix(4));
    us[0] = kron(h, identity_matrix(2));
    const IsoTnsLattice l = postselect_gate_lattice(2, 2, us);
    const std::map<Site, Vector> ps{{{0, 0}, basis(16, 0)}};
    EXPECT_NEAR(postselected_expectation(l, ps, {{1, 0}, terminal_z(l.site(1, 0).dims())}), 0.0, 1e-12);
    us[0] = kron(pauli1(1), identity_matrix(2));
    const IsoTnsLattice lx = postselect_gate_lattice(2, 2, us);
    EXPECT_NEAR(postselected_expectation(lx, ps, {{1, 0}, terminal_z(lx.site(1, 0).dims())}), -1.0, 1e-12);
    EXPECT_NEAR(postselected_expectation(lx, ps, {{0, 1}, terminal_z(lx.site(0, 1).dims())}), 1.0, 1e-12);
}

TEST(Postselection, MatchesProjectedFullState) {
    Rng rng(12);
    const IsoTnsLattice l = random_lattice(2, 3, 2, 2, rng);
    const StateVector sv = full_state(l);
    const Site a{0, 1}, b{1, 0}, target{1, 2};
    const Vector ka = random_isometry(2, 1, rng).col(0), kb = random_isometry(2, 1, rng).col(0);
    // Oracle: project amplitudes by hand and take the target marginal.
    StateVector proj = sv;
    const std::size_t pa = oracle::position(sv, a), pb = oracle::position(sv, b);
    for (std::size_t idx = 0; idx < sv.amps.size(); ++idx) {
        auto digits = outcome_digits(sv.dims, idx);
        if (digits[pa] != 0 || digits[pb] != 0) {
            proj.amps[idx] = 0.0;
            continue;
        }
        cplx acc{};
        for (std::size_t x = 0; x < 2; ++x) {
            for (std::size_t y = 0; y < 2; ++y) {
                digits[pa] = x;
                digits[pb] = y;
                acc += std::conj(ka(static_cast<Eigen::Index>(x))) * std::conj(kb(static_cast<Eigen::Index>(y))) *
                       sv.amps[outcome_index(sv.dims, digits)];
            }
        }
        proj.amps[idx] = acc;
    }
    const Matrix o = random_hermitian(l.site(target).dims().phys, rng);
    const Matrix rho = oracle::state_marginal(proj, {oracle::position(sv, target)});
    const double want = (rho * o).trace().real() / rho.trace().real();
    EXPECT_NEAR(postselected_expectation(l, {{a, ka}, {b, kb}}, {target, o}), want, 1e-10);
}

TEST(Postselection, Errors) {
    const IsoTnsLattice l = postselect_gate_lattice(2, 2);
    // (1, 0) reads the right output of (0, 0), which is |0> after postselecting k = 0.
    const std::map<Site, Vector> impossible{{{0, 0}, basis(16, 0)}, {{1, 0}, basis(16, 2)}};
    EXPECT_THROW(postselected_expectation(l, impossible, {{1, 1}, identity_matrix(16)}), PreconditionError);
    EXPECT_THROW(postselected_expectation(l, {{{0, 0}, basis(4, 0)}}, {{1, 1}, identity_matrix(16)}),
                 PreconditionError);
    EXPECT_THROW(postselected_expectation(l, {{{1, 1}, basis(16, 0)}}, {{1, 1}, identity_matrix(16)}),
                 PreconditionError);
}
