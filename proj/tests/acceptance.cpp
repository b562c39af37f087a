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
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "isotns.hpp"
#include "isotns/cli.hpp"
#include "oracles.hpp"

using namespace isotns;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string format(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Matrix random_hermitian(std::size_t d, Rng &rng) {
    Matrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a.data()[i] = rng.complex_normal();
    }
    return (a + a.adjoint()) / 2.0;
}

double operator_norm(const Matrix &h) {
    double best = 0.0;
    for (double e : oracle::hermitian_eigenvalues(h)) {
        best = std::max(best, std::abs(e));
    }
    return best;
}

// Criterion 1: injectivity of depolarized unitaries and of the restart channel.
Verdict criterion1() {
    Rng rng(101);
    double worst_unitary = 0.0, worst_restart = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix u = haar_unitary(4, rng);
        for (double p : {0.01, 0.04, 0.25}) {
            const double d = injectivity_delta(stinespring_site(depolarized_unitary_kraus(u, p))).delta;
            worst_unitary = std::max(worst_unitary, std::abs(d - std::sqrt(p) / 2.0));
        }
    }
    for (double p : {0.01, 0.04, 0.25}) {
        const double d = injectivity_delta(stinespring_site(depolarized_restart_kraus(p))).delta;
        worst_restart = std::max(worst_restart, std::abs(d - std::sqrt(p / (kRestartK * kRestartK))));
    }
    return {worst_unitary < 1e-8 && worst_restart < 1e-8,
            format("max |delta - sqrt(p)/2| = %.2e over 30 unitary cases; restart (k = %g) max error %.2e",
                   worst_unitary, kRestartK, worst_restart)};
}

// Criterion 2: all singular values of the maximally injective tensors equal 1/D.
Verdict criterion2() {
    Rng rng(102);
    double worst = 0.0;
    std::size_t count_ok = 0, tensors = 0;
    auto check = [&](const SiteTensor &s) {
        const auto sv = singular_values(s.peps());
        ++tensors;
        count_ok += sv.size() == 16;
        for (double x : sv) {
            worst = std::max(worst, std::abs(x - 0.5));
        }
    };
    check(maximally_injective_swap_projector());
    for (int k = 0; k < 5; ++k) {
        check(postselect_gate_projector(haar_unitary(4, rng)));
    }
    return {worst < 1e-10 && count_ok == tensors,
            format("%zu tensors, 16 singular values each: max |sigma - 0.5| = %.2e", tensors, worst)};
}

// Criterion 3: depolarizing split at the maximal eta of random injective sites.
Verdict criterion3() {
    Rng rng(103);
    double worst_choi = 0.0, worst_tp = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double p = 0.2 + 0.8 * rng.uniform();
        const IsoTnsLattice l = random_injective_lattice(3, 3, p, rng);
        const SiteTensor &s = l.site({1, 1});
        const auto rep = injectivity_delta(s);
        const double eta = static_cast<double>(rep.bond_dim * rep.bond_dim) * rep.delta * rep.delta;
        const DepolarizingSplit split = depolarizing_split(s, std::min(eta, 1.0));
        worst_choi = std::max(worst_choi, split.reconstruction_error());
        Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(split.e1.dim_in()),
                                  static_cast<Eigen::Index>(split.e1.dim_in()));
        for (const Matrix &k : split.e1.kraus()) {
            sum += k.adjoint() * k;
        }
        worst_tp = std::max(worst_tp, max_abs(sum - (1.0 - split.eta) * identity_matrix(split.e1.dim_in())));
    }
    return {worst_choi < 1e-9 && worst_tp < 1e-9,
            format("100 sites (D = 2, d = 16): max Choi error %.2e, max |sum K^dag K - (1 - eta) 1| %.2e", worst_choi,
                   worst_tp)};
}

double embedding_error(const BrickworkCircuit &c) {
    const Embedding e = embed_brickwork(c);
    std::vector<Site> targets;
    for (const auto &s : e.swap_sites) {
        targets.push_back(s.site);
    }
    const Matrix rho = reduced_density(e.lattice, targets);
    std::vector<std::size_t> all(static_cast<std::size_t>(c.n_qubits));
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Matrix ref = oracle::qubit_marginal(oracle::simulate_circuit(c), all.size(), all);
    return oracle::trace_distance(rho, ref);
}

BrickworkCircuit bell_circuit() {
    BrickworkCircuit c;
    c.n_qubits = 2;
    Matrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    c.layers = {{{0, cnot * kron(h, identity_matrix(2))}}};
    return c;
}

// Criterion 4: swap-site marginals against statevector simulation.
Verdict criterion4() {
    Rng rng(104);
    double worst = embedding_error(bell_circuit());
    for (int k = 0; k < 5; ++k) {
        worst = std::max(worst, embedding_error(random_brickwork(4, 3, rng)));
    }
    return {worst < 1e-10, format("Bell + 5 random 4-qubit depth-3 circuits: max trace distance %.2e", worst)};
}

// Criterion 5: exhaustive average over every occupancy pattern of a 3 x 3 lattice.
Verdict criterion5() {
    Rng rng(105);
    const IsoTnsLattice l = random_injective_lattice(3, 3, 0.6, rng);
    const Observable o{{2, 2}, random_hermitian(16, rng)};
    const double exact = expectation_exact(l, o);
    double worst = 0.0;
    std::size_t patterns = 0;
    for (double eta : {0.25, 0.5}) {
        const auto ex = exhaustive_expectation(l, o, eta);
        patterns = ex.patterns;
        worst = std::max(worst, std::abs(ex.expectation - exact));
    }
    return {worst < 1e-8 && patterns == 512,
            format("%zu patterns, eta in {0.25, 0.5}: max |sum - exact| = %.2e (exact %.6f)", patterns, worst, exact)};
}

// Criterion 6: Monte Carlo on 4 x 4 without cutoff, and the cutoff bias at s_th = 12.
Verdict criterion6() {
    Rng rng(106);
    const IsoTnsLattice l = random_injective_lattice(4, 4, 0.6, rng);
    const Observable o{{3, 3}, random_hermitian(16, rng)};
    const double exact = expectation_exact(l, o);
    const double norm = operator_norm(o.op);
    const auto mc = estimate(l, o, 0.5, kNoCutoff, 100000, 6060);
    const double z = std::abs(mc.mean - exact) / mc.standard_error;
    const auto cut = exhaustive_expectation(l, o, 0.5, 12);
    const double bias = std::abs(cut.expectation - exact);
    const bool ok = z < 3.0 && bias < 0.02 * norm;
    return {ok, format("estimate %.5f vs exact %.5f (%.2f SE, SE %.1e); s_th = 12 bias %.2e = %.2e ||O|| (rejected weight %.2e)",
                       mc.mean, exact, z, mc.standard_error, bias, bias / norm, 1.0 - cut.accepted_weight)};
}

// Criterion 7: exponential cluster tail at eta = 0.45, boundary clusters at 0.30.
Verdict criterion7() {
    const auto rows = cluster_survey(32, 32, {0.45, 0.30}, 20000, 107);
    std::vector<double> xs, ys;
    for (std::size_t s = 5; s <= 25; ++s) {
        const double t = rows[0].tail(s);
        if (t > 0.0) {
            xs.push_back(static_cast<double>(s));
            ys.push_back(std::log(t));
        }
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    const double boundary = rows[1].boundary_fraction;
    return {xs.size() == 21 && slope < -0.05 && boundary > 0.5,
            format("eta 0.45: log-tail slope over s in [5, 25] = %.4f (%zu points); eta 0.30: boundary fraction %.4f",
                   slope, xs.size(), boundary)};
}

// Criterion 8: W reset rate is delta^2 for any input.
Verdict criterion8() {
    Rng rng(108);
    Vector zero(2), plus(2), random(2);
    zero << 1.0, 0.0;
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    random << rng.complex_normal(), rng.complex_normal();
    random.normalize();
    double worst = 0.0;
    for (double delta : {0.3, 0.5, 0.7 / std::sqrt(2.0)}) {
        for (const Vector &psi : {zero, plus, random}) {
            const int n = 10000;
            int hits = 0;
            for (int k = 0; k < n; ++k) {
                const std::size_t o = sample_w_outcome(delta, psi, rng);
                hits += o == 1 || o == 2;
            }
            const double q = delta * delta;
            worst = std::max(worst, std::abs(hits / static_cast<double>(n) - q) / std::sqrt(q * (1 - q) / n));
        }
    }
    return {worst < 3.0, format("9 (delta, state) pairs x 1e4 events: max deviation %.2f sigma", worst)};
}

double exact_sampler_tv(const IsoTnsLattice &l, std::uint64_t n, std::uint64_t seed) {
    const auto want = born_distribution(l);
    const auto dims = oracle::causal_dims(l);
    std::vector<double> h(want.size(), 0.0);
    for (std::uint64_t i = 0; i < n; ++i) {
        h[outcome_index(dims, sample_exact(l, seed, i).outcome)] += 1.0 / static_cast<double>(n);
    }
    return oracle::total_variation(h, want);
}

double reset_sampler_tv(const IsoTnsLattice &l, double delta, std::size_t s_th, std::uint64_t n,
                        std::uint64_t seed, double &acceptance) {
    const auto want = oracle::conditioned_born(l, s_th);
    const auto dims = oracle::causal_dims(l);
    std::vector<double> h(want.size(), 0.0);
    double accepted = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto r = sample_with_resets(l, delta, s_th, seed, i);
        if (r.accepted) {
            h[outcome_index(dims, r.outcome)] += 1.0;
            accepted += 1.0;
        }
    }
    for (auto &x : h) {
        x /= accepted;
    }
    acceptance = accepted / static_cast<double>(n);
    return oracle::total_variation(h, want);
}

// Criterion 9: sampler output distributions.
Verdict criterion9() {
    Rng rng(109);
    const IsoTnsLattice small = random_lattice(2, 2, 2, 2, rng);
    const Embedding e = embed_brickwork(random_brickwork(2, 2, rng));
    const double tv_small = exact_sampler_tv(small, 100000, 901);
    const double tv_circuit = exact_sampler_tv(e.lattice, 100000, 902);
    // Conditioned outcome supports grow as 16^sites, so the reset check uses
    // the 2 x 2 W lattice with enough draws to push the sampling floor below 0.015.
    const IsoTnsLattice w = w_perturbed_lattice(2, 2, 0.7, rng);
    double acceptance = 0.0;
    const double tv_reset = reset_sampler_tv(w, 0.7, 3, 2000000, 903, acceptance);
    const bool ok = tv_small < 0.02 && tv_circuit < 0.02 && e.lattice.nx() == 3 && tv_reset < 0.03;
    return {ok, format("TV 2x2 random %.4f, 3x3 embedded circuit %.4f; resets on 2x2 W (delta 0.7, s_th 3, "
                       "acceptance %.3f) conditioned TV %.4f",
                       tv_small, tv_circuit, acceptance, tv_reset)};
}

// Criterion 10: rejection crossover on 8 x 8 with s_th = floor(4 ln N).
Verdict criterion10() {
    Rng rng(110);
    const IsoTnsLattice l = w_perturbed_lattice(8, 8, 0.5, rng);
    const auto s_th = static_cast<std::size_t>(std::floor(4.0 * std::log(64.0)));
    const double low = 0.1, high = 0.7;
    const double max_q = 0.5;  // a W isometry needs delta^2 <= 1/2
    const auto rows = rejection_curve(l, {std::sqrt(low), std::sqrt(max_q)}, s_th, 20000, 1010);
    const bool low_ok = rows[0].rejection_fraction > 0.9;
    // delta^2 = 0.7 has no W isometry; report the largest admissible point instead.
    const bool high_ok = high <= max_q && rows[1].rejection_fraction < 0.1;
    return {low_ok && high_ok,
            format("s_th = %zu: rejection %.4f at delta^2 = %.1f; delta^2 = %.1f is outside the W domain "
                   "(delta^2 <= 0.5), rejection at delta^2 = 0.5 is %.4f (mean max component %.1f)",
                   s_th, rows[0].rejection_fraction, low, high, rows[1].rejection_fraction,
                   rows[1].mean_max_component)};
}

std::string hex(double x) {
    return format("%a", x);
}

// Criterion 11: identical outputs for thread counts 1 and 3.
Verdict criterion11() {
    std::map<std::string, std::function<std::string(std::size_t)>> runs;
    runs["estimate"] = [](std::size_t t) {
        Rng rng(111);
        const IsoTnsLattice l = random_injective_lattice(3, 3, 0.6, rng);
        const auto r = estimate(l, {{2, 2}, random_hermitian(16, rng)}, 0.5, 6, 5000, 1111, t);
        return hex(r.mean) + hex(r.standard_error) + std::to_string(r.n_accepted) + std::to_string(r.n_rejected_size);
    };
    runs["sample_exact"] = [](std::size_t t) {
        Rng rng(112);
        std::string s;
        for (const auto &r : sample_many(random_lattice(3, 3, 2, 2, rng), 2000, 1112, t)) {
            s += cli::outcome_string(r.outcome) + hex(r.log_probability);
        }
        return s;
    };
    runs["sample_with_resets"] = [](std::size_t t) {
        Rng rng(113);
        std::string s;
        for (const auto &r : sample_with_resets_many(w_perturbed_lattice(3, 3, 0.6, rng), 0.6, 4, 2000, 1113, t)) {
            s += cli::outcome_string(r.outcome) + hex(r.log_probability) + (r.accepted ? "a" : "r");
        }
        return s;
    };
    runs["cluster_survey"] = [](std::size_t t) {
        std::string s;
        for (const auto &r : cluster_survey(16, 16, {0.3, 0.45}, 2000, 1114, t)) {
            for (auto c : r.size_histogram) {
                s += std::to_string(c) + ",";
            }
            s += hex(r.boundary_fraction);
        }
        return s;
    };
    runs["rejection_curve"] = [](std::size_t t) {
        Rng rng(115);
        std::string s;
        for (const auto &r : rejection_curve(w_perturbed_lattice(8, 8, 0.5, rng), {0.3, 0.6}, 16, 2000, 1115, t)) {
            s += hex(r.rejection_fraction) + hex(r.mean_max_component);
        }
        return s;
    };
    // Shipped configs through the same code path as the command-line tool.
    const std::filesystem::path dir = ISOTNS_CONFIG_DIR;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const std::string sub = name.substr(0, name.find('_'));
        if (sub != "verify" && sub != "expect" && sub != "sample" && sub != "scan" && sub != "embed") {
            continue;
        }
        runs["config " + name] = [path = entry.path(), sub](std::size_t t) {
            const auto cfg = cli::parse_config(cli::detail::read_json_file(path), sub, {{}, t, false},
                                               path.parent_path());
            const auto r = cli::run(cfg);
            return std::to_string(r.exit_code) + r.text;
        };
    }
    std::vector<std::string> differing;
    for (const auto &[name, run] : runs) {
        const std::string a = run(1), b = run(3), c = run(1);
        if (a != b || a != c) {
            differing.push_back(name);
        }
    }
    std::string detail = format("%zu runs compared at 1 and 3 threads", runs.size());
    for (const auto &d : differing) {
        detail += "; differs: " + d;
    }
    return {differing.empty(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria{
        {"depolarized-unitary and restart injectivity", criterion1},
        {"maximal injectivity saturation", criterion2},
        {"depolarizing split", criterion3},
        {"embedding correctness", criterion4},
        {"exhaustive percolation average", criterion5},
        {"Monte Carlo percolation estimate", criterion6},
        {"subcritical cluster tail", criterion7},
        {"W reset statistics", criterion8},
        {"sampler fidelity", criterion9},
        {"reset rejection crossover", criterion10},
        {"thread-count determinism", criterion11},
    };
    // Runtime budgets in seconds; zero means none.
    const double budget[] = {10, 1, 60, 30, 300, 600, 0, 0, 0, 0, 0};
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget[k] > 0 && secs > budget[k]) {
            v.pass = false;
            v.detail += format("; runtime %.1f s exceeds %.0f s", secs, budget[k]);
        }
        failures += !v.pass;
        std::printf("%s criterion %zu (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
