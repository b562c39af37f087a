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

#include <cstdint>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "isotns/exact.hpp"

namespace isotns {

/// One sampled trajectory. `probabilities[k]` is the conditional probability of
/// `outcome[k]` given the earlier outcomes; both follow the causal order.
struct TrajectoryRecord {
    std::vector<std::size_t> outcome;
    std::vector<double> probabilities;
    std::vector<Site> reset_sites;
    std::size_t reset_count = 0;
    double log_probability = 0.0;
    bool accepted = true;
    std::size_t max_component = 0;
    double max_factorization_error = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

namespace detail {

/// Draws from weights after zeroing entries below 1e-14 and renormalizing.
inline std::size_t draw_outcome(std::vector<double> weights, Rng &rng) {
    double total = 0.0;
    for (auto &w : weights) {
        if (w < 1e-14) {
            w = 0.0;
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw InvariantFailure("sampler: all outcome probabilities vanished");
    }
    return rng.categorical(weights);
}

}  // namespace detail

/// Born-rule sample by sequential measurement of the physical legs during the
/// ancilla evolution. Draws from Rng(seed, index).
inline TrajectoryRecord sample_exact(const IsoTnsLattice &l, std::uint64_t seed, std::uint64_t index = 0,
                                     std::size_t cap = kStateCap) {
    Rng rng(seed, index);
    const LegIds ids{l.num_sites()};
    PureFrontier f(cap);
    TrajectoryRecord rec;
    rec.seed = seed;
    rec.index = index;
    for (Site s : l.causal_order()) {
        const std::size_t i = l.index(s);
        const SiteTensor &v = l.site(s);
        std::vector<Leg> out_legs{{ids.phys(i), v.dims().phys}};
        const auto outs = output_legs(l, s);
        out_legs.insert(out_legs.end(), outs.begin(), outs.end());
        f.apply(input_legs(l, s), out_legs, v.isometry());
        const auto p = f.leading_marginal();
        const std::size_t k = detail::draw_outcome(p, rng);
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        const double prob = p[k] / total;
        f.project_leading(k, p[k]);
        rec.outcome.push_back(k);
        rec.probabilities.push_back(prob);
        rec.log_probability += std::log(prob);
    }
    return rec;
}

inline std::vector<TrajectoryRecord> sample_many(const IsoTnsLattice &l, std::uint64_t n, std::uint64_t seed,
                                                 std::size_t threads = 1, std::size_t cap = kStateCap) {
    std::vector<TrajectoryRecord> out(n);
    parallel_for(n, threads, [&](std::size_t i) { out[i] = sample_exact(l, seed, i, cap); });
    return out;
}

/// Outcome ij of one W measurement on a single-qubit state, indexed 2i + j.
inline std::size_t sample_w_outcome(double delta, const Vector &psi, Rng &rng) {
    require(psi.size() == 2, "sample_w_outcome: input must be a qubit state");
    const auto k = w_kraus(delta);
    std::vector<double> p(4);
    for (std::size_t a = 0; a < 4; ++a) {
        p[a] = (k[a] * psi).squaredNorm();
    }
    return rng.categorical(p);
}

/// Reset flags for every live outgoing W and the resulting bond-percolation
/// components (sites joined by unsevered bonds).
struct ResetPattern {
    std::vector<std::uint8_t> right;  // per site, 1 if the right bond was reset
    std::vector<std::uint8_t> up;
    std::vector<std::size_t> component;  // component label per site
    std::vector<std::size_t> component_size;
    std::size_t max_component = 0;
};

/// Flags are drawn in causal order, right bond before up bond, each reset with
/// probability delta^2. Only bonds of dimension > 1 carry a W that can reset.
inline ResetPattern draw_resets(const IsoTnsLattice &l, double delta, Rng &rng) {
    require(delta >= 0.0 && delta * delta <= 0.5 + 1e-15, "draw_resets: need 0 <= delta^2 <= 1/2");
    const double q = delta * delta;
    const std::size_t n = l.num_sites();
    ResetPattern r{std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0), {}, {}, 0};
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    };
    for (Site s : l.causal_order()) {
        const std::size_t i = l.index(s);
        const auto &d = l.site(s).dims();
        if (d.right > 1) {
            r.right[i] = rng.bernoulli(q) ? 1 : 0;
            if (!r.right[i]) {
                unite(i, l.index(s.m + 1, s.n));
            }
        }
        if (d.up > 1) {
            r.up[i] = rng.bernoulli(q) ? 1 : 0;
            if (!r.up[i]) {
                unite(i, l.index(s.m, s.n + 1));
            }
        }
    }
    r.component.resize(n);
    r.component_size.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        r.component[i] = find(i);
        r.max_component = std::max(r.max_component, ++r.component_size[r.component[i]]);
    }
    return r;
}

/// Sampling of a W-perturbed lattice with reset events drawn up front. Reset
/// flags have input-independent probability delta^2, so they are sampled first;
/// each site's outcome is then drawn conditioned on its flags. A sample is
/// rejected when a component exceeds s_th. Otherwise every component is held
/// in its own pure block, and a reset leg leaves as a separate basis-state
/// block (01 -> |1>, 10 -> |0>). Recorded probabilities are unconditioned, so
/// their product is the Born probability of the outcome.
inline TrajectoryRecord sample_with_resets(const IsoTnsLattice &l, double delta, std::size_t s_th,
                                           std::uint64_t seed, std::uint64_t index = 0,
                                           std::size_t cap = kStateCap) {
    require(s_th >= 1, "sample_with_resets: s_th must be >= 1");
    for (const auto &s : l.sites()) {
        require(s.role() == SiteRole::w_perturbed && s.w_delta && std::abs(*s.w_delta - delta) <= 1e-12,
                "sample_with_resets: lattice must consist of W-perturbed sites with the given delta");
    }
    Rng rng(seed, index);
    const ResetPattern pat = draw_resets(l, delta, rng);
    TrajectoryRecord rec;
    rec.seed = seed;
    rec.index = index;
    rec.max_component = pat.max_component;
    if (pat.max_component > s_th) {
        rec.accepted = false;
        return rec;
    }
    const LegIds ids{l.num_sites()};
    std::vector<PureFrontier> blocks;
    for (Site s : l.causal_order()) {
        const std::size_t i = l.index(s);
        const SiteTensor &v = l.site(s);
        const auto in = input_legs(l, s);
        // Merge the blocks holding this site's inputs.
        PureFrontier merged(cap);
        for (int leg : in) {
            if (merged.has_leg(leg)) {
                continue;
            }
            auto it = std::find_if(blocks.begin(), blocks.end(), [&](const PureFrontier &b) { return b.has_leg(leg); });
            if (it == blocks.end()) {
                throw InvariantFailure("sample_with_resets: input leg missing from every block");
            }
            merged.absorb(*it);
            blocks.erase(it);
        }
        std::vector<Leg> out_legs{{ids.phys(i), v.dims().phys}};
        const auto outs = output_legs(l, s);
        out_legs.insert(out_legs.end(), outs.begin(), outs.end());
        merged.apply(in, out_legs, v.isometry());

        const auto p = merged.leading_marginal();
        const bool live_r = v.dims().right > 1;
        const bool live_u = v.dims().up > 1;
        auto consistent = [&](std::size_t k) {
            const std::size_t a = k >> 2, b = k & 3;
            const bool reset_r = a == 1 || a == 2;
            const bool reset_u = b == 1 || b == 2;
            return (!live_r || reset_r == static_cast<bool>(pat.right[i])) &&
                   (!live_u || reset_u == static_cast<bool>(pat.up[i]));
        };
        std::vector<double> masked(p.size(), 0.0);
        double total = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (consistent(k)) {
                masked[k] = p[k];
            }
            total += p[k];
        }
        const std::size_t k = detail::draw_outcome(masked, rng);
        const double prob = p[k] / total;
        merged.project_leading(k, p[k]);
        rec.outcome.push_back(k);
        rec.probabilities.push_back(prob);
        rec.log_probability += std::log(prob);

        bool any_reset = false;
        for (const auto &[flag, g, sym] :
             {std::tuple{live_r && pat.right[i], ids.right(i), k >> 2}, std::tuple{live_u && pat.up[i], ids.up(i), k & 3}}) {
            if (!flag) {
                continue;
            }
            any_reset = true;
            ++rec.reset_count;
            const std::size_t value = sym == 1 ? 1 : 0;
            merged.move_to_front({g});
            const auto m = merged.leading_marginal();
            rec.max_factorization_error = std::max(rec.max_factorization_error, std::sqrt(m[1 - value]));
            merged.project_leading(value, m[value]);
            PureFrontier single(cap);
            single.add_basis_leg({g, 2}, value);
            blocks.push_back(std::move(single));
        }
        if (any_reset) {
            rec.reset_sites.push_back(s);
        }
        if (!merged.legs().empty()) {
            blocks.push_back(std::move(merged));
        }
    }
    return rec;
}

inline std::vector<TrajectoryRecord> sample_with_resets_many(const IsoTnsLattice &l, double delta, std::size_t s_th,
                                                             std::uint64_t n, std::uint64_t seed,
                                                             std::size_t threads = 1, std::size_t cap = kStateCap) {
    std::vector<TrajectoryRecord> out(n);
    parallel_for(n, threads, [&](std::size_t i) { out[i] = sample_with_resets(l, delta, s_th, seed, i, cap); });
    return out;
}

struct RejectionRow {
    double delta = 0.0;
    double rejection_fraction = 0.0;
    std::size_t max_component = 0;
    double mean_max_component = 0.0;
};

/// Rejection statistics of sample_with_resets on the bond geometry of `l`.
/// Acceptance depends only on the reset flags, so no state is simulated. Row
/// r uses the root seed stream_seed(seed, r) and sample i the stream
/// Rng(root, i), matching sample_with_resets' flag draws for that root.
inline std::vector<RejectionRow> rejection_curve(const IsoTnsLattice &l, const std::vector<double> &delta_grid,
                                                 std::size_t s_th, std::uint64_t n_samples, std::uint64_t seed,
                                                 std::size_t threads = 1) {
    require(n_samples >= 1, "rejection_curve: need at least one sample");
    for (double d : delta_grid) {
        require(d >= 0.0 && d * d <= 0.5 + 1e-15, "rejection_curve: delta must lie in [0, 1/sqrt(2)]");
    }
    std::vector<RejectionRow> rows;
    for (std::size_t r = 0; r < delta_grid.size(); ++r) {
        const std::uint64_t root = stream_seed(seed, r);
        std::vector<std::size_t> maxc(n_samples);
        parallel_for(n_samples, threads, [&](std::size_t i) {
            Rng rng(root, i);
            maxc[i] = draw_resets(l, delta_grid[r], rng).max_component;
        });
        RejectionRow row;
        row.delta = delta_grid[r];
        std::uint64_t rejected = 0;
        double sum = 0.0;
        for (auto m : maxc) {
            rejected += m > s_th ? 1 : 0;
            row.max_component = std::max(row.max_component, m);
            sum += static_cast<double>(m);
        }
        row.rejection_fraction = static_cast<double>(rejected) / static_cast<double>(n_samples);
        row.mean_max_component = sum / static_cast<double>(n_samples);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace isotns
