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
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "isotns/exact.hpp"

namespace isotns {

/// Per-site channel assignment: occupied sites use E1, empty sites the
/// depolarizing channel. Indexed m * ny + n like the lattice.
struct OccupancyMap {
    int nx = 0;
    int ny = 0;
    std::vector<std::uint8_t> occupied;
    std::uint64_t seed = 0;

    bool at(Site s) const {
        return occupied[static_cast<std::size_t>(s.m) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(s.n)] != 0;
    }
    void set(Site s, bool v) {
        occupied[static_cast<std::size_t>(s.m) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(s.n)] = v ? 1 : 0;
    }
};

/// Each site is empty with probability eta, drawn in raster order (m outer, n inner).
inline OccupancyMap assign_occupancy(int nx, int ny, double eta, Rng &rng) {
    require(nx >= 1 && ny >= 1, "assign_occupancy: dimensions must be positive");
    require(eta >= 0.0 && eta <= 1.0, "assign_occupancy: eta must lie in [0, 1]");
    OccupancyMap map{nx, ny, std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)), 0};
    for (auto &o : map.occupied) {
        o = rng.uniform() < eta ? 0 : 1;
    }
    return map;
}

inline OccupancyMap assign_occupancy(int nx, int ny, double eta, std::uint64_t seed) {
    Rng rng(seed);
    OccupancyMap map = assign_occupancy(nx, ny, eta, rng);
    map.seed = seed;
    return map;
}

/// Occupied sites connected to a root inside its past light cone.
struct Cluster {
    Site root;
    std::vector<Site> sites;  // causal order; the root appears only if occupied
    int min_m = 0;
    int min_n = 0;
    int max_m = 0;
    int max_n = 0;
    std::size_t frontier_width = 0;  // largest number of cluster sites on one anti-diagonal

    std::size_t size() const {
        return sites.size();
    }
    bool empty() const {
        return sites.empty();
    }
    bool touches_boundary() const {
        return std::any_of(sites.begin(), sites.end(), [](Site s) { return s.m == 0 || s.n == 0; });
    }
};

/// Breadth-first search over 4-neighbours within {(k, l): k <= m, l <= n}. The
/// search always starts from the root, since the root is contracted with its
/// full isometry whatever its own assignment; the root is listed only when occupied.
inline Cluster find_cluster(const OccupancyMap &map, Site root) {
    require(root.m >= 0 && root.n >= 0 && root.m < map.nx && root.n < map.ny, "find_cluster: site outside the map");
    Cluster c;
    c.root = root;
    std::vector<std::uint8_t> seen(map.occupied.size(), 0);
    auto idx = [&](Site s) { return static_cast<std::size_t>(s.m) * static_cast<std::size_t>(map.ny) + static_cast<std::size_t>(s.n); };
    std::deque<Site> queue{root};
    seen[idx(root)] = 1;
    std::vector<Site> found;
    if (map.at(root)) {
        found.push_back(root);
    }
    while (!queue.empty()) {
        const Site s = queue.front();
        queue.pop_front();
        for (Site t : {Site{s.m - 1, s.n}, Site{s.m + 1, s.n}, Site{s.m, s.n - 1}, Site{s.m, s.n + 1}}) {
            if (t.m < 0 || t.n < 0 || t.m > root.m || t.n > root.n || seen[idx(t)] || !map.at(t)) {
                continue;
            }
            seen[idx(t)] = 1;
            found.push_back(t);
            queue.push_back(t);
        }
    }
    std::sort(found.begin(), found.end(), [](Site a, Site b) {
        return a.m + a.n != b.m + b.n ? a.m + a.n < b.m + b.n : a.m < b.m;
    });
    c.sites = std::move(found);
    if (!c.sites.empty()) {
        c.min_m = c.max_m = c.sites[0].m;
        c.min_n = c.max_n = c.sites[0].n;
        std::map<int, std::size_t> per_diag;
        for (Site s : c.sites) {
            c.min_m = std::min(c.min_m, s.m);
            c.max_m = std::max(c.max_m, s.m);
            c.min_n = std::min(c.min_n, s.n);
            c.max_n = std::max(c.max_n, s.n);
            c.frontier_width = std::max(c.frontier_width, ++per_diag[s.m + s.n]);
        }
    }
    return c;
}

/// Per-site depolarizing splits at a common eta, indexed like the lattice.
inline std::vector<DepolarizingSplit> split_lattice(const IsoTnsLattice &l, double eta) {
    std::vector<DepolarizingSplit> out;
    out.reserve(l.num_sites());
    for (const auto &s : l.sites()) {
        out.push_back(depolarizing_split(s, eta));
    }
    return out;
}

struct ClusterValue {
    bool rejected_frontier = false;
    double value = 0.0;
    std::size_t max_frontier_dim = 1;
};

/// Conditional expectation for one assignment. Cluster sites apply their
/// normalized E1, the observable site its full isometry, and every leg entering
/// from outside the cluster is maximally mixed.
inline ClusterValue contract_cluster(const IsoTnsLattice &l, const std::vector<DepolarizingSplit> &splits,
                                     const Cluster &cluster, const Observable &obs, std::size_t cap = kFrontierCap) {
    require(cluster.root == obs.site, "contract_cluster: the observable site must be the cluster root");
    require(splits.size() == l.num_sites(), "contract_cluster: need one split per site");
    std::vector<Site> order = cluster.sites;
    if (order.empty() || order.back() != obs.site) {
        order.push_back(obs.site);
    }
    std::vector<std::uint8_t> in_set(l.num_sites(), 0);
    for (Site s : order) {
        in_set[l.index(s)] = 1;
    }
    const LegIds ids{l.num_sites()};
    MixedFrontier f(cap);
    ClusterValue out;
    try {
        for (Site s : order) {
            const std::size_t i = l.index(s);
            const SiteTensor &v = l.site(s);
            const auto in = input_legs(l, s);
            for (int leg : in) {
                if (!f.has_leg(leg)) {
                    const std::size_t src = static_cast<std::size_t>(leg) / 2;
                    require(!in_set[src], "contract_cluster: cluster is not in causal order");
                    f.add_mixed_leg({leg, leg % 2 == 0 ? v.dims().left : v.dims().down});
                }
            }
            const auto outs = output_legs(l, s);
            std::vector<int> dropped;
            std::vector<Leg> kept;
            for (const auto &g : outs) {
                const Site c = consumer_of(l, g.id);
                if (in_set[l.index(c)]) {
                    kept.push_back(g);
                } else {
                    dropped.push_back(g.id);
                }
            }
            if (s == obs.site) {
                std::vector<Leg> out_legs{{ids.phys(i), v.dims().phys}};
                out_legs.insert(out_legs.end(), outs.begin(), outs.end());
                f.apply(in, out_legs, {v.isometry()});
                f.trace_out(dropped);
                f.move_to_front({ids.phys(i)});
                const auto d = static_cast<Eigen::Index>(v.dims().phys);
                const Matrix &rho = f.matrix();
                const Eigen::Index rest = rho.rows() / d;
                Matrix phys(d, d);
                for (Eigen::Index a = 0; a < d; ++a) {
                    for (Eigen::Index b = 0; b < d; ++b) {
                        cplx t{};
                        for (Eigen::Index k = 0; k < rest; ++k) {
                            t += rho(a * rest + k, b * rest + k);
                        }
                        phys(a, b) = t;
                    }
                }
                out.max_frontier_dim = std::max(out.max_frontier_dim, f.dim());
                out.value = (phys * obs.op).trace().real();
                return out;
            }
            if (kept.empty()) {
                f.trace_out(in);
            } else {
                f.apply(in, outs, splits[i].e1_normalized.kraus());
                f.trace_out(dropped);
            }
            out.max_frontier_dim = std::max(out.max_frontier_dim, f.dim());
        }
    } catch (const CapExceeded &) {
        out.rejected_frontier = true;
        return out;
    }
    throw InvariantFailure("contract_cluster: observable site was not reached");
}

struct EstimateResult {
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t n_accepted = 0;
    std::uint64_t n_rejected_size = 0;
    std::uint64_t n_rejected_frontier = 0;
    std::size_t s_th = 0;
    double eta = 0.0;
    std::uint64_t seed = 0;
    std::size_t max_cluster = 0;
    std::vector<std::uint64_t> cluster_size_histogram;  // entry s counts samples with cluster size s

    friend bool operator==(const EstimateResult &, const EstimateResult &) = default;
};

inline constexpr std::size_t kNoCutoff = std::numeric_limits<std::size_t>::max();

/// Monte Carlo percolation estimate of <O>. Sample i draws its assignment from
/// Rng(seed, i), so the result does not depend on `threads`.
inline EstimateResult estimate(const IsoTnsLattice &l, const Observable &obs, double eta, std::size_t s_th,
                               std::uint64_t n_samples, std::uint64_t seed, std::size_t threads = 1,
                               std::size_t cap = kFrontierCap) {
    obs.validate(l);
    require(n_samples >= 1, "estimate: need at least one sample");
    require(s_th >= 1, "estimate: s_th must be >= 1");
    const auto splits = split_lattice(l, eta);
    enum class Kind : std::uint8_t { accepted, size, frontier };
    std::vector<Kind> kinds(n_samples);
    std::vector<double> values(n_samples, 0.0);
    std::vector<std::size_t> sizes(n_samples, 0);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        Rng rng(seed, i);
        const OccupancyMap map = assign_occupancy(l.nx(), l.ny(), eta, rng);
        const Cluster c = find_cluster(map, obs.site);
        sizes[i] = c.size();
        if (c.size() > s_th) {
            kinds[i] = Kind::size;
            return;
        }
        const ClusterValue v = contract_cluster(l, splits, c, obs, cap);
        kinds[i] = v.rejected_frontier ? Kind::frontier : Kind::accepted;
        values[i] = v.value;
    });
    EstimateResult r;
    r.n_samples = n_samples;
    r.s_th = s_th;
    r.eta = eta;
    r.seed = seed;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        r.max_cluster = std::max(r.max_cluster, sizes[i]);
        if (r.cluster_size_histogram.size() <= sizes[i]) {
            r.cluster_size_histogram.resize(sizes[i] + 1, 0);
        }
        ++r.cluster_size_histogram[sizes[i]];
        switch (kinds[i]) {
            case Kind::accepted:
                ++r.n_accepted;
                sum += values[i];
                break;
            case Kind::size:
                ++r.n_rejected_size;
                break;
            case Kind::frontier:
                ++r.n_rejected_frontier;
                break;
        }
    }
    if (r.n_accepted == 0) {
        throw InvariantFailure("estimate: all samples were rejected");
    }
    r.mean = sum / static_cast<double>(r.n_accepted);
    if (r.n_accepted > 1) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n_samples; ++i) {
            if (kinds[i] == Kind::accepted) {
                ss += (values[i] - r.mean) * (values[i] - r.mean);
            }
        }
        r.standard_error = std::sqrt(ss / static_cast<double>(r.n_accepted - 1) / static_cast<double>(r.n_accepted));
    }
    return r;
}

struct ExhaustiveResult {
    double expectation = 0.0;      // sum over patterns of Prob * value (accepted patterns, renormalized)
    double accepted_weight = 0.0;  // total probability of accepted patterns
    std::size_t patterns = 0;
    std::size_t distinct_clusters = 0;
};

/// Exact average of contract_cluster over every assignment of the observable's
/// past light cone, restricted to clusters of size <= s_th and renormalized.
inline ExhaustiveResult exhaustive_expectation(const IsoTnsLattice &l, const Observable &obs, double eta,
                                               std::size_t s_th = kNoCutoff, std::size_t cap = kFrontierCap) {
    obs.validate(l);
    const auto splits = split_lattice(l, eta);
    const auto cone = past_light_cone(l, {obs.site});
    require(cone.size() <= 24, "exhaustive_expectation: light cone too large to enumerate");
    std::map<std::vector<Site>, double> memo;
    ExhaustiveResult r;
    OccupancyMap map{l.nx(), l.ny(), std::vector<std::uint8_t>(l.num_sites(), 0), 0};
    const std::uint64_t count = std::uint64_t{1} << cone.size();
    double weighted = 0.0;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        double prob = 1.0;
        for (std::size_t k = 0; k < cone.size(); ++k) {
            const bool occ = (bits >> k) & 1U;
            map.set(cone[k], occ);
            prob *= occ ? 1.0 - eta : eta;
        }
        ++r.patterns;
        if (prob == 0.0) {
            continue;
        }
        const Cluster c = find_cluster(map, obs.site);
        if (c.size() > s_th) {
            continue;
        }
        auto it = memo.find(c.sites);
        if (it == memo.end()) {
            const ClusterValue v = contract_cluster(l, splits, c, obs, cap);
            if (v.rejected_frontier) {
                throw CapExceeded("exhaustive_expectation: cluster exceeds the frontier cap");
            }
            it = memo.emplace(c.sites, v.value).first;
        }
        weighted += prob * it->second;
        r.accepted_weight += prob;
    }
    r.distinct_clusters = memo.size();
    require(r.accepted_weight > 0.0, "exhaustive_expectation: no accepted pattern");
    r.expectation = weighted / r.accepted_weight;
    return r;
}

struct SurveyRow {
    double eta = 0.0;
    std::vector<std::uint64_t> size_histogram;
    double mean_size = 0.0;
    double boundary_fraction = 0.0;

    /// Empirical Prob(S >= s).
    double tail(std::size_t s) const {
        std::uint64_t total = 0, above = 0;
        for (std::size_t k = 0; k < size_histogram.size(); ++k) {
            total += size_histogram[k];
            if (k >= s) {
                above += size_histogram[k];
            }
        }
        return total == 0 ? 0.0 : static_cast<double>(above) / static_cast<double>(total);
    }
};

/// Cluster-size statistics of the corner site (nx - 1, ny - 1) for each eta.
/// A cluster touches the boundary when it reaches m = 0 or n = 0. Row r uses
/// the root seed stream_seed(seed, r).
inline std::vector<SurveyRow> cluster_survey(int nx, int ny, const std::vector<double> &eta_grid,
                                             std::uint64_t n_samples, std::uint64_t seed, std::size_t threads = 1) {
    require(nx >= 1 && ny >= 1, "cluster_survey: dimensions must be positive");
    require(n_samples >= 1, "cluster_survey: need at least one sample");
    std::vector<SurveyRow> rows;
    const Site root{nx - 1, ny - 1};
    for (std::size_t r = 0; r < eta_grid.size(); ++r) {
        const double eta = eta_grid[r];
        const std::uint64_t row_seed = stream_seed(seed, r);
        std::vector<std::size_t> sizes(n_samples);
        std::vector<std::uint8_t> touch(n_samples);
        parallel_for(n_samples, threads, [&](std::size_t i) {
            Rng rng(row_seed, i);
            const Cluster c = find_cluster(assign_occupancy(nx, ny, eta, rng), root);
            sizes[i] = c.size();
            touch[i] = c.touches_boundary() ? 1 : 0;
        });
        SurveyRow row;
        row.eta = eta;
        double total = 0.0;
        std::uint64_t touching = 0;
        for (std::size_t i = 0; i < n_samples; ++i) {
            if (row.size_histogram.size() <= sizes[i]) {
                row.size_histogram.resize(sizes[i] + 1, 0);
            }
            ++row.size_histogram[sizes[i]];
            total += static_cast<double>(sizes[i]);
            touching += touch[i];
        }
        row.mean_size = total / static_cast<double>(n_samples);
        row.boundary_fraction = static_cast<double>(touching) / static_cast<double>(n_samples);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace isotns
