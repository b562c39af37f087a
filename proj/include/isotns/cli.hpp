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
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isotns/io.hpp"
#include "isotns/percolation.hpp"
#include "isotns/sampler.hpp"

namespace isotns::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInvariantFailure = 3, kCapExceeded = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Random lattice families draw from this stream of the root seed.
inline constexpr std::uint64_t kLatticeStream = 0x6c6174746963ULL;

struct LatticeSpec {
    std::string family;
    int nx = 0;
    int ny = 0;
    std::size_t bond = 2;
    std::size_t phys = 2;
    double p = 0.0;
    double delta = 0.0;
    std::size_t embed_phys = 4;
    json circuit;
    std::string path;
};

struct ObservableSpec {
    Site site;
    std::string kind;  // diagonal | z | zz | matrix
    std::vector<double> values;
    std::vector<int> qubits;
    json matrix;
};

struct ResetSpec {
    double delta = 0.0;
    std::size_t s_th = 1;
};

struct ExperimentConfig {
    std::string subcommand;
    std::optional<LatticeSpec> lattice;
    std::optional<ObservableSpec> observable;
    double eta = 0.0;
    std::size_t s_th = kNoCutoff;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool exact = false;
    std::string scan_mode;
    std::vector<double> grid;
    int survey_nx = 0;
    int survey_ny = 0;
    std::optional<ResetSpec> resets;
    std::string histogram_out;
    std::filesystem::path base_dir;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    bool exact = false;
};

namespace detail {

inline void check(bool cond, const std::string &msg) {
    if (!cond) {
        throw ConfigError(msg);
    }
}

template <typename T>
T get(const json &j, const char *key, const std::string &where) {
    check(j.contains(key), where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError(where + ": '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json &j, const char *key, T fallback, const std::string &where) {
    return j.contains(key) && !j.at(key).is_null() ? get<T>(j, key, where) : fallback;
}

inline void check_keys(const json &j, const std::vector<std::string> &allowed, const std::string &where) {
    for (const auto &[k, v] : j.items()) {
        check(std::find(allowed.begin(), allowed.end(), k) != allowed.end(), where + ": unknown key '" + k + "'");
    }
}

inline json read_json_file(const std::filesystem::path &p) {
    std::ifstream in(p);
    check(in.good(), "cannot open '" + p.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("malformed JSON in '" + p.string() + "': " + e.what());
    }
}

inline LatticeSpec parse_lattice(const json &j) {
    const std::string w = "lattice";
    check(j.is_object(), "lattice must be an object");
    LatticeSpec s;
    s.family = get<std::string>(j, "family", w);
    if (s.family == "embedded_circuit") {
        check_keys(j, {"family", "circuit", "circuit_file", "phys"}, w);
        check(j.contains("circuit") != j.contains("circuit_file"), "lattice: give exactly one of circuit, circuit_file");
        if (j.contains("circuit")) {
            s.circuit = j.at("circuit");
        } else {
            s.path = get<std::string>(j, "circuit_file", w);
        }
        s.embed_phys = get_or<std::size_t>(j, "phys", 4, w);
        check(s.embed_phys == 4 || s.embed_phys == 16, "lattice: phys must be 4 or 16");
        return s;
    }
    if (s.family == "file") {
        check_keys(j, {"family", "path"}, w);
        s.path = get<std::string>(j, "path", w);
        return s;
    }
    s.nx = get<int>(j, "nx", w);
    s.ny = get<int>(j, "ny", w);
    check(s.nx >= 1 && s.ny >= 1 && s.nx <= 256 && s.ny <= 256, "lattice: nx and ny must lie in [1, 256]");
    if (s.family == "identity" || s.family == "postselect_gate") {
        check_keys(j, {"family", "nx", "ny"}, w);
    } else if (s.family == "random") {
        check_keys(j, {"family", "nx", "ny", "bond", "phys"}, w);
        s.bond = get_or<std::size_t>(j, "bond", 2, w);
        s.phys = get_or<std::size_t>(j, "phys", 2, w);
        check(s.bond >= 1 && s.bond <= 8 && s.phys >= 1 && s.phys <= 64, "lattice: bond in [1, 8], phys in [1, 64]");
    } else if (s.family == "random_injective") {
        check_keys(j, {"family", "nx", "ny", "p"}, w);
        s.p = get<double>(j, "p", w);
        check(s.p > 0.0 && s.p <= 1.0, "lattice: p must lie in (0, 1]");
    } else if (s.family == "w_perturbed") {
        check_keys(j, {"family", "nx", "ny", "delta"}, w);
        s.delta = get<double>(j, "delta", w);
        check(s.delta >= 0.0 && s.delta * s.delta <= 0.5 + 1e-15, "lattice: delta must lie in [0, 1/sqrt(2)]");
    } else {
        throw ConfigError("lattice: unknown family '" + s.family + "'");
    }
    return s;
}

inline ObservableSpec parse_observable(const json &j) {
    const std::string w = "observable";
    check(j.is_object(), "observable must be an object");
    check_keys(j, {"site", "kind", "values", "qubit", "qubits", "matrix"}, w);
    ObservableSpec o;
    const auto site = get<std::vector<int>>(j, "site", w);
    check(site.size() == 2, "observable: site must be [m, n]");
    o.site = {site[0], site[1]};
    o.kind = get<std::string>(j, "kind", w);
    if (o.kind == "diagonal") {
        o.values = get<std::vector<double>>(j, "values", w);
    } else if (o.kind == "z") {
        o.qubits = {get<int>(j, "qubit", w)};
    } else if (o.kind == "zz") {
        o.qubits = get<std::vector<int>>(j, "qubits", w);
        check(o.qubits.size() == 2, "observable: zz needs two qubits");
    } else if (o.kind == "matrix") {
        o.matrix = j.at("matrix");
    } else {
        throw ConfigError("observable: unknown kind '" + o.kind + "'");
    }
    return o;
}

inline std::vector<double> parse_grid(const json &j, const std::string &where) {
    if (j.is_array()) {
        try {
            return j.get<std::vector<double>>();
        } catch (const json::exception &) {
            throw ConfigError(where + ": grid must be a list of numbers");
        }
    }
    check(j.is_object(), where + ": grid must be a list or {start, stop, count}");
    const double a = get<double>(j, "start", where);
    const double b = get<double>(j, "stop", where);
    const int n = get<int>(j, "count", where);
    check(n >= 1 && n <= 10000, where + ": count must lie in [1, 10000]");
    std::vector<double> g;
    for (int k = 0; k < n; ++k) {
        g.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return g;
}

}  // namespace detail

/// Validates a version-1 config for `subcommand`; nothing is computed here.
inline ExperimentConfig parse_config(const json &j, const std::string &subcommand, const Overrides &ov,
                                     const std::filesystem::path &base_dir = {}) {
    using detail::check;
    using detail::get;
    using detail::get_or;
    check(j.is_object(), "config must be a JSON object");
    check(j.contains("version") && j.at("version") == 1, "config: 'version' must be 1");
    ExperimentConfig c;
    c.subcommand = subcommand;
    c.base_dir = base_dir;
    const std::string w = "config";
    std::vector<std::string> allowed{"version", "seed", "threads", "lattice"};
    if (ov.seed) {
        c.seed = *ov.seed;
    } else {
        check(j.contains("seed"), "config: 'seed' is mandatory");
        c.seed = get<std::uint64_t>(j, "seed", w);
    }
    c.threads = ov.threads ? *ov.threads : get_or<std::size_t>(j, "threads", 1, w);
    check(c.threads >= 1 && c.threads <= 1024, "config: threads must lie in [1, 1024]");
    auto need_lattice = [&] {
        check(j.contains("lattice"), "config: 'lattice' is required for " + subcommand);
        c.lattice = detail::parse_lattice(j.at("lattice"));
    };
    auto parse_s_th = [&] {
        if (j.contains("s_th") && !j.at("s_th").is_null()) {
            const auto s = get<std::int64_t>(j, "s_th", w);
            check(s >= 1, "config: s_th must be >= 1");
            c.s_th = static_cast<std::size_t>(s);
        }
    };
    auto parse_samples = [&] {
        c.n_samples = get<std::uint64_t>(j, "n_samples", w);
        check(c.n_samples >= 1 && c.n_samples <= 100000000, "config: n_samples must lie in [1, 1e8]");
    };
    if (subcommand == "verify") {
        allowed.push_back("eta");
        need_lattice();
        if (j.contains("eta")) {
            c.eta = get<double>(j, "eta", w);
            check(c.eta >= 0.0 && c.eta <= 1.0, "config: eta must lie in [0, 1]");
        } else {
            c.eta = -1.0;  // use each site's maximum
        }
    } else if (subcommand == "expect") {
        allowed.insert(allowed.end(), {"observable", "eta", "s_th", "n_samples", "exact"});
        need_lattice();
        check(j.contains("observable"), "config: 'observable' is required for expect");
        c.observable = detail::parse_observable(j.at("observable"));
        c.eta = get<double>(j, "eta", w);
        check(c.eta >= 0.0 && c.eta <= 1.0, "config: eta must lie in [0, 1]");
        parse_s_th();
        parse_samples();
        c.exact = ov.exact || get_or<bool>(j, "exact", false, w);
    } else if (subcommand == "sample") {
        allowed.insert(allowed.end(), {"n_samples", "resets"});
        need_lattice();
        parse_samples();
        if (j.contains("resets")) {
            const json &r = j.at("resets");
            detail::check_keys(r, {"delta", "s_th"}, "resets");
            ResetSpec rs;
            rs.delta = get<double>(r, "delta", "resets");
            const auto s = get<std::int64_t>(r, "s_th", "resets");
            check(s >= 1, "resets: s_th must be >= 1");
            rs.s_th = static_cast<std::size_t>(s);
            c.resets = rs;
        }
    } else if (subcommand == "scan") {
        allowed.insert(allowed.end(), {"mode", "grid", "observable", "s_th", "n_samples", "nx", "ny", "histogram_out"});
        c.scan_mode = get<std::string>(j, "mode", w);
        check(j.contains("grid"), "config: 'grid' is required for scan");
        c.grid = detail::parse_grid(j.at("grid"), "grid");
        parse_samples();
        c.histogram_out = get_or<std::string>(j, "histogram_out", "", w);
        if (c.scan_mode == "survey") {
            c.survey_nx = get<int>(j, "nx", w);
            c.survey_ny = get<int>(j, "ny", w);
            check(c.survey_nx >= 1 && c.survey_ny >= 1 && c.survey_nx <= 1024 && c.survey_ny <= 1024,
                  "config: nx and ny must lie in [1, 1024]");
            for (double e : c.grid) {
                check(e >= 0.0 && e <= 1.0, "config: eta grid must lie in [0, 1]");
            }
        } else if (c.scan_mode == "estimate") {
            need_lattice();
            check(j.contains("observable"), "config: 'observable' is required for an estimate scan");
            c.observable = detail::parse_observable(j.at("observable"));
            parse_s_th();
            for (double e : c.grid) {
                check(e >= 0.0 && e <= 1.0, "config: eta grid must lie in [0, 1]");
            }
        } else if (c.scan_mode == "resets") {
            need_lattice();
            parse_s_th();
            check(c.s_th != kNoCutoff, "config: s_th is required for a resets scan");
            for (double d : c.grid) {
                check(d >= 0.0 && d * d <= 0.5 + 1e-15, "config: delta grid must lie in [0, 1/sqrt(2)]");
            }
        } else {
            throw ConfigError("config: scan mode must be survey, estimate or resets");
        }
    } else if (subcommand == "embed") {
        allowed.insert(allowed.end(), {"circuit", "circuit_file", "phys"});
        LatticeSpec s;
        s.family = "embedded_circuit";
        check(j.contains("circuit") != j.contains("circuit_file"), "config: give exactly one of circuit, circuit_file");
        if (j.contains("circuit")) {
            s.circuit = j.at("circuit");
        } else {
            s.path = get<std::string>(j, "circuit_file", w);
        }
        s.embed_phys = get_or<std::size_t>(j, "phys", 4, w);
        check(s.embed_phys == 4 || s.embed_phys == 16, "config: phys must be 4 or 16");
        c.lattice = s;
    } else {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    detail::check_keys(j, allowed, w);
    return c;
}

inline std::filesystem::path resolve(const ExperimentConfig &c, const std::string &p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || c.base_dir.empty() ? path : c.base_dir / path;
}

inline BrickworkCircuit load_circuit(const ExperimentConfig &c, const LatticeSpec &s) {
    const json j = s.path.empty() ? s.circuit : detail::read_json_file(resolve(c, s.path));
    try {
        return circuit_from_json(j);
    } catch (const PreconditionError &e) {
        throw ConfigError(std::string("malformed circuit: ") + e.what());
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed circuit: ") + e.what());
    }
}

inline Embedding build_embedding(const ExperimentConfig &c) {
    return embed_brickwork(load_circuit(c, *c.lattice), c.lattice->embed_phys);
}

inline IsoTnsLattice build_lattice(const ExperimentConfig &c) {
    const LatticeSpec &s = *c.lattice;
    Rng rng(stream_seed(c.seed, kLatticeStream));
    if (s.family == "identity") {
        return identity_lattice(s.nx, s.ny);
    }
    if (s.family == "postselect_gate") {
        return postselect_gate_lattice(s.nx, s.ny);
    }
    if (s.family == "random") {
        return random_lattice(s.nx, s.ny, s.bond, s.phys, rng);
    }
    if (s.family == "random_injective") {
        return random_injective_lattice(s.nx, s.ny, s.p, rng);
    }
    if (s.family == "w_perturbed") {
        return w_perturbed_lattice(s.nx, s.ny, s.delta, rng);
    }
    if (s.family == "embedded_circuit") {
        return build_embedding(c).lattice;
    }
    if (s.family == "file") {
        json j = detail::read_json_file(resolve(c, s.path));
        try {
            return lattice_from_json(j.contains("lattice") ? j.at("lattice") : j);
        } catch (const json::exception &e) {
            throw ConfigError(std::string("malformed lattice file: ") + e.what());
        }
    }
    throw ConfigError("unknown lattice family '" + s.family + "'");
}

/// Pauli Z on qubit q of a 2^k-dimensional physical leg (qubit 0 most significant).
inline double z_sign(std::size_t index, int qubit, int n_qubits) {
    return ((index >> (n_qubits - 1 - qubit)) & 1U) ? -1.0 : 1.0;
}

inline Observable build_observable(const ObservableSpec &o, const IsoTnsLattice &l) {
    detail::check(l.contains(o.site), "observable: site outside the lattice");
    const std::size_t d = l.site(o.site).dims().phys;
    Matrix op;
    if (o.kind == "diagonal") {
        detail::check(o.values.size() == d, "observable: need one value per physical index");
        op = diagonal_observable(o.values);
    } else if (o.kind == "matrix") {
        try {
            op = matrix_from_json(o.matrix);
        } catch (const std::exception &e) {
            throw ConfigError(std::string("observable: ") + e.what());
        }
    } else {
        int nq = 0;
        while ((std::size_t{1} << nq) < d) {
            ++nq;
        }
        detail::check((std::size_t{1} << nq) == d, "observable: z and zz need a power-of-two physical dimension");
        for (int q : o.qubits) {
            detail::check(q >= 0 && q < nq, "observable: qubit out of range");
        }
        std::vector<double> v(d);
        for (std::size_t i = 0; i < d; ++i) {
            v[i] = 1.0;
            for (int q : o.qubits) {
                v[i] *= z_sign(i, q, nq);
            }
        }
        op = diagonal_observable(v);
    }
    Observable obs{o.site, op};
    try {
        obs.validate(l);
    } catch (const PreconditionError &e) {
        throw ConfigError(e.what());
    }
    return obs;
}

/// Text produced by a run; written by the caller only when exit_code is 0 or 3.
struct RunOutput {
    std::string text;
    int exit_code = kOk;
    std::string message;
    std::vector<std::pair<std::string, std::string>> extra_files;
};

inline std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

inline RunOutput run_verify(const ExperimentConfig &c) {
    const IsoTnsLattice l = build_lattice(c);
    json sites = json::array();
    bool ok = true;
    double min_delta = std::numeric_limits<double>::infinity();
    double max_split_error = 0.0;
    std::optional<double> w_delta;
    for (Site s : l.causal_order()) {
        const SiteTensor &v = l.site(s);
        const auto iso = check_isometry(v.isometry(), kDefaultTol);
        const auto rep = injectivity_delta(v);
        json e{{"m", s.m},
               {"n", s.n},
               {"role", role_name(v.role())},
               {"isometry_ok", iso.ok},
               {"isometry_deviation", iso.deviation},
               {"delta", rep.delta},
               {"eta", rep.eta},
               {"sigma_min", rep.sigma_min},
               {"sigma_max", rep.sigma_max},
               {"D", rep.bond_dim},
               {"d", rep.phys_dim}};
        ok = ok && iso.ok;
        ok = ok && rep.sigma_max <= rep.sigma_max_upper_bound() + 1e-10 &&
             rep.sigma_max >= rep.sigma_max_lower_bound() - 1e-10;
        min_delta = std::min(min_delta, rep.delta);
        if (v.w_delta) {
            e["w_delta"] = *v.w_delta;
            w_delta = *v.w_delta;
        }
        const double eta = c.eta >= 0.0 ? c.eta : rep.eta;
        if (rep.delta > 0.0 && eta <= rep.eta + 1e-12) {
            const auto split = depolarizing_split(v, eta);
            const double err = split.reconstruction_error();
            const double tp = split.e1.tp_deviation();
            e["split_eta"] = eta;
            e["split_error"] = err;
            e["split_trace_error"] = tp;
            max_split_error = std::max(max_split_error, std::max(err, tp));
            ok = ok && err < 1e-9 && tp < 1e-9;
        }
        sites.push_back(std::move(e));
    }
    json report{{"nx", l.nx()},
                {"ny", l.ny()},
                {"all_invariants_hold", ok},
                {"min_delta", min_delta},
                {"max_split_error", max_split_error},
                {"sites", std::move(sites)}};
    if (w_delta) {
        report["w_delta"] = *w_delta;
    }
    return {report.dump(2) + "\n", ok ? kOk : kInvariantFailure, ok ? "" : "verify: invariant failure", {}};
}

inline RunOutput run_expect(const ExperimentConfig &c) {
    const IsoTnsLattice l = build_lattice(c);
    const Observable obs = build_observable(*c.observable, l);
    const EstimateResult r = estimate(l, obs, c.eta, c.s_th, c.n_samples, c.seed, c.threads);
    std::ostringstream out;
    if (c.exact) {
        const double ex = expectation_exact(l, obs);
        out << "estimate,exact,abs_diff,stderr,n_accepted,n_rejected_size,n_rejected_frontier,max_cluster\n";
        out << fmt(r.mean) << ',' << fmt(ex) << ',' << fmt(std::abs(r.mean - ex)) << ',' << fmt(r.standard_error);
    } else {
        out << "estimate,stderr,n_accepted,n_rejected_size,n_rejected_frontier,max_cluster\n";
        out << fmt(r.mean) << ',' << fmt(r.standard_error);
    }
    out << ',' << r.n_accepted << ',' << r.n_rejected_size << ',' << r.n_rejected_frontier << ',' << r.max_cluster
        << '\n';
    return {out.str(), kOk, "", {}};
}

inline std::string outcome_string(const std::vector<std::size_t> &outcome) {
    static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string s;
    for (auto k : outcome) {
        require(k < 36, "outcome_string: physical index too large for one symbol");
        s.push_back(digits[k]);
    }
    return s;
}

inline RunOutput run_sample(const ExperimentConfig &c) {
    const IsoTnsLattice l = build_lattice(c);
    for (const auto &s : l.sites()) {
        detail::check(s.dims().phys <= 36, "sample: physical dimensions above 36 cannot be written as one symbol");
    }
    std::vector<TrajectoryRecord> recs;
    if (c.resets) {
        recs = sample_with_resets_many(l, c.resets->delta, c.resets->s_th, c.n_samples, c.seed, c.threads);
    } else {
        recs = sample_many(l, c.n_samples, c.seed, c.threads);
    }
    std::ostringstream out;
    out << "index,outcome,log_probability,reset_count,accepted\n";
    for (const auto &r : recs) {
        out << r.index << ',' << outcome_string(r.outcome) << ',' << fmt(r.log_probability) << ',' << r.reset_count
            << ',' << (r.accepted ? 1 : 0) << '\n';
    }
    return {out.str(), kOk, "", {}};
}

inline RunOutput run_scan(const ExperimentConfig &c) {
    std::ostringstream out;
    json hist = json::array();
    if (c.scan_mode == "survey") {
        const auto rows = cluster_survey(c.survey_nx, c.survey_ny, c.grid, c.n_samples, c.seed, c.threads);
        out << "eta,mean_size,boundary_fraction,max_size\n";
        for (const auto &r : rows) {
            out << fmt(r.eta) << ',' << fmt(r.mean_size) << ',' << fmt(r.boundary_fraction) << ','
                << (r.size_histogram.empty() ? 0 : r.size_histogram.size() - 1) << '\n';
            hist.push_back({{"eta", r.eta}, {"histogram", r.size_histogram}});
        }
    } else if (c.scan_mode == "estimate") {
        const IsoTnsLattice l = build_lattice(c);
        const Observable obs = build_observable(*c.observable, l);
        out << "eta,mean,stderr,n_accepted,n_rejected_size,n_rejected_frontier,max_cluster\n";
        for (std::size_t k = 0; k < c.grid.size(); ++k) {
            const auto r = estimate(l, obs, c.grid[k], c.s_th, c.n_samples, stream_seed(c.seed, k), c.threads);
            out << fmt(c.grid[k]) << ',' << fmt(r.mean) << ',' << fmt(r.standard_error) << ',' << r.n_accepted << ','
                << r.n_rejected_size << ',' << r.n_rejected_frontier << ',' << r.max_cluster << '\n';
            hist.push_back({{"eta", c.grid[k]}, {"histogram", r.cluster_size_histogram}});
        }
    } else {
        const IsoTnsLattice l = build_lattice(c);
        const auto rows = rejection_curve(l, c.grid, c.s_th, c.n_samples, c.seed, c.threads);
        out << "delta,rejection_fraction,max_component,mean_max_component\n";
        for (const auto &r : rows) {
            out << fmt(r.delta) << ',' << fmt(r.rejection_fraction) << ',' << r.max_component << ','
                << fmt(r.mean_max_component) << '\n';
        }
    }
    RunOutput o{out.str(), kOk, "", {}};
    if (!c.histogram_out.empty()) {
        o.extra_files.emplace_back(resolve(c, c.histogram_out).string(), hist.dump(2) + "\n");
    }
    return o;
}

inline RunOutput run_embed(const ExperimentConfig &c) {
    const Embedding e = build_embedding(c);
    json swaps = json::array();
    for (const auto &s : e.swap_sites) {
        swaps.push_back({{"m", s.site.m}, {"n", s.site.n}, {"qubits", {s.qubit, s.qubit + 1}}});
    }
    json j{{"lattice", lattice_to_json(e.lattice)},
           {"swap_sites", std::move(swaps)},
           {"first_diagonal", e.first_diagonal},
           {"swap_diagonal", e.swap_diagonal}};
    return {j.dump() + "\n", kOk, "", {}};
}

/// Runs a parsed config, mapping failures to exit codes.
inline RunOutput run(const ExperimentConfig &c) {
    try {
        if (c.subcommand == "verify") {
            return run_verify(c);
        }
        if (c.subcommand == "expect") {
            return run_expect(c);
        }
        if (c.subcommand == "sample") {
            return run_sample(c);
        }
        if (c.subcommand == "scan") {
            return run_scan(c);
        }
        if (c.subcommand == "embed") {
            return run_embed(c);
        }
        return {"", kConfigError, "unknown subcommand '" + c.subcommand + "'", {}};
    } catch (const ConfigError &e) {
        return {"", kConfigError, e.what(), {}};
    } catch (const PreconditionError &e) {
        return {"", kConfigError, e.what(), {}};
    } catch (const CapExceeded &e) {
        return {"", kCapExceeded, e.what(), {}};
    } catch (const InvariantFailure &e) {
        return {"", kInvariantFailure, e.what(), {}};
    }
}

}  // namespace isotns::cli
