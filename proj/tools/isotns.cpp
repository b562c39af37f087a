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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "isotns/cli.hpp"

namespace {

namespace fs = std::filesystem;
using namespace isotns::cli;

struct Args {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string out;
    bool exact = false;
};

/// Writes through a temporary sibling so a failed write never leaves a partial file.
bool write_file(const std::string &path, const std::string &text) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) {
            return false;
        }
        f << text;
        if (!f.flush()) {
            return false;
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    return !ec;
}

int execute(const std::string &subcommand, const Args &a) {
    ExperimentConfig cfg;
    try {
        const fs::path path(a.config);
        const isotns::json j = detail::read_json_file(path);
        cfg = parse_config(j, subcommand, {a.seed, a.threads, a.exact}, path.parent_path());
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    const RunOutput r = run(cfg);
    if (r.exit_code != kOk && r.exit_code != kInvariantFailure) {
        std::cerr << "error: " << r.message << "\n";
        return r.exit_code;
    }
    if (a.out.empty()) {
        std::cout << r.text;
    } else if (!write_file(a.out, r.text)) {
        std::cerr << "error: cannot write '" << a.out << "'\n";
        return kConfigError;
    }
    for (const auto &[p, text] : r.extra_files) {
        if (!write_file(p, text)) {
            std::cerr << "error: cannot write '" << p << "'\n";
            return kConfigError;
        }
    }
    if (r.exit_code != kOk) {
        std::cerr << "error: " << r.message << "\n";
    }
    return r.exit_code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"isoTNS channel-circuit experiments"};
    app.require_subcommand(1);
    Args args;
    const std::pair<const char *, const char *> commands[] = {
        {"verify", "Check isometry, injectivity and depolarizing-split invariants of a lattice"},
        {"expect", "Percolation Monte Carlo estimate of a local observable"},
        {"sample", "Sample physical outcomes by monitored ancilla dynamics"},
        {"scan", "Sweep eta or delta grids (cluster survey, estimates, reset rejection)"},
        {"embed", "Embed a brickwork circuit into a lattice and print it"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seed, "Root seed (overrides the config)");
        sub->add_option("--out", args.out, "Output path (default: stdout)");
        sub->add_option("--threads", args.threads, "Worker threads")->check(CLI::Range(1, 1024));
        sub->add_flag("--exact", args.exact, "Also compute the exact value for comparison");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    for (const auto &[name, help] : commands) {
        if (app.got_subcommand(name)) {
            return execute(name, args);
        }
    }
    return kConfigError;
}
