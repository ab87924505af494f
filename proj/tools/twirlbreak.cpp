// Copyright 2026 The twirlbreak Authors
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

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "twirlbreak/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;

struct Overrides {
    std::string config;
    std::string out;
    std::string csv;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> mc_samples;
    std::optional<double> tol;
    std::optional<std::int64_t> fock_cutoff;
};

void add_options(CLI::App *sub, Overrides &o) {
    sub->add_option("--config", o.config, "JSON experiment config")->required();
    sub->add_option("--out", o.out, "write the result document here instead of stdout");
    sub->add_option("--csv", o.csv, "also write result rows as CSV");
    sub->add_option("--seed", o.seed, "64-bit seed for randomized paths");
    sub->add_option("--mc-samples", o.mc_samples, "Monte-Carlo Haar sample count");
    sub->add_option("--tol", o.tol, "tolerance override");
    sub->add_option("--fock-cutoff", o.fock_cutoff, "Fock-space cutoff N");
}

int run(twirlbreak::Scenario scenario, const Overrides &o) {
    using namespace twirlbreak;
    ExperimentConfig cfg = load_config(scenario, o.config);
    if (o.seed) {
        cfg.params["seed"] = *o.seed;
    }
    if (o.mc_samples) {
        cfg.params["mc_samples"] = *o.mc_samples;
    }
    if (o.tol) {
        cfg.params["tol"] = *o.tol;
    }
    if (o.fock_cutoff) {
        cfg.params["fock_cutoff"] = *o.fock_cutoff;
    }
    cfg.output_path = !o.out.empty() ? o.out : cfg.get_string("output_path", "");
    cfg.csv_path = !o.csv.empty() ? o.csv : cfg.get_string("csv_path", "");

    RunOutcome res = run_experiment(cfg, std::cerr);
    const std::string text = res.document.dump(2) + "\n";
    if (cfg.output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(cfg.output_path);
        if (!f) {
            throw ConfigError("cannot write '" + cfg.output_path + "'");
        }
        f << text;
    }
    if (!cfg.csv_path.empty()) {
        std::ofstream f(cfg.csv_path);
        if (!f) {
            throw ConfigError("cannot write '" + cfg.csv_path + "'");
        }
        f << rows_to_csv(res.rows);
    }
    return res.exit_code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"twirlbreak: entanglement distribution through twirling environments"};
    app.require_subcommand(1);
    Overrides o;
    std::vector<std::pair<CLI::App *, twirlbreak::Scenario>> subs;
    for (auto sc : {twirlbreak::Scenario::pauli, twirlbreak::Scenario::qudit_twirl, twirlbreak::Scenario::bosonic,
                    twirlbreak::Scenario::eb_test, twirlbreak::Scenario::verify}) {
        CLI::App *sub = app.add_subcommand(twirlbreak::scenario_name(sc));
        add_options(sub, o);
        subs.emplace_back(sub, sc);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    try {
        for (auto &[sub, sc] : subs) {
            if (sub->parsed()) {
                return run(sc, o);
            }
        }
    } catch (const twirlbreak::ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
