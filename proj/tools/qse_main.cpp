// Copyright 2026 The QSE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qse: dataset generation, training, gradient and cut verification, and
// continuum simulation from JSON configs.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "qse/commands.hpp"
#include "qse/error.hpp"

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("qse");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("QSE_LOG_LEVEL");
    const std::string level = env ? env : "warn";
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "warn") spdlog::set_level(spdlog::level::warn);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else {
        spdlog::set_level(spdlog::level::warn);
        spdlog::warn("ignoring QSE_LOG_LEVEL={} (expected error, warn, info or debug)", level);
    }
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"qse: hybrid quantum-classical classifiers, circuit cutting and edge-cloud simulation"};
    app.require_subcommand(1);

    qse::CommandOptions opt;
    std::uint64_t seed = 0;
    std::string config, out = "qse-out";
    std::function<int(const qse::CommandOptions&, std::ostream&)> run;

    auto add = [&](const char* name, const char* help, auto fn) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the config's seed");
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--parallelism", opt.parallelism, "worker threads")->capture_default_str()->check(
            CLI::PositiveNumber);
        sub->callback([&, fn] { run = fn; });
    };
    add("gen-data", "generate a synthetic Gaussian-cluster dataset", qse::cmd_gen_data);
    add("train", "train classical / hybrid / hybrid-with-skip classifiers", qse::cmd_train);
    add("gradcheck", "check analytic gradients against finite differences", qse::cmd_gradcheck);
    add("cut-verify", "check cut reconstruction against uncut simulation", qse::cmd_cut_verify);
    add("simulate", "run the edge-fog-cloud simulation", qse::cmd_simulate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; usage errors share status 2 with
        // config errors.
        return app.exit(e) == 0 ? 0 : 2;
    }
    opt.config = config;
    opt.out = out;
    for (const auto* sub : app.get_subcommands())
        if (sub->count("--seed")) opt.seed = seed;

    try {
        return run(opt, std::cout);
    } catch (const qse::Error& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("unexpected failure: {}", e.what());
        return 3;
    }
}
