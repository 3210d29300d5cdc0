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

#pragma once

// Subcommands of the qse tool. Each reads a versioned JSON config, validates
// it completely before touching the output directory, writes its data files
// under `out`, prints a short report and returns the process exit status
// (0 ok, 1 verification failure). Configuration and runtime errors are
// thrown as qse::Error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qse/model.hpp"
#include "qse/verify.hpp"

namespace qse {

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;  // overrides the config's top-level seed
    std::filesystem::path out = "qse-out";
    int parallelism = 1;
};

int cmd_gen_data(const CommandOptions& opt, std::ostream& report);
int cmd_train(const CommandOptions& opt, std::ostream& report);
int cmd_gradcheck(const CommandOptions& opt, std::ostream& report);
int cmd_cut_verify(const CommandOptions& opt, std::ostream& report);
int cmd_simulate(const CommandOptions& opt, std::ostream& report);

/// Parsed "train" config; exposed for tests and the acceptance runner.
struct TrainPlan {
    std::uint64_t seed = 0;
    std::vector<std::string> families;  // classical | hybrid | hybrid_skip
    std::vector<int> n_qubits;
    int depth = 8;
    Rotation first_rotation = Rotation::Y;
    int repeats = 1;
    TrainConfig training;
    bool save_checkpoints = true;
};

struct TrainJobResult {
    std::string family;
    int n_qubits = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::vector<EpochMetrics> epochs;
    double train_error = 0.0;
    double test_error = 0.0;
};

/// One job per (width, family, repeat), run on up to `parallelism` threads;
/// results come back in that nested order whatever the scheduling.
std::vector<TrainJobResult> run_training(const TrainPlan& plan, const Dataset& data, int parallelism,
                                         const std::filesystem::path& checkpoint_dir = {});

/// Median final test error of each (width, family) over its repeats.
double median_test_error(const std::vector<TrainJobResult>& results, const std::string& family, int n_qubits);

/// Median Top-1 error table with the columns "Top-1 Err. C.", "Top-1 Err. H."
/// and "Top-1 Err. H. Res." (percent, two decimals; blank for families not run).
std::string comparison_table_csv(const std::vector<TrainJobResult>& results, const std::vector<int>& widths);

}  // namespace qse
