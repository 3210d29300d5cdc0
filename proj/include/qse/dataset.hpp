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

#include <cstdint>
#include <filesystem>

#include "qse/config.hpp"
#include "qse/model.hpp"

namespace qse {

/// Gaussian class clusters standing in for frozen backbone features.
struct SyntheticDatasetSpec {
    std::size_t n_classes = 10;
    std::size_t train_per_class = 200;
    std::size_t test_per_class = 50;
    std::size_t feature_dim = 16;
    double separation = 3.0;  // radius of the sphere holding the class centres
    std::uint64_t seed = 0;

    void validate() const;  // InvalidArgument
};

/// Reads the "dataset" object of a config; unknown or ill-typed fields raise
/// SchemaError with their path.
SyntheticDatasetSpec dataset_spec_from_config(const ConfigNode& node);
Json to_json(const SyntheticDatasetSpec& spec);

/// Centres first (one normal draw per coordinate, scaled onto the sphere),
/// then train samples class by class, then test samples. Features are
/// standardised with the train split's per-feature mean and deviation.
Dataset generate_dataset(const SyntheticDatasetSpec& spec);

/// train.csv, test.csv ("label,f0,f1,...", shortest round-trip decimals) and
/// manifest.json with the generator parameters and split sizes.
void write_dataset(const Dataset& data, const SyntheticDatasetSpec& spec, const std::filesystem::path& dir);

/// Loads a directory written by write_dataset.
Dataset load_dataset(const std::filesystem::path& dir);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace qse
