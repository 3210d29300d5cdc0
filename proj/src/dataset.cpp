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

#include "qse/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qse/rng.hpp"

namespace qse {

namespace fs = std::filesystem;

void SyntheticDatasetSpec::validate() const {
    if (n_classes < 2) throw InvalidArgument("dataset needs at least two classes");
    if (train_per_class < 1) throw InvalidArgument("train_per_class must be positive");
    if (feature_dim < 1) throw InvalidArgument("feature_dim must be positive");
    if (!(separation >= 0.0) || !std::isfinite(separation)) throw InvalidArgument("separation must be >= 0");
}

SyntheticDatasetSpec dataset_spec_from_config(const ConfigNode& node) {
    node.allow_only({"n_classes", "train_per_class", "test_per_class", "feature_dim", "separation", "seed"});
    SyntheticDatasetSpec s;
    s.n_classes = static_cast<std::size_t>(node.get_int_in("n_classes", 2, 1000, 10));
    s.train_per_class = static_cast<std::size_t>(node.get_int_in("train_per_class", 1, 1000000, 200));
    s.test_per_class = static_cast<std::size_t>(node.get_int_in("test_per_class", 0, 1000000, 50));
    s.feature_dim = static_cast<std::size_t>(node.get_int_in("feature_dim", 1, 4096, 16));
    s.separation = node.get_number("separation", 3.0);
    if (s.separation < 0.0) node.fail("separation", "must be >= 0");
    s.seed = static_cast<std::uint64_t>(node.get_int_in("seed", 0, INT64_MAX, 0));
    return s;
}

Json to_json(const SyntheticDatasetSpec& s) {
    return Json{{"n_classes", s.n_classes},     {"train_per_class", s.train_per_class},
                {"test_per_class", s.test_per_class}, {"feature_dim", s.feature_dim},
                {"separation", s.separation},   {"seed", s.seed}};
}

Dataset generate_dataset(const SyntheticDatasetSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t d = spec.feature_dim;

    Matrix centres(spec.n_classes, d);
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        double norm = 0.0;
        while (norm == 0.0) {
            for (std::size_t k = 0; k < d; ++k) {
                centres(c, k) = rng.normal();
                norm += centres(c, k) * centres(c, k);
            }
        }
        norm = std::sqrt(norm);
        for (std::size_t k = 0; k < d; ++k) centres(c, k) *= spec.separation / norm;
    }

    auto draw = [&](std::size_t per_class) {
        LabeledSet s;
        s.features = Matrix(per_class * spec.n_classes, d);
        std::size_t row = 0;
        for (std::size_t c = 0; c < spec.n_classes; ++c)
            for (std::size_t i = 0; i < per_class; ++i, ++row) {
                for (std::size_t k = 0; k < d; ++k) s.features(row, k) = centres(c, k) + rng.normal();
                s.labels.push_back(static_cast<int>(c));
            }
        return s;
    };

    Dataset data;
    data.n_classes = spec.n_classes;
    data.train = draw(spec.train_per_class);
    data.test = draw(spec.test_per_class);

    const std::size_t n = data.train.size();
    for (std::size_t k = 0; k < d; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += data.train.features(i, k);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (data.train.features(i, k) - mean) * (data.train.features(i, k) - mean);
        var /= static_cast<double>(n);
        const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        for (LabeledSet* split : {&data.train, &data.test})
            for (std::size_t i = 0; i < split->size(); ++i)
                split->features(i, k) = (split->features(i, k) - mean) / sd;
    }
    return data;
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error("float formatting failed");
    return {buf, end};
}

namespace {

void write_split(const LabeledSet& s, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << "label";
    for (std::size_t k = 0; k < s.features.cols; ++k) out << ",f" << k;
    out << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.labels[i];
        for (double v : s.sample(i)) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw Error("write failed for " + file.string());
}

double parse_double(std::string_view tok, const fs::path& file, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw SchemaError(file.string() + ":" + std::to_string(line), "bad number '" + std::string(tok) + "'");
    return v;
}

LabeledSet read_split(const fs::path& file, std::size_t n_classes) {
    std::ifstream in(file);
    if (!in) throw InvalidArgument("dataset file missing: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("label", 0) != 0)
        throw SchemaError(file.string() + ":1", "expected header starting with 'label'");
    const std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t start = 0, field = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const std::string_view tok(line.data() + start, comma - start);
            if (field == 0) {
                const double lab = parse_double(tok, file, lineno);
                if (lab < 0 || lab >= static_cast<double>(n_classes) || lab != std::floor(lab))
                    throw SchemaError(file.string() + ":" + std::to_string(lineno), "label out of range");
                labels.push_back(static_cast<int>(lab));
            } else {
                values.push_back(parse_double(tok, file, lineno));
            }
            ++field;
            start = comma + 1;
        }
        if (field != dim + 1)
            throw SchemaError(file.string() + ":" + std::to_string(lineno), "expected " + std::to_string(dim + 1) + " fields");
    }
    LabeledSet s;
    s.features = Matrix(labels.size(), dim);
    s.features.data = std::move(values);
    s.labels = std::move(labels);
    return s;
}

}  // namespace

void write_dataset(const Dataset& data, const SyntheticDatasetSpec& spec, const fs::path& dir) {
    fs::create_directories(dir);
    write_split(data.train, dir / "train.csv");
    write_split(data.test, dir / "test.csv");
    Json manifest{{"format", "qse-dataset"},
                  {"version", 1},
                  {"generator", to_json(spec)},
                  {"n_classes", data.n_classes},
                  {"feature_dim", data.feature_dim()},
                  {"train_samples", data.train.size()},
                  {"test_samples", data.test.size()}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw Error("cannot write manifest in " + dir.string());
}

Dataset load_dataset(const fs::path& dir) {
    const Json manifest = read_json_file(dir / "manifest.json");
    const ConfigNode root(manifest, "");
    require_version(root, 1);
    Dataset data;
    data.n_classes = static_cast<std::size_t>(root.get_int_in("n_classes", 2, 1000));
    data.train = read_split(dir / "train.csv", data.n_classes);
    data.test = read_split(dir / "test.csv", data.n_classes);
    if (data.train.features.cols != static_cast<std::size_t>(root.get_int("feature_dim")))
        root.fail("feature_dim", "does not match train.csv");
    data.validate();
    return data;
}

}  // namespace qse
