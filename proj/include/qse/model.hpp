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
#include <span>
#include <string>
#include <vector>

#include "qse/ansatz.hpp"
#include "qse/matrix.hpp"
#include "qse/rng.hpp"

namespace qse {

struct LinearLayer {
    Matrix weights;  // out_dim x in_dim
    std::vector<double> bias;

    LinearLayer() = default;
    LinearLayer(std::size_t in_dim, std::size_t out_dim) : weights(out_dim, in_dim), bias(out_dim, 0.0) {}

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
    std::size_t n_params() const { return weights.data.size() + bias.size(); }

    /// Uniform(-1/sqrt(in), 1/sqrt(in)) for weights and bias.
    static LinearLayer random(std::size_t in_dim, std::size_t out_dim, Rng& rng);

    std::vector<double> operator()(std::span<const double> x) const;
};

/// projection -> ansatz -> (+ projection if use_skip) -> readout.
struct HybridClassifier {
    LinearLayer projection;
    AnsatzSpec ansatz_spec;
    AnsatzParams ansatz_params;
    LinearLayer readout;
    bool use_skip = false;

    static HybridClassifier init(std::size_t feature_dim, std::size_t n_classes, AnsatzSpec spec, bool use_skip,
                                 Rng& rng);

    void validate() const;
    std::size_t feature_dim() const { return projection.in_dim(); }
    std::size_t n_classes() const { return readout.out_dim(); }
    std::size_t n_params() const;
};

/// Two-layer MLP with tanh between the layers; hidden width matches the
/// hybrid model's qubit count in every comparison.
struct ClassicalBaseline {
    LinearLayer hidden;
    LinearLayer readout;

    static ClassicalBaseline init(std::size_t feature_dim, std::size_t n_classes, std::size_t width, Rng& rng);

    void validate() const;
    std::size_t feature_dim() const { return hidden.in_dim(); }
    std::size_t n_classes() const { return readout.out_dim(); }
    std::size_t n_params() const { return hidden.n_params() + readout.n_params(); }
};

std::vector<double> forward_hybrid(const HybridClassifier& model, std::span<const double> x);
std::vector<double> forward_classical(const ClassicalBaseline& model, std::span<const double> x);

inline std::vector<double> logits(const HybridClassifier& m, std::span<const double> x) { return forward_hybrid(m, x); }
inline std::vector<double> logits(const ClassicalBaseline& m, std::span<const double> x) {
    return forward_classical(m, x);
}

/// -log softmax(logits)[label], max-subtracted.
double cross_entropy(std::span<const double> logits, int label);

// Flat parameter layout, in order:
//   hybrid:    projection W, projection b, ansatz angles, readout W, readout b
//   classical: hidden W, hidden b, readout W, readout b
std::vector<double> flatten(const HybridClassifier& m);
std::vector<double> flatten(const ClassicalBaseline& m);
void unflatten(HybridClassifier& m, std::span<const double> p);
void unflatten(ClassicalBaseline& m, std::span<const double> p);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad;  // flat layout above
};

/// Cross-entropy loss and its gradient for one sample. Circuit angles and
/// embedding inputs are differentiated with the parameter-shift rule.
LossGradient backward(const HybridClassifier& model, std::span<const double> x, int label, ShiftRule rule = {});
LossGradient backward(const ClassicalBaseline& model, std::span<const double> x, int label);

struct AdamState {
    std::uint64_t step_count = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_params(std::size_t n, double lr = 1e-3);
};

/// In-place bias-corrected Adam update; increments step_count.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// Features and labels of one split.
struct LabeledSet {
    Matrix features;  // n_samples x feature_dim
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const double> sample(std::size_t i) const { return features.row(i); }
};

struct Dataset {
    std::size_t n_classes = 0;
    LabeledSet train;
    LabeledSet test;

    std::size_t feature_dim() const { return train.features.cols; }
    void validate() const;
};

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    std::uint64_t seed = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double test_error = 0.0;
};

template <typename Model>
struct TrainResult {
    Model model;
    std::vector<EpochMetrics> metrics;
};

/// Mini-batch Adam on the mean batch loss. Shuffling is seeded by
/// `config.seed`; gradients are reduced in sample order, so the run is
/// reproducible bit for bit.
TrainResult<HybridClassifier> train(HybridClassifier model, const Dataset& data, const TrainConfig& config);
TrainResult<ClassicalBaseline> train(ClassicalBaseline model, const Dataset& data, const TrainConfig& config);

/// Fraction of samples whose argmax logit (lowest index on ties) is wrong.
double evaluate_top1(const HybridClassifier& model, const LabeledSet& split);
double evaluate_top1(const ClassicalBaseline& model, const LabeledSet& split);

std::size_t argmax(std::span<const double> v);

}  // namespace qse
