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

#include "qse/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles/dense_oracle.hpp"
#include "qse/error.hpp"

namespace qse {
namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-scale, scale);
    return v;
}

// Independent end-to-end recomputation: plain loops for the affine maps and
// the dense-matrix simulator for the circuit.
std::vector<double> affine(const LinearLayer& l, const std::vector<double>& x) {
    std::vector<double> out(l.out_dim());
    for (std::size_t o = 0; o < l.out_dim(); ++o) {
        double acc = l.bias[o];
        for (std::size_t i = 0; i < l.in_dim(); ++i) acc += l.weights.data[o * l.in_dim() + i] * x[i];
        out[o] = acc;
    }
    return out;
}

std::vector<double> oracle_hybrid(const HybridClassifier& m, const std::vector<double>& x) {
    const auto p = affine(m.projection, x);
    const Circuit c = build_ansatz_circuit(m.ansatz_spec, m.ansatz_params, p);
    const auto psi = oracle::dense_run(c, oracle::zero_state(c.n_qubits)).first;
    std::vector<double> r(p.size());
    for (int q = 0; q < c.n_qubits; ++q) {
        const PauliFactor f{q, Pauli::Z};
        r[static_cast<std::size_t>(q)] = oracle::dense_expectation(psi, {&f, 1}, c.n_qubits);
        if (m.use_skip) r[static_cast<std::size_t>(q)] += p[static_cast<std::size_t>(q)];
    }
    return affine(m.readout, r);
}

std::vector<double> oracle_classical(const ClassicalBaseline& m, const std::vector<double>& x) {
    auto h = affine(m.hidden, x);
    for (auto& v : h) v = std::tanh(v);
    return affine(m.readout, h);
}

template <typename Model>
double loss_at(const Model& m, std::span<const double> flat, std::span<const double> x, int label) {
    Model copy = m;
    unflatten(copy, flat);
    return cross_entropy(logits(copy, x), label);
}

/// Every analytic gradient entry against central differences (h = 1e-5):
/// |a - f| <= max(rel * |f|, abs_floor).
template <typename Model>
void expect_gradient_matches(const Model& m, const LossGradient& g, std::span<const double> x, int label, double rel,
                             double abs_floor) {
    const std::vector<double> base = flatten(m);
    ASSERT_EQ(g.grad.size(), base.size());
    EXPECT_NEAR(g.loss, loss_at(m, base, x, label), 1e-12);
    const double h = 1e-5;
    for (std::size_t k = 0; k < base.size(); ++k) {
        std::vector<double> plus = base, minus = base;
        plus[k] += h;
        minus[k] -= h;
        const double fd = (loss_at(m, plus, x, label) - loss_at(m, minus, x, label)) / (2 * h);
        ASSERT_LE(std::abs(g.grad[k] - fd), std::max(rel * std::abs(fd), abs_floor))
            << "parameter " << k << " analytic " << g.grad[k] << " fd " << fd;
    }
}

Dataset toy_separable(Rng& rng, std::size_t n_per_class) {
    Dataset d;
    d.n_classes = 2;
    d.train.features = Matrix(2 * n_per_class, 2);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int label = static_cast<int>(i % 2);
        const double cx = label ? 1.5 : -1.5;
        d.train.features(i, 0) = cx + rng.uniform(-1.0, 1.0);
        d.train.features(i, 1) = rng.uniform(-2.0, 2.0);
        d.train.labels.push_back(label);
    }
    d.test = d.train;
    return d;
}

TEST(LinearLayer, AffineMapAndInitRange) {
    Rng rng(1);
    const LinearLayer l = LinearLayer::random(9, 4, rng);
    for (double w : l.weights.data) EXPECT_LE(std::abs(w), 1.0 / 3.0);
    for (double b : l.bias) EXPECT_LE(std::abs(b), 1.0 / 3.0);
    const auto x = random_vector(9, rng);
    const auto y = l(x);
    const auto ref = affine(l, x);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(y[i], ref[i], 1e-15);
    EXPECT_THROW(l(random_vector(8, rng)), InvalidArgument);
}

TEST(ForwardHybrid, ZeroAnglesWithSkipPassesProjection) {
    Rng rng(2);
    HybridClassifier m = HybridClassifier::init(6, 3, {4, 2, Rotation::Y}, true, rng);
    m.ansatz_params = AnsatzParams::zeros(m.ansatz_spec);
    const auto x = random_vector(6, rng);
    const auto got = forward_hybrid(m, x);
    const auto want = m.readout(m.projection(x));
    // Measurements at zero angles are zero only up to rounding in the
    // simulator, so the readout input matches p to within 1e-15 per entry.
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-14);
}

TEST(ForwardHybrid, ZeroReadoutWeightsGiveBias) {
    Rng rng(3);
    HybridClassifier m = HybridClassifier::init(5, 4, {3, 2, Rotation::Y}, false, rng);
    std::fill(m.readout.weights.data.begin(), m.readout.weights.data.end(), 0.0);
    m.readout.bias = {0.1, -0.2, 0.3, 0.7};
    for (int t = 0; t < 3; ++t) EXPECT_EQ(forward_hybrid(m, random_vector(5, rng, 3.0)), m.readout.bias);
}

TEST(ForwardHybrid, MatchesIndependentRecomputation) {
    Rng rng(4);
    for (bool skip : {false, true}) {
        HybridClassifier m = HybridClassifier::init(7, 5, {4, 3, Rotation::Y}, skip, rng);
        for (auto& a : m.ansatz_params.angles) a = rng.uniform(-3, 3);
        const auto x = random_vector(7, rng, 2.0);
        const auto got = forward_hybrid(m, x);
        const auto want = oracle_hybrid(m, x);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
}

TEST(ForwardHybrid, DimensionMismatch) {
    Rng rng(5);
    HybridClassifier m = HybridClassifier::init(4, 2, {2, 1, Rotation::Y}, false, rng);
    EXPECT_THROW(forward_hybrid(m, random_vector(3, rng)), InvalidArgument);
    m.readout = LinearLayer(3, 2);
    EXPECT_THROW(m.validate(), InvalidArgument);
}

TEST(ForwardClassical, ZeroHiddenGivesReadoutBias) {
    Rng rng(6);
    ClassicalBaseline m = ClassicalBaseline::init(5, 3, 4, rng);
    m.hidden = LinearLayer(5, 4);
    EXPECT_EQ(forward_classical(m, random_vector(5, rng)), m.readout.bias);
}

TEST(ForwardClassical, IdentityLayersGiveTanh) {
    ClassicalBaseline m{LinearLayer(3, 3), LinearLayer(3, 3)};
    for (std::size_t i = 0; i < 3; ++i) {
        m.hidden.weights(i, i) = 1.0;
        m.readout.weights(i, i) = 1.0;
    }
    const std::vector<double> x{-0.5, 0.0, 2.0};
    const auto y = forward_classical(m, x);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(y[i], std::tanh(x[i]));
}

TEST(ForwardClassical, MatchesIndependentRecomputation) {
    Rng rng(7);
    const ClassicalBaseline m = ClassicalBaseline::init(8, 6, 4, rng);
    const auto x = random_vector(8, rng, 2.0);
    const auto got = forward_classical(m, x);
    const auto want = oracle_classical(m, x);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(CrossEntropy, KnownValues) {
    EXPECT_NEAR(cross_entropy(std::vector<double>(10, 0.37), 4), std::log(10.0), 1e-14);
    std::vector<double> saturated(10, 0.0);
    saturated[2] = 30.0;
    EXPECT_LT(cross_entropy(saturated, 2), 1e-9);
    EXPECT_NEAR(cross_entropy(std::vector<double>{1, 2}, 0), 1.3132616875182228, 1e-12);
    EXPECT_NEAR(cross_entropy(std::vector<double>{1000, 0}, 1), 1000.0, 1e-9);
    EXPECT_THROW(cross_entropy(std::vector<double>{1, 2}, 2), InvalidArgument);
    EXPECT_THROW(cross_entropy(std::vector<double>{1, 2}, -1), InvalidArgument);
}

TEST(Backward, HybridMatchesFiniteDifferences) {
    Rng rng(8);
    for (bool skip : {false, true}) {
        HybridClassifier m = HybridClassifier::init(5, 3, {4, 2, Rotation::Y}, skip, rng);
        for (auto& a : m.ansatz_params.angles) a = rng.uniform(-2, 2);
        const auto x = random_vector(5, rng, 1.5);
        expect_gradient_matches(m, backward(m, x, 1), x, 1, 1e-5, 1e-7);
    }
}

TEST(Backward, ClassicalMatchesFiniteDifferences) {
    Rng rng(9);
    const ClassicalBaseline m = ClassicalBaseline::init(6, 4, 3, rng);
    const auto x = random_vector(6, rng, 1.5);
    expect_gradient_matches(m, backward(m, x, 3), x, 3, 0.0, 1e-7);
}

TEST(Backward, ZeroReadoutKillsAnsatzGradient) {
    Rng rng(10);
    HybridClassifier m = HybridClassifier::init(4, 3, {3, 2, Rotation::Y}, false, rng);
    std::fill(m.readout.weights.data.begin(), m.readout.weights.data.end(), 0.0);
    const auto g = backward(m, random_vector(4, rng), 0);
    const std::size_t off = m.projection.n_params();
    for (std::size_t k = 0; k < m.ansatz_spec.n_params(); ++k) EXPECT_EQ(g.grad[off + k], 0.0);
}

TEST(Backward, WrongShiftIsDetectable) {
    Rng rng(11);
    HybridClassifier m = HybridClassifier::init(3, 2, {2, 1, Rotation::Y}, false, rng);
    for (auto& a : m.ansatz_params.angles) a = rng.uniform(-2, 2);
    const auto x = random_vector(3, rng);
    const auto good = backward(m, x, 0);
    const auto bad = backward(m, x, 0, {-std::numbers::pi / 2});
    double diff = 0.0;
    for (std::size_t k = 0; k < good.grad.size(); ++k) diff = std::max(diff, std::abs(good.grad[k] - bad.grad[k]));
    EXPECT_GT(diff, 1e-3);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
    std::vector<double> p{1.0, -2.0, 0.5};
    const std::vector<double> g{0.3, -4.0, 1e-3};
    AdamState s = AdamState::for_params(3, 1e-3);
    adam_step(p, g, s);
    EXPECT_EQ(s.step_count, 1u);
    EXPECT_NEAR(p[0], 1.0 - 1e-3, 1e-10);
    EXPECT_NEAR(p[1], -2.0 + 1e-3, 1e-10);
    EXPECT_NEAR(p[2], 0.5 - 1e-3, 1e-8);
}

TEST(Adam, ZeroGradientLeavesEverythingAtRest) {
    std::vector<double> p{1.0, -2.0};
    AdamState s = AdamState::for_params(2);
    for (int i = 0; i < 5; ++i) adam_step(p, std::vector<double>{0.0, 0.0}, s);
    EXPECT_EQ(p, (std::vector<double>{1.0, -2.0}));
    EXPECT_EQ(s.first_moment, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(s.second_moment, (std::vector<double>{0.0, 0.0}));
}

TEST(Adam, QuadraticLossDecreasesAndMatchesScriptedTrace) {
    // f(p) = 0.5 * |p - c|^2, gradient p - c; reference recurrence written
    // out longhand.
    const std::vector<double> c{0.25, -0.75};
    std::vector<double> p{1.0, 1.0};
    std::vector<double> ref = p, m(2, 0.0), v(2, 0.0);
    AdamState s = AdamState::for_params(2, 0.1);
    auto loss = [&](const std::vector<double>& q) {
        return 0.5 * ((q[0] - c[0]) * (q[0] - c[0]) + (q[1] - c[1]) * (q[1] - c[1]));
    };
    double prev = loss(p);
    for (int t = 1; t <= 3; ++t) {
        std::vector<double> g{p[0] - c[0], p[1] - c[1]};
        adam_step(p, g, s);
        for (int i = 0; i < 2; ++i) {
            const double gi = ref[i] - c[i];
            m[i] = 0.9 * m[i] + 0.1 * gi;
            v[i] = 0.999 * v[i] + 0.001 * gi * gi;
            const double mh = m[i] / (1 - std::pow(0.9, t));
            const double vh = v[i] / (1 - std::pow(0.999, t));
            ref[i] -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
        }
        EXPECT_NEAR(p[0], ref[0], 1e-14);
        EXPECT_NEAR(p[1], ref[1], 1e-14);
        const double now = loss(p);
        EXPECT_LT(now, prev);
        prev = now;
    }
}

TEST(Adam, ShapeMismatch) {
    std::vector<double> p{1.0, 2.0};
    AdamState s = AdamState::for_params(2);
    EXPECT_THROW(adam_step(p, std::vector<double>{1.0}, s), InvalidArgument);
    AdamState wrong = AdamState::for_params(3);
    EXPECT_THROW(adam_step(p, std::vector<double>{1.0, 1.0}, wrong), InvalidArgument);
}

TEST(Flatten, RoundTripAndLayout) {
    Rng rng(12);
    HybridClassifier m = HybridClassifier::init(3, 2, {2, 2, Rotation::Y}, true, rng);
    const auto flat = flatten(m);
    EXPECT_EQ(flat.size(), m.n_params());
    EXPECT_EQ(flat.size(), 6u + 2 + 4 + 4 + 2);
    EXPECT_EQ(flat[0], m.projection.weights.data[0]);
    EXPECT_EQ(flat[8], m.ansatz_params.angles[0]);
    HybridClassifier z = HybridClassifier::init(3, 2, {2, 2, Rotation::Y}, true, rng);
    unflatten(z, flat);
    EXPECT_EQ(flatten(z), flat);
    EXPECT_THROW(unflatten(z, std::vector<double>(3)), InvalidArgument);
}

TEST(Evaluate, ConstantAndPerfectModels) {
    Rng rng(13);
    LabeledSet s;
    s.features = Matrix(20, 2);
    for (std::size_t i = 0; i < 20; ++i) {
        s.labels.push_back(static_cast<int>(i % 4));
        s.features(i, 0) = static_cast<double>(i % 4);
    }
    ClassicalBaseline constant{LinearLayer(2, 4), LinearLayer(4, 4)};
    EXPECT_DOUBLE_EQ(evaluate_top1(constant, s), 0.75);

    // Readout picks the class whose one-hot hidden unit fires: hidden unit k
    // is large when feature 0 equals k.
    ClassicalBaseline lookup{LinearLayer(2, 4), LinearLayer(4, 4)};
    for (std::size_t k = 0; k < 4; ++k) {
        lookup.hidden.weights(k, 0) = 10.0;
        lookup.hidden.bias[k] = -10.0 * (static_cast<double>(k) - 0.5);
        lookup.readout.weights(k, k) = 1.0;
        if (k + 1 < 4) lookup.readout.weights(k, k + 1) = -1.0;
    }
    EXPECT_DOUBLE_EQ(evaluate_top1(lookup, s), 0.0);

    // Hand count: a model that always says class 1 misses 15 of 20.
    ClassicalBaseline ones{LinearLayer(2, 4), LinearLayer(4, 4)};
    ones.readout.bias[1] = 1.0;
    EXPECT_DOUBLE_EQ(evaluate_top1(ones, s), 15.0 / 20.0);

    EXPECT_THROW(evaluate_top1(ones, LabeledSet{}), InvalidArgument);
}

TEST(Argmax, TiesGoToLowestIndex) {
    EXPECT_EQ(argmax(std::vector<double>{1, 3, 3, 2}), 1u);
    EXPECT_EQ(argmax(std::vector<double>{0, 0}), 0u);
}

TEST(Train, ClassicalSeparatesToySet) {
    Rng rng(14);
    const Dataset d = toy_separable(rng, 32);
    Rng init(15);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.05;
    const auto r = train(ClassicalBaseline::init(2, 2, 4, init), d, cfg);
    EXPECT_EQ(evaluate_top1(r.model, d.train), 0.0);
    ASSERT_EQ(r.metrics.size(), 200u);
}

TEST(Train, SameSeedIsBitIdentical) {
    Rng rng(16);
    const Dataset d = toy_separable(rng, 10);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 4;
    cfg.seed = 99;
    auto run = [&] {
        Rng init(5);
        return train(HybridClassifier::init(2, 2, {2, 2, Rotation::Y}, true, init), d, cfg);
    };
    const auto a = run();
    const auto b = run();
    ASSERT_EQ(a.metrics.size(), b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        EXPECT_EQ(a.metrics[i].train_loss, b.metrics[i].train_loss);
        EXPECT_EQ(a.metrics[i].test_error, b.metrics[i].test_error);
    }
    EXPECT_EQ(flatten(a.model), flatten(b.model));
}

TEST(Train, EmptyTrainSplitRejected) {
    Rng init(1);
    Dataset d;
    d.n_classes = 2;
    d.train.features = Matrix(0, 2);
    d.test.features = Matrix(0, 2);
    EXPECT_THROW(train(ClassicalBaseline::init(2, 2, 2, init), d, TrainConfig{}), InvalidArgument);
}

// Properties.

TEST(ModelProperty, GradientsMatchFiniteDifferencesOnRandomInstances) {
    Rng rng(2025);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t fd = 2 + rng.below(4), nc = 2 + rng.below(3);
        const int n = 1 + static_cast<int>(rng.below(4)), depth = 1 + static_cast<int>(rng.below(3));
        const int label = static_cast<int>(rng.below(nc));
        const auto x = random_vector(fd, rng, 1.5);
        for (bool skip : {false, true}) {
            HybridClassifier m = HybridClassifier::init(fd, nc, {n, depth, Rotation::Y}, skip, rng);
            for (auto& a : m.ansatz_params.angles) a = rng.uniform(-2, 2);
            expect_gradient_matches(m, backward(m, x, label), x, label, 1e-5, 1e-7);
        }
        const ClassicalBaseline c = ClassicalBaseline::init(fd, nc, static_cast<std::size_t>(n), rng);
        expect_gradient_matches(c, backward(c, x, label), x, label, 1e-5, 1e-7);
    }
}

TEST(ModelProperty, SkipEquivalenceAtZero) {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        HybridClassifier m = HybridClassifier::init(5, 3, {n, 1 + static_cast<int>(rng.below(4)), Rotation::Y}, true, rng);
        m.ansatz_params = AnsatzParams::zeros(m.ansatz_spec);
        const auto x = random_vector(5, rng, 2.0);
        const auto got = forward_hybrid(m, x);
        const auto want = m.readout(m.projection(x));
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-14);
    }
}

TEST(ModelProperty, ToySetLossFallsOverTenEpochsMedianOfFiveSeeds) {
    Rng data_rng(40);
    const Dataset d = toy_separable(data_rng, 32);
    std::vector<double> drops;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng init(seed);
        TrainConfig cfg;
        cfg.epochs = 10;
        cfg.seed = seed;
        const auto r = train(ClassicalBaseline::init(2, 2, 4, init), d, cfg);
        drops.push_back(r.metrics.front().train_loss - r.metrics.back().train_loss);
    }
    std::sort(drops.begin(), drops.end());
    EXPECT_GT(drops[2], 0.0);
}

}  // namespace
}  // namespace qse
