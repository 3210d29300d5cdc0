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

#include <algorithm>
#include <cmath>
#include <limits>

#include "qse/error.hpp"

namespace qse {

namespace {

void check_features(std::span<const double> x, std::size_t expected) {
    if (x.size() != expected)
        throw InvalidArgument("feature vector has " + std::to_string(x.size()) + " entries, expected " +
                              std::to_string(expected));
}

void check_label(int label, std::size_t n_classes) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
        throw InvalidArgument("label " + std::to_string(label) + " outside [0, " + std::to_string(n_classes) + ")");
}

void append(std::vector<double>& out, const LinearLayer& l) {
    out.insert(out.end(), l.weights.data.begin(), l.weights.data.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
}

std::size_t take(LinearLayer& l, std::span<const double> p, std::size_t at) {
    std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(at), l.weights.data.size(), l.weights.data.begin());
    at += l.weights.data.size();
    std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(at), l.bias.size(), l.bias.begin());
    return at + l.bias.size();
}

/// d(loss)/d(logits) = softmax - onehot.
std::vector<double> softmax_grad(std::span<const double> z, int label) {
    const double zmax = *std::max_element(z.begin(), z.end());
    std::vector<double> g(z.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        g[k] = std::exp(z[k] - zmax);
        sum += g[k];
    }
    for (auto& v : g) v /= sum;
    g[static_cast<std::size_t>(label)] -= 1.0;
    return g;
}

/// Accumulates the linear layer's parameter gradient at `at` in `grad` and
/// returns d(loss)/d(input).
std::vector<double> linear_backward(const LinearLayer& l, std::span<const double> input, std::span<const double> dout,
                                    std::vector<double>& grad, std::size_t at) {
    const std::size_t out = l.out_dim();
    const std::size_t in = l.in_dim();
    std::vector<double> din(in, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
        for (std::size_t c = 0; c < in; ++c) {
            grad[at + r * in + c] += dout[r] * input[c];
            din[c] += l.weights(r, c) * dout[r];
        }
        grad[at + out * in + r] += dout[r];
    }
    return din;
}

template <typename Model>
double top1(const Model& model, const LabeledSet& split) {
    if (split.size() == 0) throw InvalidArgument("cannot evaluate on an empty split");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < split.size(); ++i) {
        const auto z = logits(model, split.sample(i));
        if (static_cast<int>(argmax(z)) != split.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(split.size());
}

template <typename Model>
TrainResult<Model> train_impl(Model model, const Dataset& data, const TrainConfig& config) {
    data.validate();
    model.validate();
    if (data.train.size() == 0) throw InvalidArgument("training split is empty");
    if (config.epochs < 0) throw InvalidArgument("epochs must be >= 0");
    if (config.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    if (data.feature_dim() != model.feature_dim())
        throw InvalidArgument("dataset feature_dim " + std::to_string(data.feature_dim()) + " does not match model " +
                              std::to_string(model.feature_dim()));
    if (data.n_classes != model.n_classes()) throw InvalidArgument("dataset and model disagree on class count");

    Rng rng(config.seed);
    std::vector<double> params = flatten(model);
    AdamState adam = AdamState::for_params(params.size(), config.learning_rate);
    adam.beta1 = config.beta1;
    adam.beta2 = config.beta2;
    adam.epsilon = config.epsilon;

    std::vector<std::size_t> order(data.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto batch = static_cast<std::size_t>(config.batch_size);

    TrainResult<Model> result{model, {}};
    std::vector<double> grad_sum(params.size());
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t s = order[i];
                const LossGradient lg = backward(result.model, data.train.sample(s), data.train.labels[s]);
                loss_sum += lg.loss;
                for (std::size_t k = 0; k < grad_sum.size(); ++k) grad_sum[k] += lg.grad[k];
            }
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (auto& g : grad_sum) g *= scale;
            adam_step(params, grad_sum, adam);
            unflatten(result.model, params);
        }
        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = loss_sum / static_cast<double>(order.size());
        m.test_error = data.test.size() > 0 ? top1(result.model, data.test) : std::numeric_limits<double>::quiet_NaN();
        result.metrics.push_back(m);
    }
    return result;
}

}  // namespace

LinearLayer LinearLayer::random(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
    LinearLayer l(in_dim, out_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (auto& w : l.weights.data) w = rng.uniform(-bound, bound);
    for (auto& b : l.bias) b = rng.uniform(-bound, bound);
    return l;
}

std::vector<double> LinearLayer::operator()(std::span<const double> x) const {
    check_features(x, in_dim());
    std::vector<double> y(bias);
    for (std::size_t r = 0; r < out_dim(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < in_dim(); ++c) acc += weights(r, c) * x[c];
        y[r] += acc;
    }
    return y;
}

HybridClassifier HybridClassifier::init(std::size_t feature_dim, std::size_t n_classes, AnsatzSpec spec,
                                        bool use_skip, Rng& rng) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_qubits);
    HybridClassifier m;
    m.projection = LinearLayer::random(feature_dim, n, rng);
    m.ansatz_spec = spec;
    m.ansatz_params = AnsatzParams::zeros(spec);
    for (auto& a : m.ansatz_params.angles) a = rng.uniform(-0.1, 0.1);
    m.readout = LinearLayer::random(n, n_classes, rng);
    m.use_skip = use_skip;
    return m;
}

void HybridClassifier::validate() const {
    ansatz_spec.validate();
    const auto n = static_cast<std::size_t>(ansatz_spec.n_qubits);
    if (projection.out_dim() != n || readout.in_dim() != n)
        throw InvalidArgument("projection out_dim, qubit count and readout in_dim must agree");
    if (ansatz_params.angles.size() != ansatz_spec.n_params()) throw InvalidArgument("ansatz parameter count mismatch");
    if (projection.bias.size() != n || readout.bias.size() != readout.out_dim())
        throw InvalidArgument("bias length mismatch");
}

std::size_t HybridClassifier::n_params() const {
    return projection.n_params() + ansatz_params.angles.size() + readout.n_params();
}

ClassicalBaseline ClassicalBaseline::init(std::size_t feature_dim, std::size_t n_classes, std::size_t width,
                                          Rng& rng) {
    ClassicalBaseline m;
    m.hidden = LinearLayer::random(feature_dim, width, rng);
    m.readout = LinearLayer::random(width, n_classes, rng);
    return m;
}

void ClassicalBaseline::validate() const {
    if (hidden.out_dim() != readout.in_dim()) throw InvalidArgument("hidden out_dim must equal readout in_dim");
    if (hidden.bias.size() != hidden.out_dim() || readout.bias.size() != readout.out_dim())
        throw InvalidArgument("bias length mismatch");
}

std::vector<double> forward_hybrid(const HybridClassifier& model, std::span<const double> x) {
    model.validate();
    check_features(x, model.feature_dim());
    const std::vector<double> p = model.projection(x);
    std::vector<double> r = ansatz_forward(model.ansatz_spec, model.ansatz_params, p);
    if (model.use_skip)
        for (std::size_t q = 0; q < r.size(); ++q) r[q] += p[q];
    return model.readout(r);
}

std::vector<double> forward_classical(const ClassicalBaseline& model, std::span<const double> x) {
    model.validate();
    check_features(x, model.feature_dim());
    std::vector<double> h = model.hidden(x);
    for (auto& v : h) v = std::tanh(v);
    return model.readout(h);
}

double cross_entropy(std::span<const double> z, int label) {
    if (z.empty()) throw InvalidArgument("empty logits");
    check_label(label, z.size());
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    return std::log(sum) - (z[static_cast<std::size_t>(label)] - zmax);
}

std::vector<double> flatten(const HybridClassifier& m) {
    std::vector<double> p;
    p.reserve(m.n_params());
    append(p, m.projection);
    p.insert(p.end(), m.ansatz_params.angles.begin(), m.ansatz_params.angles.end());
    append(p, m.readout);
    return p;
}

std::vector<double> flatten(const ClassicalBaseline& m) {
    std::vector<double> p;
    p.reserve(m.n_params());
    append(p, m.hidden);
    append(p, m.readout);
    return p;
}

void unflatten(HybridClassifier& m, std::span<const double> p) {
    if (p.size() != m.n_params()) throw InvalidArgument("parameter vector length mismatch");
    std::size_t at = take(m.projection, p, 0);
    std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(at), m.ansatz_params.angles.size(),
                m.ansatz_params.angles.begin());
    at += m.ansatz_params.angles.size();
    take(m.readout, p, at);
}

void unflatten(ClassicalBaseline& m, std::span<const double> p) {
    if (p.size() != m.n_params()) throw InvalidArgument("parameter vector length mismatch");
    take(m.readout, p, take(m.hidden, p, 0));
}

LossGradient backward(const HybridClassifier& model, std::span<const double> x, int label, ShiftRule rule) {
    model.validate();
    check_features(x, model.feature_dim());
    check_label(label, model.n_classes());

    const std::size_t n = static_cast<std::size_t>(model.ansatz_spec.n_qubits);
    const std::vector<double> p = model.projection(x);
    std::vector<double> r = ansatz_forward(model.ansatz_spec, model.ansatz_params, p);
    if (model.use_skip)
        for (std::size_t q = 0; q < n; ++q) r[q] += p[q];
    const std::vector<double> z = model.readout(r);

    LossGradient out;
    out.loss = cross_entropy(z, label);
    out.grad.assign(model.n_params(), 0.0);

    const std::size_t at_angles = model.projection.n_params();
    const std::size_t at_readout = at_angles + model.ansatz_params.angles.size();
    const std::vector<double> dz = softmax_grad(z, label);
    const std::vector<double> dr = linear_backward(model.readout, r, dz, out.grad, at_readout);

    // dr flows into the measurement vector; the Jacobian maps it back onto
    // circuit angles and embedding inputs.
    const Matrix jac = parameter_shift_grad(model.ansatz_spec, model.ansatz_params, p, rule);
    const std::size_t n_angles = model.ansatz_spec.n_params();
    std::vector<double> dp(n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        const double d = dr[q];
        if (d == 0.0) continue;
        const auto row = jac.row(q);
        for (std::size_t k = 0; k < n_angles; ++k) out.grad[at_angles + k] += d * row[k];
        for (std::size_t i = 0; i < n; ++i) dp[i] += d * row[n_angles + i];
    }
    if (model.use_skip)
        for (std::size_t q = 0; q < n; ++q) dp[q] += dr[q];
    linear_backward(model.projection, x, dp, out.grad, 0);
    return out;
}

LossGradient backward(const ClassicalBaseline& model, std::span<const double> x, int label) {
    model.validate();
    check_features(x, model.feature_dim());
    check_label(label, model.n_classes());

    std::vector<double> h = model.hidden(x);
    for (auto& v : h) v = std::tanh(v);
    const std::vector<double> z = model.readout(h);

    LossGradient out;
    out.loss = cross_entropy(z, label);
    out.grad.assign(model.n_params(), 0.0);
    const std::vector<double> dz = softmax_grad(z, label);
    std::vector<double> dh = linear_backward(model.readout, h, dz, out.grad, model.hidden.n_params());
    for (std::size_t j = 0; j < dh.size(); ++j) dh[j] *= 1.0 - h[j] * h[j];
    linear_backward(model.hidden, x, dh, out.grad, 0);
    return out;
}

AdamState AdamState::for_params(std::size_t n, double lr) {
    AdamState s;
    s.first_moment.assign(n, 0.0);
    s.second_moment.assign(n, 0.0);
    s.learning_rate = lr;
    return s;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size())
        throw InvalidArgument("adam_step: parameter, gradient and moment shapes differ");
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        params[i] -= state.learning_rate * (m / c1) / (std::sqrt(v / c2) + state.epsilon);
    }
}

void Dataset::validate() const {
    if (n_classes < 1) throw InvalidArgument("dataset needs at least one class");
    for (const LabeledSet* s : {&train, &test}) {
        if (s->features.rows != s->labels.size()) throw InvalidArgument("feature rows and label count differ");
        for (int l : s->labels) check_label(l, n_classes);
        for (double v : s->features.data)
            if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
    }
    if (test.size() > 0 && train.size() > 0 && test.features.cols != train.features.cols)
        throw InvalidArgument("train and test feature dimensions differ");
}

TrainResult<HybridClassifier> train(HybridClassifier model, const Dataset& data, const TrainConfig& config) {
    return train_impl(std::move(model), data, config);
}

TrainResult<ClassicalBaseline> train(ClassicalBaseline model, const Dataset& data, const TrainConfig& config) {
    return train_impl(std::move(model), data, config);
}

double evaluate_top1(const HybridClassifier& model, const LabeledSet& split) { return top1(model, split); }
double evaluate_top1(const ClassicalBaseline& model, const LabeledSet& split) { return top1(model, split); }

std::size_t argmax(std::span<const double> v) {
    if (v.empty()) throw InvalidArgument("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace qse
