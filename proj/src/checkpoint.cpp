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

#include "qse/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "qse/error.hpp"

namespace qse {

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'E', 'C', 'K', 'P', 'T', '\0'};
constexpr std::size_t kHeaderSize = 64;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    std::uint64_t u(std::size_t width, const char* field) {
        if (pos_ + width > bytes_.size()) throw SchemaError(field, "checkpoint truncated");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += width;
        return v;
    }
    double f64(const char* field) { return std::bit_cast<double>(u(8, field)); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string family_name(const AnyModel& model) {
    return std::holds_alternative<HybridClassifier>(model) ? "hybrid" : "classical";
}

std::vector<std::uint8_t> encode_checkpoint(const AnyModel& model) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u32(out, kCheckpointVersion);
    std::vector<double> flat;
    if (const auto* h = std::get_if<HybridClassifier>(&model)) {
        h->validate();
        put_u32(out, 1);
        put_u64(out, h->feature_dim());
        put_u64(out, h->n_classes());
        put_u64(out, static_cast<std::uint64_t>(h->ansatz_spec.n_qubits));
        put_u64(out, static_cast<std::uint64_t>(h->ansatz_spec.depth));
        put_u32(out, h->ansatz_spec.first_rotation == Rotation::Y ? 0 : 1);
        put_u32(out, h->use_skip ? 1 : 0);
        flat = flatten(*h);
    } else {
        const auto& c = std::get<ClassicalBaseline>(model);
        c.validate();
        put_u32(out, 0);
        put_u64(out, c.feature_dim());
        put_u64(out, c.n_classes());
        put_u64(out, c.hidden.out_dim());
        put_u64(out, 0);
        put_u32(out, 0);
        put_u32(out, 0);
        flat = flatten(c);
    }
    put_u64(out, flat.size());
    for (double v : flat) put_u64(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

AnyModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw SchemaError("magic", "not a qse checkpoint");
    Reader r(bytes.subspan(sizeof kMagic));
    const auto version = r.u(4, "version");
    if (version != kCheckpointVersion)
        throw SchemaError("version", "unsupported checkpoint version " + std::to_string(version));
    const auto family = r.u(4, "family");
    const auto feature_dim = r.u(8, "feature_dim");
    const auto n_classes = r.u(8, "n_classes");
    const auto width = r.u(8, "width");
    const auto depth = r.u(8, "depth");
    const auto rotation = r.u(4, "first_rotation");
    const auto skip = r.u(4, "use_skip");
    const auto n_params = r.u(8, "n_params");
    if (r.remaining() != 8 * n_params) throw SchemaError("params", "size does not match n_params");
    std::vector<double> flat(n_params);
    for (auto& v : flat) v = r.f64("params");

    constexpr std::uint64_t kLimit = 1u << 20;
    if (feature_dim == 0 || feature_dim > kLimit || n_classes == 0 || n_classes > kLimit || width == 0 || width > kLimit)
        throw SchemaError("dimensions", "out of range");

    AnyModel out;
    if (family == 1) {
        if (depth == 0 || depth > kLimit || rotation > 1 || skip > 1) throw SchemaError("ansatz", "bad ansatz header");
        HybridClassifier h;
        h.projection = LinearLayer(feature_dim, width);
        h.ansatz_spec = AnsatzSpec{static_cast<int>(width), static_cast<int>(depth),
                                   rotation == 0 ? Rotation::Y : Rotation::Z};
        h.ansatz_spec.validate();
        h.ansatz_params = AnsatzParams::zeros(h.ansatz_spec);
        h.readout = LinearLayer(width, n_classes);
        h.use_skip = skip == 1;
        if (h.n_params() != n_params) throw SchemaError("n_params", "does not match dimensions");
        unflatten(h, flat);
        out = std::move(h);
    } else if (family == 0) {
        ClassicalBaseline c{LinearLayer(feature_dim, width), LinearLayer(width, n_classes)};
        if (c.n_params() != n_params) throw SchemaError("n_params", "does not match dimensions");
        unflatten(c, flat);
        out = std::move(c);
    } else {
        throw SchemaError("family", "unknown model family " + std::to_string(family));
    }
    return out;
}

void save_checkpoint(const AnyModel& model, const std::filesystem::path& file) {
    const auto bytes = encode_checkpoint(model);
    std::ofstream out(file, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write checkpoint " + file.string());
}

AnyModel load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open checkpoint " + file.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace qse
