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

#include "qse/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qse {

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("/", "cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw SchemaError("/", path.string() + ": " + e.what());
    }
}

bool ConfigNode::has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

ConfigNode ConfigNode::at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end()) fail(key, "required field missing");
    return {*it, path_ + "/" + key};
}

std::optional<ConfigNode> ConfigNode::find(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end() || it->is_null()) return std::nullopt;
    return ConfigNode{*it, path_ + "/" + key};
}

std::vector<ConfigNode> ConfigNode::items() const {
    if (!value_->is_array()) fail("expected an array");
    std::vector<ConfigNode> out;
    for (std::size_t i = 0; i < value_->size(); ++i) out.emplace_back((*value_)[i], path_ + "/" + std::to_string(i));
    return out;
}

double ConfigNode::number() const {
    if (!value_->is_number()) fail("expected a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
}

std::int64_t ConfigNode::integer() const {
    if (value_->is_number_integer()) return value_->get<std::int64_t>();
    if (value_->is_number_float()) {
        const double v = value_->get<double>();
        if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    }
    fail("expected an integer");
}

bool ConfigNode::boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
}

std::string ConfigNode::string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
}

double ConfigNode::get_number(const std::string& key, double fallback) const {
    auto n = find(key);
    return n ? n->number() : fallback;
}

std::int64_t ConfigNode::get_int(const std::string& key, std::int64_t fallback) const {
    auto n = find(key);
    return n ? n->integer() : fallback;
}

bool ConfigNode::get_bool(const std::string& key, bool fallback) const {
    auto n = find(key);
    return n ? n->boolean() : fallback;
}

std::string ConfigNode::get_string(const std::string& key, const std::string& fallback) const {
    auto n = find(key);
    return n ? n->string() : fallback;
}

void ConfigNode::allow_only(std::initializer_list<const char*> allowed) const {
    if (!value_->is_object()) fail("expected an object");
    for (const auto& [key, _] : value_->items()) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok) fail(key, "unknown field");
    }
}

std::int64_t ConfigNode::get_int_in(const std::string& key, std::int64_t lo, std::int64_t hi) const {
    const std::int64_t v = get_int(key);
    if (v < lo || v > hi)
        fail(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(v));
    return v;
}

std::int64_t ConfigNode::get_int_in(const std::string& key, std::int64_t lo, std::int64_t hi,
                                    std::int64_t fallback) const {
    return has(key) ? get_int_in(key, lo, hi) : fallback;
}

void require_version(const ConfigNode& root, std::int64_t expected) {
    const std::int64_t v = root.get_int("version");
    if (v != expected)
        root.fail("version", "unsupported version " + std::to_string(v) + " (expected " + std::to_string(expected) + ")");
}

}  // namespace qse
