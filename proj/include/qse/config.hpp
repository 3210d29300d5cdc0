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

// Typed access to JSON configuration documents. Every failure names the
// offending field as a JSON-pointer-like path ("/dataset/n_classes").

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qse/error.hpp"

namespace qse {

using Json = nlohmann::json;

/// Reads and parses a JSON file; parse errors become SchemaError at "/".
Json read_json_file(const std::filesystem::path& path);

class ConfigNode {
public:
    ConfigNode(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const Json& json() const { return *value_; }
    bool has(const std::string& key) const;

    ConfigNode at(const std::string& key) const;
    std::optional<ConfigNode> find(const std::string& key) const;
    std::vector<ConfigNode> items() const;  // array elements

    double number() const;
    std::int64_t integer() const;
    bool boolean() const;
    std::string string() const;

    double get_number(const std::string& key) const { return at(key).number(); }
    double get_number(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const { return at(key).integer(); }
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key) const { return at(key).string(); }
    std::string get_string(const std::string& key, const std::string& fallback) const;

    /// Rejects keys outside `allowed`; catches typos before they are silently ignored.
    void allow_only(std::initializer_list<const char*> allowed) const;

    /// Integer in [lo, hi].
    std::int64_t get_int_in(const std::string& key, std::int64_t lo, std::int64_t hi) const;
    std::int64_t get_int_in(const std::string& key, std::int64_t lo, std::int64_t hi, std::int64_t fallback) const;

    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_.empty() ? "/" : path_, what); }
    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw SchemaError(path_ + "/" + key, what);
    }

private:
    const Json* value_;
    std::string path_;
};

/// Checks the top-level "version" field against `expected`.
void require_version(const ConfigNode& root, std::int64_t expected);

}  // namespace qse
