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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qse {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A gate references a qubit outside the register, or is otherwise malformed.
class InvalidCircuit : public Error {
public:
    using Error::Error;
};

class InvalidPlan : public Error {
public:
    using Error::Error;
};

class IncompleteResults : public Error {
public:
    using Error::Error;
};

/// Raised by a cut executor callback; carries the failing combination.
class ExecutorFailure : public Error {
public:
    ExecutorFailure(std::size_t combination, const std::string& what)
        : Error("combination " + std::to_string(combination) + ": " + what), combination_(combination) {}

    std::size_t combination() const noexcept { return combination_; }

private:
    std::size_t combination_;
};

class SimulationIntegrity : public Error {
public:
    using Error::Error;
};

class InfeasibleUnit : public Error {
public:
    using Error::Error;
};

class InvalidPipeline : public Error {
public:
    using Error::Error;
};

/// Configuration did not validate. `path()` names the offending field.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace qse
