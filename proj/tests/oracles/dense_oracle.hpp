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

// Test-only reference simulator. It builds every gate as a full 2^n x 2^n
// matrix through Kronecker products and multiplies, sharing no code with the
// production kernels it checks.

#include <complex>
#include <span>
#include <vector>

#include "qse/statevector.hpp"

namespace qse::oracle {

using CVec = std::vector<std::complex<double>>;
using CMat = std::vector<CVec>;

CMat gate_matrix(const Gate& g, int n_qubits);

/// Runs the circuit on `init`; returns the final state and the product of
/// measurement probabilities.
std::pair<CVec, double> dense_run(const Circuit& c, CVec init);

CVec zero_state(int n_qubits);

double dense_expectation(const CVec& psi, std::span<const PauliFactor> factors, int n_qubits);

}  // namespace qse::oracle
