// Copyright 2026 The GPK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Differential-privacy mechanisms for temporally correlated feature signals:
// the Laplace perturbation algorithm (LPA), the Fourier perturbation
// algorithm (FPA), its chunked variant (CFPA) and the chunked variant on
// consecutive-difference signals (DCFPA).

#pragma once

#include <Eigen/Core>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gpk/feature_signal.hpp"
#include "gpk/random.hpp"

namespace gpk::dp {

using Eigen::Index;

enum class Mechanism { lpa, fpa, cfpa, dcfpa };
std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view name);

enum class Accounting { single_release, sequential };

// Either one coefficient count for every chunk or an explicit count per
// chunk index.
using CoefficientCount = std::variant<Index, std::vector<Index>>;

struct PrivacyBudget {
  double epsilon = 1.0;
  int sensitivity_order = 2;
  CoefficientCount k = Index{1};
  std::optional<Index> chunk_size;
  Accounting accounting = Accounting::single_release;

  void validate() const;

  // Coefficient count for one chunk of the given length. A uniform count is
  // clamped to the chunk length so remainder chunks stay valid; an explicit
  // per-chunk count must fit.
  Index k_for_chunk(std::size_t chunk, Index chunk_length) const;
};

struct ChunkRange {
  Index begin = 0;
  Index end = 0;
  Index size() const { return end - begin; }
  bool operator==(const ChunkRange&) const = default;
};

std::vector<ChunkRange> chunk_boundaries(Index n, Index chunk_size);

struct SensitivityKey {
  std::string feature;
  std::string recording_type;
  std::size_t chunk = 0;
  auto operator<=>(const SensitivityKey&) const = default;
};

struct Sensitivity {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

struct SensitivityTable {
  std::map<SensitivityKey, Sensitivity> entries;
  Index n_max = 0;
  std::optional<Index> chunk_size;
  bool difference = false;

  // Throws InvalidArgument when the entry is missing.
  const Sensitivity& at(const std::string& feature,
                        const std::string& recording_type,
                        std::size_t chunk) const;
};

// max over participant pairs of ||x_p - x_q||_w after zero-padding every
// vector to the longest length.
double pairwise_sensitivity(std::span<const Eigen::VectorXd> vectors, int w);

// Same, over the signals of one (feature, recording_type).
double query_sensitivity(std::span<const FeatureSignal> signals, int w);

// Per-(feature, recording_type, chunk) L1 and L2 sensitivities. Without a
// chunk size every group gets a single chunk 0 spanning n_max. With
// `difference`, each chunk is difference-transformed before the scan.
SensitivityTable compute_sensitivities(std::span<const FeatureSignal> signals,
                                       std::optional<Index> chunk_size,
                                       bool difference);

Eigen::VectorXd difference_transform(const Eigen::VectorXd& x);
Eigen::VectorXd aggregate_transform(const Eigen::VectorXd& x);

// Value-level releases, shared by the signal-level mechanisms and the
// evaluation harness.
Eigen::VectorXd laplace_release(const Eigen::VectorXd& x, double lambda,
                                Rng& rng);
// Noise of scale sqrt(n) sqrt(k) delta2 / epsilon on the real and imaginary
// part of each of the first k coefficients, then zero-padded inverse.
Eigen::VectorXd fourier_release(const Eigen::VectorXd& x, double delta2,
                                double epsilon, Index k, Rng& rng);
Eigen::VectorXd difference_fourier_release(const Eigen::VectorXd& x,
                                           double delta2, double epsilon,
                                           Index k, Rng& rng);

double fpa_scale(Index n, Index k, double delta2, double epsilon);

FeatureSignal lpa(const FeatureSignal& signal, double delta1,
                  const PrivacyBudget& budget, Rng& rng);
FeatureSignal fpa(const FeatureSignal& signal, double delta2,
                  const PrivacyBudget& budget, Rng& rng);
FeatureSignal cfpa(const FeatureSignal& signal,
                   const SensitivityTable& sensitivities,
                   const PrivacyBudget& budget, Rng& rng);
FeatureSignal dcfpa(const FeatureSignal& signal,
                    const SensitivityTable& sensitivities,
                    const PrivacyBudget& budget, Rng& rng);

// Dispatches on the mechanism. LPA and FPA read chunk 0 of the table.
FeatureSignal privatize(const FeatureSignal& signal, Mechanism mechanism,
                        const SensitivityTable& sensitivities,
                        const PrivacyBudget& budget, Rng& rng);

// Joint epsilon under sequential or parallel composition.
double composed_epsilon(Mechanism mechanism, const PrivacyBudget& budget,
                        Index n);

bool uses_chunks(Mechanism m);
bool uses_difference(Mechanism m);

}  // namespace gpk::dp
