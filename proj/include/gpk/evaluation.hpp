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

// Utility metrics, multi-trial mechanism evaluation, optimal-k search and
// temporal-correlation profiling.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpk/dataset.hpp"
#include "gpk/dp.hpp"

namespace gpk::eval {

using Eigen::Index;

// (1/n) sum (x - x~)^2 / (mean(x) mean(x~)). Negative when the means have
// opposite signs; throws DegenerateError when the denominator is zero.
double nmse(const Eigen::VectorXd& x, const Eigen::VectorXd& x_tilde);

struct UtilityScore {
  double value = 0.0;  // +inf when infinite
  bool infinite = false;
};

// 1 / |nmse|, with an explicit infinity sentinel at zero.
UtilityScore utility_score(double nmse_value);

enum class ChunkTransform { raw, difference };

/// Mean |NMSE| of the Fourier release for every k in 1..K, where K is the
/// shortest signal length. Each trial draws one noise stream per signal and
/// reuses it for every candidate k (common random numbers), so candidate k
/// sees exactly the draws an FPA release with that trial's seed would use.
/// Returns an empty vector when every signal is degenerate.
std::vector<double> k_sweep(std::span<const Eigen::VectorXd> signals,
                            ChunkTransform transform, double delta2,
                            double epsilon, int trials, std::uint64_t seed);

/// argmin over k of the mean |NMSE|, ties toward smaller k. Throws
/// DegenerateError when no signal has a nonzero mean.
Index optimal_k(std::span<const Eigen::VectorXd> signals,
                ChunkTransform transform, double delta2, double epsilon,
                int trials, std::uint64_t seed);

struct MechanismConfig {
  dp::Mechanism mechanism = dp::Mechanism::fpa;
  std::optional<Index> chunk_size;
  // Fixed coefficient count; nullopt selects the optimal k per chunk.
  std::optional<Index> fixed_k;
  int k_search_trials = 100;
  // Skip features whose minimum is zero for every participant.
  bool exclude_zero_minimum = false;
};

struct UtilityReport {
  std::string feature;
  std::string recording_type;
  std::string mechanism;
  double epsilon = 0.0;
  std::optional<Index> chunk_size;
  std::vector<Index> chosen_k;  // one per chunk; empty for LPA
  double mean_abs_nmse = 0.0;
  UtilityScore utility;
  int trials = 0;
  std::uint64_t base_seed = 0;
  int zero_nmse_trials = 0;
  std::vector<std::string> exclusions;  // participants with degenerate NMSE
};

// Seed for one release of one participant's signal.
std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& feature,
                         const std::string& recording_type,
                         const std::string& participant, int trial);

// Per-chunk coefficient counts for one (feature, recording_type) group.
std::vector<Index> choose_k(std::span<const FeatureSignal> group,
                            const dp::SensitivityTable& sensitivities,
                            const MechanismConfig& config, double epsilon,
                            std::uint64_t base_seed);

dp::SensitivityTable sensitivities_for(std::span<const FeatureSignal> group,
                                       const MechanismConfig& config);

std::vector<UtilityReport> evaluate_mechanism(const io::Dataset& dataset,
                                              const MechanismConfig& config,
                                              double epsilon, int trials,
                                              std::uint64_t base_seed);

// Privatizes every signal once with the chosen k (chunk-level optimal k
// unless fixed), for downstream use such as leakage evaluation.
io::Dataset privatize_dataset(const io::Dataset& dataset,
                              const MechanismConfig& config, double epsilon,
                              std::uint64_t base_seed);

std::string to_csv(const std::vector<UtilityReport>& reports);
std::string to_json(const std::vector<UtilityReport>& reports);

// Pearson correlation; throws UndefinedCorrelation on zero variance.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct LagCorrelation {
  Index lag = 0;
  std::optional<double> value;  // nullopt: zero variance at either index
  std::size_t participants = 0;
  std::vector<std::string> excluded;  // signals too short for this lag

  // Throws UndefinedCorrelation when the value is undefined.
  double at() const;
};

/// Correlation across participants between the values at ref_index and at
/// ref_index + lag, for lag = 0..max_lag. With `difference`, the signals are
/// difference-transformed first.
std::vector<LagCorrelation> correlation_profile(const io::Dataset& dataset,
                                                const std::string& feature,
                                                const std::string& recording_type,
                                                Index ref_index = 5,
                                                Index max_lag = 10,
                                                bool difference = false);

// Pearson correlation of all (x_t, x_{t+lag}) pairs pooled over time and
// participants. Difference signals skip their leading level element.
double pooled_lag_correlation(const io::Dataset& dataset,
                              const std::string& feature,
                              const std::string& recording_type, Index lag,
                              bool difference = false);

}  // namespace gpk::eval
