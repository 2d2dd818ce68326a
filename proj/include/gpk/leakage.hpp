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

// Identity and label leakage of (privatized) feature signals, measured with
// a k-nearest-neighbour classifier on subsampled windows.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gpk/dataset.hpp"
#include "gpk/random.hpp"

namespace gpk::leak {

using Eigen::Index;

struct LabeledRow {
  Eigen::VectorXd features;
  std::string label;
  std::string participant;
  std::string recording;
  int window_index = 0;
};

struct LabeledWindowSet {
  std::vector<LabeledRow> rows;

  // Throws InvalidArgument unless all feature vectors share one length.
  void validate() const;
};

// Means of consecutive non-overlapping windows; a trailing partial window
// is dropped.
Eigen::VectorXd subsample_windows(const Eigen::VectorXd& values, Index window);
Eigen::VectorXd subsample_windows(const FeatureSignal& signal, Index window);

using LabelFn =
    std::function<std::string(const std::string& participant, const std::string& recording)>;

// One row per (participant, recording_type, window); one column per feature
// in sorted feature order.
LabeledWindowSet build_window_set(const io::Dataset& dataset, Index window,
                                  const LabelFn& label);

// Zero-mean, unit-variance scaling fitted on training rows only.
struct Normalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Normalizer fit(std::span<const LabeledRow> rows);
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

// Plurality label; ties are broken uniformly at random among the tied
// labels taken in sorted order.
std::string majority_vote(std::span<const std::string> predictions, Rng& rng);

/// Euclidean k-NN on normalized features. Neighbour ranking is by distance,
/// with equal distances ordered by the row's (label, participant, recording,
/// window) so the result does not depend on training-row order.
std::vector<std::string> knn_classify(const LabeledWindowSet& train,
                                      std::span<const LabeledRow> test,
                                      int k, Rng& rng);

struct FoldAccuracy {
  std::string participant;
  double accuracy = 0.0;
  std::size_t tested = 0;
};

struct AccuracyReport {
  std::vector<FoldAccuracy> folds;
  double mean = 0.0;
  std::vector<std::string> warnings;
};

// Leave-one-person-out cross validation.
AccuracyReport loocv_person(const LabeledWindowSet& dataset, int k,
                            std::uint64_t seed);

/// Person identification: label = participant, first half of every
/// recording trains, second half tests. With `majority`, one prediction per
/// (participant, recording) by plurality over its window predictions.
AccuracyReport person_id_eval(const io::Dataset& dataset, Index window, int k,
                              bool majority, std::uint64_t seed);

std::string to_csv(const AccuracyReport& report);
std::string to_json(const AccuracyReport& report);

}  // namespace gpk::leak
