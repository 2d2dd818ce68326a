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

// CSV interchange for feature signals and raw samples, and seeded synthetic
// generators.
//
// Feature rows:  participant,feature,recording_type,step_seconds,t_index,value
// Sample rows:   participant,recording,timestamp,gx,gy,gz,hx,hy,hz,px,py,pz,pupil
//                (empty gx,gy,gz or pupil cells mark missing values)

#pragma once

#include <Eigen/Core>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpk/feature_signal.hpp"
#include "gpk/gaze.hpp"

namespace gpk::io {

inline constexpr int kSchemaVersion = 1;

struct SignalKey {
  std::string participant;
  std::string feature;
  std::string recording_type;
  auto operator<=>(const SignalKey&) const = default;
};

struct Dataset {
  std::map<SignalKey, FeatureSignal> signals;
  int schema_version = kSchemaVersion;

  // Throws ConflictError on a duplicate key or on a step_seconds mismatch
  // within one (feature, recording_type).
  void insert(FeatureSignal signal);

  std::vector<std::pair<std::string, std::string>> groups() const;
  std::vector<FeatureSignal> group(const std::string& feature,
                                   const std::string& recording_type) const;
  std::vector<std::string> participants() const;
  std::vector<std::string> features() const;
  std::vector<FeatureSignal> all() const;
};

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

Dataset parse_feature_csv(std::string_view bytes);
std::string write_feature_csv(const Dataset& dataset);

struct RawRecording {
  std::string participant;
  std::string recording;
  std::vector<gaze::GazeSample> samples;
};

std::vector<RawRecording> parse_sample_csv(std::string_view bytes);
std::string write_sample_csv(const std::vector<RawRecording>& recordings);

struct Ar1Config {
  int participants = 10;
  int features = 1;
  Eigen::Index length = 512;
  double rho = 0.9;
  double participant_offset_scale = 1.0;
  // Common level added to every participant's offset.
  double base_level = 0.0;
  std::uint64_t seed = 0;
  double step_seconds = 0.5;
  std::string recording_type = "synthetic";
};

// x_t = offset_p + rho (x_{t-1} - offset_p) + sqrt(1 - rho^2) e_t with
// standard normal innovations, started from the stationary distribution.
// One offset per (participant, feature) is drawn from N(base_level, scale^2).
Dataset gen_ar1_dataset(const Ar1Config& config);

struct RegressionSet {
  Eigen::MatrixXd features;  // n_f x n_samples, one sample per column
  Eigen::MatrixXd targets;   // 2 x n_samples: pitch, yaw in radians
};

// Features are uniform on [-1, 1] rounded to multiples of 2^-12;
// (pitch, yaw) = (0.4 tanh(u1), 0.6 tanh(u2)) for a fixed random projection
// (u1, u2) of the features, plus Gaussian noise of the given scale.
RegressionSet gen_regression_set(Eigen::Index n_samples, Eigen::Index n_f = 36,
                                 double noise_scale = 0.0,
                                 std::uint64_t seed = 0);

}  // namespace gpk::io
