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

#pragma once

#include <Eigen/Core>
#include <string>

namespace gpk {

// One participant x one feature x one recording type time series.
struct FeatureSignal {
  std::string participant;
  std::string feature;
  std::string recording_type;
  Eigen::VectorXd values;
  double step_seconds = 1.0;

  Eigen::Index size() const { return values.size(); }
};

// Throws InvalidArgument unless values are non-empty and finite and
// step_seconds is positive.
void validate(const FeatureSignal& signal);

}  // namespace gpk
