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

// Raw head/eye sample processing: gap interpolation, velocity-threshold
// event detection with head compensation, pupil preprocessing, ray-cast
// object-of-interest attention and sliding-window feature extraction.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpk/feature_signal.hpp"

namespace gpk::gaze {

struct GazeSample {
  double timestamp = 0.0;                    // seconds
  std::optional<Eigen::Vector3d> gaze_dir;   // unit vector, missing on loss
  Eigen::Vector3d head_dir = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d head_pos = Eigen::Vector3d::Zero();  // meters
  std::optional<double> pupil_diameter;      // millimeters
};

/// Velocity thresholds in deg/s and duration bounds in seconds. Fixations
/// require a still head; saccades are head-unconstrained. Duration bounds
/// are open intervals.
struct EventThresholds {
  double head_fixation_max = 7.0;
  double gaze_fixation_max = 30.0;
  double gaze_saccade_min = 60.0;
  double fixation_min = 0.100;
  double fixation_max = 0.500;
  double saccade_min = 0.030;
  double saccade_max = 0.080;
};

enum class EventKind { fixation, saccade };

struct EventSegment {
  EventKind kind = EventKind::fixation;
  double start = 0.0;
  double end = 0.0;
  Eigen::Vector3d mean_gaze = Eigen::Vector3d::UnitZ();
  double amplitude = 0.0;  // degrees, endpoint angle
  std::size_t first_sample = 0;
  std::size_t last_sample = 0;

  double duration() const { return end - start; }
};

// Angle between two directions in degrees.
double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Interior gaps are filled by componentwise linear interpolation in time
/// and renormalized; leading and trailing gaps copy the nearest present
/// direction. Missing pupil values are interpolated the same way (without
/// renormalization) when at least one pupil value is present.
std::vector<GazeSample> interpolate_gaps(std::span<const GazeSample> samples);

struct IntervalVelocities {
  Eigen::VectorXd gaze;  // deg/s, one entry per consecutive sample pair
  Eigen::VectorXd head;
};

IntervalVelocities angular_velocities(std::span<const GazeSample> samples);

/// Maximal runs of consecutive sample pairs that satisfy the fixation or
/// saccade velocity criterion. A run of pairs a..b spans samples a..b+1.
/// Runs outside the duration bounds are discarded, not split.
std::vector<EventSegment> detect_events(std::span<const GazeSample> samples,
                                        const EventThresholds& thresholds = {});

/// Savitzky-Golay smoothing. Near the edges the window shrinks symmetrically
/// and the fit degree drops to at most 2h for half-width h.
Eigen::VectorXd sg_smooth(const Eigen::VectorXd& series, int window = 11,
                          int order = 2);

enum class BaselineStatistic { median, mean };

// Divides the series by the statistic of its first baseline_duration
// seconds (sampled every `step` seconds).
Eigen::VectorXd divisive_baseline(const Eigen::VectorXd& series,
                                  double baseline_duration, double step,
                                  BaselineStatistic statistic =
                                      BaselineStatistic::median);

struct Collider {
  std::string object_id;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
};

struct RayHit {
  std::string object_id;
  double distance = 0.0;
};

// Entry distance of the ray into the box (0 when the origin is inside), or
// nullopt on a miss.
std::optional<double> ray_box_distance(const Eigen::Vector3d& origin,
                                       const Eigen::Vector3d& direction,
                                       const Collider& box);

std::optional<RayHit> ray_cast(const Eigen::Vector3d& origin,
                               const Eigen::Vector3d& direction,
                               std::span<const Collider> colliders);

struct HitSample {
  double timestamp = 0.0;
  std::optional<std::string> object_id;
};

struct AttentionRecord {
  std::string object_id;
  double total_dwell = 0.0;
  int visit_count = 0;
};

/// A run lasts from its first sample to the first sample of the next run;
/// the final sample of the stream closes the last run. Runs shorter than
/// `threshold` are dropped. Output is sorted by object id.
std::vector<AttentionRecord> ooi_attention(std::span<const HitSample> hits,
                                           double threshold = 0.200);

struct PupilSeries {
  Eigen::VectorXd timestamps;
  Eigen::VectorXd values;
};

struct WindowConfig {
  double window = 30.0;
  double step = 0.5;
  std::string participant = "p0";
  std::string recording_type = "recording";
};

struct WindowFeatureSet {
  std::vector<FeatureSignal> signals;
  // valid[feature][window] is false where a mean had no events or samples
  // and the value was reported as 0.
  std::vector<std::vector<bool>> valid;
  std::vector<std::string> warnings;
};

// Feature names emitted by window_features, in output order.
const std::vector<std::string>& window_feature_names();

WindowFeatureSet window_features(std::span<const EventSegment> events,
                                 const PupilSeries& pupil,
                                 const WindowConfig& config = {});

struct PipelineConfig {
  EventThresholds thresholds;
  WindowConfig windows;
  int sg_window = 11;
  int sg_order = 2;
  double baseline_duration = 0.5;
  BaselineStatistic baseline_statistic = BaselineStatistic::median;
  double attention_threshold = 0.200;
};

struct RecordingResult {
  std::vector<EventSegment> events;
  WindowFeatureSet features;
  std::vector<AttentionRecord> attention;
};

// Whole chain for one recording. `colliders` may be empty, in which case no
// attention records are produced.
RecordingResult process_recording(std::span<const GazeSample> samples,
                                  std::span<const Collider> colliders,
                                  const PipelineConfig& config);

}  // namespace gpk::gaze
