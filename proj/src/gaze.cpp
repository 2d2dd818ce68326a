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

#include "gpk/gaze.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "gpk/error.hpp"

namespace gpk::gaze {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_increasing(std::span<const GazeSample> samples) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].timestamp > samples[i - 1].timestamp)) {
      throw InvalidArgument("timestamps must be strictly increasing (sample " +
                            std::to_string(i) + ")");
    }
  }
}

// Linear interpolation of an optional-valued channel over time. Returns
// false when no value is present at all.
template <typename T, typename Get, typename Set>
bool fill_channel(std::vector<GazeSample>& out, Get get, Set set) {
  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (get(out[i])) present.push_back(i);
  }
  if (present.empty()) return false;
  for (std::size_t i = 0; i < present.front(); ++i) set(out[i], *get(out[present.front()]), false);
  for (std::size_t i = present.back() + 1; i < out.size(); ++i) set(out[i], *get(out[present.back()]), false);
  for (std::size_t p = 0; p + 1 < present.size(); ++p) {
    const std::size_t a = present[p];
    const std::size_t b = present[p + 1];
    if (b == a + 1) continue;
    const T va = *get(out[a]);
    const T vb = *get(out[b]);
    const double ta = out[a].timestamp;
    const double tb = out[b].timestamp;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double w = (out[i].timestamp - ta) / (tb - ta);
      set(out[i], T(va + w * (vb - va)), true);
    }
  }
  return true;
}

}  // namespace

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  // atan2 form stays accurate for nearly parallel vectors.
  return std::atan2(a.cross(b).norm(), a.dot(b)) * kRadToDeg;
}

std::vector<GazeSample> interpolate_gaps(std::span<const GazeSample> samples) {
  require_increasing(samples);
  std::vector<GazeSample> out(samples.begin(), samples.end());
  const bool any_gaze = fill_channel<Eigen::Vector3d>(
      out, [](const GazeSample& s) { return s.gaze_dir; },
      [](GazeSample& s, const Eigen::Vector3d& v, bool interpolated) {
        s.gaze_dir = interpolated ? Eigen::Vector3d(v.normalized()) : v;
      });
  if (!any_gaze) throw InvalidArgument("interpolate_gaps: no gaze sample present");
  fill_channel<double>(
      out, [](const GazeSample& s) { return s.pupil_diameter; },
      [](GazeSample& s, double v, bool) { s.pupil_diameter = v; });
  return out;
}

IntervalVelocities angular_velocities(std::span<const GazeSample> samples) {
  require_increasing(samples);
  const Eigen::Index m = samples.size() < 2 ? 0 : samples.size() - 1;
  IntervalVelocities v{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    if (!a.gaze_dir || !b.gaze_dir) {
      throw InvalidArgument("angular_velocities: missing gaze; interpolate first");
    }
    const double dt = b.timestamp - a.timestamp;
    v.gaze[i] = angle_between(*a.gaze_dir, *b.gaze_dir) / dt;
    v.head[i] = angle_between(a.head_dir, b.head_dir) / dt;
  }
  return v;
}

std::vector<EventSegment> detect_events(std::span<const GazeSample> samples,
                                        const EventThresholds& thresholds) {
  if (samples.size() < 2) throw InvalidArgument("detect_events: need at least 2 samples");
  const auto v = angular_velocities(samples);
  const Eigen::Index m = v.gaze.size();

  std::vector<EventSegment> events;
  auto scan = [&](EventKind kind, auto qualifies, double lo, double hi) {
    Eigen::Index i = 0;
    while (i < m) {
      if (!qualifies(i)) {
        ++i;
        continue;
      }
      Eigen::Index j = i;
      while (j + 1 < m && qualifies(j + 1)) ++j;
      const std::size_t first = i;
      const std::size_t last = j + 1;
      EventSegment e;
      e.kind = kind;
      e.start = samples[first].timestamp;
      e.end = samples[last].timestamp;
      e.first_sample = first;
      e.last_sample = last;
      const double d = e.duration();
      if (d > lo && d < hi) {
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        for (std::size_t s = first; s <= last; ++s) sum += *samples[s].gaze_dir;
        e.mean_gaze = sum.normalized();
        e.amplitude = angle_between(*samples[first].gaze_dir, *samples[last].gaze_dir);
        events.push_back(e);
      }
      i = j + 1;
    }
  };
  scan(
      EventKind::fixation,
      [&](Eigen::Index i) {
        return v.head[i] < thresholds.head_fixation_max &&
               v.gaze[i] < thresholds.gaze_fixation_max;
      },
      thresholds.fixation_min, thresholds.fixation_max);
  scan(
      EventKind::saccade,
      [&](Eigen::Index i) { return v.gaze[i] > thresholds.gaze_saccade_min; },
      thresholds.saccade_min, thresholds.saccade_max);
  std::stable_sort(events.begin(), events.end(),
                   [](const EventSegment& a, const EventSegment& b) {
                     return a.start < b.start;
                   });
  return events;
}

namespace {

// Weights that evaluate the least-squares polynomial of `degree` at the
// centre of a window of half-width h.
Eigen::VectorXd sg_weights(int h, int degree) {
  const int width = 2 * h + 1;
  Eigen::MatrixXd vander(width, degree + 1);
  for (int r = 0; r < width; ++r) {
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vander(r, c) = p;
      p *= static_cast<double>(r - h);
    }
  }
  const Eigen::MatrixXd pinv = vander.colPivHouseholderQr().solve(
      Eigen::MatrixXd::Identity(width, width));
  return pinv.row(0).transpose();
}

}  // namespace

Eigen::VectorXd sg_smooth(const Eigen::VectorXd& series, int window, int order) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("sg_smooth: window must be odd");
  if (order < 0 || order >= window) throw InvalidArgument("sg_smooth: order must be < window");
  if (series.size() < window) throw InvalidArgument("sg_smooth: series shorter than window");
  const int half = window / 2;
  std::vector<Eigen::VectorXd> weights(half + 1);
  for (int h = 0; h <= half; ++h) weights[h] = sg_weights(h, std::min(order, 2 * h));
  const Eigen::Index n = series.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int h = static_cast<int>(
        std::min<Eigen::Index>({half, i, n - 1 - i}));
    out[i] = weights[h].dot(series.segment(i - h, 2 * h + 1));
  }
  return out;
}

Eigen::VectorXd divisive_baseline(const Eigen::VectorXd& series,
                                  double baseline_duration, double step,
                                  BaselineStatistic statistic) {
  if (!(step > 0.0) || !(baseline_duration > 0.0)) {
    throw InvalidArgument("divisive_baseline: durations must be positive");
  }
  const auto count = static_cast<Eigen::Index>(
      std::floor(baseline_duration / step + 1e-9));
  if (count < 1 || count > series.size()) {
    throw InvalidArgument("divisive_baseline: baseline window holds no samples");
  }
  std::vector<double> base(series.data(), series.data() + count);
  double divisor;
  if (statistic == BaselineStatistic::mean) {
    divisor = series.head(count).mean();
  } else {
    std::sort(base.begin(), base.end());
    divisor = (count % 2 == 1)
                  ? base[count / 2]
                  : 0.5 * (base[count / 2 - 1] + base[count / 2]);
  }
  if (divisor == 0.0) throw DegenerateError("divisive_baseline: zero baseline statistic");
  return series / divisor;
}

std::optional<double> ray_box_distance(const Eigen::Vector3d& origin,
                                       const Eigen::Vector3d& direction,
                                       const Collider& box) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d lo = box.center - box.half_extents;
  const Eigen::Vector3d hi = box.center + box.half_extents;
  for (int axis = 0; axis < 3; ++axis) {
    if (direction[axis] == 0.0) {
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / direction[axis];
    double t0 = (lo[axis] - origin[axis]) * inv;
    double t1 = (hi[axis] - origin[axis]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far < 0.0) return std::nullopt;
  return std::max(t_near, 0.0);
}

std::optional<RayHit> ray_cast(const Eigen::Vector3d& origin,
                               const Eigen::Vector3d& direction,
                               std::span<const Collider> colliders) {
  const double norm = direction.norm();
  if (norm == 0.0) throw InvalidArgument("ray_cast: zero direction");
  if (std::abs(norm - 1.0) > 1e-6) throw InvalidArgument("ray_cast: direction is not unit-norm");
  std::optional<RayHit> best;
  for (const auto& c : colliders) {
    if ((c.half_extents.array() <= 0.0).any()) {
      throw InvalidArgument("collider " + c.object_id + " has non-positive extents");
    }
    if (auto d = ray_box_distance(origin, direction, c)) {
      if (!best || *d < best->distance) best = RayHit{c.object_id, *d};
    }
  }
  return best;
}

std::vector<AttentionRecord> ooi_attention(std::span<const HitSample> hits,
                                           double threshold) {
  std::map<std::string, AttentionRecord> records;
  std::size_t i = 0;
  while (i < hits.size()) {
    std::size_t j = i;
    while (j + 1 < hits.size() && hits[j + 1].object_id == hits[i].object_id) ++j;
    const double end = (j + 1 < hits.size()) ? hits[j + 1].timestamp : hits[j].timestamp;
    const double duration = end - hits[i].timestamp;
    if (hits[i].object_id && duration >= threshold) {
      auto& r = records[*hits[i].object_id];
      r.object_id = *hits[i].object_id;
      r.total_dwell += duration;
      ++r.visit_count;
    }
    i = j + 1;
  }
  std::vector<AttentionRecord> out;
  out.reserve(records.size());
  for (auto& [id, r] : records) out.push_back(std::move(r));
  return out;
}

const std::vector<std::string>& window_feature_names() {
  static const std::vector<std::string> names{
      "fixation_count",        "fixation_duration_mean",
      "saccade_count",         "saccade_duration_mean",
      "saccade_amplitude_mean", "pupil_diameter_mean"};
  return names;
}

WindowFeatureSet window_features(std::span<const EventSegment> events,
                                 const PupilSeries& pupil,
                                 const WindowConfig& config) {
  if (!(config.window > 0.0) || !(config.step > 0.0)) {
    throw InvalidArgument("window_features: window and step must be positive");
  }
  if (pupil.timestamps.size() != pupil.values.size()) {
    throw InvalidArgument("window_features: pupil timestamps and values differ in length");
  }
  WindowFeatureSet out;
  const auto& names = window_feature_names();
  if (pupil.timestamps.size() == 0) {
    out.warnings.push_back("recording has no samples");
    return out;
  }
  if (!std::is_sorted(pupil.timestamps.begin(), pupil.timestamps.end())) {
    throw InvalidArgument("window_features: pupil timestamps must be nondecreasing");
  }
  const double t0 = pupil.timestamps[0];
  const double total = pupil.timestamps[pupil.timestamps.size() - 1] - t0;
  if (total + 1e-9 < config.window) {
    out.warnings.push_back("recording shorter than window (" +
                           std::to_string(total) + " s)");
    return out;
  }
  const auto count = static_cast<Eigen::Index>(
      std::floor((total - config.window) / config.step + 1e-9)) + 1;

  std::vector<Eigen::VectorXd> values(names.size(), Eigen::VectorXd::Zero(count));
  out.valid.assign(names.size(), std::vector<bool>(count, true));

  // Events ordered by start and pupil prefix sums make each window a pair
  // of binary searches.
  std::vector<const EventSegment*> by_start;
  by_start.reserve(events.size());
  for (const auto& e : events) by_start.push_back(&e);
  std::stable_sort(by_start.begin(), by_start.end(),
                   [](const EventSegment* a, const EventSegment* b) { return a->start < b->start; });
  const double* ts = pupil.timestamps.data();
  const double* ts_end = ts + pupil.timestamps.size();
  std::vector<double> prefix(static_cast<std::size_t>(pupil.values.size()) + 1, 0.0);
  for (Eigen::Index s = 0; s < pupil.values.size(); ++s) {
    prefix[static_cast<std::size_t>(s) + 1] = prefix[static_cast<std::size_t>(s)] + pupil.values[s];
  }

  for (Eigen::Index w = 0; w < count; ++w) {
    const double lo = t0 + static_cast<double>(w) * config.step;
    const double hi = lo + config.window;
    int n_fix = 0, n_sac = 0;
    double fix_dur = 0.0, sac_dur = 0.0, sac_amp = 0.0;
    auto first = std::lower_bound(by_start.begin(), by_start.end(), lo,
                                  [](const EventSegment* e, double t) { return e->start < t; });
    for (auto it = first; it != by_start.end() && (*it)->start < hi; ++it) {
      const EventSegment& e = **it;
      if (e.kind == EventKind::fixation) {
        ++n_fix;
        fix_dur += e.duration();
      } else {
        ++n_sac;
        sac_dur += e.duration();
        sac_amp += e.amplitude;
      }
    }
    const auto a = static_cast<std::size_t>(std::lower_bound(ts, ts_end, lo) - ts);
    const auto b = static_cast<std::size_t>(std::lower_bound(ts, ts_end, hi) - ts);
    const double pupil_sum = prefix[b] - prefix[a];
    const int pupil_n = static_cast<int>(b - a);
    values[0][w] = n_fix;
    values[2][w] = n_sac;
    if (n_fix > 0) values[1][w] = fix_dur / n_fix; else out.valid[1][w] = false;
    if (n_sac > 0) {
      values[3][w] = sac_dur / n_sac;
      values[4][w] = sac_amp / n_sac;
    } else {
      out.valid[3][w] = false;
      out.valid[4][w] = false;
    }
    if (pupil_n > 0) values[5][w] = pupil_sum / pupil_n; else out.valid[5][w] = false;
  }
  for (std::size_t f = 0; f < names.size(); ++f) {
    FeatureSignal s;
    s.participant = config.participant;
    s.feature = names[f];
    s.recording_type = config.recording_type;
    s.step_seconds = config.step;
    s.values = std::move(values[f]);
    out.signals.push_back(std::move(s));
  }
  return out;
}

RecordingResult process_recording(std::span<const GazeSample> samples,
                                  std::span<const Collider> colliders,
                                  const PipelineConfig& config) {
  RecordingResult result;
  const auto filled = interpolate_gaps(samples);
  result.events = detect_events(filled, config.thresholds);

  PupilSeries pupil;
  const Eigen::Index n = filled.size();
  pupil.timestamps.resize(n);
  pupil.values.resize(n);
  bool have_pupil = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    pupil.timestamps[i] = filled[i].timestamp;
    if (!filled[i].pupil_diameter) {
      have_pupil = false;
      break;
    }
    pupil.values[i] = *filled[i].pupil_diameter;
  }
  if (!have_pupil) {
    pupil.values.setZero();
    result.features.warnings.push_back("no pupil samples; pupil feature is zero");
  } else {
    if (n >= config.sg_window) {
      pupil.values = sg_smooth(pupil.values, config.sg_window, config.sg_order);
    }
    const double step = (pupil.timestamps[n - 1] - pupil.timestamps[0]) /
                        static_cast<double>(std::max<Eigen::Index>(1, n - 1));
    pupil.values = divisive_baseline(pupil.values, config.baseline_duration,
                                     step, config.baseline_statistic);
  }
  auto warnings = std::move(result.features.warnings);
  result.features = window_features(result.events, pupil, config.windows);
  if (!have_pupil && result.features.valid.size() > 5) {
    std::fill(result.features.valid[5].begin(), result.features.valid[5].end(), false);
  }
  result.features.warnings.insert(result.features.warnings.begin(),
                                  warnings.begin(), warnings.end());

  if (!colliders.empty()) {
    std::vector<HitSample> hits;
    hits.reserve(filled.size());
    for (const auto& s : filled) {
      auto hit = ray_cast(s.head_pos, s.gaze_dir->normalized(), colliders);
      hits.push_back({s.timestamp, hit ? std::optional(hit->object_id) : std::nullopt});
    }
    result.attention = ooi_attention(hits, config.attention_threshold);
  }
  return result;
}

}  // namespace gpk::gaze
