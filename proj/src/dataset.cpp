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

#include "gpk/dataset.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "gpk/error.hpp"
#include "gpk/random.hpp"

namespace gpk::io {

namespace {

constexpr std::string_view kFeatureColumns[] = {
    "participant", "feature", "recording_type", "step_seconds", "t_index", "value"};
constexpr std::string_view kSampleColumns[] = {
    "participant", "recording", "timestamp", "gx", "gy", "gz", "hx",
    "hy",          "hz",        "px",        "py", "pz", "pupil"};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Lines with their 1-based line numbers; a trailing '\r' is stripped and a
// final empty line ignored.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view bytes) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t start = 0, number = 1;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(number++, line);
    start = end + 1;
  }
  return out;
}

double parse_real(std::string_view field, std::string_view column, std::size_t row) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("column " + std::string(column) + ": '" + std::string(field) +
                         "' is not a finite number",
                     row);
  }
  return v;
}

std::int64_t parse_integer(std::string_view field, std::string_view column, std::size_t row) {
  std::int64_t v = 0;
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("column " + std::string(column) + ": '" + std::string(field) +
                         "' is not an integer",
                     row);
  }
  return v;
}

template <std::size_t N>
std::vector<std::size_t> column_positions(std::string_view header,
                                          const std::string_view (&required)[N]) {
  const auto names = split(header, ',');
  std::vector<std::size_t> pos;
  for (const auto& want : required) {
    std::size_t found = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == want) found = i;
    }
    if (found == names.size()) throw SchemaError("missing column '" + std::string(want) + "'");
    pos.push_back(found);
  }
  return pos;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvalidArgument("format_double failed");
  return std::string(buf, ptr);
}

void Dataset::insert(FeatureSignal signal) {
  SignalKey key{signal.participant, signal.feature, signal.recording_type};
  if (signals.contains(key)) {
    throw ConflictError("duplicate signal " + key.participant + "/" + key.feature +
                        "/" + key.recording_type);
  }
  for (const auto& [k, s] : signals) {
    if (k.feature == key.feature && k.recording_type == key.recording_type &&
        s.step_seconds != signal.step_seconds) {
      throw ConflictError("step_seconds differs across participants for " +
                          key.feature + "/" + key.recording_type);
    }
  }
  signals.emplace(std::move(key), std::move(signal));
}

std::vector<std::pair<std::string, std::string>> Dataset::groups() const {
  std::set<std::pair<std::string, std::string>> g;
  for (const auto& [k, s] : signals) g.emplace(k.feature, k.recording_type);
  return {g.begin(), g.end()};
}

std::vector<FeatureSignal> Dataset::group(const std::string& feature,
                                          const std::string& recording_type) const {
  std::vector<FeatureSignal> out;
  for (const auto& [k, s] : signals) {
    if (k.feature == feature && k.recording_type == recording_type) out.push_back(s);
  }
  return out;
}

std::vector<std::string> Dataset::participants() const {
  std::set<std::string> p;
  for (const auto& [k, s] : signals) p.insert(k.participant);
  return {p.begin(), p.end()};
}

std::vector<std::string> Dataset::features() const {
  std::set<std::string> f;
  for (const auto& [k, s] : signals) f.insert(k.feature);
  return {f.begin(), f.end()};
}

std::vector<FeatureSignal> Dataset::all() const {
  std::vector<FeatureSignal> out;
  out.reserve(signals.size());
  for (const auto& [k, s] : signals) out.push_back(s);
  return out;
}

Dataset parse_feature_csv(std::string_view bytes) {
  const auto lines = lines_of(bytes);
  if (lines.empty()) throw SchemaError("empty feature file");
  const auto pos = column_positions(lines[0].second, kFeatureColumns);
  const std::size_t width = split(lines[0].second, ',').size();

  struct Pending {
    double step;
    std::map<std::int64_t, double> values;
  };
  std::map<SignalKey, Pending> pending;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [row, line] = lines[li];
    if (line.empty() && li + 1 == lines.size()) break;
    const auto fields = split(line, ',');
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, got " +
                           std::to_string(fields.size()),
                       row);
    }
    SignalKey key{std::string(fields[pos[0]]), std::string(fields[pos[1]]),
                  std::string(fields[pos[2]])};
    if (key.participant.empty() || key.feature.empty() || key.recording_type.empty()) {
      throw ParseError("empty identifier", row);
    }
    const double step = parse_real(fields[pos[3]], kFeatureColumns[3], row);
    if (!(step > 0.0)) throw ParseError("step_seconds must be positive", row);
    const auto t = parse_integer(fields[pos[4]], kFeatureColumns[4], row);
    if (t < 0) throw ParseError("t_index must be non-negative", row);
    const double value = parse_real(fields[pos[5]], kFeatureColumns[5], row);

    auto [it, fresh] = pending.try_emplace(key, Pending{step, {}});
    if (!fresh && it->second.step != step) {
      throw ConflictError("row " + std::to_string(row) + ": step_seconds changes within a signal");
    }
    if (!it->second.values.emplace(t, value).second) {
      throw ConflictError("row " + std::to_string(row) + ": duplicate t_index " +
                          std::to_string(t) + " for " + key.participant + "/" +
                          key.feature + "/" + key.recording_type);
    }
  }

  Dataset ds;
  for (auto& [key, p] : pending) {
    FeatureSignal s;
    s.participant = key.participant;
    s.feature = key.feature;
    s.recording_type = key.recording_type;
    s.step_seconds = p.step;
    s.values.resize(static_cast<Eigen::Index>(p.values.size()));
    Eigen::Index i = 0;
    for (const auto& [t, v] : p.values) {
      if (t != i) {
        throw SchemaError("t_index gap before " + std::to_string(t) + " in " +
                          key.participant + "/" + key.feature + "/" + key.recording_type);
      }
      s.values[i++] = v;
    }
    ds.insert(std::move(s));
  }
  return ds;
}

std::string write_feature_csv(const Dataset& dataset) {
  std::string out = "participant,feature,recording_type,step_seconds,t_index,value\n";
  for (const auto& [key, s] : dataset.signals) {
    const std::string prefix = key.participant + "," + key.feature + "," +
                               key.recording_type + "," + format_double(s.step_seconds) + ",";
    for (Eigen::Index t = 0; t < s.values.size(); ++t) {
      out += prefix;
      out += std::to_string(t);
      out += ',';
      out += format_double(s.values[t]);
      out += '\n';
    }
  }
  return out;
}

std::vector<RawRecording> parse_sample_csv(std::string_view bytes) {
  const auto lines = lines_of(bytes);
  if (lines.empty()) throw SchemaError("empty sample file");
  const auto pos = column_positions(lines[0].second, kSampleColumns);
  const std::size_t width = split(lines[0].second, ',').size();

  std::vector<RawRecording> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [row, line] = lines[li];
    if (line.empty() && li + 1 == lines.size()) break;
    const auto f = split(line, ',');
    if (f.size() != width) throw ParseError("wrong field count", row);
    auto field = [&](int c) { return f[pos[c]]; };
    auto vec = [&](int c) {
      return Eigen::Vector3d(parse_real(field(c), kSampleColumns[c], row),
                             parse_real(field(c + 1), kSampleColumns[c + 1], row),
                             parse_real(field(c + 2), kSampleColumns[c + 2], row));
    };
    gaze::GazeSample s;
    s.timestamp = parse_real(field(2), kSampleColumns[2], row);
    const int empty_gaze = field(3).empty() + field(4).empty() + field(5).empty();
    if (empty_gaze == 0) {
      s.gaze_dir = vec(3);
    } else if (empty_gaze != 3) {
      throw ParseError("gaze vector partially missing", row);
    }
    s.head_dir = vec(6);
    s.head_pos = vec(9);
    if (!field(12).empty()) s.pupil_diameter = parse_real(field(12), kSampleColumns[12], row);

    const std::pair<std::string, std::string> key{std::string(field(0)), std::string(field(1))};
    auto [it, fresh] = index.try_emplace(key, out.size());
    if (fresh) out.push_back({key.first, key.second, {}});
    auto& rec = out[it->second];
    if (!rec.samples.empty() && !(s.timestamp > rec.samples.back().timestamp)) {
      throw ParseError("timestamps must increase within a recording", row);
    }
    rec.samples.push_back(std::move(s));
  }
  return out;
}

std::string write_sample_csv(const std::vector<RawRecording>& recordings) {
  std::string out = "participant,recording,timestamp,gx,gy,gz,hx,hy,hz,px,py,pz,pupil\n";
  auto vec = [](const Eigen::Vector3d& v) {
    return format_double(v.x()) + "," + format_double(v.y()) + "," + format_double(v.z());
  };
  for (const auto& r : recordings) {
    for (const auto& s : r.samples) {
      out += r.participant + "," + r.recording + "," + format_double(s.timestamp) + ",";
      out += s.gaze_dir ? vec(*s.gaze_dir) : std::string(",,");
      out += "," + vec(s.head_dir) + "," + vec(s.head_pos) + ",";
      if (s.pupil_diameter) out += format_double(*s.pupil_diameter);
      out += '\n';
    }
  }
  return out;
}

Dataset gen_ar1_dataset(const Ar1Config& config) {
  if (config.participants < 1) throw InvalidArgument("gen_ar1_dataset: need a participant");
  if (config.features < 1) throw InvalidArgument("gen_ar1_dataset: need a feature");
  if (config.length < 2) throw InvalidArgument("gen_ar1_dataset: length must be >= 2");
  if (!(std::abs(config.rho) < 1.0)) throw InvalidArgument("gen_ar1_dataset: |rho| must be < 1");
  const double innovation = std::sqrt(1.0 - config.rho * config.rho);
  const int pw = std::max<int>(2, std::to_string(config.participants - 1).size());
  const int fw = std::max<int>(1, std::to_string(config.features - 1).size());
  auto padded = [](int v, int width) {
    std::string s = std::to_string(v);
    return std::string(width - std::min<int>(width, s.size()), '0') + s;
  };
  Dataset ds;
  for (int p = 0; p < config.participants; ++p) {
    const std::string participant = "p" + padded(p, pw);
    for (int f = 0; f < config.features; ++f) {
      const std::string feature = "f" + padded(f, fw);
      Rng offset_rng(derive_seed(config.seed, {std::string_view("offset"), std::int64_t{p},
                                               std::int64_t{f}}));
      const double offset =
          config.base_level + config.participant_offset_scale * offset_rng.normal();
      Rng rng(derive_seed(config.seed, {std::string_view("ar1"), std::int64_t{p},
                                        std::int64_t{f}}));
      FeatureSignal s;
      s.participant = participant;
      s.feature = feature;
      s.recording_type = config.recording_type;
      s.step_seconds = config.step_seconds;
      s.values.resize(config.length);
      double dev = rng.normal();
      s.values[0] = offset + dev;
      for (Eigen::Index t = 1; t < config.length; ++t) {
        dev = config.rho * dev + innovation * rng.normal();
        s.values[t] = offset + dev;
      }
      ds.insert(std::move(s));
    }
  }
  return ds;
}

RegressionSet gen_regression_set(Eigen::Index n_samples, Eigen::Index n_f,
                                 double noise_scale, std::uint64_t seed) {
  if (n_samples < 2) throw InvalidArgument("gen_regression_set: need at least 2 samples");
  if (n_f < 1) throw InvalidArgument("gen_regression_set: need a feature");
  Rng projection_rng(derive_seed(seed, {std::string_view("projection")}));
  Eigen::MatrixXd projection(2, n_f);
  // Features uniform on [-1, 1] give var(u) = 1/4: a mildly nonlinear target.
  const double scale = 0.5 / std::sqrt(static_cast<double>(n_f) / 3.0);
  for (Eigen::Index i = 0; i < projection.size(); ++i) {
    projection.data()[i] = scale * projection_rng.normal();
  }
  Rng rng(derive_seed(seed, {std::string_view("samples")}));
  RegressionSet set{Eigen::MatrixXd(n_f, n_samples), Eigen::MatrixXd(2, n_samples)};
  for (Eigen::Index j = 0; j < n_samples; ++j) {
    for (Eigen::Index d = 0; d < n_f; ++d) {
      set.features(d, j) = std::round(rng.uniform(-1.0, 1.0) * 4096.0) / 4096.0;
    }
  }
  const Eigen::MatrixXd u = projection * set.features;
  for (Eigen::Index j = 0; j < n_samples; ++j) {
    set.targets(0, j) = 0.4 * std::tanh(u(0, j));
    set.targets(1, j) = 0.6 * std::tanh(u(1, j));
    if (noise_scale > 0.0) {
      set.targets(0, j) += noise_scale * rng.normal();
      set.targets(1, j) += noise_scale * rng.normal();
    }
  }
  return set;
}

}  // namespace gpk::io
