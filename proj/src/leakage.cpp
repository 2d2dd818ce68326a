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

#include "gpk/leakage.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "gpk/error.hpp"
#include "json.hpp"

namespace gpk::leak {

void LabeledWindowSet::validate() const {
  if (rows.empty()) return;
  const Index d = rows.front().features.size();
  for (const auto& r : rows) {
    if (r.features.size() != d) throw InvalidArgument("window set: feature lengths differ");
  }
}

Eigen::VectorXd subsample_windows(const Eigen::VectorXd& values, Index window) {
  if (window < 1) throw InvalidArgument("subsample_windows: window must be >= 1");
  const Index count = values.size() / window;
  Eigen::VectorXd out(count);
  for (Index w = 0; w < count; ++w) out[w] = values.segment(w * window, window).mean();
  return out;
}

Eigen::VectorXd subsample_windows(const FeatureSignal& signal, Index window) {
  return subsample_windows(signal.values, window);
}

namespace {

struct Recording {
  std::string participant;
  std::string recording;
  std::vector<Eigen::VectorXd> features;  // sorted feature order
};

std::vector<Recording> recordings_of(const io::Dataset& dataset) {
  std::map<std::pair<std::string, std::string>, Recording> by_key;
  for (const auto& [key, s] : dataset.signals) {
    auto& r = by_key[{key.participant, key.recording_type}];
    r.participant = key.participant;
    r.recording = key.recording_type;
    r.features.push_back(s.values);  // map order sorts features within a key
  }
  std::vector<Recording> out;
  for (auto& [k, r] : by_key) out.push_back(std::move(r));
  return out;
}

void append_rows(std::vector<LabeledRow>& rows, const Recording& rec,
                 const std::vector<Eigen::VectorXd>& windows, const std::string& label) {
  Index count = windows.front().size();
  for (const auto& w : windows) count = std::min(count, w.size());
  for (Index w = 0; w < count; ++w) {
    LabeledRow row;
    row.features.resize(static_cast<Index>(windows.size()));
    for (std::size_t f = 0; f < windows.size(); ++f) row.features[f] = windows[f][w];
    row.label = label;
    row.participant = rec.participant;
    row.recording = rec.recording;
    row.window_index = static_cast<int>(w);
    rows.push_back(std::move(row));
  }
}

auto row_key(const LabeledRow& r) {
  return std::tie(r.label, r.participant, r.recording, r.window_index);
}

}  // namespace

LabeledWindowSet build_window_set(const io::Dataset& dataset, Index window,
                                  const LabelFn& label) {
  LabeledWindowSet set;
  for (const auto& rec : recordings_of(dataset)) {
    std::vector<Eigen::VectorXd> windows;
    for (const auto& f : rec.features) windows.push_back(subsample_windows(f, window));
    append_rows(set.rows, rec, windows, label(rec.participant, rec.recording));
  }
  set.validate();
  return set;
}

Normalizer Normalizer::fit(std::span<const LabeledRow> rows) {
  if (rows.empty()) throw InvalidArgument("Normalizer: no rows");
  const Index d = rows.front().features.size();
  Normalizer n{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  for (const auto& r : rows) n.mean += r.features;
  n.mean /= static_cast<double>(rows.size());
  for (const auto& r : rows) n.scale += (r.features - n.mean).cwiseAbs2();
  n.scale = (n.scale / static_cast<double>(rows.size())).cwiseSqrt();
  for (Index i = 0; i < d; ++i) {
    if (n.scale[i] == 0.0) n.scale[i] = 1.0;
  }
  return n;
}

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& x) const {
  return (x - mean).cwiseQuotient(scale);
}

std::string majority_vote(std::span<const std::string> predictions, Rng& rng) {
  if (predictions.empty()) throw InvalidArgument("majority_vote: no predictions");
  std::map<std::string, int> counts;
  for (const auto& p : predictions) ++counts[p];
  int best = 0;
  for (const auto& [label, c] : counts) best = std::max(best, c);
  std::vector<std::string> tied;
  for (const auto& [label, c] : counts) {
    if (c == best) tied.push_back(label);
  }
  if (tied.size() == 1) return tied.front();
  return tied[rng.below(tied.size())];
}

std::vector<std::string> knn_classify(const LabeledWindowSet& train,
                                      std::span<const LabeledRow> test, int k, Rng& rng) {
  if (k < 1) throw InvalidArgument("knn_classify: k must be >= 1");
  if (train.rows.empty()) throw InvalidArgument("knn_classify: empty training set");
  if (static_cast<std::size_t>(k) > train.rows.size()) {
    throw InvalidArgument("knn_classify: k exceeds training size");
  }
  train.validate();
  const auto norm = Normalizer::fit(train.rows);
  const Index d = train.rows.front().features.size();
  Eigen::MatrixXd points(d, static_cast<Index>(train.rows.size()));
  for (std::size_t i = 0; i < train.rows.size(); ++i) {
    points.col(static_cast<Index>(i)) = norm.apply(train.rows[i].features);
  }

  std::vector<std::string> out;
  out.reserve(test.size());
  std::vector<std::pair<double, std::size_t>> order(train.rows.size());
  for (const auto& row : test) {
    if (row.features.size() != d) throw InvalidArgument("knn_classify: feature length mismatch");
    const Eigen::VectorXd q = norm.apply(row.features);
    const Eigen::VectorXd dist = (points.colwise() - q).colwise().squaredNorm().transpose();
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = {dist[static_cast<Index>(i)], i};
    auto less = [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return row_key(train.rows[a.second]) < row_key(train.rows[b.second]);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), less);
    std::vector<std::string> votes;
    votes.reserve(k);
    for (int i = 0; i < k; ++i) votes.push_back(train.rows[order[i].second].label);
    out.push_back(majority_vote(votes, rng));
  }
  return out;
}

namespace {

void finish(AccuracyReport& report) {
  if (report.folds.empty()) {
    report.mean = 0.0;
    return;
  }
  double s = 0.0;
  for (const auto& f : report.folds) s += f.accuracy;
  report.mean = s / static_cast<double>(report.folds.size());
}

}  // namespace

AccuracyReport loocv_person(const LabeledWindowSet& dataset, int k, std::uint64_t seed) {
  dataset.validate();
  std::set<std::string> participants;
  for (const auto& r : dataset.rows) participants.insert(r.participant);
  if (participants.size() < 2) throw InvalidArgument("loocv_person: need >= 2 participants");
  AccuracyReport report;
  for (const auto& held_out : participants) {
    LabeledWindowSet train;
    std::vector<LabeledRow> test;
    for (const auto& r : dataset.rows) {
      (r.participant == held_out ? test : train.rows).push_back(r);
    }
    Rng rng(derive_seed(seed, {std::string_view("loocv"), std::string_view(held_out)}));
    const auto predicted = knn_classify(train, test, k, rng);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) correct += predicted[i] == test[i].label;
    report.folds.push_back({held_out,
                            test.empty() ? 0.0 : static_cast<double>(correct) / test.size(),
                            test.size()});
  }
  finish(report);
  return report;
}

AccuracyReport person_id_eval(const io::Dataset& dataset, Index window, int k,
                              bool majority, std::uint64_t seed) {
  AccuracyReport report;
  LabeledWindowSet train;
  std::vector<LabeledRow> test;
  for (const auto& rec : recordings_of(dataset)) {
    Index n = rec.features.front().size();
    for (const auto& f : rec.features) n = std::min(n, f.size());
    const Index half = n / 2;
    if (half / window < 1) {
      report.warnings.push_back(rec.participant + "/" + rec.recording +
                                " too short to split; excluded");
      continue;
    }
    std::vector<Eigen::VectorXd> first, second;
    for (const auto& f : rec.features) {
      first.push_back(subsample_windows(Eigen::VectorXd(f.head(half)), window));
      second.push_back(subsample_windows(Eigen::VectorXd(f.segment(half, n - half)), window));
    }
    append_rows(train.rows, rec, first, rec.participant);
    append_rows(test, rec, second, rec.participant);
  }
  if (train.rows.empty()) throw InvalidArgument("person_id_eval: no usable recordings");

  Rng rng(derive_seed(seed, {std::string_view("person-id")}));
  const auto predicted = knn_classify(train, test, k, rng);

  // (correct, total) per participant.
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  if (majority) {
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < test.size(); ++i) {
      groups[{test[i].participant, test[i].recording}].push_back(predicted[i]);
    }
    for (const auto& [key, votes] : groups) {
      const auto winner = majority_vote(votes, rng);
      auto& t = tally[key.first];
      t.first += winner == key.first;
      ++t.second;
    }
  } else {
    for (std::size_t i = 0; i < test.size(); ++i) {
      auto& t = tally[test[i].participant];
      t.first += predicted[i] == test[i].participant;
      ++t.second;
    }
  }
  for (const auto& [participant, t] : tally) {
    report.folds.push_back(
        {participant, static_cast<double>(t.first) / static_cast<double>(t.second), t.second});
  }
  finish(report);
  return report;
}

std::string to_csv(const AccuracyReport& report) {
  std::string out = "participant,accuracy,tested\n";
  for (const auto& f : report.folds) {
    out += f.participant + "," + io::format_double(f.accuracy) + "," +
           std::to_string(f.tested) + "\n";
  }
  out += "mean," + io::format_double(report.mean) + ",\n";
  return out;
}

std::string to_json(const AccuracyReport& report) {
  nlohmann::json j;
  j["folds"] = nlohmann::json::array();
  for (const auto& f : report.folds) {
    j["folds"].push_back({{"participant", f.participant}, {"accuracy", f.accuracy},
                          {"tested", f.tested}});
  }
  j["mean"] = report.mean;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

}  // namespace gpk::leak
