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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and thresholds are fixed here.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gpk/cli.hpp"
#include "gpk/dataset.hpp"
#include "gpk/dp.hpp"
#include "gpk/evaluation.hpp"
#include "gpk/gaze.hpp"
#include "gpk/kernel.hpp"
#include "gpk/leakage.hpp"
#include "gpk/random.hpp"
#include "gpk/re_protocol.hpp"
#include "gpk/spectral.hpp"
#include "oracles.hpp"

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

VectorXd random_signal(std::mt19937_64& g, Index n, double level = 0.0) {
  std::normal_distribution<double> d;
  VectorXd x(n);
  for (auto& v : x) v = level + d(g);
  return x;
}

gpk::FeatureSignal as_signal(const VectorXd& x, const std::string& participant) {
  gpk::FeatureSignal s;
  s.participant = participant;
  s.feature = "f";
  s.recording_type = "r";
  s.values = x;
  return s;
}

// ---------------------------------------------------------------- 1
Outcome dft_roundtrip() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(1);
  std::uniform_int_distribution<Index> len(1, 257);
  double worst_rt = 0.0, worst_parseval = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const VectorXd x = random_signal(g, len(g));
    const auto spectrum = gpk::spectral::dft(x);
    const VectorXd back = gpk::spectral::idft_padded(spectrum, x.size(), x.size());
    const VectorXd back2 = gpk::spectral::inverse_real(spectrum);
    worst_rt = std::max({worst_rt, (back - x).cwiseAbs().maxCoeff(), (back2 - x).cwiseAbs().maxCoeff()});
    const double energy = x.squaredNorm() * static_cast<double>(x.size());
    worst_parseval = std::max(worst_parseval, std::abs(spectrum.coefficients.squaredNorm() - energy) / energy);
  }
  const double t = seconds_since(t0);
  return {worst_rt <= 1e-9 && worst_parseval <= 1e-6 && t < 5.0,
          fmt("max roundtrip %.2e, max Parseval rel %.2e, %.2f s", worst_rt, worst_parseval, t)};
}

// ---------------------------------------------------------------- 2
Outcome degeneracy() {
  std::mt19937_64 g(2);
  std::uniform_int_distribution<Index> len(8, 300);
  double worst[4] = {0, 0, 0, 0};
  for (int i = 0; i < 100; ++i) {
    const Index n = len(g);
    const VectorXd x = random_signal(g, n, 5.0);
    // Identical participants: every sensitivity is zero.
    const std::vector<gpk::FeatureSignal> group{as_signal(x, "a"), as_signal(x, "b")};
    gpk::dp::PrivacyBudget b;
    b.epsilon = 0.5;
    b.k = n;
    gpk::Rng rng(i);
    worst[0] = std::max(worst[0], (gpk::dp::lpa(group[0], 0.0, b, rng).values - x).cwiseAbs().maxCoeff());
    worst[1] = std::max(worst[1], (gpk::dp::fpa(group[0], 0.0, b, rng).values - x).cwiseAbs().maxCoeff());
    b.chunk_size = 32;
    const auto raw = gpk::dp::compute_sensitivities(group, 32, false);
    const auto diff = gpk::dp::compute_sensitivities(group, 32, true);
    worst[2] = std::max(worst[2], (gpk::dp::cfpa(group[0], raw, b, rng).values - x).cwiseAbs().maxCoeff());
    worst[3] = std::max(worst[3], (gpk::dp::dcfpa(group[0], diff, b, rng).values - x).cwiseAbs().maxCoeff());
  }
  const bool pass = worst[0] <= 1e-9 && worst[1] <= 1e-9 && worst[2] <= 1e-9 && worst[3] <= 1e-7;
  return {pass, fmt("max error lpa %.1e fpa %.1e cfpa %.1e dcfpa %.1e", worst[0], worst[1], worst[2],
                    worst[3])};
}

// ---------------------------------------------------------------- 3
Outcome cfpa_equals_fpa() {
  std::mt19937_64 g(3);
  std::uniform_int_distribution<Index> len(4, 200);
  int identical = 0;
  for (int i = 0; i < 100; ++i) {
    const Index n = len(g);
    std::vector<gpk::FeatureSignal> group;
    for (int p = 0; p < 4; ++p) group.push_back(as_signal(random_signal(g, n, 3.0), "p" + std::to_string(p)));
    const Index chunk = n + static_cast<Index>(i % 3) * 17;
    const auto table = gpk::dp::compute_sensitivities(group, chunk, false);
    const double delta2 = gpk::dp::query_sensitivity(group, 2);
    gpk::dp::PrivacyBudget b;
    b.epsilon = 1.0;
    b.k = 1 + static_cast<Index>(i) % n;
    gpk::Rng r1(1000 + i), r2(1000 + i);
    const auto f = gpk::dp::fpa(group[0], delta2, b, r1);
    b.chunk_size = chunk;
    const auto c = gpk::dp::cfpa(group[0], table, b, r2);
    identical += f.values == c.values;
  }
  return {identical == 100, fmt("%d/100 bit-identical", identical)};
}

// ---------------------------------------------------------------- 4
Outcome laplace_moments() {
  gpk::Rng rng(4);
  const int n = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = gpk::laplace_sample(rng, 3.0);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  return {var >= 17.64 && var <= 18.36 && std::abs(mean) <= 0.02,
          fmt("mean %.4f, variance %.3f", mean, var)};
}

gpk::io::Dataset ar1_data(std::uint64_t seed) {
  gpk::io::Ar1Config cfg;
  cfg.participants = 10;
  cfg.length = 512;
  cfg.rho = 0.9;
  cfg.base_level = 10.0;
  cfg.seed = seed;
  return gpk::io::gen_ar1_dataset(cfg);
}

// ---------------------------------------------------------------- 5
Outcome utility_ordering() {
  const auto t0 = Clock::now();
  const double eps[] = {0.48, 4.8, 48.0};
  double fpa_u[3] = {0, 0, 0}, cfpa_u[3] = {0, 0, 0};
  const int seeds = 20, trials = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto data = ar1_data(500 + s);
    for (int e = 0; e < 3; ++e) {
      gpk::eval::MechanismConfig f{gpk::dp::Mechanism::fpa};
      gpk::eval::MechanismConfig c{gpk::dp::Mechanism::cfpa, 32};
      fpa_u[e] += gpk::eval::evaluate_mechanism(data, f, eps[e], trials, s).front().utility.value / seeds;
      cfpa_u[e] += gpk::eval::evaluate_mechanism(data, c, eps[e], trials, s).front().utility.value / seeds;
    }
  }
  const double t = seconds_since(t0);
  bool pass = t < 120.0;
  std::string detail;
  for (int e = 0; e < 3; ++e) {
    pass = pass && cfpa_u[e] > fpa_u[e];
    detail += fmt("eps %.2f: cfpa %.4g vs fpa %.4g; ", eps[e], cfpa_u[e], fpa_u[e]);
  }
  return {pass, detail + fmt("%.1f s", t)};
}

// ---------------------------------------------------------------- 6
Outcome decorrelation() {
  double worst_diff = 0.0, worst_raw = 1.0;
  for (int s = 0; s < 20; ++s) {
    const auto data = ar1_data(500 + s);
    const auto [feature, rec] = data.groups().front();
    worst_diff = std::max(worst_diff,
                          std::abs(gpk::eval::pooled_lag_correlation(data, feature, rec, 1, true)));
    worst_raw = std::min(worst_raw, std::abs(gpk::eval::pooled_lag_correlation(data, feature, rec, 1, false)));
  }
  return {worst_diff < 0.3 && worst_raw > 0.8,
          fmt("max |difference| %.3f, min |raw| %.3f", worst_diff, worst_raw)};
}

// ---------------------------------------------------------------- 7
// Participants differ by a feature-level signature; within-participant
// variation is small.
gpk::io::Dataset identity_data(std::uint64_t seed) {
  gpk::io::Dataset ds;
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  for (int p = 0; p < 10; ++p) {
    for (int f = 0; f < 3; ++f) {
      const double level = 10.0 + 3.0 * d(g);
      gpk::FeatureSignal s;
      s.participant = "p" + std::to_string(p);
      s.feature = "f" + std::to_string(f);
      s.recording_type = "session";
      s.step_seconds = 0.5;
      s.values.resize(512);
      double ar = 0.0;
      for (auto& v : s.values) {
        ar = 0.9 * ar + 0.2 * d(g);
        v = level + ar;
      }
      ds.insert(std::move(s));
    }
  }
  return ds;
}

Outcome leak_contrast() {
  const auto t0 = Clock::now();
  const int seeds = 20;
  double fpa_acc = 0.0, dcfpa_acc = 0.0;
  int wins = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto data = identity_data(700 + s);
    gpk::eval::MechanismConfig f{gpk::dp::Mechanism::fpa};
    gpk::eval::MechanismConfig d{gpk::dp::Mechanism::dcfpa, 32};
    const auto pf = gpk::eval::privatize_dataset(data, f, 0.48, s);
    const auto pd = gpk::eval::privatize_dataset(data, d, 0.48, s);
    const double af = gpk::leak::person_id_eval(pf, 10, 11, true, s).mean;
    const double ad = gpk::leak::person_id_eval(pd, 10, 11, true, s).mean;
    fpa_acc += af / seeds;
    dcfpa_acc += ad / seeds;
    wins += af > ad;
  }
  // One-sided sign test: P(Binomial(20, 1/2) >= wins).
  double p = 0.0;
  for (int k = wins; k <= seeds; ++k) p += std::exp(std::lgamma(seeds + 1.0) - std::lgamma(k + 1.0) -
                                                    std::lgamma(seeds - k + 1.0) - seeds * std::log(2.0));
  const double t = seconds_since(t0);
  return {fpa_acc >= 0.9 && dcfpa_acc <= 0.3 && p < 0.01 && t < 180.0,
          fmt("fpa %.3f, dcfpa-32 %.3f, fpa wins %d/20 (p = %.2g), %.1f s", fpa_acc, dcfpa_acc, wins, p, t)};
}

// ---------------------------------------------------------------- 8
Outcome nmse_hand_case() {
  const double v = gpk::eval::nmse((VectorXd(3) << 1, 2, 3).finished(), (VectorXd(3) << 2, 2, 2).finished());
  return {std::abs(v - 1.0 / 6.0) <= 1e-12, fmt("nmse %.17g", v)};
}

// ---------------------------------------------------------------- 9
Outcome re_exactness() {
  std::mt19937_64 g(9);
  std::uniform_int_distribution<Index> len(20, 300);
  std::normal_distribution<double> d;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    MatrixXd x(36, len(g)), y(36, len(g));
    for (auto& v : x.reshaped()) v = d(g);
    for (auto& v : y.reshaped()) v = d(g);
    gpk::Rng rng(i);
    const auto m = gpk::re::gen_masks(36, rng);
    const MatrixXd k = gpk::re::decode_cross_gram(gpk::re::encode_alice(x, m), gpk::re::encode_bob(y, m));
    worst = std::max(worst, (k - x.transpose() * y).cwiseAbs().maxCoeff());
  }
  const char* argv[] = {"gpk", "re-demo", "--samples", "2000", "--seed", "9"};
  std::ostringstream out, err;
  const int code = gpk::cli::run_cli(6, argv, out, err);
  const bool identical = out.str().find("predictions identical to plaintext: yes") != std::string::npos;
  const auto pos = out.str().rfind("max kernel deviation: ");
  const double kdev = pos == std::string::npos ? 1.0 : std::stod(out.str().substr(pos + 22));
  return {worst <= 1e-9 && code == 0 && identical && kdev <= 1e-9,
          fmt("max decode deviation %.2e; re-demo identical %s, kernel deviation %.1e", worst,
              identical ? "yes" : "no", kdev)};
}

// ---------------------------------------------------------------- 10
Outcome communication_cost() {
  const std::size_t formula = gpk::re::dot_product_cost_bytes(36, 8000, 8000);
  const auto a = gpk::io::gen_regression_set(8000, 36, 0.0, 1);
  const auto b = gpk::io::gen_regression_set(8000, 36, 0.0, 2);
  gpk::re::ProtocolConfig cfg;
  cfg.regress = false;
  const auto r = gpk::re::run_protocol({a.features, a.targets, 8000}, {b.features, b.targets, 8000}, cfg, 10);
  const std::size_t measured = r.transcript.dot_product_payload_bytes();
  return {formula == 4736576 && measured == 4736576,
          fmt("formula %zu, transcript %zu bytes", formula, measured)};
}

// ---------------------------------------------------------------- 11
Outcome prediction_throughput() {
  const Index n_train = 16000, n_test = 4000;
  const auto set = gpk::io::gen_regression_set(n_train + n_test, 36, 0.0, 11);
  const MatrixXd train = set.features.leftCols(n_train);
  const MatrixXd test = set.features.rightCols(n_test);
  const auto kernel = gpk::re::KernelConfig::rbf_sigma(4.0);
  const VectorXd sq_train = train.colwise().squaredNorm().transpose();
  gpk::re::KrrModel model;
  {
    MatrixXd k = train.transpose() * train;
    gpk::re::apply_kernel(k, sq_train, sq_train, kernel);
    model = gpk::re::krr_fit_inplace(k, set.targets.leftCols(n_train), 1e-3);
  }
  const auto t0 = Clock::now();
  MatrixXd cross = train.transpose() * test;
  gpk::re::apply_kernel(cross, sq_train, test.colwise().squaredNorm().transpose(), kernel);
  const MatrixXd pred = gpk::re::krr_predict(model, cross);
  const double ms = 1e3 * seconds_since(t0) / static_cast<double>(n_test);
  const double err = gpk::re::mean_angular_error(pred, set.targets.rightCols(n_test));
  return {ms <= 2.0, fmt("%.4f ms/sample (mean angular error %.4f rad)", ms, err)};
}

// ---------------------------------------------------------------- 12
Outcome event_oracles() {
  std::mt19937_64 g(12);
  int event_match = 0, attention_match = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto trace = oracle::random_trace(g);
    std::vector<gpk::gaze::GazeSample> samples;
    for (const auto& s : trace) {
      gpk::gaze::GazeSample q;
      q.timestamp = s.t;
      q.gaze_dir = s.gaze;
      q.head_dir = s.head;
      samples.push_back(q);
    }
    const auto ev = gpk::gaze::detect_events(samples);
    const auto ref = oracle::scan_events(trace, 7, 30, 60, 0.1, 0.5, 0.03, 0.08);
    bool same = ev.size() == ref.size();
    for (std::size_t j = 0; same && j < ev.size(); ++j) {
      same = static_cast<int>(ev[j].kind) == ref[j].kind && ev[j].first_sample == ref[j].first &&
             ev[j].last_sample == ref[j].last && ev[j].start == ref[j].start && ev[j].end == ref[j].end;
    }
    event_match += same;
  }
  for (int i = 0; i < 1000; ++i) {
    const auto hits = oracle::random_hits(g);
    std::vector<gpk::gaze::HitSample> lib;
    for (const auto& h : hits) lib.push_back({h.t, h.id.empty() ? std::nullopt : std::optional<std::string>(h.id)});
    const auto got = gpk::gaze::ooi_attention(lib);
    const auto ref = oracle::attention(hits, 0.2);
    bool same = got.size() == ref.size();
    for (const auto& a : got) {
      const auto it = ref.find(a.object_id);
      same = same && it != ref.end() && std::abs(it->second.first - a.total_dwell) <= 1e-9 &&
             it->second.second == a.visit_count;
    }
    attention_match += same;
  }
  return {event_match == 1000 && attention_match == 1000,
          fmt("events %d/1000, attention %d/1000", event_match, attention_match)};
}

// ---------------------------------------------------------------- 13
Outcome optimal_k_oracle() {
  std::mt19937_64 g(13);
  std::normal_distribution<double> d;
  std::uniform_real_distribution<double> sig(0.5, 8.0);
  int agree = 0;
  for (int c = 0; c < 40; ++c) {
    const double sigma = sig(g);
    VectorXd x(8);
    for (auto& v : x) v = 10.0 + sigma * d(g);
    const std::vector<VectorXd> s{x};
    const Index k = gpk::eval::optimal_k(s, gpk::eval::ChunkTransform::raw, 1.0, 1.0, 500, 100 + c);
    agree += k == oracle::optimal_k(x, 1.0, 1.0, 5000, 9000 + c);
  }
  return {agree >= 38, fmt("%d/40 agree", agree)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"DFT roundtrip and Parseval", dft_roundtrip},
      {"mechanism degeneracy", degeneracy},
      {"CFPA equals FPA for one chunk", cfpa_equals_fpa},
      {"Laplace sampler moments", laplace_moments},
      {"utility ordering CFPA-32 over FPA", utility_ordering},
      {"difference-signal decorrelation", decorrelation},
      {"identity leak contrast", leak_contrast},
      {"NMSE hand case", nmse_hand_case},
      {"RE protocol exactness", re_exactness},
      {"communication formula", communication_cost},
      {"prediction throughput", prediction_throughput},
      {"event detector and attention oracles", event_oracles},
      {"optimal k oracle agreement", optimal_k_oracle},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
