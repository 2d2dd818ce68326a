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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "gpk/error.hpp"
#include "gpk/evaluation.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace {

using namespace gpk;
using eval::Index;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

io::Dataset ar1(double rho, int participants, Index length, std::uint64_t seed,
                double offset_scale = 1.0, double base = 0.0, int features = 1) {
  io::Ar1Config c;
  c.rho = rho;
  c.participants = participants;
  c.length = length;
  c.seed = seed;
  c.participant_offset_scale = offset_scale;
  c.base_level = base;
  c.features = features;
  return io::gen_ar1_dataset(c);
}

TEST(Nmse, HandCases) {
  EXPECT_NEAR(eval::nmse(vec({1, 2, 3}), vec({2, 2, 2})), 1.0 / 6.0, 1e-12);
  EXPECT_EQ(eval::nmse(vec({1, 2, 3}), vec({1, 2, 3})), 0.0);
  EXPECT_DOUBLE_EQ(eval::nmse(vec({1, 1}), vec({-1, -1})), -4.0);
}

TEST(Nmse, Errors) {
  EXPECT_THROW(eval::nmse(vec({1, -1}), vec({2, 2})), DegenerateError);
  EXPECT_THROW(eval::nmse(vec({1, 2}), vec({1, 2, 3})), InvalidArgument);
  EXPECT_THROW(eval::nmse(Eigen::VectorXd(), Eigen::VectorXd()), InvalidArgument);
}

TEST(Nmse, InvariantUnderJointPermutation) {
  const auto x = vec({3, 1, 4, 1, 5, 9});
  const auto y = vec({2, 7, 1, 8, 2, 8});
  Eigen::VectorXd xp(6), yp(6);
  const int perm[] = {5, 2, 0, 4, 1, 3};
  for (int i = 0; i < 6; ++i) {
    xp[i] = x[perm[i]];
    yp[i] = y[perm[i]];
  }
  EXPECT_NEAR(eval::nmse(x, y), eval::nmse(xp, yp), 1e-15);
}

TEST(Utility, ReciprocalAndSentinel) {
  EXPECT_NEAR(eval::utility_score(1.0 / 6.0).value, 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(eval::utility_score(-4.0).value, 0.25);
  const auto inf = eval::utility_score(0.0);
  EXPECT_TRUE(inf.infinite);
  EXPECT_TRUE(std::isinf(inf.value));
  double prev = INFINITY;
  for (double v : {0.01, 0.1, 1.0, 10.0}) {
    EXPECT_LT(eval::utility_score(v).value, prev);
    prev = eval::utility_score(v).value;
  }
}

TEST(OptimalK, ConstantChunkPicksOne) {
  std::vector<Eigen::VectorXd> s{Eigen::VectorXd::Constant(16, 3.0)};
  for (double d2 : {0.1, 1.0, 10.0}) {
    EXPECT_EQ(eval::optimal_k(s, eval::ChunkTransform::raw, d2, 1.0, 50, 7), 1);
  }
}

TEST(OptimalK, HugeEpsilonPicksFullLength) {
  std::mt19937 gen(1);
  std::normal_distribution<double> d(5.0, 1.0);
  Eigen::VectorXd x(12);
  for (auto& v : x) v = d(gen);
  std::vector<Eigen::VectorXd> s{x};
  EXPECT_EQ(eval::optimal_k(s, eval::ChunkTransform::raw, 1.0, 1e6, 20, 3), 12);
}

TEST(OptimalK, SweepMatchesDirectReleases) {
  // The sweep's loss for each k equals the mean |NMSE| of actual releases
  // drawn from the per-trial streams it documents.
  std::mt19937 gen(2);
  std::normal_distribution<double> d(4.0, 1.0);
  for (auto transform : {eval::ChunkTransform::raw, eval::ChunkTransform::difference}) {
    std::vector<Eigen::VectorXd> s;
    for (int p = 0; p < 2; ++p) {
      Eigen::VectorXd x(10);
      for (auto& v : x) v = d(gen);
      s.push_back(x);
    }
    const int trials = 30;
    const auto losses = eval::k_sweep(s, transform, 0.8, 2.0, trials, 11);
    ASSERT_EQ(losses.size(), 10u);
    for (Index k = 1; k <= 10; ++k) {
      double sum = 0.0;
      for (std::size_t p = 0; p < s.size(); ++p) {
        for (int t = 0; t < trials; ++t) {
          Rng rng(derive_seed(11, {std::int64_t(p), std::int64_t(t)}));
          const auto y = transform == eval::ChunkTransform::raw
                             ? dp::fourier_release(s[p], 0.8, 2.0, k, rng)
                             : dp::difference_fourier_release(s[p], 0.8, 2.0, k, rng);
          sum += std::abs(eval::nmse(s[p], y));
        }
      }
      EXPECT_NEAR(losses[k - 1], sum / (2.0 * trials), 1e-9 * (1.0 + losses[k - 1])) << k;
    }
  }
}

TEST(OptimalK, AgreesWithHighTrialOracle) {
  // Smaller version of the acceptance check: 10 cases, 2000-trial oracle.
  std::mt19937 gen(77);
  std::normal_distribution<double> d(0.0, 1.0);
  int agree = 0;
  const int cases = 10;
  for (int c = 0; c < cases; ++c) {
    Eigen::VectorXd x(8);
    const double sigma = 0.5 + 0.25 * c;
    for (auto& v : x) v = 10.0 + sigma * d(gen);
    std::vector<Eigen::VectorXd> s{x};
    const auto k = eval::optimal_k(s, eval::ChunkTransform::raw, 1.0, 1.0, 500, 1000 + c);
    const auto ref = oracle::optimal_k(x, 1.0, 1.0, 2000, 5000 + c);
    agree += k == ref;
  }
  EXPECT_GE(agree, 8);
}

TEST(Evaluate, ZeroNoiseGivesNegligibleError) {
  // Identical participants: every sensitivity is zero.
  io::Dataset data;
  const auto base = ar1(0.9, 1, 64, 3, 1.0, 5.0).all().front();
  for (int p = 0; p < 3; ++p) {
    auto s = base;
    s.participant = "p" + std::to_string(p);
    data.insert(s);
  }
  eval::MechanismConfig lpa{dp::Mechanism::lpa};
  const auto r0 = eval::evaluate_mechanism(data, lpa, 1.0, 5, 1);
  ASSERT_EQ(r0.size(), 1u);
  EXPECT_EQ(r0[0].mean_abs_nmse, 0.0);
  EXPECT_TRUE(r0[0].utility.infinite);
  EXPECT_EQ(r0[0].zero_nmse_trials, 15);

  for (auto m : {dp::Mechanism::fpa, dp::Mechanism::cfpa, dp::Mechanism::dcfpa}) {
    eval::MechanismConfig c{m};
    if (dp::uses_chunks(m)) c.chunk_size = 16;
    c.fixed_k = dp::uses_chunks(m) ? 16 : 64;
    const auto r = eval::evaluate_mechanism(data, c, 1.0, 5, 1);
    EXPECT_LE(r[0].mean_abs_nmse, 1e-9);
    EXPECT_TRUE(r[0].utility.infinite || r[0].utility.value > 1e9);
  }
}

TEST(Evaluate, DeterministicAndThreadIndependent) {
  const auto data = ar1(0.9, 4, 40, 5, 1.0, 5.0, 2);
  eval::MechanismConfig c{dp::Mechanism::dcfpa, Index{16}};
  c.k_search_trials = 10;
  setenv("GPK_THREADS", "1", 1);
  const auto a = eval::to_csv(eval::evaluate_mechanism(data, c, 0.48, 7, 99));
  setenv("GPK_THREADS", "3", 1);
  const auto b = eval::to_csv(eval::evaluate_mechanism(data, c, 0.48, 7, 99));
  unsetenv("GPK_THREADS");
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("dcfpa"), std::string::npos);
}

TEST(Evaluate, UtilityIncreasesWithEpsilon) {
  const auto data = ar1(0.9, 10, 128, 8, 1.0, 5.0);
  const eval::MechanismConfig c{dp::Mechanism::fpa, std::nullopt, std::nullopt, 40};
  double prev = 0.0;
  for (double eps : {0.48, 4.8, 48.0}) {
    const auto r = eval::evaluate_mechanism(data, c, eps, 40, 3);
    EXPECT_GT(r[0].utility.value, prev) << eps;
    prev = r[0].utility.value;
  }
}

TEST(Evaluate, DegenerateParticipantsAreExcluded) {
  io::Dataset data;
  FeatureSignal a{"a", "f", "r", Eigen::VectorXd::Constant(8, 2.0)};
  FeatureSignal b{"b", "f", "r", vec({1, -1, 1, -1, 1, -1, 1, -1})};
  data.insert(a);
  data.insert(b);
  eval::MechanismConfig c{dp::Mechanism::lpa};
  const auto r = eval::evaluate_mechanism(data, c, 1.0, 3, 1);
  ASSERT_EQ(r[0].exclusions, std::vector<std::string>{"b"});
  EXPECT_GT(r[0].mean_abs_nmse, 0.0);
}

TEST(Evaluate, ZeroMinimumFeaturesCanBeSkipped) {
  io::Dataset data;
  data.insert({"a", "words", "r", vec({0, 1, 2})});
  data.insert({"b", "words", "r", vec({0, 3, 1})});
  data.insert({"a", "f", "r", vec({1, 1, 2})});
  data.insert({"b", "f", "r", vec({0.5, 3, 1})});
  eval::MechanismConfig c{dp::Mechanism::lpa};
  c.exclude_zero_minimum = true;
  const auto r = eval::evaluate_mechanism(data, c, 1.0, 2, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].feature, "f");
}

TEST(Reports, CsvAndJsonSerialization) {
  eval::UtilityReport r;
  r.feature = "f";
  r.recording_type = "r";
  r.mechanism = "cfpa";
  r.epsilon = 0.48;
  r.chunk_size = 32;
  r.chosen_k = {3, 4};
  r.mean_abs_nmse = 0.0;
  r.utility = eval::utility_score(0.0);
  r.trials = 100;
  r.base_seed = 9;
  const auto csv = eval::to_csv({r});
  EXPECT_NE(csv.find("f,r,cfpa,0.48,32,3;4,0,inf,100,9,0,"), std::string::npos) << csv;
  const auto json = nlohmann::json::parse(eval::to_json({r}));
  EXPECT_TRUE(json[0]["utility"].is_null());
  EXPECT_TRUE(json[0]["utility_infinite"].get<bool>());
}

TEST(Correlation, ZeroLagIsOneAndValuesBounded) {
  const auto data = ar1(0.9, 30, 32, 4);
  const auto prof = eval::correlation_profile(data, "f0", "synthetic");
  ASSERT_EQ(prof.size(), 11u);
  EXPECT_EQ(prof[0].at(), 1.0);
  for (const auto& lc : prof) {
    EXPECT_GE(lc.at(), -1.0);
    EXPECT_LE(lc.at(), 1.0);
  }
}

TEST(Correlation, Ar1ProfileFollowsGeometricDecay) {
  const auto data = ar1(0.9, 200, 20, 6, 0.0);
  const auto prof = eval::correlation_profile(data, "f0", "synthetic", 5, 10);
  for (const auto& lc : prof) {
    EXPECT_NEAR(lc.at(), std::pow(0.9, double(lc.lag)), 0.1) << lc.lag;
  }
}

TEST(Correlation, ConstantReferenceIsUndefined) {
  io::Dataset data;
  data.insert({"a", "f", "r", vec({1, 1, 1, 1, 1, 1, 5, 2})});
  data.insert({"b", "f", "r", vec({2, 2, 2, 2, 2, 1, 1, 3})});
  data.insert({"c", "f", "r", vec({0, 0, 0, 0, 0, 1, 4, 4})});
  const auto prof = eval::correlation_profile(data, "f", "r", 5, 2);
  EXPECT_THROW(prof[0].at(), UndefinedCorrelation);
  EXPECT_THROW(prof[2].at(), UndefinedCorrelation);
  const auto shifted = eval::correlation_profile(data, "f", "r", 6, 1);
  EXPECT_NO_THROW(shifted[0].at());
  EXPECT_THROW(eval::pearson(vec({1, 1, 1}), vec({1, 2, 3})), UndefinedCorrelation);
}

TEST(Correlation, ShortSignalsExcludedPerLag) {
  io::Dataset data;
  data.insert({"a", "f", "r", vec({1, 2, 3, 4, 5, 6, 7, 8})});
  data.insert({"b", "f", "r", vec({2, 1, 3, 3, 2, 5, 1, 0})});
  data.insert({"c", "f", "r", vec({0, 3, 1, 2, 2, 1, 3})});
  const auto prof = eval::correlation_profile(data, "f", "r", 5, 2);
  EXPECT_TRUE(prof[1].excluded.empty());
  EXPECT_EQ(prof[2].excluded, std::vector<std::string>{"c"});
  EXPECT_EQ(prof[2].participants, 2u);
  EXPECT_THROW(eval::correlation_profile(data, "g", "r"), InvalidArgument);
}

TEST(Correlation, DifferenceSignalsDecorrelateOverSeeds) {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = ar1(0.9, 40, 20, seed);
    const double raw = eval::correlation_profile(data, "f0", "synthetic", 5, 1)[1].at();
    const double diff = eval::correlation_profile(data, "f0", "synthetic", 5, 1, true)[1].at();
    wins += std::abs(diff) < std::abs(raw);
  }
  EXPECT_GE(wins, 18);
}

TEST(Correlation, PooledLagOneOnAr1) {
  const auto data = ar1(0.95, 10, 2000, 12, 0.0);
  EXPECT_NEAR(eval::pooled_lag_correlation(data, "f0", "synthetic", 1), 0.95, 0.02);
  EXPECT_LT(std::abs(eval::pooled_lag_correlation(data, "f0", "synthetic", 1, true)), 0.3);
}

}  // namespace
