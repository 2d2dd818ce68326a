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

#include "gpk/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "gpk/error.hpp"
#include "gpk/parallel.hpp"
#include "gpk/spectral.hpp"
#include "json.hpp"

namespace gpk::eval {

double nmse(const Eigen::VectorXd& x, const Eigen::VectorXd& x_tilde) {
  if (x.size() == 0 || x.size() != x_tilde.size()) {
    throw InvalidArgument("nmse: signals must have equal nonzero length");
  }
  const double denominator = x.mean() * x_tilde.mean();
  if (denominator == 0.0 || !std::isfinite(denominator)) {
    throw DegenerateError("nmse: zero mean in denominator");
  }
  return (x - x_tilde).squaredNorm() / static_cast<double>(x.size()) / denominator;
}

UtilityScore utility_score(double nmse_value) {
  if (!std::isfinite(nmse_value)) throw InvalidArgument("utility_score: non-finite NMSE");
  if (nmse_value == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / std::abs(nmse_value), false};
}

namespace {

// Real time-domain contribution of unit coefficient j, after the optional
// prefix-sum aggregation: column j of `cos_part` is T(cos(2 pi j t / n)) / n
// and of `sin_part` is T(sin(2 pi j t / n)) / n.
struct SynthesisBasis {
  Eigen::MatrixXd cos_part;
  Eigen::MatrixXd sin_part;
  Eigen::VectorXd cos_mean;
  Eigen::VectorXd sin_mean;
};

SynthesisBasis make_basis(Index n, Index k_max, ChunkTransform transform) {
  SynthesisBasis b{Eigen::MatrixXd(n, k_max), Eigen::MatrixXd(n, k_max),
                   Eigen::VectorXd(k_max), Eigen::VectorXd(k_max)};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index j = 0; j < k_max; ++j) {
    for (Index t = 0; t < n; ++t) {
      const double angle = 2.0 * std::numbers::pi *
                           static_cast<double>((j * t) % n) / static_cast<double>(n);
      b.cos_part(t, j) = std::cos(angle) * inv_n;
      b.sin_part(t, j) = std::sin(angle) * inv_n;
    }
    if (transform == ChunkTransform::difference) {
      for (Index t = 1; t < n; ++t) {
        b.cos_part(t, j) += b.cos_part(t - 1, j);
        b.sin_part(t, j) += b.sin_part(t - 1, j);
      }
    }
    b.cos_mean[j] = b.cos_part.col(j).mean();
    b.sin_mean[j] = b.sin_part.col(j).mean();
  }
  return b;
}

struct SweepAccumulator {
  std::vector<double> sum;
  std::vector<long> count;
};

}  // namespace

std::vector<double> k_sweep(std::span<const Eigen::VectorXd> signals,
                            ChunkTransform transform, double delta2,
                            double epsilon, int trials, std::uint64_t seed) {
  if (signals.empty()) throw InvalidArgument("k_sweep: no signals");
  if (trials < 1) throw InvalidArgument("k_sweep: trials must be >= 1");
  if (delta2 < 0.0 || !(epsilon > 0.0)) throw InvalidArgument("k_sweep: bad noise parameters");
  Index k_max = signals.front().size();
  for (const auto& s : signals) k_max = std::min(k_max, s.size());
  if (k_max < 1) throw InvalidArgument("k_sweep: empty signal");

  std::map<Index, SynthesisBasis> bases;
  for (const auto& s : signals) {
    if (!bases.contains(s.size())) bases.emplace(s.size(), make_basis(s.size(), k_max, transform));
  }

  std::vector<SweepAccumulator> per_signal(signals.size());
  parallel_for(signals.size(), [&](std::size_t p) {
    const Eigen::VectorXd& x = signals[p];
    const Index n = x.size();
    const double x_mean = x.mean();
    auto& acc = per_signal[p];
    acc.sum.assign(k_max, 0.0);
    acc.count.assign(k_max, 0);
    if (x_mean == 0.0) return;
    const SynthesisBasis& basis = bases.at(n);

    const Eigen::VectorXd y =
        transform == ChunkTransform::difference ? dp::difference_transform(x) : x;
    const auto spectrum = spectral::dft_leading(y, k_max);

    // Residual x - R_k and reconstruction mean for every k.
    Eigen::MatrixXd residual(n, k_max);
    Eigen::VectorXd recon_mean(k_max);
    Eigen::VectorXd e = x;
    double m = 0.0;
    for (Index j = 0; j < k_max; ++j) {
      const auto f = spectrum.coefficients[j];
      e.noalias() -= f.real() * basis.cos_part.col(j) - f.imag() * basis.sin_part.col(j);
      m += f.real() * basis.cos_mean[j] - f.imag() * basis.sin_mean[j];
      residual.col(j) = e;
      recon_mean[j] = m;
    }
    Eigen::VectorXd residual_sq(k_max);
    for (Index j = 0; j < k_max; ++j) residual_sq[j] = residual.col(j).squaredNorm();

    const double scale_unit = std::sqrt(static_cast<double>(n)) * delta2 / epsilon;
    Eigen::VectorXd noise(n);
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(seed, {std::int64_t(p), std::int64_t(t)}));
      noise.setZero();
      double noise_mean = 0.0;
      for (Index j = 0; j < k_max; ++j) {
        const Index k = j + 1;
        const double lambda = scale_unit * std::sqrt(static_cast<double>(k));
        if (scale_unit > 0.0) {
          const double re = laplace_inverse_cdf(rng.uniform(), 1.0);
          const double im = laplace_inverse_cdf(rng.uniform(), 1.0);
          noise.noalias() += re * basis.cos_part.col(j) - im * basis.sin_part.col(j);
          noise_mean += re * basis.cos_mean[j] - im * basis.sin_mean[j];
        }
        const double sq = residual_sq[j] - 2.0 * lambda * residual.col(j).dot(noise) +
                          lambda * lambda * noise.squaredNorm();
        const double out_mean = recon_mean[j] + lambda * noise_mean;
        const double denominator = x_mean * out_mean;
        if (denominator == 0.0) continue;
        acc.sum[j] += std::abs(std::max(sq, 0.0) / static_cast<double>(n) / denominator);
        ++acc.count[j];
      }
    }
  });

  std::vector<double> mean(k_max, 0.0);
  bool any = false;
  for (Index j = 0; j < k_max; ++j) {
    double s = 0.0;
    long c = 0;
    for (const auto& acc : per_signal) {
      s += acc.sum[j];
      c += acc.count[j];
    }
    if (c == 0) {
      mean[j] = std::numeric_limits<double>::infinity();
    } else {
      mean[j] = s / static_cast<double>(c);
      any = true;
    }
  }
  if (!any) return {};
  return mean;
}

Index optimal_k(std::span<const Eigen::VectorXd> signals, ChunkTransform transform,
                double delta2, double epsilon, int trials, std::uint64_t seed) {
  const auto losses = k_sweep(signals, transform, delta2, epsilon, trials, seed);
  if (losses.empty()) throw DegenerateError("optimal_k: every signal has zero mean");
  Index best = 0;
  for (Index j = 1; j < static_cast<Index>(losses.size()); ++j) {
    if (losses[j] < losses[best]) best = j;
  }
  return best + 1;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& feature,
                         const std::string& recording_type,
                         const std::string& participant, int trial) {
  return derive_seed(base_seed, {std::string_view(feature), std::string_view(recording_type),
                                 std::string_view(participant), std::int64_t{0},
                                 std::int64_t{trial}});
}

dp::SensitivityTable sensitivities_for(std::span<const FeatureSignal> group,
                                       const MechanismConfig& config) {
  const bool chunked = dp::uses_chunks(config.mechanism);
  if (chunked && !config.chunk_size) {
    throw InvalidArgument(std::string(dp::to_string(config.mechanism)) + " needs a chunk size");
  }
  return dp::compute_sensitivities(group, chunked ? config.chunk_size : std::nullopt,
                                   dp::uses_difference(config.mechanism));
}

std::vector<Index> choose_k(std::span<const FeatureSignal> group,
                            const dp::SensitivityTable& sensitivities,
                            const MechanismConfig& config, double epsilon,
                            std::uint64_t base_seed) {
  if (config.mechanism == dp::Mechanism::lpa) return {};
  if (group.empty()) throw InvalidArgument("choose_k: empty group");
  const std::string& feature = group.front().feature;
  const std::string& rt = group.front().recording_type;
  Index n_max = 0;
  for (const auto& s : group) n_max = std::max(n_max, s.size());
  const bool chunked = dp::uses_chunks(config.mechanism);
  const auto chunks = dp::chunk_boundaries(n_max, chunked ? *config.chunk_size : n_max);
  const auto transform = dp::uses_difference(config.mechanism) ? ChunkTransform::difference
                                                                : ChunkTransform::raw;
  std::vector<Index> ks;
  ks.reserve(chunks.size());
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    std::vector<Eigen::VectorXd> parts;
    Index shortest = chunks[c].size();
    for (const auto& s : group) {
      if (s.size() <= chunks[c].begin) continue;
      const Index len = std::min(chunks[c].end, s.size()) - chunks[c].begin;
      parts.push_back(s.values.segment(chunks[c].begin, len));
      shortest = std::min(shortest, len);
    }
    if (config.fixed_k) {
      if (!chunked && *config.fixed_k > shortest) {
        throw InvalidArgument("fixed k exceeds signal length");
      }
      ks.push_back(std::min(*config.fixed_k, shortest));
      continue;
    }
    const double delta2 = sensitivities.at(feature, rt, c).delta2;
    const auto seed = derive_seed(base_seed, {std::string_view("optimal-k"), std::string_view(feature),
                                              std::string_view(rt), std::int64_t(c)});
    try {
      ks.push_back(optimal_k(parts, transform, delta2, epsilon, config.k_search_trials, seed));
    } catch (const DegenerateError&) {
      // Nothing to score against; keep the whole spectrum.
      ks.push_back(shortest);
    }
  }
  return ks;
}

namespace {

bool all_minima_zero(std::span<const FeatureSignal> group) {
  for (const auto& s : group) {
    if (s.values.minCoeff() != 0.0) return false;
  }
  return true;
}

dp::PrivacyBudget budget_for(const MechanismConfig& config, double epsilon,
                             std::vector<Index> ks) {
  dp::PrivacyBudget budget;
  budget.epsilon = epsilon;
  budget.chunk_size = dp::uses_chunks(config.mechanism) ? config.chunk_size : std::nullopt;
  if (!ks.empty()) budget.k = std::move(ks);
  return budget;
}

}  // namespace

std::vector<UtilityReport> evaluate_mechanism(const io::Dataset& dataset,
                                              const MechanismConfig& config,
                                              double epsilon, int trials,
                                              std::uint64_t base_seed) {
  if (trials < 1) throw InvalidArgument("evaluate_mechanism: trials must be >= 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("evaluate_mechanism: epsilon must be positive");
  std::vector<UtilityReport> reports;
  for (const auto& [feature, rt] : dataset.groups()) {
    const auto group = dataset.group(feature, rt);
    if (config.exclude_zero_minimum && all_minima_zero(group)) continue;
    const auto table = sensitivities_for(group, config);
    UtilityReport report;
    report.feature = feature;
    report.recording_type = rt;
    report.mechanism = std::string(dp::to_string(config.mechanism));
    report.epsilon = epsilon;
    report.chunk_size = dp::uses_chunks(config.mechanism) ? config.chunk_size : std::nullopt;
    report.chosen_k = choose_k(group, table, config, epsilon, base_seed);
    report.trials = trials;
    report.base_seed = base_seed;
    const auto budget = budget_for(config, epsilon, report.chosen_k);

    struct Outcome {
      double sum = 0.0;
      int count = 0;
      int zeros = 0;
      bool degenerate = false;
    };
    std::vector<Outcome> outcomes(group.size());
    parallel_for(group.size(), [&](std::size_t p) {
      const auto& signal = group[p];
      auto& out = outcomes[p];
      for (int t = 0; t < trials; ++t) {
        Rng rng(trial_seed(base_seed, feature, rt, signal.participant, t));
        const auto noisy = dp::privatize(signal, config.mechanism, table, budget, rng);
        double value;
        try {
          value = nmse(signal.values, noisy.values);
        } catch (const DegenerateError&) {
          out.degenerate = true;
          return;
        }
        if (value == 0.0) ++out.zeros;
        out.sum += std::abs(value);
        ++out.count;
      }
    });
    double sum = 0.0;
    long count = 0;
    for (std::size_t p = 0; p < group.size(); ++p) {
      if (outcomes[p].degenerate) {
        report.exclusions.push_back(group[p].participant);
        continue;
      }
      sum += outcomes[p].sum;
      count += outcomes[p].count;
      report.zero_nmse_trials += outcomes[p].zeros;
    }
    if (count == 0) {
      report.mean_abs_nmse = std::numeric_limits<double>::quiet_NaN();
      report.utility = {0.0, false};
    } else {
      report.mean_abs_nmse = sum / static_cast<double>(count);
      report.utility = utility_score(report.mean_abs_nmse);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

io::Dataset privatize_dataset(const io::Dataset& dataset, const MechanismConfig& config,
                              double epsilon, std::uint64_t base_seed) {
  io::Dataset out;
  out.schema_version = dataset.schema_version;
  for (const auto& [feature, rt] : dataset.groups()) {
    const auto group = dataset.group(feature, rt);
    const auto table = sensitivities_for(group, config);
    const auto budget =
        budget_for(config, epsilon, choose_k(group, table, config, epsilon, base_seed));
    std::vector<FeatureSignal> noisy(group.size());
    parallel_for(group.size(), [&](std::size_t p) {
      Rng rng(trial_seed(base_seed, feature, rt, group[p].participant, 0));
      noisy[p] = dp::privatize(group[p], config.mechanism, table, budget, rng);
    });
    for (auto& s : noisy) out.insert(std::move(s));
  }
  return out;
}

namespace {

std::string join_k(const std::vector<Index>& ks) {
  std::string s;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(ks[i]);
  }
  return s;
}

}  // namespace

std::string to_csv(const std::vector<UtilityReport>& reports) {
  std::string out =
      "feature,recording_type,mechanism,epsilon,chunk_size,chosen_k,mean_abs_nmse,"
      "utility,trials,base_seed,zero_nmse_trials,exclusions\n";
  for (const auto& r : reports) {
    std::string excl;
    for (std::size_t i = 0; i < r.exclusions.size(); ++i) {
      if (i) excl += ';';
      excl += r.exclusions[i];
    }
    out += r.feature + "," + r.recording_type + "," + r.mechanism + "," +
           io::format_double(r.epsilon) + "," +
           (r.chunk_size ? std::to_string(*r.chunk_size) : std::string()) + "," +
           join_k(r.chosen_k) + "," + io::format_double(r.mean_abs_nmse) + "," +
           (r.utility.infinite ? std::string("inf") : io::format_double(r.utility.value)) +
           "," + std::to_string(r.trials) + "," + std::to_string(r.base_seed) + "," +
           std::to_string(r.zero_nmse_trials) + "," + excl + "\n";
  }
  return out;
}

std::string to_json(const std::vector<UtilityReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["feature"] = r.feature;
    j["recording_type"] = r.recording_type;
    j["mechanism"] = r.mechanism;
    j["epsilon"] = r.epsilon;
    j["chunk_size"] = r.chunk_size ? nlohmann::json(*r.chunk_size) : nlohmann::json();
    j["chosen_k"] = r.chosen_k;
    j["mean_abs_nmse"] = std::isfinite(r.mean_abs_nmse) ? nlohmann::json(r.mean_abs_nmse)
                                                        : nlohmann::json();
    j["utility"] = r.utility.infinite ? nlohmann::json() : nlohmann::json(r.utility.value);
    j["utility_infinite"] = r.utility.infinite;
    j["trials"] = r.trials;
    j["base_seed"] = r.base_seed;
    j["zero_nmse_trials"] = r.zero_nmse_trials;
    j["exclusions"] = r.exclusions;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("pearson: need two equal-length samples of size >= 2");
  }
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson: zero variance");
  const double r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double LagCorrelation::at() const {
  if (!value) {
    throw UndefinedCorrelation("correlation undefined at lag " + std::to_string(lag));
  }
  return *value;
}

std::vector<LagCorrelation> correlation_profile(const io::Dataset& dataset,
                                                const std::string& feature,
                                                const std::string& recording_type,
                                                Index ref_index, Index max_lag,
                                                bool difference) {
  if (ref_index < 0 || max_lag < 0) throw InvalidArgument("correlation_profile: negative index");
  auto group = dataset.group(feature, recording_type);
  if (group.size() < 2) throw InvalidArgument("correlation_profile: need >= 2 participants");
  if (difference) {
    for (auto& s : group) s.values = dp::difference_transform(s.values);
  }
  std::vector<LagCorrelation> out;
  for (Index lag = 0; lag <= max_lag; ++lag) {
    LagCorrelation lc;
    lc.lag = lag;
    std::vector<double> a, b;
    for (const auto& s : group) {
      if (ref_index + lag >= s.size()) {
        lc.excluded.push_back(s.participant);
        continue;
      }
      a.push_back(s.values[ref_index]);
      b.push_back(s.values[ref_index + lag]);
    }
    lc.participants = a.size();
    if (a.size() >= 2) {
      try {
        lc.value = pearson(Eigen::Map<Eigen::VectorXd>(a.data(), a.size()),
                           Eigen::Map<Eigen::VectorXd>(b.data(), b.size()));
      } catch (const UndefinedCorrelation&) {
      }
    }
    out.push_back(std::move(lc));
  }
  return out;
}

double pooled_lag_correlation(const io::Dataset& dataset, const std::string& feature,
                              const std::string& recording_type, Index lag,
                              bool difference) {
  if (lag < 0) throw InvalidArgument("pooled_lag_correlation: negative lag");
  std::vector<double> a, b;
  for (auto s : dataset.group(feature, recording_type)) {
    // The first element of a difference signal is a level, not a difference.
    Index first = 0;
    if (difference) {
      s.values = dp::difference_transform(s.values);
      first = 1;
    }
    for (Index t = first; t + lag < s.size(); ++t) {
      a.push_back(s.values[t]);
      b.push_back(s.values[t + lag]);
    }
  }
  if (a.size() < 2) throw InvalidArgument("pooled_lag_correlation: not enough samples");
  return pearson(Eigen::Map<Eigen::VectorXd>(a.data(), a.size()),
                 Eigen::Map<Eigen::VectorXd>(b.data(), b.size()));
}

}  // namespace gpk::eval
