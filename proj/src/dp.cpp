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

#include "gpk/dp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "gpk/error.hpp"
#include "gpk/spectral.hpp"

namespace gpk {

void validate(const FeatureSignal& signal) {
  if (signal.values.size() == 0) {
    throw InvalidArgument("feature signal " + signal.participant + "/" +
                          signal.feature + " is empty");
  }
  if (!signal.values.allFinite()) {
    throw InvalidArgument("feature signal " + signal.participant + "/" +
                          signal.feature + " has non-finite values");
  }
  if (!(signal.step_seconds > 0.0)) {
    throw InvalidArgument("feature signal step_seconds must be positive");
  }
}

namespace dp {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::lpa:
      return "lpa";
    case Mechanism::fpa:
      return "fpa";
    case Mechanism::cfpa:
      return "cfpa";
    case Mechanism::dcfpa:
      return "dcfpa";
  }
  throw InvalidArgument("unknown mechanism");
}

Mechanism parse_mechanism(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "lpa") return Mechanism::lpa;
  if (lower == "fpa") return Mechanism::fpa;
  if (lower == "cfpa") return Mechanism::cfpa;
  if (lower == "dcfpa") return Mechanism::dcfpa;
  throw InvalidArgument("unknown mechanism '" + std::string(name) + "'");
}

bool uses_chunks(Mechanism m) {
  return m == Mechanism::cfpa || m == Mechanism::dcfpa;
}

bool uses_difference(Mechanism m) { return m == Mechanism::dcfpa; }

void PrivacyBudget::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("epsilon must be positive and finite");
  }
  if (sensitivity_order != 1 && sensitivity_order != 2) {
    throw InvalidArgument("sensitivity order must be 1 or 2");
  }
  if (chunk_size && *chunk_size < 2) {
    throw InvalidArgument("chunk size must be at least 2");
  }
  if (const auto* uniform = std::get_if<Index>(&k)) {
    if (*uniform < 1) throw InvalidArgument("k must be positive");
  } else {
    for (Index kc : std::get<std::vector<Index>>(k)) {
      if (kc < 1) throw InvalidArgument("k must be positive");
    }
  }
}

Index PrivacyBudget::k_for_chunk(std::size_t chunk, Index chunk_length) const {
  if (const auto* uniform = std::get_if<Index>(&k)) {
    return std::min(*uniform, chunk_length);
  }
  const auto& per_chunk = std::get<std::vector<Index>>(k);
  if (chunk >= per_chunk.size()) {
    throw InvalidArgument("no coefficient count for chunk " +
                          std::to_string(chunk));
  }
  if (per_chunk[chunk] > chunk_length) {
    throw InvalidArgument("k exceeds the length of chunk " +
                          std::to_string(chunk));
  }
  return per_chunk[chunk];
}

std::vector<ChunkRange> chunk_boundaries(Index n, Index chunk_size) {
  if (n < 1 || chunk_size < 1) {
    throw InvalidArgument("chunk_boundaries: n and chunk size must be positive");
  }
  std::vector<ChunkRange> out;
  out.reserve(static_cast<std::size_t>((n + chunk_size - 1) / chunk_size));
  for (Index begin = 0; begin < n; begin += chunk_size) {
    out.push_back({begin, std::min(begin + chunk_size, n)});
  }
  return out;
}

const Sensitivity& SensitivityTable::at(const std::string& feature,
                                        const std::string& recording_type,
                                        std::size_t chunk) const {
  auto it = entries.find({feature, recording_type, chunk});
  if (it == entries.end()) {
    throw InvalidArgument("missing sensitivity for " + feature + "/" +
                          recording_type + " chunk " + std::to_string(chunk));
  }
  return it->second;
}

double pairwise_sensitivity(std::span<const Eigen::VectorXd> vectors, int w) {
  if (vectors.empty()) throw InvalidArgument("sensitivity: no signals");
  if (w != 1 && w != 2) throw InvalidArgument("sensitivity: w must be 1 or 2");
  Index n = 0;
  for (const auto& v : vectors) n = std::max(n, v.size());
  std::vector<Eigen::VectorXd> padded;
  padded.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (!v.allFinite()) throw InvalidArgument("sensitivity: non-finite value");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    p.head(v.size()) = v;
    padded.push_back(std::move(p));
  }
  double best = 0.0;
  for (std::size_t p = 0; p < padded.size(); ++p) {
    for (std::size_t q = p + 1; q < padded.size(); ++q) {
      const auto diff = padded[p] - padded[q];
      const double d = (w == 1) ? diff.lpNorm<1>() : diff.norm();
      best = std::max(best, d);
    }
  }
  return best;
}

double query_sensitivity(std::span<const FeatureSignal> signals, int w) {
  if (signals.empty()) throw InvalidArgument("query_sensitivity: no signals");
  std::vector<Eigen::VectorXd> vectors;
  vectors.reserve(signals.size());
  for (const auto& s : signals) vectors.push_back(s.values);
  return pairwise_sensitivity(vectors, w);
}

SensitivityTable compute_sensitivities(std::span<const FeatureSignal> signals,
                                       std::optional<Index> chunk_size,
                                       bool difference) {
  if (signals.empty()) throw InvalidArgument("compute_sensitivities: no signals");
  std::map<std::pair<std::string, std::string>,
           std::vector<const FeatureSignal*>>
      groups;
  SensitivityTable table;
  table.chunk_size = chunk_size;
  table.difference = difference;
  for (const auto& s : signals) {
    validate(s);
    groups[{s.feature, s.recording_type}].push_back(&s);
    table.n_max = std::max(table.n_max, s.size());
  }
  for (const auto& [key, members] : groups) {
    Index n = 0;
    for (const auto* s : members) n = std::max(n, s->size());
    const auto chunks = chunk_boundaries(n, chunk_size.value_or(n));
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      std::vector<Eigen::VectorXd> parts;
      parts.reserve(members.size());
      for (const auto* s : members) {
        const Index end = std::min(chunks[c].end, s->size());
        const Index len = std::max<Index>(0, end - chunks[c].begin);
        Eigen::VectorXd part = s->values.segment(std::min(chunks[c].begin, s->size()), len);
        if (difference && part.size() > 0) part = difference_transform(part);
        parts.push_back(std::move(part));
      }
      // Shorter signals are zero-padded to the full chunk length.
      for (auto& p : parts) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(chunks[c].size());
        full.head(p.size()) = p;
        p = std::move(full);
      }
      Sensitivity entry;
      entry.delta1 = pairwise_sensitivity(parts, 1);
      entry.delta2 = pairwise_sensitivity(parts, 2);
      table.entries[{key.first, key.second, c}] = entry;
    }
  }
  return table;
}

Eigen::VectorXd difference_transform(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw InvalidArgument("difference_transform: empty input");
  Eigen::VectorXd out(x.size());
  out[0] = x[0];
  for (Index t = 1; t < x.size(); ++t) out[t] = x[t] - x[t - 1];
  return out;
}

Eigen::VectorXd aggregate_transform(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw InvalidArgument("aggregate_transform: empty input");
  Eigen::VectorXd out(x.size());
  out[0] = x[0];
  for (Index t = 1; t < x.size(); ++t) out[t] = out[t - 1] + x[t];
  return out;
}

double fpa_scale(Index n, Index k, double delta2, double epsilon) {
  return std::sqrt(static_cast<double>(n)) * std::sqrt(static_cast<double>(k)) *
         delta2 / epsilon;
}

Eigen::VectorXd laplace_release(const Eigen::VectorXd& x, double lambda,
                                Rng& rng) {
  if (lambda < 0.0) throw InvalidArgument("laplace_release: negative scale");
  Eigen::VectorXd out = x;
  if (lambda == 0.0) return out;
  for (Index i = 0; i < out.size(); ++i) out[i] += laplace_sample(rng, lambda);
  return out;
}

Eigen::VectorXd fourier_release(const Eigen::VectorXd& x, double delta2,
                                double epsilon, Index k, Rng& rng) {
  const Index n = x.size();
  if (k < 1 || k > n) throw InvalidArgument("fpa: require 1 <= k <= n");
  if (delta2 < 0.0) throw InvalidArgument("fpa: negative sensitivity");
  if (!(epsilon > 0.0)) throw InvalidArgument("fpa: epsilon must be positive");
  auto spectrum = spectral::dft_leading(x, k);
  const double lambda = fpa_scale(n, k, delta2, epsilon);
  if (lambda > 0.0) {
    for (Index j = 0; j < k; ++j) {
      const double re = laplace_sample(rng, lambda);
      const double im = laplace_sample(rng, lambda);
      spectrum.coefficients[j] += std::complex<double>(re, im);
    }
  }
  return spectral::idft_padded(spectrum, k, n);
}

Eigen::VectorXd difference_fourier_release(const Eigen::VectorXd& x,
                                           double delta2, double epsilon,
                                           Index k, Rng& rng) {
  return aggregate_transform(
      fourier_release(difference_transform(x), delta2, epsilon, k, rng));
}

namespace {

FeatureSignal with_values(const FeatureSignal& signal, Eigen::VectorXd values) {
  FeatureSignal out;
  out.participant = signal.participant;
  out.feature = signal.feature;
  out.recording_type = signal.recording_type;
  out.step_seconds = signal.step_seconds;
  out.values = std::move(values);
  return out;
}

Index whole_signal_k(const PrivacyBudget& budget, Index n) {
  Index k;
  if (const auto* uniform = std::get_if<Index>(&budget.k)) {
    k = *uniform;
  } else {
    const auto& per_chunk = std::get<std::vector<Index>>(budget.k);
    if (per_chunk.empty()) throw InvalidArgument("fpa: empty coefficient list");
    k = per_chunk.front();
  }
  if (k > n) throw InvalidArgument("fpa: k exceeds signal length");
  return k;
}

template <typename Release>
FeatureSignal chunked(const FeatureSignal& signal,
                      const SensitivityTable& sensitivities,
                      const PrivacyBudget& budget, Rng& rng, Release release) {
  validate(signal);
  budget.validate();
  if (!budget.chunk_size) throw InvalidArgument("chunked mechanism needs a chunk size");
  const auto chunks = chunk_boundaries(signal.size(), *budget.chunk_size);
  // Resolve every chunk's parameters before drawing any noise.
  std::vector<std::pair<double, Index>> params;
  params.reserve(chunks.size());
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    const double d2 =
        sensitivities.at(signal.feature, signal.recording_type, c).delta2;
    params.emplace_back(d2, budget.k_for_chunk(c, chunks[c].size()));
  }
  Eigen::VectorXd out(signal.size());
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    const Eigen::VectorXd part =
        signal.values.segment(chunks[c].begin, chunks[c].size());
    out.segment(chunks[c].begin, chunks[c].size()) =
        release(part, params[c].first, budget.epsilon, params[c].second, rng);
  }
  return with_values(signal, std::move(out));
}

}  // namespace

FeatureSignal lpa(const FeatureSignal& signal, double delta1,
                  const PrivacyBudget& budget, Rng& rng) {
  validate(signal);
  budget.validate();
  if (delta1 < 0.0) throw InvalidArgument("lpa: negative sensitivity");
  return with_values(signal,
                     laplace_release(signal.values, delta1 / budget.epsilon, rng));
}

FeatureSignal fpa(const FeatureSignal& signal, double delta2,
                  const PrivacyBudget& budget, Rng& rng) {
  validate(signal);
  budget.validate();
  const Index k = whole_signal_k(budget, signal.size());
  return with_values(signal, fourier_release(signal.values, delta2,
                                             budget.epsilon, k, rng));
}

FeatureSignal cfpa(const FeatureSignal& signal,
                   const SensitivityTable& sensitivities,
                   const PrivacyBudget& budget, Rng& rng) {
  return chunked(signal, sensitivities, budget, rng, fourier_release);
}

FeatureSignal dcfpa(const FeatureSignal& signal,
                    const SensitivityTable& sensitivities,
                    const PrivacyBudget& budget, Rng& rng) {
  return chunked(signal, sensitivities, budget, rng, difference_fourier_release);
}

FeatureSignal privatize(const FeatureSignal& signal, Mechanism mechanism,
                        const SensitivityTable& sensitivities,
                        const PrivacyBudget& budget, Rng& rng) {
  switch (mechanism) {
    case Mechanism::lpa:
      return lpa(signal,
                 sensitivities.at(signal.feature, signal.recording_type, 0).delta1,
                 budget, rng);
    case Mechanism::fpa:
      return fpa(signal,
                 sensitivities.at(signal.feature, signal.recording_type, 0).delta2,
                 budget, rng);
    case Mechanism::cfpa:
      return cfpa(signal, sensitivities, budget, rng);
    case Mechanism::dcfpa:
      return dcfpa(signal, sensitivities, budget, rng);
  }
  throw InvalidArgument("unknown mechanism");
}

double composed_epsilon(Mechanism mechanism, const PrivacyBudget& budget,
                        Index n) {
  budget.validate();
  switch (mechanism) {
    case Mechanism::lpa:
    case Mechanism::fpa:
    case Mechanism::cfpa:
      // Disjoint chunks compose in parallel: max over chunks of epsilon.
      return budget.epsilon;
    case Mechanism::dcfpa:
      if (budget.accounting == Accounting::single_release) return budget.epsilon;
      return static_cast<double>(std::min(budget.chunk_size.value_or(n), n)) *
             budget.epsilon;
  }
  throw InvalidArgument("unknown mechanism");
}

}  // namespace dp
}  // namespace gpk
