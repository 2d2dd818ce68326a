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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <variant>

namespace gpk {

// Seeded random stream. Every distribution is implemented here on top of
// the raw 64-bit engine so draws are bit-reproducible across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform();
  // Uniform on [lo, hi].
  double uniform(double lo, double hi);
  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

double laplace_inverse_cdf(double u, double lambda);

// Zero-mean Laplace draw with scale lambda (variance 2 lambda^2).
double laplace_sample(Rng& rng, double lambda);

using SeedPart = std::variant<std::string_view, std::int64_t>;

// Stable 64-bit hash over a tuple of labels and indices.
std::uint64_t hash_parts(std::initializer_list<SeedPart> parts);

// base ^ hash(parts): per-trial streams that do not depend on the order in
// which trials are executed.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<SeedPart> parts);

std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace gpk
