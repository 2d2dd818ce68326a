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

#include "gpk/random.hpp"

#include <cmath>
#include <numbers>

#include "gpk/error.hpp"

namespace gpk {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double Rng::uniform() {
  // 53 random mantissa bits, shifted by half a step to exclude 0 and 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::below: empty range");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double laplace_inverse_cdf(double u, double lambda) {
  if (u < 0.5) return lambda * std::log(2.0 * u);
  if (u == 0.5) return 0.0;
  return -lambda * std::log(2.0 * (1.0 - u));
}

double laplace_sample(Rng& rng, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("laplace_sample: lambda must be positive and finite");
  }
  return laplace_inverse_cdf(rng.uniform(), lambda);
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_parts(std::initializer_list<SeedPart> parts) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& part : parts) {
    if (const auto* s = std::get_if<std::string_view>(&part)) {
      const std::uint64_t len = s->size();
      h = fnv1a(&len, sizeof len, h);
      h = fnv1a(s->data(), s->size(), h);
    } else {
      const auto v = std::get<std::int64_t>(part);
      h = fnv1a(&v, sizeof v, h);
    }
    h = splitmix64(h);
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<SeedPart> parts) {
  return base ^ hash_parts(parts);
}

}  // namespace gpk
