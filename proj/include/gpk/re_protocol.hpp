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

// Three-party randomized-encoding computation of the cross gram matrix.
//
// Alice holds X (n_f x n_a), Bob holds Y (n_f x n_b), one sample per column.
// Alice draws masks (r1, r2, r3) and gives them to Bob; each party sends a
// masked share to the server, which recovers X^T Y without seeing X or Y.

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "gpk/error.hpp"
#include "gpk/kernel.hpp"
#include "gpk/random.hpp"

namespace gpk::re {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct MaskConfig {
  double bound = 1e3;
  // Masks are multiples of `quantum`; 0 draws them continuously. On a dyadic
  // grid, data that is itself on a dyadic grid is masked and unmasked with
  // no rounding at all.
  double quantum = 0x1p-12;
};

template <typename Scalar>
struct MaskTriple {
  Vector<Scalar> r1;
  Vector<Scalar> r2;
  Scalar r3 = 0;
};

template <typename Scalar>
struct EncodedShare {
  Matrix<Scalar> matrix_part;  // C1 or C2
  Vector<Scalar> scalar_part;  // C3 or C4
};

namespace detail {

// Wider type for the cancelling sums of masked products.
template <typename Scalar>
using Accumulator = std::conditional_t<(sizeof(Scalar) < sizeof(double)), double, long double>;

inline double draw_mask(Rng& rng, const MaskConfig& config) {
  const double u = rng.uniform(-config.bound, config.bound);
  if (config.quantum <= 0.0) return u;
  const double q = std::round(u / config.quantum) * config.quantum;
  return std::clamp(q, -config.bound, config.bound);
}

}  // namespace detail

template <typename Scalar = double>
MaskTriple<Scalar> gen_masks(Eigen::Index n_f, Rng& rng, const MaskConfig& config = {}) {
  if (n_f < 1) throw InvalidArgument("gen_masks: n_f must be >= 1");
  if (!(config.bound >= 0.0) || !std::isfinite(config.bound)) {
    throw InvalidArgument("gen_masks: bound must be finite and nonnegative");
  }
  MaskTriple<Scalar> m;
  m.r1.resize(n_f);
  m.r2.resize(n_f);
  for (Eigen::Index i = 0; i < n_f; ++i) m.r1[i] = static_cast<Scalar>(detail::draw_mask(rng, config));
  for (Eigen::Index i = 0; i < n_f; ++i) m.r2[i] = static_cast<Scalar>(detail::draw_mask(rng, config));
  m.r3 = static_cast<Scalar>(detail::draw_mask(rng, config));
  return m;
}

/// C1 = X + r1 (per column), C3_i = r2 . X_i + r3.
template <typename Scalar>
EncodedShare<Scalar> encode_alice(const Matrix<Scalar>& x, const MaskTriple<Scalar>& m) {
  if (x.rows() != m.r1.size() || x.rows() != m.r2.size()) {
    throw InvalidArgument("encode_alice: feature count does not match masks");
  }
  using Acc = detail::Accumulator<Scalar>;
  EncodedShare<Scalar> s;
  s.matrix_part = x.colwise() + m.r1;
  // The masked inner product uses the data as actually encoded, C1 - r1, so
  // the masks cancel identically in decoding and only the rounding of x
  // into C1 remains.
  const Matrix<Acc> effective = (s.matrix_part.colwise() - m.r1).template cast<Acc>();
  s.scalar_part = ((effective.transpose() * m.r2.template cast<Acc>()).array() + Acc(m.r3))
                      .template cast<Scalar>();
  return s;
}

/// C2 = Y + r2 (per column), C4_j = r1 . Y_j + r1 . r2 - r3.
template <typename Scalar>
EncodedShare<Scalar> encode_bob(const Matrix<Scalar>& y, const MaskTriple<Scalar>& m) {
  if (y.rows() != m.r1.size() || y.rows() != m.r2.size()) {
    throw InvalidArgument("encode_bob: feature count does not match masks");
  }
  using Acc = detail::Accumulator<Scalar>;
  EncodedShare<Scalar> s;
  s.matrix_part = y.colwise() + m.r2;
  const Vector<Acc> r1 = m.r1.template cast<Acc>();
  const Acc offset = r1.dot(m.r2.template cast<Acc>()) - Acc(m.r3);
  const Matrix<Acc> effective = (s.matrix_part.colwise() - m.r2).template cast<Acc>();
  s.scalar_part = ((effective.transpose() * r1).array() + offset).template cast<Scalar>();
  return s;
}

/// k_ij = C1_i . C2_j - C3_i - C4_j = X_i . Y_j.
template <typename Scalar>
Matrix<Scalar> decode_cross_gram(const EncodedShare<Scalar>& alice,
                                 const EncodedShare<Scalar>& bob) {
  if (alice.matrix_part.rows() != bob.matrix_part.rows()) {
    throw InvalidArgument("decode_cross_gram: feature counts differ");
  }
  if (alice.matrix_part.cols() != alice.scalar_part.size() ||
      bob.matrix_part.cols() != bob.scalar_part.size()) {
    throw InvalidArgument("decode_cross_gram: share parts have inconsistent sample counts");
  }
  using Acc = detail::Accumulator<Scalar>;
  const Eigen::Index n_a = alice.matrix_part.cols();
  const Eigen::Index n_b = bob.matrix_part.cols();
  // Masked products are ~n_f B^2 while the result is O(|x||y|); accumulate
  // wide, one column block at a time to bound memory.
  const Matrix<Acc> c1t = alice.matrix_part.transpose().template cast<Acc>();
  const Vector<Acc> c3 = alice.scalar_part.template cast<Acc>();
  Matrix<Scalar> k(n_a, n_b);
  constexpr Eigen::Index kBlock = 256;
  for (Eigen::Index j0 = 0; j0 < n_b; j0 += kBlock) {
    const Eigen::Index w = std::min(kBlock, n_b - j0);
    Matrix<Acc> block = c1t * bob.matrix_part.middleCols(j0, w).template cast<Acc>();
    block.colwise() -= c3;
    block.rowwise() -= bob.scalar_part.segment(j0, w).transpose().template cast<Acc>();
    k.middleCols(j0, w) = block.template cast<Scalar>();
  }
  return k;
}

// ---------------------------------------------------------------------------
// Message-level protocol.

enum class Role { alice, bob, server };
enum class MessageKind { handshake, masks, share, gram, targets, predictions };

std::string to_string(Role r);
std::string to_string(MessageKind k);

struct Message {
  Role from = Role::alice;
  Role to = Role::server;
  MessageKind kind = MessageKind::handshake;
  Eigen::Index rows = 0;  // payload viewed as a column-major rows x cols block
  Eigen::Index cols = 0;
  std::vector<double> payload;
};

struct TranscriptEntry {
  int step = 0;
  Role from = Role::alice;
  Role to = Role::server;
  MessageKind kind = MessageKind::handshake;
  std::size_t payload_bytes = 0;
  std::uint64_t payload_hash = 0;
  std::vector<double> payload;  // kept only when the network records payloads
  Eigen::Index rows = 0;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;

  std::size_t total_payload_bytes() const;
  // Masks and shares: the traffic of the secure dot-product phase.
  std::size_t dot_product_payload_bytes() const;
  std::string to_json_lines() const;
};

// (n_f n_a + n_f n_b + n_a + n_b + 2 n_f) * d.
std::size_t dot_product_cost_bytes(Eigen::Index n_f, Eigen::Index n_a, Eigen::Index n_b,
                                   std::size_t scalar_bytes = sizeof(double));

/// Ordered point-to-point channels between the three parties. Every send is
/// appended to the transcript.
class Network {
 public:
  explicit Network(bool record_payloads = false) : record_payloads_(record_payloads) {}

  void send(Message m);
  // Next message on the (from -> to) channel; ProtocolError if the channel is
  // empty or the message is not of the expected kind.
  Message receive(Role from, Role to, MessageKind expected);
  bool idle() const;

  const Transcript& transcript() const { return transcript_; }

 private:
  bool record_payloads_;
  std::vector<Message> queues_[3][3];
  std::size_t heads_[3][3] = {};
  Transcript transcript_;
};

// One input party's samples, already in the order used for the computation.
// Columns [0, n_train) are training samples.
struct PartyData {
  Eigen::MatrixXd features;  // n_f x n
  Eigen::MatrixXd targets;   // 2 x n; may be empty when no regression is run
  Eigen::Index n_train = 0;
};

struct ProtocolConfig {
  KernelConfig kernel;
  double ridge = 1e-6;
  MaskConfig masks;
  bool regress = true;          // false stops after the gram phase
  bool record_payloads = false;
};

class AliceParty {
 public:
  AliceParty(PartyData data, std::uint64_t mask_seed, const MaskConfig& masks);
  void send_setup(Network& net);
  void send_share(Network& net);
  void send_gram(Network& net, bool regress);
  Eigen::MatrixXd receive_predictions(Network& net);

 private:
  PartyData data_;
  MaskTriple<double> masks_;
};

class BobParty {
 public:
  explicit BobParty(PartyData data) : data_(std::move(data)) {}
  // HandshakeError when Alice's feature count differs from Bob's.
  void receive_setup(Network& net);
  void send_share(Network& net);
  void send_gram(Network& net, bool regress);
  Eigen::MatrixXd receive_predictions(Network& net);

 private:
  PartyData data_;
  std::optional<MaskTriple<double>> masks_;
};

class ServerParty {
 public:
  explicit ServerParty(const ProtocolConfig& config) : config_(config) {}
  void receive_shares(Network& net);
  void receive_grams(Network& net);
  // Assembles the kernel, fits on training columns and sends each party the
  // predictions for its test columns.
  void fit_and_reply(Network& net);

  const Eigen::MatrixXd& cross_gram() const { return k_ab_; }
  const GramMatrix& kernel() const { return kernel_; }

 private:
  ProtocolConfig config_;
  Eigen::MatrixXd c1_, c2_;
  Eigen::VectorXd c3_, c4_;
  Eigen::MatrixXd k_ab_, k_aa_, k_bb_;
  Eigen::MatrixXd t_a_, t_b_;
  Eigen::Index n_a_ = 0, n_b_ = 0;
  GramMatrix kernel_;
};

struct ProtocolResult {
  Eigen::MatrixXd predictions_a;  // 2 x (n_a - n_train_a)
  Eigen::MatrixXd predictions_b;
  Eigen::MatrixXd cross_gram;
  GramMatrix kernel;  // empty unless regression ran
  Transcript transcript;
};

/// Runs the full message sequence. Inputs are used in the given column
/// order; `shuffle_party` is applied by callers beforehand.
ProtocolResult run_protocol(const PartyData& alice, const PartyData& bob,
                            const ProtocolConfig& config, std::uint64_t seed);

// Random column permutation applied to features and targets together, with
// training columns kept in front.
PartyData shuffle_party(const PartyData& data, Rng& rng);

// Non-private reference: the same kernel and ridge on pooled plaintext.
struct PlaintextResult {
  Eigen::MatrixXd predictions_a;
  Eigen::MatrixXd predictions_b;
  Eigen::MatrixXd cross_gram;
  GramMatrix kernel;
};
PlaintextResult run_plaintext(const PartyData& alice, const PartyData& bob,
                              const ProtocolConfig& config);

// True when a message delivered to the server carries a column equal to a
// raw column of X or Y. Requires a transcript recorded with payloads.
bool server_view_contains_raw(const Transcript& transcript, const Eigen::MatrixXd& x,
                              const Eigen::MatrixXd& y);

}  // namespace gpk::re
