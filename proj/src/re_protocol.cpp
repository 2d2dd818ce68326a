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

#include "gpk/re_protocol.hpp"

#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

namespace gpk::re {

std::string to_string(Role r) {
  switch (r) {
    case Role::alice: return "alice";
    case Role::bob: return "bob";
    case Role::server: return "server";
  }
  return "?";
}

std::string to_string(MessageKind k) {
  switch (k) {
    case MessageKind::handshake: return "handshake";
    case MessageKind::masks: return "masks";
    case MessageKind::share: return "share";
    case MessageKind::gram: return "gram";
    case MessageKind::targets: return "targets";
    case MessageKind::predictions: return "predictions";
  }
  return "?";
}

std::size_t Transcript::total_payload_bytes() const {
  std::size_t s = 0;
  for (const auto& e : entries) s += e.payload_bytes;
  return s;
}

std::size_t Transcript::dot_product_payload_bytes() const {
  std::size_t s = 0;
  for (const auto& e : entries) {
    if (e.kind == MessageKind::masks || e.kind == MessageKind::share) s += e.payload_bytes;
  }
  return s;
}

std::string Transcript::to_json_lines() const {
  std::string out;
  for (const auto& e : entries) {
    char hash[19];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(e.payload_hash));
    nlohmann::ordered_json j;
    j["step"] = e.step;
    j["from"] = to_string(e.from);
    j["to"] = to_string(e.to);
    j["kind"] = to_string(e.kind);
    j["payload_bytes"] = e.payload_bytes;
    j["payload_hash"] = hash;
    out += j.dump() + "\n";
  }
  return out;
}

std::size_t dot_product_cost_bytes(Eigen::Index n_f, Eigen::Index n_a, Eigen::Index n_b,
                                   std::size_t scalar_bytes) {
  const auto f = static_cast<std::size_t>(n_f);
  const auto a = static_cast<std::size_t>(n_a);
  const auto b = static_cast<std::size_t>(n_b);
  return (f * a + f * b + a + b + 2 * f) * scalar_bytes;
}

void Network::send(Message m) {
  TranscriptEntry e;
  e.step = static_cast<int>(transcript_.entries.size()) + 1;
  e.from = m.from;
  e.to = m.to;
  e.kind = m.kind;
  e.payload_bytes = m.payload.size() * sizeof(double);
  e.payload_hash = fnv1a(m.payload.data(), e.payload_bytes);
  e.rows = m.rows;
  if (record_payloads_) e.payload = m.payload;
  transcript_.entries.push_back(std::move(e));
  queues_[static_cast<int>(m.from)][static_cast<int>(m.to)].push_back(std::move(m));
}

Message Network::receive(Role from, Role to, MessageKind expected) {
  auto& q = queues_[static_cast<int>(from)][static_cast<int>(to)];
  auto& head = heads_[static_cast<int>(from)][static_cast<int>(to)];
  if (head >= q.size()) {
    throw ProtocolError(to_string(to) + " expected " + to_string(expected) + " from " +
                        to_string(from) + " but the channel is empty");
  }
  if (q[head].kind != expected) {
    throw ProtocolError(to_string(to) + " expected " + to_string(expected) + " from " +
                        to_string(from) + " but received " + to_string(q[head].kind));
  }
  Message m = std::move(q[head]);
  ++head;
  if (head == q.size()) {
    q.clear();
    head = 0;
  }
  return m;
}

bool Network::idle() const {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (heads_[i][j] < queues_[i][j].size()) return false;
    }
  }
  return true;
}

namespace {

Message pack(Role from, Role to, MessageKind kind, const Eigen::MatrixXd& block) {
  Message m{from, to, kind, block.rows(), block.cols(), {}};
  m.payload.assign(block.data(), block.data() + block.size());
  return m;
}

Message pack_share(Role from, const EncodedShare<double>& s) {
  const Eigen::Index nf = s.matrix_part.rows();
  const Eigen::Index n = s.matrix_part.cols();
  Eigen::MatrixXd block(nf + 1, n);
  block.topRows(nf) = s.matrix_part;
  block.row(nf) = s.scalar_part.transpose();
  return pack(from, Role::server, MessageKind::share, block);
}

Eigen::Map<const Eigen::MatrixXd> view(const Message& m) {
  if (static_cast<std::size_t>(m.rows * m.cols) != m.payload.size()) {
    throw ProtocolError("malformed " + to_string(m.kind) + " payload");
  }
  return {m.payload.data(), m.rows, m.cols};
}

void check_party(const PartyData& d, const char* name) {
  if (d.features.cols() == 0 || d.features.rows() == 0) {
    throw InvalidArgument(std::string(name) + ": no samples");
  }
  if (d.n_train < 0 || d.n_train > d.features.cols()) {
    throw InvalidArgument(std::string(name) + ": n_train out of range");
  }
  if (d.targets.size() != 0 && (d.targets.rows() != 2 || d.targets.cols() != d.features.cols())) {
    throw InvalidArgument(std::string(name) + ": targets must be 2 x n");
  }
}

Eigen::MatrixXd train_targets(const PartyData& d) {
  if (d.targets.size() == 0) throw InvalidArgument("regression requires targets");
  return d.targets.leftCols(d.n_train);
}

}  // namespace

AliceParty::AliceParty(PartyData data, std::uint64_t mask_seed, const MaskConfig& masks)
    : data_(std::move(data)) {
  Rng rng(mask_seed);
  masks_ = gen_masks<double>(data_.features.rows(), rng, masks);
}

void AliceParty::send_setup(Network& net) {
  Eigen::MatrixXd hello(2, 1);
  hello << static_cast<double>(data_.features.rows()), masks_.r3;
  net.send(pack(Role::alice, Role::bob, MessageKind::handshake, hello));
  Eigen::MatrixXd r(data_.features.rows(), 2);
  r.col(0) = masks_.r1;
  r.col(1) = masks_.r2;
  net.send(pack(Role::alice, Role::bob, MessageKind::masks, r));
}

void AliceParty::send_share(Network& net) {
  net.send(pack_share(Role::alice, encode_alice<double>(data_.features, masks_)));
}

void AliceParty::send_gram(Network& net, bool regress) {
  const Eigen::MatrixXd& x = data_.features;
  net.send(pack(Role::alice, Role::server, MessageKind::gram, x.transpose() * x));
  if (regress) net.send(pack(Role::alice, Role::server, MessageKind::targets, train_targets(data_)));
}

Eigen::MatrixXd AliceParty::receive_predictions(Network& net) {
  return view(net.receive(Role::server, Role::alice, MessageKind::predictions));
}

void BobParty::receive_setup(Network& net) {
  const Message hello = net.receive(Role::alice, Role::bob, MessageKind::handshake);
  const auto h = view(hello);
  if (h.size() != 2) throw HandshakeError("malformed handshake");
  const Eigen::Index nf = data_.features.rows();
  if (h(0, 0) != static_cast<double>(nf)) {
    throw HandshakeError("feature count mismatch: alice has " + std::to_string(h(0, 0)) +
                         ", bob has " + std::to_string(nf));
  }
  const Message masks = net.receive(Role::alice, Role::bob, MessageKind::masks);
  const auto r = view(masks);
  if (r.rows() != nf || r.cols() != 2) throw HandshakeError("mask shape mismatch");
  masks_ = MaskTriple<double>{r.col(0), r.col(1), h(1, 0)};
}

void BobParty::send_share(Network& net) {
  if (!masks_) throw ProtocolError("bob: share requested before masks were received");
  net.send(pack_share(Role::bob, encode_bob<double>(data_.features, *masks_)));
}

void BobParty::send_gram(Network& net, bool regress) {
  const Eigen::MatrixXd& y = data_.features;
  net.send(pack(Role::bob, Role::server, MessageKind::gram, y.transpose() * y));
  if (regress) net.send(pack(Role::bob, Role::server, MessageKind::targets, train_targets(data_)));
}

Eigen::MatrixXd BobParty::receive_predictions(Network& net) {
  return view(net.receive(Role::server, Role::bob, MessageKind::predictions));
}

void ServerParty::receive_shares(Network& net) {
  EncodedShare<double> a, b;
  for (auto* part : {&a, &b}) {
    const Role from = part == &a ? Role::alice : Role::bob;
    const Message m = net.receive(from, Role::server, MessageKind::share);
    const auto block = view(m);
    if (block.rows() < 2) throw ProtocolError("share has no feature rows");
    part->matrix_part = block.topRows(block.rows() - 1);
    part->scalar_part = block.row(block.rows() - 1).transpose();
  }
  if (a.matrix_part.rows() != b.matrix_part.rows()) {
    throw HandshakeError("shares disagree on feature count");
  }
  n_a_ = a.matrix_part.cols();
  n_b_ = b.matrix_part.cols();
  k_ab_ = decode_cross_gram(a, b);
}

void ServerParty::receive_grams(Network& net) {
  k_aa_ = view(net.receive(Role::alice, Role::server, MessageKind::gram));
  k_bb_ = view(net.receive(Role::bob, Role::server, MessageKind::gram));
  if (k_aa_.rows() != n_a_ || k_bb_.rows() != n_b_) {
    throw ProtocolError("gram block size does not match share sample count");
  }
  if (config_.regress) {
    t_a_ = view(net.receive(Role::alice, Role::server, MessageKind::targets));
    t_b_ = view(net.receive(Role::bob, Role::server, MessageKind::targets));
  }
}

namespace {

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

Split pooled_split(Eigen::Index n_a, Eigen::Index train_a, Eigen::Index n_b,
                   Eigen::Index train_b) {
  Split s;
  for (Eigen::Index i = 0; i < train_a; ++i) s.train.push_back(i);
  for (Eigen::Index i = 0; i < train_b; ++i) s.train.push_back(n_a + i);
  for (Eigen::Index i = train_a; i < n_a; ++i) s.test.push_back(i);
  for (Eigen::Index i = train_b; i < n_b; ++i) s.test.push_back(n_a + i);
  return s;
}

// Fits on the pooled training columns and returns test predictions, A's
// test columns first.
Eigen::MatrixXd fit_pooled(const GramMatrix& k, const Eigen::MatrixXd& t_a,
                           const Eigen::MatrixXd& t_b, double ridge) {
  const Split s = pooled_split(k.n_a, t_a.cols(), k.n_b, t_b.cols());
  if (s.train.empty()) throw InvalidArgument("regression requires training samples");
  Eigen::MatrixXd k_train = k.entries(s.train, s.train);
  Eigen::MatrixXd y(2, static_cast<Eigen::Index>(s.train.size()));
  y << t_a, t_b;
  const auto model = krr_fit_inplace(k_train, y, ridge);
  return krr_predict(model, k.entries(s.train, s.test));
}

}  // namespace

void ServerParty::fit_and_reply(Network& net) {
  kernel_ = assemble_kernel(k_aa_, k_bb_, k_ab_, config_.kernel);
  const Eigen::MatrixXd pred = fit_pooled(kernel_, t_a_, t_b_, config_.ridge);
  const Eigen::Index test_a = n_a_ - t_a_.cols();
  net.send(pack(Role::server, Role::alice, MessageKind::predictions, pred.leftCols(test_a)));
  net.send(pack(Role::server, Role::bob, MessageKind::predictions,
                pred.rightCols(pred.cols() - test_a)));
}

ProtocolResult run_protocol(const PartyData& alice_data, const PartyData& bob_data,
                            const ProtocolConfig& config, std::uint64_t seed) {
  check_party(alice_data, "alice");
  check_party(bob_data, "bob");
  Network net(config.record_payloads);
  AliceParty alice(alice_data, derive_seed(seed, {std::string_view("masks")}), config.masks);
  BobParty bob(bob_data);
  ServerParty server(config);

  alice.send_setup(net);
  bob.receive_setup(net);
  alice.send_share(net);
  bob.send_share(net);
  server.receive_shares(net);

  ProtocolResult r;
  if (config.regress) {
    alice.send_gram(net, true);
    bob.send_gram(net, true);
    server.receive_grams(net);
    server.fit_and_reply(net);
    r.predictions_a = alice.receive_predictions(net);
    r.predictions_b = bob.receive_predictions(net);
    r.kernel = server.kernel();
  }
  if (!net.idle()) throw ProtocolError("undelivered messages at end of protocol");
  r.cross_gram = server.cross_gram();
  r.transcript = net.transcript();
  return r;
}

PartyData shuffle_party(const PartyData& data, Rng& rng) {
  const Eigen::Index n = data.features.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // Fisher-Yates within the training and test ranges separately.
  auto shuffle_range = [&](Eigen::Index lo, Eigen::Index hi) {
    for (Eigen::Index i = hi - 1; i > lo; --i) {
      const auto j = lo + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i - lo + 1)));
      std::swap(order[i], order[j]);
    }
  };
  shuffle_range(0, data.n_train);
  shuffle_range(data.n_train, n);
  PartyData out;
  out.n_train = data.n_train;
  out.features = data.features(Eigen::all, order);
  if (data.targets.size() != 0) out.targets = data.targets(Eigen::all, order);
  return out;
}

PlaintextResult run_plaintext(const PartyData& alice, const PartyData& bob,
                              const ProtocolConfig& config) {
  check_party(alice, "alice");
  check_party(bob, "bob");
  if (alice.features.rows() != bob.features.rows()) {
    throw InvalidArgument("plaintext: feature counts differ");
  }
  const Eigen::Index na = alice.features.cols();
  const Eigen::Index nb = bob.features.cols();
  Eigen::MatrixXd z(alice.features.rows(), na + nb);
  z << alice.features, bob.features;
  const Eigen::MatrixXd g = z.transpose() * z;
  PlaintextResult r;
  r.cross_gram = g.topRightCorner(na, nb);
  if (config.regress) {
    r.kernel = assemble_kernel(g.topLeftCorner(na, na), g.bottomRightCorner(nb, nb),
                               r.cross_gram, config.kernel);
    const Eigen::MatrixXd pred =
        fit_pooled(r.kernel, train_targets(alice), train_targets(bob), config.ridge);
    const Eigen::Index test_a = na - alice.n_train;
    r.predictions_a = pred.leftCols(test_a);
    r.predictions_b = pred.rightCols(pred.cols() - test_a);
  }
  return r;
}

bool server_view_contains_raw(const Transcript& transcript, const Eigen::MatrixXd& x,
                              const Eigen::MatrixXd& y) {
  const Eigen::Index nf = x.rows();
  if (y.rows() != nf) throw InvalidArgument("audit: feature counts differ");
  std::unordered_multimap<double, Eigen::VectorXd> raw;
  for (Eigen::Index j = 0; j < x.cols(); ++j) raw.emplace(x(0, j), x.col(j));
  for (Eigen::Index j = 0; j < y.cols(); ++j) raw.emplace(y(0, j), y.col(j));
  for (const auto& e : transcript.entries) {
    if (e.to != Role::server) continue;
    if (e.payload_bytes != 0 && e.payload.empty()) {
      throw InvalidArgument("audit: transcript was recorded without payloads");
    }
    const auto& p = e.payload;
    // Any contiguous run of n_f values, aligned or not.
    for (std::size_t s = 0; s + static_cast<std::size_t>(nf) <= p.size(); ++s) {
      const auto [lo, hi] = raw.equal_range(p[s]);
      for (auto it = lo; it != hi; ++it) {
        if (Eigen::Map<const Eigen::VectorXd>(p.data() + s, nf) == it->second) return true;
      }
    }
  }
  return false;
}

}  // namespace gpk::re
