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

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <random>

#include "gpk/dataset.hpp"
#include "gpk/error.hpp"
#include "gpk/kernel.hpp"
#include "gpk/re_protocol.hpp"
#include "json.hpp"

namespace {

using namespace gpk::re;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Entries are multiples of 1/64 in [-8, 8].
MatrixXd grid_matrix(Eigen::Index rows, Eigen::Index cols, std::uint32_t seed) {
  std::mt19937 g(seed);
  std::uniform_int_distribution<int> d(-512, 512);
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = d(g) / 64.0;
  return m;
}

MatrixXd real_matrix(Eigen::Index rows, Eigen::Index cols, std::uint32_t seed) {
  std::mt19937 g(seed);
  std::normal_distribution<double> d;
  MatrixXd m(rows, cols);
  for (auto& v : m.reshaped()) v = d(g);
  return m;
}

// ---------------------------------------------------------- kernels

TEST(Kernel, RbfFromGramMatchesDirectDistance) {
  const MatrixXd x = real_matrix(5, 7, 1), y = real_matrix(5, 4, 2);
  const MatrixXd k = rbf_from_gram(x.transpose() * y, x.colwise().squaredNorm().transpose(),
                                   y.colwise().squaredNorm().transpose(), 0.3);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_NEAR(k(i, j), std::exp(-0.3 * (x.col(i) - y.col(j)).squaredNorm()), 1e-12);
}

TEST(Kernel, SigmaToGamma) {
  EXPECT_DOUBLE_EQ(KernelConfig::rbf_sigma(4.0).gamma, 1.0 / 32.0);
  EXPECT_THROW(KernelConfig::rbf_sigma(0.0), gpk::InvalidArgument);
}

TEST(Kernel, AssembleChecksShapeAndSymmetry) {
  const MatrixXd x = real_matrix(3, 4, 3), y = real_matrix(3, 2, 4);
  const auto g = assemble_kernel(x.transpose() * x, y.transpose() * y, x.transpose() * y,
                                 KernelConfig::linear());
  MatrixXd z(3, 6);
  z << x, y;
  EXPECT_LT((g.entries - z.transpose() * z).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(g.n_a, 4);
  EXPECT_EQ(g.block_ab(), MatrixXd(x.transpose() * y));

  const auto r = assemble_kernel(x.transpose() * x, y.transpose() * y, x.transpose() * y,
                                 KernelConfig::rbf(0.5));
  EXPECT_EQ(r.entries.diagonal(), VectorXd::Ones(6));
  EXPECT_EQ(r.entries, MatrixXd(r.entries.transpose()));

  MatrixXd bad = x.transpose() * x;
  bad(0, 1) += 1.0;
  EXPECT_THROW(assemble_kernel(bad, y.transpose() * y, x.transpose() * y, KernelConfig::linear()),
               gpk::IntegrityError);
  EXPECT_THROW(assemble_kernel(x.transpose() * x, y.transpose() * y, y.transpose() * x,
                               KernelConfig::linear()),
               gpk::InvalidArgument);
}

TEST(Kernel, RbfEntriesInUnitInterval) {
  const MatrixXd x = real_matrix(6, 30, 9);
  const auto g = assemble_kernel(x.transpose() * x, MatrixXd(x.transpose() * x),
                                 MatrixXd(x.transpose() * x), KernelConfig::rbf_sigma(2.0));
  EXPECT_GT(g.entries.minCoeff(), 0.0);
  EXPECT_LE(g.entries.maxCoeff(), 1.0);
  EXPECT_TRUE((g.entries.diagonal().array() == 1.0).all());
}

TEST(Krr, PermutingTrainingRowsLeavesPredictions) {
  const auto set = gpk::io::gen_regression_set(80, 10, 0.0, 4);
  const MatrixXd tr = set.features.leftCols(60), te = set.features.rightCols(20);
  const VectorXd n_tr = tr.colwise().squaredNorm().transpose();
  const VectorXd n_te = te.colwise().squaredNorm().transpose();
  const auto cfg = KernelConfig::rbf(0.1);
  MatrixXd k = tr.transpose() * tr, kc = tr.transpose() * te;
  apply_kernel(k, n_tr, n_tr, cfg);
  apply_kernel(kc, n_tr, n_te, cfg);
  const MatrixXd base = krr_predict(krr_fit(k, set.targets.leftCols(60), 1e-3), kc);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(60);
  perm.setIdentity();
  std::mt19937 g(1);
  std::shuffle(perm.indices().data(), perm.indices().data() + 60, g);
  const MatrixXd kp = perm.transpose() * k * perm;
  const MatrixXd yp = set.targets.leftCols(60) * perm;
  const MatrixXd permuted = krr_predict(krr_fit(kp, yp, 1e-3), perm.transpose() * kc);
  EXPECT_LT((permuted - base).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Krr, MatchesNormalEquationSolve) {
  const MatrixXd x = real_matrix(4, 30, 5);
  const MatrixXd t = real_matrix(2, 30, 6);
  const MatrixXd k = x.transpose() * x;
  const auto model = krr_fit(k, t, 0.1);
  const MatrixXd ref =
      (k + 0.1 * MatrixXd::Identity(30, 30)).fullPivLu().solve(MatrixXd(t.transpose()));
  EXPECT_LT((model.alpha - ref).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(krr_predict(model, k).rows(), 2);
}

TEST(Krr, SingularSystemThrows) {
  const MatrixXd x = real_matrix(2, 10, 7);
  EXPECT_THROW(krr_fit(x.transpose() * x, real_matrix(2, 10, 8), 0.0), gpk::SolverError);
  EXPECT_THROW(krr_fit(MatrixXd::Identity(3, 3), real_matrix(2, 4, 8), 0.0), gpk::InvalidArgument);
}

TEST(Krr, GazeVectorAndAngularError) {
  EXPECT_TRUE(gaze_vector(0, 0).isApprox(Eigen::Vector3d(0, 0, -1)));
  EXPECT_NEAR(gaze_vector(0.3, -1.1).norm(), 1.0, 1e-15);
  MatrixXd a(2, 2), b(2, 2);
  a << 0, 0, 0, 0;
  b << 0, 0, 0.1, -0.2;  // yaw offsets at zero pitch are the angle itself
  EXPECT_NEAR(mean_angular_error(a, b), 0.15, 1e-12);
  EXPECT_THROW(mean_angular_error(a, MatrixXd(3, 2)), gpk::InvalidArgument);
}

// ---------------------------------------------------------- masking

TEST(Masking, DecodesExactlyOnDyadicGrid) {
  for (std::uint32_t s = 0; s < 10; ++s) {
    const MatrixXd x = grid_matrix(36, 50, s), y = grid_matrix(36, 40, 100 + s);
    gpk::Rng rng(s);
    const auto m = gen_masks(36, rng);
    const MatrixXd k = decode_cross_gram(encode_alice(x, m), encode_bob(y, m));
    EXPECT_EQ(k, MatrixXd(x.transpose() * y));
  }
}

TEST(Masking, RealDataWithinRoundoff) {
  const MatrixXd x = real_matrix(36, 60, 1), y = real_matrix(36, 70, 2);
  gpk::Rng rng(3);
  const auto m = gen_masks(36, rng);
  const MatrixXd k = decode_cross_gram(encode_alice(x, m), encode_bob(y, m));
  // Masks of size 1e3 give products near 36e6; the loss is a few ulps of that.
  EXPECT_LT((k - x.transpose() * y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Masking, FloatScalarInstantiates) {
  using Mf = Matrix<float>;
  const Mf x = grid_matrix(4, 3, 1).cast<float>(), y = grid_matrix(4, 5, 2).cast<float>();
  gpk::Rng rng(4);
  const auto m = gen_masks<float>(4, rng, MaskConfig{8.0, 0.25});
  EXPECT_EQ(decode_cross_gram(encode_alice(x, m), encode_bob(y, m)), Mf(x.transpose() * y));
}

TEST(Masking, ZeroBoundIsIdentityEncoding) {
  const MatrixXd x = real_matrix(5, 4, 1), y = real_matrix(5, 3, 2);
  gpk::Rng rng(1);
  const auto m = gen_masks(5, rng, MaskConfig{0.0});
  EXPECT_TRUE(m.r1.isZero(0) && m.r2.isZero(0) && m.r3 == 0.0);
  const auto a = encode_alice(x, m);
  const auto b = encode_bob(y, m);
  EXPECT_EQ(a.matrix_part, x);
  EXPECT_TRUE(a.scalar_part.isZero(0));
  EXPECT_EQ(b.matrix_part, y);
  EXPECT_TRUE(b.scalar_part.isZero(0));
}

TEST(Masking, DecodedGramIndependentOfMaskSeed) {
  const MatrixXd gx = grid_matrix(36, 20, 3), gy = grid_matrix(36, 25, 4);
  const MatrixXd rx = real_matrix(36, 20, 5), ry = real_matrix(36, 25, 6);
  gpk::Rng r1(10), r2(11);
  const auto m1 = gen_masks(36, r1), m2 = gen_masks(36, r2);
  EXPECT_EQ(decode_cross_gram(encode_alice(gx, m1), encode_bob(gy, m1)),
            decode_cross_gram(encode_alice(gx, m2), encode_bob(gy, m2)));
  EXPECT_LT((decode_cross_gram(encode_alice(rx, m1), encode_bob(ry, m1)) -
             decode_cross_gram(encode_alice(rx, m2), encode_bob(ry, m2)))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(Masking, MasksAreBoundedAndQuantized) {
  gpk::Rng rng(5);
  const auto m = gen_masks(200, rng);
  for (double v : m.r1) {
    EXPECT_LE(std::abs(v), 1e3);
    EXPECT_EQ(v * 4096.0, std::round(v * 4096.0));
  }
  EXPECT_THROW(gen_masks(0, rng), gpk::InvalidArgument);
  EXPECT_THROW(encode_alice(MatrixXd(5, 2), m), gpk::InvalidArgument);
}

TEST(Masking, SharesHideColumns) {
  const MatrixXd x = grid_matrix(6, 4, 9);
  gpk::Rng rng(1);
  const auto m = gen_masks(6, rng);
  const auto s = encode_alice(x, m);
  for (int j = 0; j < 4; ++j) EXPECT_NE(s.matrix_part.col(j), x.col(j));
}

// ---------------------------------------------------------- protocol

PartyData party(Eigen::Index n, Eigen::Index n_train, std::uint64_t seed) {
  const auto set = gpk::io::gen_regression_set(n, 36, 0.0, seed);
  return {set.features, set.targets, n_train};
}

TEST(Protocol, CommunicationCostFormula) {
  EXPECT_EQ(dot_product_cost_bytes(36, 8000, 8000), 4736576u);
  const auto a = party(30, 20, 1), b = party(25, 15, 2);
  ProtocolConfig cfg;
  cfg.regress = false;
  const auto r = run_protocol(a, b, cfg, 1);
  EXPECT_EQ(r.transcript.dot_product_payload_bytes(), dot_product_cost_bytes(36, 30, 25));
  EXPECT_EQ(r.predictions_a.size(), 0);
}

TEST(Protocol, MatchesPlaintextOnGridData) {
  PartyData a{grid_matrix(8, 30, 1), real_matrix(2, 30, 2), 20};
  PartyData b{grid_matrix(8, 25, 3), real_matrix(2, 25, 4), 18};
  ProtocolConfig cfg;
  cfg.kernel = KernelConfig::rbf(0.05);
  cfg.ridge = 1e-3;
  const auto p = run_protocol(a, b, cfg, 7);
  const auto q = run_plaintext(a, b, cfg);
  EXPECT_EQ(p.cross_gram, q.cross_gram);
  EXPECT_EQ(p.kernel.entries, q.kernel.entries);
  EXPECT_EQ(p.predictions_a, q.predictions_a);
  EXPECT_EQ(p.predictions_b, q.predictions_b);
  EXPECT_EQ(p.predictions_a.cols(), 10);
  EXPECT_EQ(p.predictions_b.cols(), 7);
}

TEST(Protocol, PooledFitMatchesDirectKrr) {
  const auto a = party(60, 45, 3), b = party(50, 40, 4);
  ProtocolConfig cfg;
  cfg.kernel = KernelConfig::rbf_sigma(4.0);
  cfg.ridge = 1e-3;
  const auto p = run_protocol(a, b, cfg, 2);
  // Direct evaluation on the concatenated raw features.
  MatrixXd tr(36, 85), te(36, 25), ytr(2, 85);
  tr << a.features.leftCols(45), b.features.leftCols(40);
  te << a.features.rightCols(15), b.features.rightCols(10);
  ytr << a.targets.leftCols(45), b.targets.leftCols(40);
  auto rbf = [&](const MatrixXd& u, const MatrixXd& v) {
    MatrixXd k(u.cols(), v.cols());
    for (int i = 0; i < u.cols(); ++i)
      for (int j = 0; j < v.cols(); ++j) k(i, j) = std::exp(-(u.col(i) - v.col(j)).squaredNorm() / 32.0);
    return k;
  };
  const MatrixXd alpha = (rbf(tr, tr) + 1e-3 * MatrixXd::Identity(85, 85)).ldlt().solve(MatrixXd(ytr.transpose()));
  const MatrixXd pred = alpha.transpose() * rbf(tr, te);
  EXPECT_LT((p.predictions_a - pred.leftCols(15)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((p.predictions_b - pred.rightCols(10)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Protocol, ServerNeverSeesRawColumns) {
  PartyData a{grid_matrix(8, 20, 5), real_matrix(2, 20, 6), 15};
  PartyData b{grid_matrix(8, 20, 7), real_matrix(2, 20, 8), 15};
  ProtocolConfig cfg;
  cfg.record_payloads = true;
  cfg.regress = false;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = run_protocol(a, b, cfg, seed);
    EXPECT_FALSE(server_view_contains_raw(r.transcript, a.features, b.features)) << seed;
  }

  cfg.record_payloads = false;
  EXPECT_THROW(server_view_contains_raw(run_protocol(a, b, cfg, 3).transcript, a.features,
                                        b.features),
               gpk::InvalidArgument);
}

TEST(Protocol, AuditDetectsLeakedColumn) {
  const MatrixXd x = grid_matrix(4, 3, 1), y = grid_matrix(4, 3, 2);
  Transcript t;
  TranscriptEntry e;
  e.to = Role::server;
  e.payload = {9.0};
  for (int i = 0; i < 4; ++i) e.payload.push_back(y(i, 2));
  e.payload_bytes = e.payload.size() * 8;
  t.entries.push_back(e);
  EXPECT_TRUE(server_view_contains_raw(t, x, y));
}

TEST(Protocol, TranscriptOrderAndJson) {
  const auto a = party(12, 8, 5), b = party(10, 6, 6);
  ProtocolConfig cfg;
  const auto r = run_protocol(a, b, cfg, 4);
  std::vector<std::string> kinds;
  for (const auto& e : r.transcript.entries) kinds.push_back(to_string(e.kind));
  EXPECT_EQ(kinds, (std::vector<std::string>{"handshake", "masks", "share", "share", "gram",
                                             "targets", "gram", "targets", "predictions",
                                             "predictions"}));
  const std::string lines = r.transcript.to_json_lines();
  std::size_t count = 0, pos = 0;
  while ((pos = lines.find('\n', pos)) != std::string::npos) ++count, ++pos;
  EXPECT_EQ(count, r.transcript.entries.size());
  const auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
  EXPECT_EQ(first["from"], "alice");
  EXPECT_EQ(first["to"], "bob");
  EXPECT_EQ(first["payload_hash"].get<std::string>().size(), 16u);
  EXPECT_EQ(run_protocol(a, b, cfg, 4).transcript.to_json_lines(), lines);
  EXPECT_NE(run_protocol(a, b, cfg, 5).transcript.to_json_lines(), lines);
}

TEST(Protocol, FeatureMismatchIsHandshakeError) {
  const auto a = party(12, 8, 5);
  PartyData b{MatrixXd::Ones(35, 10), MatrixXd::Zero(2, 10), 5};
  EXPECT_THROW(run_protocol(a, b, ProtocolConfig{}, 1), gpk::HandshakeError);
}

TEST(Protocol, NetworkRejectsWrongKind) {
  Network net;
  net.send({Role::alice, Role::bob, MessageKind::masks, 1, 1, {1.0}});
  EXPECT_THROW(net.receive(Role::alice, Role::bob, MessageKind::handshake), gpk::ProtocolError);
  EXPECT_THROW(net.receive(Role::bob, Role::server, MessageKind::share), gpk::ProtocolError);
}

TEST(Protocol, ShuffleKeepsSplitMembership) {
  const auto a = party(20, 12, 7);
  gpk::Rng rng(3);
  const auto s = shuffle_party(a, rng);
  auto contains = [](const MatrixXd& m, Eigen::Index lo, Eigen::Index hi, const VectorXd& c) {
    for (Eigen::Index j = lo; j < hi; ++j)
      if (m.col(j) == c) return true;
    return false;
  };
  for (Eigen::Index j = 0; j < 20; ++j) {
    const bool train = j < 12;
    EXPECT_TRUE(contains(a.features, train ? 0 : 12, train ? 12 : 20, s.features.col(j)));
  }
  EXPECT_NE(s.features, a.features);
}

}  // namespace
