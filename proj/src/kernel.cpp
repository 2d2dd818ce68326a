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

#include "gpk/kernel.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gpk/error.hpp"

namespace gpk::re {

KernelConfig KernelConfig::rbf_sigma(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("rbf: sigma must be positive");
  return rbf(1.0 / (2.0 * sigma * sigma));
}

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols()) throw InvalidArgument(std::string(name) + " must be square");
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-6) {
        throw IntegrityError(std::string(name) + " is not symmetric");
      }
    }
  }
}

}  // namespace

void apply_kernel(Eigen::MatrixXd& k_xy, const Eigen::VectorXd& k_xx,
                  const Eigen::VectorXd& k_yy, const KernelConfig& config) {
  if (config.kind == KernelKind::linear) return;
  if (k_xx.size() != k_xy.rows() || k_yy.size() != k_xy.cols()) {
    throw InvalidArgument("rbf: norm vectors do not match block shape");
  }
  if (!(config.gamma >= 0.0)) throw InvalidArgument("rbf: gamma must be nonnegative");
  const double g = config.gamma;
  for (Index j = 0; j < k_xy.cols(); ++j) {
    for (Index i = 0; i < k_xy.rows(); ++i) {
      k_xy(i, j) = std::exp(-g * ((k_xx[i] + k_yy[j]) - 2.0 * k_xy(i, j)));
    }
  }
}

Eigen::MatrixXd rbf_from_gram(const Eigen::MatrixXd& k_xy, const Eigen::VectorXd& k_xx,
                              const Eigen::VectorXd& k_yy, double gamma) {
  Eigen::MatrixXd out = k_xy;
  apply_kernel(out, k_xx, k_yy, KernelConfig::rbf(gamma));
  return out;
}

GramMatrix assemble_kernel(const Eigen::MatrixXd& k_aa, const Eigen::MatrixXd& k_bb,
                           const Eigen::MatrixXd& k_ab, const KernelConfig& config) {
  check_symmetric(k_aa, "K_AA");
  check_symmetric(k_bb, "K_BB");
  const Index na = k_aa.rows();
  const Index nb = k_bb.rows();
  if (k_ab.rows() != na || k_ab.cols() != nb) {
    throw InvalidArgument("assemble_kernel: K_AB shape does not match diagonal blocks");
  }
  GramMatrix g;
  g.n_a = na;
  g.n_b = nb;
  g.entries.resize(na + nb, na + nb);
  g.entries.topLeftCorner(na, na) = k_aa;
  g.entries.topRightCorner(na, nb) = k_ab;
  g.entries.bottomLeftCorner(nb, na) = k_ab.transpose();
  g.entries.bottomRightCorner(nb, nb) = k_bb;
  // Parties compute their own grams; mirror the upper triangle so the
  // assembled matrix is exactly symmetric.
  for (Index j = 0; j < na + nb; ++j) {
    for (Index i = j + 1; i < na + nb; ++i) g.entries(i, j) = g.entries(j, i);
  }
  if (config.kind == KernelKind::rbf) {
    const Eigen::VectorXd diag = g.entries.diagonal();
    apply_kernel(g.entries, diag, diag, config);
    // Zero squared distance by construction, independent of rounding.
    g.entries.diagonal().setOnes();
  }
  return g;
}

KrrModel krr_fit_inplace(Eigen::MatrixXd& k_train, const Eigen::MatrixXd& targets,
                         double ridge) {
  const Index n = k_train.rows();
  if (k_train.cols() != n || n == 0) throw InvalidArgument("krr: K_train must be square");
  if (targets.cols() != n) throw InvalidArgument("krr: target count does not match K_train");
  if (!(ridge >= 0.0)) throw InvalidArgument("krr: ridge must be nonnegative");
  k_train.diagonal().array() += ridge;
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(k_train);
  if (llt.info() != Eigen::Success ||
      llt.rcond() < std::numeric_limits<double>::epsilon()) {
    throw SolverError("krr: kernel system is singular");
  }
  return {llt.solve(targets.transpose())};
}

KrrModel krr_fit(Eigen::MatrixXd k_train, const Eigen::MatrixXd& targets, double ridge) {
  return krr_fit_inplace(k_train, targets, ridge);
}

Eigen::MatrixXd krr_predict(const KrrModel& model, const Eigen::MatrixXd& k_cross) {
  if (k_cross.rows() != model.alpha.rows()) {
    throw InvalidArgument("krr: K_cross rows must equal training count");
  }
  return model.alpha.transpose() * k_cross;
}

Eigen::Vector3d gaze_vector(double pitch, double yaw) {
  return {-std::cos(pitch) * std::sin(yaw), -std::sin(pitch), -std::cos(pitch) * std::cos(yaw)};
}

double mean_angular_error(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& truth) {
  if (predicted.rows() != 2 || truth.rows() != 2 || predicted.cols() != truth.cols()) {
    throw InvalidArgument("mean_angular_error: expected matching 2 x n matrices");
  }
  if (predicted.cols() == 0) throw InvalidArgument("mean_angular_error: no samples");
  double sum = 0.0;
  for (Index j = 0; j < predicted.cols(); ++j) {
    const double c = gaze_vector(predicted(0, j), predicted(1, j))
                         .dot(gaze_vector(truth(0, j), truth(1, j)));
    sum += std::acos(std::clamp(c, -1.0, 1.0));
  }
  return sum / static_cast<double>(predicted.cols());
}

KrrResult krr_fit_predict(const Eigen::MatrixXd& k_train, const Eigen::MatrixXd& y_train,
                          const Eigen::MatrixXd& k_cross, double ridge,
                          const Eigen::MatrixXd& y_test) {
  const auto model = krr_fit(k_train, y_train, ridge);
  KrrResult r;
  r.predictions = krr_predict(model, k_cross);
  r.mean_angular_error = mean_angular_error(r.predictions, y_test);
  return r;
}

}  // namespace gpk::re
