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

// Kernel matrices assembled from gram blocks, and kernel ridge regression.

#pragma once

#include <Eigen/Core>

namespace gpk::re {

using Eigen::Index;

enum class KernelKind { linear, rbf };

struct KernelConfig {
  KernelKind kind = KernelKind::linear;
  double gamma = 0.0;  // rbf only: exp(-gamma * squared distance)

  static KernelConfig linear() { return {}; }
  static KernelConfig rbf(double gamma) { return {KernelKind::rbf, gamma}; }
  // gamma = 1 / (2 sigma^2)
  static KernelConfig rbf_sigma(double sigma);
};

// Pooled kernel over parties A then B.
struct GramMatrix {
  Eigen::MatrixXd entries;
  Index n_a = 0;
  Index n_b = 0;

  auto block_aa() const { return entries.topLeftCorner(n_a, n_a); }
  auto block_ab() const { return entries.topRightCorner(n_a, n_b); }
  auto block_bb() const { return entries.bottomRightCorner(n_b, n_b); }
};

// Entrywise exp(-gamma (k_xx - 2 k_xy + k_yy)) for a block of dot products
// k_xy with the rows' and columns' squared norms.
Eigen::MatrixXd rbf_from_gram(const Eigen::MatrixXd& k_xy, const Eigen::VectorXd& k_xx,
                              const Eigen::VectorXd& k_yy, double gamma);

// Applies the kernel to a dot-product block in place.
void apply_kernel(Eigen::MatrixXd& k_xy, const Eigen::VectorXd& k_xx,
                  const Eigen::VectorXd& k_yy, const KernelConfig& config);

/// Concatenates [[K_AA, K_AB], [K_AB^T, K_BB]] and applies the kernel.
/// Diagonal blocks asymmetric beyond 1e-6 raise IntegrityError.
GramMatrix assemble_kernel(const Eigen::MatrixXd& k_aa, const Eigen::MatrixXd& k_bb,
                           const Eigen::MatrixXd& k_ab, const KernelConfig& config);

struct KrrModel {
  Eigen::MatrixXd alpha;  // n_train x target dimension
};

/// Solves (K + ridge I) alpha = y. `targets` holds one sample per column.
/// The factorization overwrites `k_train`, which lets the largest kernels be
/// fitted without a second copy. Throws SolverError when the system is
/// numerically singular.
KrrModel krr_fit_inplace(Eigen::MatrixXd& k_train, const Eigen::MatrixXd& targets,
                         double ridge);
KrrModel krr_fit(Eigen::MatrixXd k_train, const Eigen::MatrixXd& targets, double ridge);

// Predictions (one sample per column) from K_cross = n_train x n_test.
Eigen::MatrixXd krr_predict(const KrrModel& model, const Eigen::MatrixXd& k_cross);

// Unit gaze direction for (pitch, yaw) in radians.
Eigen::Vector3d gaze_vector(double pitch, double yaw);

// Mean angle in radians between predicted and true gaze directions; both
// arguments are 2 x n (pitch, yaw).
double mean_angular_error(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& truth);

struct KrrResult {
  Eigen::MatrixXd predictions;
  double mean_angular_error = 0.0;
};

KrrResult krr_fit_predict(const Eigen::MatrixXd& k_train, const Eigen::MatrixXd& y_train,
                          const Eigen::MatrixXd& k_cross, double ridge,
                          const Eigen::MatrixXd& y_test);

}  // namespace gpk::re
