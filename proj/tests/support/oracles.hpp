#pragma once

// Reference computations used only by tests. Each one takes the slow,
// obvious route so it stays independent of the library code it checks.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subkb/embedding.hpp"
#include "subkb/subspace.hpp"
#include "subkb/vector_fit.hpp"

namespace subkb::testing {

/// Cyclic Jacobi rotations on a symmetric matrix. Eigenvalues descending,
/// eigenvectors in the matching columns.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tolerance = 1e-15, int max_sweeps = 100);

/// Projector onto the span of the top-k eigenvectors of V V^T.
Eigen::MatrixXd gram_projector(const Eigen::MatrixXd& columns, int k);

/// Ordered-pair co-occurrence counts by scanning every position against
/// every other position within the window.
std::map<std::pair<std::string, std::string>, std::uint64_t> brute_force_cooccurrence(
    const std::vector<std::string>& tokens, const std::set<std::string>& vocab, int window);

/// Word -> count with std::map, one pass.
std::map<std::string, std::uint64_t> brute_force_counts(const std::vector<std::string>& tokens);

/// Squared-norm loss over a dense, fully materialized count matrix.
double naive_sn_loss(const Eigen::MatrixXd& counts, const Eigen::MatrixXd& vectors, double z, double x_max,
                     double alpha);

/// Regularized fit loss written as one loop over a dense count vector
/// indexed by embedding id.
double naive_fit_loss(const Eigen::VectorXd& v, const Eigen::VectorXd& b, double z, const Eigen::VectorXd& counts,
                      const Eigen::MatrixXd& emb, const Eigen::MatrixXd& basis, double lambda);

/// Central finite-difference gradient of f at x.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double step);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor).
double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-6);

}  // namespace subkb::testing

namespace subkb::testing {
/// ||a - b|| / max(||a||, ||b||).
inline double relative_norm_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}
}  // namespace subkb::testing
