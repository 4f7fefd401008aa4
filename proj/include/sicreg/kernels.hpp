#pragma once

#include <Eigen/Dense>

namespace sicreg::kernels {

// Row-chunk size for parallel reductions. The chunk grid is fixed, and
// partial results are combined in chunk order, so every reduction is
// bit-identical regardless of the number of OpenMP threads.
inline constexpr Eigen::Index kChunk = 2048;

// sum_i v[i]
double sum(const Eigen::VectorXd& v);

// X^T v
Eigen::VectorXd xtv(const Eigen::MatrixXd& X, const Eigen::VectorXd& v);

// X^T diag(w) X, symmetric
Eigen::MatrixXd xtwx(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);

// X * coef
Eigen::VectorXd matvec(const Eigen::MatrixXd& X, const Eigen::VectorXd& coef);

// Plain ordered-loop implementations, kept as the reference the parallel
// kernels are tested and benchmarked against.
namespace serial {

double sum(const Eigen::VectorXd& v);
Eigen::VectorXd xtv(const Eigen::MatrixXd& X, const Eigen::VectorXd& v);
Eigen::MatrixXd xtwx(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);
Eigen::VectorXd matvec(const Eigen::MatrixXd& X, const Eigen::VectorXd& coef);

}  // namespace serial

}  // namespace sicreg::kernels
