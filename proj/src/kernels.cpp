#include "sicreg/kernels.hpp"

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sicreg::kernels {

namespace {
inline Eigen::Index chunk_count(Eigen::Index n) { return (n + kChunk - 1) / kChunk; }
}  // namespace

double sum(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    const Eigen::Index nc = chunk_count(n);
    if (nc <= 1) return v.sum();

    std::vector<double> partial(nc);
#pragma omp parallel for schedule(static) if (n >= 4 * kChunk)
    for (Eigen::Index c = 0; c < nc; ++c) {
        const Eigen::Index lo = c * kChunk;
        const Eigen::Index len = std::min(kChunk, n - lo);
        partial[c] = v.segment(lo, len).sum();
    }
    double total = 0.0;
    for (Eigen::Index c = 0; c < nc; ++c) total += partial[c];
    return total;
}

Eigen::VectorXd xtv(const Eigen::MatrixXd& X, const Eigen::VectorXd& v) {
    const Eigen::Index n = X.rows();
    const Eigen::Index q = X.cols();
    const Eigen::Index nc = chunk_count(n);
    if (nc <= 1) return X.transpose() * v;

    std::vector<Eigen::VectorXd> partial(nc);
#pragma omp parallel for schedule(static) if (n >= 4 * kChunk)
    for (Eigen::Index c = 0; c < nc; ++c) {
        const Eigen::Index lo = c * kChunk;
        const Eigen::Index len = std::min(kChunk, n - lo);
        partial[c] = X.middleRows(lo, len).transpose() * v.segment(lo, len);
    }
    Eigen::VectorXd total = Eigen::VectorXd::Zero(q);
    for (Eigen::Index c = 0; c < nc; ++c) total += partial[c];
    return total;
}

Eigen::MatrixXd xtwx(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
    const Eigen::Index n = X.rows();
    const Eigen::Index q = X.cols();
    const Eigen::Index nc = chunk_count(n);
    if (nc <= 1) {
        Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
        return (A + A.transpose()) / 2.0;
    }

    std::vector<Eigen::MatrixXd> partial(nc);
#pragma omp parallel for schedule(static) if (n >= 4 * kChunk)
    for (Eigen::Index c = 0; c < nc; ++c) {
        const Eigen::Index lo = c * kChunk;
        const Eigen::Index len = std::min(kChunk, n - lo);
        const auto Xc = X.middleRows(lo, len);
        partial[c] = Xc.transpose() * w.segment(lo, len).asDiagonal() * Xc;
    }
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(q, q);
    for (Eigen::Index c = 0; c < nc; ++c) total += partial[c];
    return (total + total.transpose()) / 2.0;
}

Eigen::VectorXd matvec(const Eigen::MatrixXd& X, const Eigen::VectorXd& coef) {
    const Eigen::Index n = X.rows();
    const Eigen::Index nc = chunk_count(n);
    if (nc <= 1) return X * coef;

    Eigen::VectorXd out(n);
#pragma omp parallel for schedule(static) if (n >= 4 * kChunk)
    for (Eigen::Index c = 0; c < nc; ++c) {
        const Eigen::Index lo = c * kChunk;
        const Eigen::Index len = std::min(kChunk, n - lo);
        out.segment(lo, len) = X.middleRows(lo, len) * coef;
    }
    return out;
}

namespace serial {

double sum(const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
    return s;
}

Eigen::VectorXd xtv(const Eigen::MatrixXd& X, const Eigen::VectorXd& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) out[j] += X(i, j) * v[i];
    return out;
}

Eigen::MatrixXd xtwx(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
    const Eigen::Index q = X.cols();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q, q);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < q; ++j)
            for (Eigen::Index k = 0; k < q; ++k) out(j, k) += X(i, j) * w[i] * X(i, k);
    return out;
}

Eigen::VectorXd matvec(const Eigen::MatrixXd& X, const Eigen::VectorXd& coef) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) out[i] += X(i, j) * coef[j];
    return out;
}

}  // namespace serial

}  // namespace sicreg::kernels
