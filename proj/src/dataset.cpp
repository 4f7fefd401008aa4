#include "sicreg/dataset.hpp"

#include <cmath>

namespace sicreg {

Dataset ingest(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& y, bool standardize) {
    const long n = raw_X.rows();
    const int p = static_cast<int>(raw_X.cols());

    if (y.size() != n)
        throw DimensionMismatch("design has " + std::to_string(n) + " rows but response has " +
                                std::to_string(y.size()));
    if (n < p + 2)
        throw DimensionMismatch("need n >= p + 2 (got n=" + std::to_string(n) +
                                ", p=" + std::to_string(p) + ")");

    for (long i = 0; i < n; ++i) {
        if (!std::isfinite(y[i])) throw NonFinite(i, -1);
        for (int j = 0; j < p; ++j)
            if (!std::isfinite(raw_X(i, j))) throw NonFinite(i, j + 1);
    }

    Dataset d;
    d.y = y;
    d.X.resize(n, p + 1);
    d.X.col(0).setOnes();
    d.scaling.sd = Eigen::VectorXd::Ones(p);
    d.scaling.scaled = standardize;

    for (int j = 0; j < p; ++j) {
        const auto col = raw_X.col(j);
        const double mean = col.mean();
        const double ss = (col.array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd == 0.0) throw ConstantColumn(j + 1);
        if (standardize) {
            d.scaling.sd[j] = sd;
            d.X.col(j + 1) = col / sd;
        } else {
            d.X.col(j + 1) = col;
        }
    }
    return d;
}

ParamVector unstandardize(const ParamVector& theta_std, const ScalingInfo& scaling) {
    if (!scaling.scaled) return theta_std;
    if (scaling.sd.size() != theta_std.p())
        throw DimensionMismatch("scaling info does not match parameter length");

    ParamVector out = theta_std;
    for (int j = 1; j <= theta_std.p(); ++j) {
        out.beta[j] /= scaling.sd[j - 1];
        out.alpha[j] /= scaling.sd[j - 1];
    }
    return out;
}

}  // namespace sicreg
