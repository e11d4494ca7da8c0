#ifndef TAMPERLAB_STATIONARITY_HPP
#define TAMPERLAB_STATIONARITY_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tamperlab/series.hpp"

namespace tamperlab {

// 5% asymptotic critical values (constant-only ADF, level-stationarity KPSS)
constexpr double kAdfCritical5 = -2.861;
constexpr double kKpssCritical5 = 0.463;

struct StationarityReport {
    double adf_stat = 0.0;
    bool adf_reject_unit_root = false;
    double kpss_stat = 0.0;
    bool kpss_accept_stationary = false;
};

namespace detail {

struct OlsResult {
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
};

inline OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::runtime_error("singular regression design");
    OlsResult r;
    r.beta = ldlt.solve(X.transpose() * y);
    Eigen::VectorXd resid = y - X * r.beta;
    double dof = static_cast<double>(X.rows() - X.cols());
    if (dof <= 0) throw std::runtime_error("singular regression design");
    double s2 = resid.squaredNorm() / dof;
    Eigen::MatrixXd cov =
        s2 * ldlt.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    r.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return r;
}

} // namespace detail

/// Augmented Dickey-Fuller with constant, no trend. Lag order from the
/// Schwert rule floor(12*(n/100)^(1/4)); statistic is the t-ratio of the
/// lagged-level coefficient, rejecting the unit root below -2.861.
inline std::pair<double, bool> adf_test(const Series& s) {
    std::size_t n = s.size();
    if (n < 30) throw std::invalid_argument("adf_test: series too short");
    int lag = static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
    const std::vector<double>& y = s.values;
    // rows: t = lag+1 .. n-1 over dy_t
    int rows = static_cast<int>(n) - 1 - lag;
    int cols = 2 + lag;  // constant, y_{t-1}, dy_{t-1..lag}
    if (rows <= cols) throw std::invalid_argument("adf_test: series too short for lag order");
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) {
        int t = lag + 1 + r;
        b(r) = y[t] - y[t - 1];
        X(r, 0) = 1.0;
        X(r, 1) = y[t - 1];
        for (int i = 1; i <= lag; ++i) X(r, 1 + i) = y[t - i] - y[t - i - 1];
    }
    detail::OlsResult fit = detail::ols(X, b);
    if (fit.se(1) == 0) throw std::runtime_error("adf_test: degenerate regression");
    double stat = fit.beta(1) / fit.se(1);
    return {stat, stat < kAdfCritical5};
}

/// KPSS level-stationarity statistic with Newey-West long-run variance
/// (Bartlett kernel, bandwidth floor(4*(n/100)^(1/4))). Accepts the
/// stationary null below 0.463.
inline std::pair<double, bool> kpss_test(const Series& s) {
    std::size_t n = s.size();
    if (n < 30) throw std::invalid_argument("kpss_test: series too short");
    double mean = series_mean(s.values);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = s.values[i] - mean;
    double gamma0 = 0;
    for (double v : e) gamma0 += v * v;
    if (gamma0 == 0) throw std::invalid_argument("kpss_test: zero-variance series");
    gamma0 /= static_cast<double>(n);

    int bw = static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 0.25)));
    double lrv = gamma0;
    for (int l = 1; l <= bw; ++l) {
        double gamma = 0;
        for (std::size_t t = l; t < n; ++t) gamma += e[t] * e[t - l];
        gamma /= static_cast<double>(n);
        lrv += 2.0 * (1.0 - l / (bw + 1.0)) * gamma;
    }

    double cum = 0, sum_s2 = 0;
    for (std::size_t t = 0; t < n; ++t) {
        cum += e[t];
        sum_s2 += cum * cum;
    }
    double stat = sum_s2 / (static_cast<double>(n) * n * lrv);
    return {stat, stat < kKpssCritical5};
}

inline StationarityReport stationarity_report(const Series& s) {
    StationarityReport r;
    auto [a, a_rej] = adf_test(s);
    auto [k, k_acc] = kpss_test(s);
    r.adf_stat = a;
    r.adf_reject_unit_root = a_rej;
    r.kpss_stat = k;
    r.kpss_accept_stationary = k_acc;
    return r;
}

} // namespace tamperlab

#endif
