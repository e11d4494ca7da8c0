#ifndef TAMPERLAB_SERIES_HPP
#define TAMPERLAB_SERIES_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tamperlab {

/// Ordered real-valued sequence with a record of applied transforms.
struct Series {
    std::vector<double> values;
    std::string origin_feature;   // empty when not derived from a residual
    double transform_log_offset = std::numeric_limits<double>::quiet_NaN();  // NaN = not applied
    int transform_diff = 0;       // difference order already applied

    Series() = default;
    explicit Series(std::vector<double> v) : values(std::move(v)) { check_finite(); }

    std::size_t size() const { return values.size(); }

    void check_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) throw std::invalid_argument("series contains non-finite value");
    }
};

inline double series_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double series_variance(const std::vector<double>& v) {
    double m = series_mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

/// d-fold first differencing; output length shrinks by d.
inline Series difference(const Series& s, int d) {
    if (d < 0) throw std::invalid_argument("difference: negative order");
    if (static_cast<std::size_t>(d) >= s.size() && d > 0)
        throw std::invalid_argument("difference: series too short");
    Series out = s;
    for (int k = 0; k < d; ++k) {
        std::vector<double> next(out.values.size() - 1);
        for (std::size_t i = 0; i + 1 < out.values.size(); ++i)
            next[i] = out.values[i + 1] - out.values[i];
        out.values = std::move(next);
    }
    out.transform_diff = s.transform_diff + d;
    return out;
}

constexpr double kLogTransformEps = 1e-6;

/// Offset-log then first lag difference, the stationarity preprocessing
/// applied to residual series before testing and fitting.
inline Series log_lag_transform(const Series& s) {
    if (s.size() < 3) throw std::invalid_argument("log_lag_transform: series too short");
    double min_v = s.values[0];
    for (double v : s.values) min_v = std::min(min_v, v);
    double offset = min_v < 0 ? std::fabs(min_v) : 0.0;
    Series logged;
    logged.origin_feature = s.origin_feature;
    logged.values.reserve(s.size());
    for (double v : s.values) logged.values.push_back(std::log(v + offset + kLogTransformEps));
    Series out = difference(logged, 1);
    out.transform_log_offset = offset;
    out.transform_diff = 1;
    return out;
}

/// Autocorrelation with the biased (divide by n) covariance estimator.
inline std::vector<double> acf(const Series& s, int max_lag) {
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= s.size())
        throw std::invalid_argument("acf: max_lag out of range");
    std::size_t n = s.size();
    double mean = series_mean(s.values);
    double c0 = 0;
    for (double v : s.values) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(n);
    if (c0 == 0) throw std::invalid_argument("acf: zero-variance series");
    std::vector<double> rho(max_lag + 1);
    rho[0] = 1.0;
    for (int h = 1; h <= max_lag; ++h) {
        double c = 0;
        for (std::size_t t = 0; t + h < n; ++t)
            c += (s.values[t] - mean) * (s.values[t + h] - mean);
        rho[h] = (c / static_cast<double>(n)) / c0;
    }
    return rho;
}

/// Durbin-Levinson recursion on the sample ACF; returns lags 1..max_lag.
inline std::vector<double> pacf(const Series& s, int max_lag) {
    std::vector<double> rho = acf(s, max_lag);
    std::vector<double> out(max_lag);
    std::vector<double> phi_prev(max_lag + 1, 0.0), phi_cur(max_lag + 1, 0.0);
    for (int k = 1; k <= max_lag; ++k) {
        double num = rho[k];
        double den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= phi_prev[j] * rho[k - j];
            den -= phi_prev[j] * rho[j];
        }
        double a = (den != 0.0) ? num / den : 0.0;
        phi_cur[k] = a;
        for (int j = 1; j < k; ++j) phi_cur[j] = phi_prev[j] - a * phi_prev[k - j];
        phi_prev = phi_cur;
        out[k - 1] = a;
    }
    return out;
}

} // namespace tamperlab

#endif
