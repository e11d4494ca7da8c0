#ifndef TAMPERLAB_ARIMA_HPP
#define TAMPERLAB_ARIMA_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "tamperlab/optim.hpp"
#include "tamperlab/series.hpp"

namespace tamperlab {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    void validate() const {
        if (p < 0 || d < 0 || q < 0) throw std::invalid_argument("arima order: negative term");
    }
    bool operator==(const ArimaOrder&) const = default;
};

struct ArimaFit {
    ArimaOrder order;
    std::vector<double> phi;    // AR coefficients, 1 - sum phi_i z^i
    std::vector<double> theta;  // MA coefficients, 1 + sum theta_i z^i
    double intercept = 0.0;     // mean of the differenced series
    double sigma2 = 0.0;        // innovation variance from the CSS residuals
    double loglik = 0.0;
    double aic = 0.0;
    bool converged = false;

    int param_count() const { return order.p + order.q + 2; }  // + intercept + variance
};

// ---------------------------------------------------------------------------
// Partial-autocorrelation reparameterization. Coefficients generated from
// partials in (-1,1) always give a polynomial 1 - sum a_i z^i with roots
// outside the unit circle.

inline std::vector<double> pacf_expand(const std::vector<double>& partials) {
    std::vector<double> a(partials.size(), 0.0), prev(partials.size(), 0.0);
    for (std::size_t k = 0; k < partials.size(); ++k) {
        double r = partials[k];
        a[k] = r;
        for (std::size_t j = 0; j < k; ++j) a[j] = prev[j] - r * prev[k - 1 - j];
        prev = a;
    }
    return a;
}

/// Inverse of pacf_expand; requires a stationary coefficient vector.
inline std::vector<double> pacf_contract(std::vector<double> a) {
    std::vector<double> partials(a.size(), 0.0);
    for (std::size_t k = a.size(); k-- > 0;) {
        double r = a[k];
        partials[k] = r;
        if (std::fabs(r) >= 1.0) throw std::invalid_argument("pacf_contract: non-stationary input");
        std::vector<double> prev(k, 0.0);
        for (std::size_t j = 0; j < k; ++j)
            prev[j] = (a[j] + r * a[k - 1 - j]) / (1.0 - r * r);
        a = std::move(prev);
    }
    return partials;
}

/// Smallest root modulus of 1 - sum a_i z^i, via the companion matrix.
inline double min_root_modulus(const std::vector<double>& a) {
    int p = static_cast<int>(a.size());
    while (p > 0 && a[p - 1] == 0.0) --p;
    if (p == 0) return std::numeric_limits<double>::infinity();
    // roots of z^p - a_1 z^{p-1} - ... - a_p, reciprocals of the poly roots
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) comp(0, i) = a[i];
    for (int i = 1; i < p; ++i) comp(i, i - 1) = 1.0;
    Eigen::VectorXcd ev = comp.eigenvalues();
    double max_mod = 0;
    for (int i = 0; i < p; ++i) max_mod = std::max(max_mod, std::abs(ev(i)));
    if (max_mod == 0) return std::numeric_limits<double>::infinity();
    return 1.0 / max_mod;
}

inline double ar_min_root_modulus(const std::vector<double>& phi) { return min_root_modulus(phi); }

inline double ma_min_root_modulus(const std::vector<double>& theta) {
    std::vector<double> a(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) a[i] = -theta[i];
    return min_root_modulus(a);
}

// ---------------------------------------------------------------------------
// Conditional sum of squares

namespace detail {

/// Innovations recursion with zero pre-sample values; returns the residual
/// sum of squares and optionally the residuals themselves.
inline double css_residuals(const std::vector<double>& y, double mu,
                            const std::vector<double>& phi, const std::vector<double>& theta,
                            std::vector<double>* out_resid = nullptr) {
    std::size_t n = y.size();
    int p = static_cast<int>(phi.size());
    int q = static_cast<int>(theta.size());
    std::vector<double> e(n, 0.0);
    double ss = 0;
    for (std::size_t t = 0; t < n; ++t) {
        double pred = 0;
        for (int i = 1; i <= p; ++i)
            if (t >= static_cast<std::size_t>(i)) pred += phi[i - 1] * (y[t - i] - mu);
        for (int j = 1; j <= q; ++j)
            if (t >= static_cast<std::size_t>(j)) pred += theta[j - 1] * e[t - j];
        e[t] = (y[t] - mu) - pred;
        ss += e[t] * e[t];
    }
    if (out_resid) *out_resid = std::move(e);
    return ss;
}

struct ParamMap {
    int p, q;

    // layout: [intercept, ar partials (atanh), ma partials (atanh)]
    void unpack(const Eigen::VectorXd& x, double& mu, std::vector<double>& phi,
                std::vector<double>& theta) const {
        mu = x(0);
        std::vector<double> rp(p), rq(q);
        for (int i = 0; i < p; ++i) rp[i] = std::tanh(x(1 + i));
        for (int j = 0; j < q; ++j) rq[j] = std::tanh(x(1 + p + j));
        phi = pacf_expand(rp);
        std::vector<double> ma_a = pacf_expand(rq);
        theta.resize(q);
        for (int j = 0; j < q; ++j) theta[j] = -ma_a[j];
    }
};

inline double safe_atanh(double r) {
    r = std::clamp(r, -0.98, 0.98);
    return std::atanh(r);
}

} // namespace detail

inline double gaussian_loglik_from_ss(double ss, std::size_t n) {
    double sigma2 = std::max(ss / static_cast<double>(n), 1e-300);
    return -0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

inline double aic(const ArimaFit& fit) {
    return 2.0 * fit.param_count() - 2.0 * fit.loglik;
}

/// CSS fit of an ARMA(p,q) with intercept on an already-differenced series.
/// The difference order in `order` is recorded, not applied.
inline ArimaFit fit_arima(const Series& s, const ArimaOrder& order) {
    order.validate();
    int p = order.p, q = order.q;
    std::size_t n = s.size();
    if (n < static_cast<std::size_t>(10 * (p + q + 1)))
        throw std::invalid_argument("fit_arima: series too short for order");

    ArimaFit fit;
    fit.order = order;

    if (p == 0 && q == 0) {
        fit.intercept = series_mean(s.values);
        double ss = 0;
        for (double v : s.values) ss += (v - fit.intercept) * (v - fit.intercept);
        fit.sigma2 = ss / static_cast<double>(n);
        fit.loglik = gaussian_loglik_from_ss(ss, n);
        fit.aic = aic(fit);
        fit.converged = true;
        return fit;
    }

    detail::ParamMap map{p, q};
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1 + p + q);
    x0(0) = series_mean(s.values);
    if (p > 0) {
        // Yule-Walker style start: sample partials feed the reparameterization
        try {
            std::vector<double> sample_pacf = pacf(s, p);
            for (int i = 0; i < p; ++i) x0(1 + i) = detail::safe_atanh(sample_pacf[i]);
        } catch (const std::invalid_argument&) {
            // zero-variance start handled by the optimizer from the origin
        }
    }

    auto objective = [&](const Eigen::VectorXd& x) {
        double mu;
        std::vector<double> phi, theta;
        map.unpack(x, mu, phi, theta);
        double ss = detail::css_residuals(s.values, mu, phi, theta);
        return std::log(std::max(ss / static_cast<double>(n), 1e-300));
    };

    MinimizeResult opt = minimize_bfgs(objective, x0, 1e-6, 500);

    double mu;
    std::vector<double> phi, theta;
    map.unpack(opt.x, mu, phi, theta);
    double ss = detail::css_residuals(s.values, mu, phi, theta);
    fit.intercept = mu;
    fit.phi = std::move(phi);
    fit.theta = std::move(theta);
    fit.sigma2 = ss / static_cast<double>(n);
    fit.loglik = gaussian_loglik_from_ss(ss, n);
    fit.aic = aic(fit);
    fit.converged = opt.converged;
    return fit;
}

struct OrderSelection {
    ArimaOrder order;
    ArimaFit fit;
    int attempted = 0;  // candidate fits tried over the grid
    int converged = 0;
};

/// Exhaustive AIC grid over p in [0,p_max], q in [0,q_max] at fixed d.
/// The input series is differenced d times here; ties break by smaller
/// p+q, then smaller p.
inline OrderSelection select_order(const Series& s, int p_max = 6, int q_max = 6, int d = 1) {
    Series work = difference(s, d);
    OrderSelection best;
    bool have = false;
    for (int p = 0; p <= p_max; ++p) {
        for (int q = 0; q <= q_max; ++q) {
            ++best.attempted;
            ArimaFit fit;
            try {
                fit = fit_arima(work, ArimaOrder{p, d, q});
            } catch (const std::exception&) {
                continue;
            }
            if (!fit.converged) continue;
            ++best.converged;
            auto key = [](const ArimaFit& f) {
                return std::make_tuple(f.aic, f.order.p + f.order.q, f.order.p);
            };
            if (!have || key(fit) < key(best.fit)) {
                best.fit = fit;
                best.order = fit.order;
                have = true;
            }
        }
    }
    if (!have) throw std::runtime_error("select_order: every candidate fit failed");
    return best;
}

/// One-step-ahead in-sample predictions for the last `window` points,
/// conditioning each on all realized observations before it.
inline std::vector<double> forecast_insample(const ArimaFit& fit, const Series& s,
                                             std::size_t window) {
    std::size_t n = s.size();
    if (window >= n) throw std::invalid_argument("forecast_insample: window too large");
    std::vector<double> resid;
    detail::css_residuals(s.values, fit.intercept, fit.phi, fit.theta, &resid);
    std::vector<double> pred(window);
    for (std::size_t i = 0; i < window; ++i) {
        std::size_t t = n - window + i;
        pred[i] = s.values[t] - resid[t];
    }
    return pred;
}

/// RMSE normalized by the range of the actual sequence; NaN when the
/// actual sequence is constant.
inline double srmse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() != predicted.size() || actual.empty())
        throw std::invalid_argument("srmse: length mismatch");
    double lo = actual[0], hi = actual[0], ss = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        lo = std::min(lo, actual[i]);
        hi = std::max(hi, actual[i]);
        double d = actual[i] - predicted[i];
        ss += d * d;
    }
    if (hi == lo) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(ss / static_cast<double>(actual.size())) / (hi - lo);
}

} // namespace tamperlab

#endif
