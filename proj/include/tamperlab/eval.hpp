#ifndef TAMPERLAB_EVAL_HPP
#define TAMPERLAB_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "tamperlab/arima.hpp"

namespace tamperlab {

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // fpr/tpr non-decreasing, (0,0) to (1,1)
    double auc = 0.0;
};

/// Threshold sweep over the unique score values; positive = tampered,
/// predicted positive at score >= threshold. Trapezoid AUC.
inline RocCurve roc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("roc: length mismatch");
    std::size_t pos = 0;
    for (bool l : labels) pos += l ? 1 : 0;
    std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("roc: both classes must be present");

    std::vector<std::size_t> idx(scores.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        double v = scores[idx[i]];
        // group ties: advance through every sample sharing this score
        while (i < idx.size() && scores[idx[i]] == v) {
            if (labels[idx[i]]) ++tp;
            else ++fp;
            ++i;
        }
        curve.points.push_back({v, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
    }
    double auc = 0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const RocPoint& a = curve.points[k - 1];
        const RocPoint& b = curve.points[k];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    curve.auc = auc;
    return curve;
}

/// Youden point: argmax (tpr - fpr); ties break to the lower threshold.
inline double optimal_threshold(const RocCurve& curve) {
    if (curve.points.empty()) throw std::invalid_argument("optimal_threshold: empty curve");
    double best_j = -1.0;
    double best_thr = 0.0;
    for (const RocPoint& p : curve.points) {
        if (!std::isfinite(p.threshold)) continue;
        double j = p.tpr - p.fpr;
        if (j > best_j || (j == best_j && p.threshold < best_thr)) {
            best_j = j;
            best_thr = p.threshold;
        }
    }
    return best_thr;
}

struct ConfusionReport {
    std::size_t tn = 0, fp = 0, fn = 0, tp = 0;
    double accuracy = 0.0;
    double f1 = std::numeric_limits<double>::quiet_NaN();  // NaN = undefined

    bool f1_defined() const { return !std::isnan(f1); }
};

inline ConfusionReport confusion(const std::vector<double>& scores,
                                 const std::vector<bool>& labels, double threshold) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionReport r;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool pred = scores[i] >= threshold;
        if (pred && labels[i]) ++r.tp;
        else if (pred && !labels[i]) ++r.fp;
        else if (!pred && labels[i]) ++r.fn;
        else ++r.tn;
    }
    r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(scores.size());
    if (r.tp + r.fp + r.fn > 0 && r.tp > 0)
        r.f1 = 2.0 * r.tp / static_cast<double>(2 * r.tp + r.fp + r.fn);
    return r;
}

/// sRMSE between paired normal/tampered residuals; the normal series
/// supplies the range normalizer.
inline double deviation_srmse(const std::vector<double>& normal_residuals,
                              const std::vector<double>& tampered_residuals) {
    return srmse(normal_residuals, tampered_residuals);
}

/// Two-sided unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom.
inline double welch_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_ttest: samples too small");
    auto stats = [](const std::vector<double>& v) {
        double m = series_mean(v);
        double s2 = 0;
        for (double x : v) s2 += (x - m) * (x - m);
        s2 /= static_cast<double>(v.size() - 1);
        return std::make_pair(m, s2);
    };
    auto [ma, va] = stats(a);
    auto [mb, vb] = stats(b);
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    double se2 = va / na + vb / nb;
    if (se2 == 0) {
        if (ma == mb) return 1.0;
        throw std::invalid_argument("welch_ttest: zero variance in both samples");
    }
    double t = (ma - mb) / std::sqrt(se2);
    double df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(dist, -std::fabs(t));
}

/// Absolute robust z-scores: |x - median| / MAD, with median and MAD taken
/// over the first warmup_count samples. Falls back to the mean absolute
/// deviation, then to 1, when the MAD degenerates to zero.
inline std::vector<double> robust_abs_zscores(const std::vector<double>& values,
                                              std::size_t warmup_count) {
    if (values.empty()) throw std::invalid_argument("robust_abs_zscores: empty input");
    warmup_count = std::clamp<std::size_t>(warmup_count, 1, values.size());
    std::vector<double> w(values.begin(), values.begin() + warmup_count);
    auto median_of = [](std::vector<double> v) {
        std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + mid, v.end());
        double hi = v[mid];
        if (v.size() % 2 == 1) return hi;
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        return (hi + v[mid - 1]) / 2.0;
    };
    double med = median_of(w);
    std::vector<double> dev(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dev[i] = std::fabs(w[i] - med);
    double mad = median_of(dev);
    if (mad == 0) {
        double mean_dev = series_mean(dev);
        mad = mean_dev > 0 ? mean_dev : 1.0;
    }
    std::vector<double> z(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) z[i] = std::fabs(values[i] - med) / mad;
    return z;
}

} // namespace tamperlab

#endif
