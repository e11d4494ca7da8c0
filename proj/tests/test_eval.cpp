#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "tamperlab/eval.hpp"

using namespace tamperlab;
using Catch::Approx;

TEST_CASE("roc on perfectly separated scores") {
    std::vector<double> scores = {0.1, 0.2, 0.3, 0.9, 1.0, 1.1};
    std::vector<bool> labels = {false, false, false, true, true, true};
    RocCurve c = roc(scores, labels);
    REQUIRE(c.auc == Approx(1.0));
    REQUIRE(c.points.front().fpr == 0.0);
    REQUIRE(c.points.front().tpr == 0.0);
    REQUIRE(c.points.back().fpr == 1.0);
    REQUIRE(c.points.back().tpr == 1.0);
    // monotone along the sweep
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        REQUIRE(c.points[i].fpr >= c.points[i - 1].fpr);
        REQUIRE(c.points[i].tpr >= c.points[i - 1].tpr);
    }
    double thr = optimal_threshold(c);
    REQUIRE(thr > 0.3);
    REQUIRE(thr <= 0.9);
    ConfusionReport conf = confusion(scores, labels, thr);
    REQUIRE(conf.accuracy == 1.0);
    REQUIRE(conf.f1 == Approx(1.0));
}

TEST_CASE("roc hand oracle with ties") {
    // scores 3,2,2,1 with labels +,+,-,-: sweep gives (0,0.5) then (0.5,1) then (1,1)
    std::vector<double> scores = {3, 2, 2, 1};
    std::vector<bool> labels = {true, true, false, false};
    RocCurve c = roc(scores, labels);
    REQUIRE(c.points.size() == 4);
    REQUIRE(c.points[1].threshold == 3.0);
    REQUIRE(c.points[1].tpr == Approx(0.5));
    REQUIRE(c.points[1].fpr == 0.0);
    REQUIRE(c.points[2].tpr == Approx(1.0));
    REQUIRE(c.points[2].fpr == Approx(0.5));
    // trapezoid: 0.5*0 + (0.5)*(0.5+1)/2 + (0.5)*1 = 0.875
    REQUIRE(c.auc == Approx(0.875).margin(1e-12));
}

TEST_CASE("roc rejects single-class inputs") {
    REQUIRE_THROWS_AS(roc({1, 2}, {true, true}), std::invalid_argument);
    REQUIRE_THROWS_AS(roc({1, 2}, {false, false}), std::invalid_argument);
    REQUIRE_THROWS_AS(roc({1.0}, {true, false}), std::invalid_argument);
}

TEST_CASE("random scores give a near-half AUC") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t n = 10000;
    std::vector<double> scores(n);
    std::vector<bool> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = u(rng);
        labels[i] = u(rng) < 0.5;
    }
    RocCurve c = roc(scores, labels);
    REQUIRE(c.auc >= 0.48);
    REQUIRE(c.auc <= 0.52);
    double thr = optimal_threshold(c);
    double best_j = 0;
    for (const RocPoint& p : c.points) best_j = std::max(best_j, p.tpr - p.fpr);
    REQUIRE(best_j < 0.05);  // Youden index near zero under independence
    (void)thr;
}

TEST_CASE("auc is invariant under strictly increasing score transforms") {
    std::mt19937_64 rng(321);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> scores(500);
    std::vector<bool> labels(500);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        labels[i] = i % 3 == 0;
        scores[i] = g(rng) + (labels[i] ? 0.8 : 0.0);
    }
    double base = roc(scores, labels).auc;
    std::vector<double> warped(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) warped[i] = std::exp(0.5 * scores[i]) + 3.0;
    REQUIRE(roc(warped, labels).auc == Approx(base).margin(1e-12));
}

TEST_CASE("optimal threshold on a single unique score") {
    RocCurve c = roc({5, 5, 5, 5}, {true, false, true, false});
    REQUIRE(optimal_threshold(c) == 5.0);
    REQUIRE(c.auc == Approx(0.5));
}

TEST_CASE("confusion hand oracle") {
    // tn=5, fp=1, fn=2, tp=2 -> accuracy 0.7, f1 = 4/7
    std::vector<double> scores = {0, 0, 0, 0, 0, 1, 0, 0, 1, 1};
    std::vector<bool> labels = {false, false, false, false, false, false,
                                true, true, true, true};
    ConfusionReport r = confusion(scores, labels, 0.5);
    REQUIRE(r.tn == 5);
    REQUIRE(r.fp == 1);
    REQUIRE(r.fn == 2);
    REQUIRE(r.tp == 2);
    REQUIRE(r.tn + r.fp + r.fn + r.tp == scores.size());
    REQUIRE(r.accuracy == Approx(0.7).margin(1e-12));
    REQUIRE(r.f1 == Approx(4.0 / 7.0).margin(1e-12));
}

TEST_CASE("f1 is undefined when no true positives exist") {
    ConfusionReport r = confusion({0.0, 0.0, 0.0}, {false, true, true}, 0.5);
    REQUIRE(r.tp == 0);
    REQUIRE_FALSE(r.f1_defined());
    REQUIRE(std::isnan(r.f1));
}

TEST_CASE("extreme thresholds classify everything one way") {
    std::vector<double> scores = {1, 2, 3, 4};
    std::vector<bool> labels = {false, true, false, true};
    ConfusionReport lo = confusion(scores, labels, 0.0);  // below min: all positive
    REQUIRE(lo.fp == 2);
    REQUIRE(lo.fn == 0);
    REQUIRE(lo.tp == 2);
    ConfusionReport hi = confusion(scores, labels, 100.0);  // above max: all negative
    REQUIRE(hi.tp == 0);
    REQUIRE(hi.tn == 2);
    REQUIRE(hi.fn == 2);
}

TEST_CASE("deviation srmse cases") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    REQUIRE(deviation_srmse(x, x) == 0.0);
    // constant offset of one full range -> 1.0
    std::vector<double> shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + 4.0;
    REQUIRE(deviation_srmse(x, shifted) == Approx(1.0));
    REQUIRE(std::isnan(deviation_srmse({2, 2, 2}, {1, 2, 3})));
}

TEST_CASE("welch t-test hand cases") {
    std::vector<double> a = {1.1, 0.9, 1.0, 1.05, 0.95};
    REQUIRE(welch_ttest(a, a) == Approx(1.0));

    auto x = testutil::white_noise(24, 55);
    auto y = testutil::white_noise(24, 56);
    for (double& v : y) v += 5.0;  // 5 sigma separation
    REQUIRE(welch_ttest(x, y) < 1e-6);

    REQUIRE_THROWS_AS(welch_ttest({1.0}, a), std::invalid_argument);
    REQUIRE_THROWS_AS(welch_ttest({2, 2, 2}, {3, 3, 3}), std::invalid_argument);
    REQUIRE(welch_ttest({2, 2, 2}, {2, 2, 2}) == 1.0);
    // symmetry
    REQUIRE(welch_ttest(x, y) == Approx(welch_ttest(y, x)));
}

TEST_CASE("welch p-values are uniform under the null") {
    // KS distance of the empirical p-value distribution against U(0,1)
    const int reps = 200;
    std::vector<double> pvals(reps);
    for (int r = 0; r < reps; ++r) {
        auto a = testutil::white_noise(24, 9000 + 2 * r);
        auto b = testutil::white_noise(24, 9001 + 2 * r);
        pvals[r] = welch_ttest(a, b);
    }
    std::sort(pvals.begin(), pvals.end());
    double ks = 0;
    for (int i = 0; i < reps; ++i) {
        double ecdf_hi = static_cast<double>(i + 1) / reps;
        double ecdf_lo = static_cast<double>(i) / reps;
        ks = std::max({ks, std::fabs(ecdf_hi - pvals[i]), std::fabs(pvals[i] - ecdf_lo)});
    }
    // 5% KS critical value at n=200 is ~0.096; allow slack for discreteness
    REQUIRE(ks < 0.12);
}

TEST_CASE("robust abs z-scores standardize against the warm-up window") {
    // warm-up {1..5}: median 3, abs deviations {2,1,0,1,2} -> MAD 1
    std::vector<double> v = {1, 2, 3, 4, 5, 10, 3};
    auto z = robust_abs_zscores(v, 5);
    REQUIRE(z.size() == v.size());
    REQUIRE(z[2] == 0.0);
    REQUIRE(z[0] == Approx(2.0));
    REQUIRE(z[5] == Approx(7.0));
    REQUIRE(z[6] == 0.0);
}

TEST_CASE("robust z-scores fall back when the MAD degenerates") {
    // constant warm-up: MAD 0 and mean-abs-dev 0 -> divisor 1
    std::vector<double> v = {5, 5, 5, 5, 9};
    auto z = robust_abs_zscores(v, 4);
    REQUIRE(z[4] == Approx(4.0));
    // majority-constant warm-up: MAD 0 but mean-abs-dev positive
    std::vector<double> w = {5, 5, 5, 8, 9};
    auto z2 = robust_abs_zscores(w, 4);
    double mean_dev = (0 + 0 + 0 + 3) / 4.0;
    REQUIRE(z2[4] == Approx(4.0 / mean_dev));
    REQUIRE_THROWS_AS(robust_abs_zscores({}, 3), std::invalid_argument);
}
