#ifndef TAMPERLAB_OPTIM_HPP
#define TAMPERLAB_OPTIM_HPP

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace tamperlab {

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// BFGS with central-difference gradients and backtracking line search.
inline MinimizeResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd x0, double grad_tol = 1e-6,
                                    int max_iter = 500) {
    const int n = static_cast<int>(x0.size());
    const double h = 1e-5;

    auto gradient = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(n);
        Eigen::VectorXd xp = x;
        for (int i = 0; i < n; ++i) {
            double step = h * std::max(1.0, std::fabs(x(i)));
            xp(i) = x(i) + step;
            double fp = f(xp);
            xp(i) = x(i) - step;
            double fm = f(xp);
            xp(i) = x(i);
            g(i) = (fp - fm) / (2 * step);
        }
        return g;
    };

    MinimizeResult res;
    res.x = std::move(x0);
    res.value = f(res.x);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g = gradient(res.x);

    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        res.grad_norm = g.lpNorm<Eigen::Infinity>();
        if (res.grad_norm < grad_tol) {
            res.converged = true;
            return res;
        }
        Eigen::VectorXd dir = -(hinv * g);
        double slope = g.dot(dir);
        if (slope >= 0) {  // curvature updates went bad; restart from steepest descent
            hinv.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }
        double step = 1.0;
        double f0 = res.value;
        Eigen::VectorXd x_new;
        double f_new = f0;
        bool advanced = false;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = res.x + step * dir;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= f0 + 1e-4 * step * slope) {
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if (!advanced) {
            // no descent along this direction at any step length
            res.converged = res.grad_norm < 1e-3;
            return res;
        }
        Eigen::VectorXd g_new = gradient(x_new);
        Eigen::VectorXd sk = x_new - res.x;
        Eigen::VectorXd yk = g_new - g;
        double sy = sk.dot(yk);
        if (sy > 1e-12) {
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            Eigen::MatrixXd left = I - (sk * yk.transpose()) / sy;
            hinv = left * hinv * left.transpose() + (sk * sk.transpose()) / sy;
        }
        res.x = std::move(x_new);
        res.value = f_new;
        g = std::move(g_new);
    }
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.converged = res.grad_norm < grad_tol;
    return res;
}

} // namespace tamperlab

#endif
