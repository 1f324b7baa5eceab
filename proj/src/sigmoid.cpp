#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "wallmem/analysis.hpp"
#include "wallmem/error.hpp"

namespace wallmem {

namespace {

struct SigmoidResidual : Eigen::DenseFunctor<double> {
    SigmoidResidual(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(x.size())), x_(x), y_(y) {}

    // params = (l, x0, k); residual_i = model(x_i) - y_i
    int operator()(const Eigen::VectorXd& params, Eigen::VectorXd& fvec) const {
        for (Eigen::Index i = 0; i < x_.size(); ++i) {
            fvec[i] = sigmoid({params[0], params[1], params[2]}, x_[i]) - y_[i];
        }
        return 0;
    }

    int df(const Eigen::VectorXd& params, Eigen::MatrixXd& jac) const {
        const double l = params[0], x0 = params[1], k = params[2];
        for (Eigen::Index i = 0; i < x_.size(); ++i) {
            const double u = x_[i] - x0;
            const double g = sigmoid({1.0, x0, k}, x_[i]);
            const double dg = g * (1.0 - g);
            jac(i, 0) = g;
            jac(i, 1) = -l * k * dg;
            jac(i, 2) = l * u * dg;
        }
        return 0;
    }

    const Eigen::VectorXd& x_;
    const Eigen::VectorXd& y_;
};

}  // namespace

double sigmoid(const SigmoidParams& p, double x) {
    const double z = -p.k * (x - p.x0);
    // Two branches keep exp() from overflowing on either tail.
    if (z > 0.0) {
        const double e = std::exp(-z);
        return p.l * e / (1.0 + e);
    }
    return p.l / (1.0 + std::exp(z));
}

SigmoidParams sigmoid_guess_log_axis(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.empty() || xs.size() != ys.size()) throw Error("sigmoid_guess: xs and ys must be non-empty and equal length");
    SigmoidParams g;
    g.l = *std::max_element(ys.begin(), ys.end());
    std::size_t best = 0;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        if (std::abs(ys[i] - 0.5 * g.l) < std::abs(ys[best] - 0.5 * g.l)) best = i;
    }
    g.x0 = xs[best];
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    const double range = *xmax_it - *xmin_it;
    g.k = range > 0.0 ? 4.0 / range : 1.0;
    // The sign comes from the trend: y at the largest x against y at the smallest.
    const auto imin = static_cast<std::size_t>(xmin_it - xs.begin());
    const auto imax = static_cast<std::size_t>(xmax_it - xs.begin());
    if (ys[imax] < ys[imin]) g.k = -g.k;
    return g;
}

SigmoidFit fit_sigmoid(const std::vector<double>& xs, const std::vector<double>& ys,
                       std::optional<SigmoidParams> guess) {
    if (xs.size() != ys.size()) throw Error("fit_sigmoid: xs and ys differ in length");
    if (xs.size() < 4) throw Error("fit_sigmoid: need at least 4 points");
    const SigmoidParams start = guess ? *guess : sigmoid_guess_log_axis(xs, ys);

    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    SigmoidResidual functor(x, y);
    Eigen::LevenbergMarquardt<SigmoidResidual> lm(functor);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setGtol(0.0);
    lm.setMaxfev(2000);

    Eigen::VectorXd params(3);
    params << start.l, start.x0, start.k;
    const auto status = lm.minimize(params);

    SigmoidFit fit;
    fit.l = params[0];
    fit.x0 = params[1];
    fit.k = params[2];
    fit.iterations = static_cast<int>(lm.iterations());
    Eigen::VectorXd r(x.size());
    functor(params, r);
    fit.residual_rss = r.squaredNorm();

    using Space = Eigen::LevenbergMarquardtSpace::Status;
    const bool stopped_cleanly = status == Space::RelativeReductionTooSmall || status == Space::RelativeErrorTooSmall ||
                                 status == Space::RelativeErrorAndReductionTooSmall ||
                                 status == Space::CosinusTooSmall || status == Space::FtolTooSmall ||
                                 status == Space::XtolTooSmall || status == Space::GtolTooSmall;
    Eigen::MatrixXd jac(x.size(), 3);
    functor.df(params, jac);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
    qr.setThreshold(1e-10);
    const bool full_rank = qr.rank() == 3;
    const bool finite = std::isfinite(fit.l) && std::isfinite(fit.x0) && std::isfinite(fit.k);
    fit.converged = stopped_cleanly && full_rank && finite && std::abs(fit.l) > 1e-9;
    return fit;
}

}  // namespace wallmem
