#ifndef LIBRACOOL_FIT_HPP
#define LIBRACOOL_FIT_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

// Damped Gauss-Newton (Levenberg-Marquardt) least squares with numeric
// central-difference Jacobians and parameter covariance from the Jacobian at
// the optimum. Shared by the spectrum fitter and the scan-extraction fits.

namespace libracool::fit {

enum class FitStatus { converged, max_iter, degenerate };

struct FitOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-8;      // relative to max(1, ||r||)
    double jacobian_rel_step = 1e-6; // central differences
    // Scale the covariance by the reduced chi-square. Leave on for
    // unit-weight fits; turn off when residuals are already divided by
    // known per-point sigmas.
    bool scale_covariance = true;
};

struct FitResult {
    Eigen::VectorXd parameters;
    Eigen::VectorXd uncertainties; // 1 sigma, from (J^T J)^-1 * s^2
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0; // ||r||_2 at the optimum
    int iterations = 0;
    FitStatus status = FitStatus::max_iter;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

namespace detail {

inline Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& p,
                                        int m, double rel_step) {
    const int n = static_cast<int>(p.size());
    Eigen::MatrixXd J(m, n);
    for (int j = 0; j < n; ++j) {
        const double h = rel_step * std::max(std::abs(p[j]), 1.0);
        Eigen::VectorXd lo = p, hi = p;
        hi[j] += h;
        lo[j] -= h;
        J.col(j) = (residuals(hi) - residuals(lo)) / (2.0 * h);
    }
    return J;
}

} // namespace detail

inline FitResult fit_least_squares(const ResidualFn& residuals, Eigen::VectorXd p,
                                   const FitOptions& opt = {}) {
    FitResult out;
    Eigen::VectorXd r = residuals(p);
    const int m = static_cast<int>(r.size());
    const int n = static_cast<int>(p.size());
    if (m < n) throw std::invalid_argument("fit: fewer residuals than parameters");

    double cost = r.squaredNorm();
    double lambda = 1e-3;
    Eigen::MatrixXd J = detail::numeric_jacobian(residuals, p, m, opt.jacobian_rel_step);

    bool converged = false;
    bool degenerate = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        // A parameter the model never reads produces an exactly zero
        // central-difference column.
        for (int j = 0; j < n; ++j) {
            if (J.col(j).cwiseAbs().maxCoeff() == 0.0) degenerate = true;
        }
        if (degenerate) break;

        const Eigen::VectorXd g = J.transpose() * r;
        if (g.cwiseAbs().maxCoeff() <= opt.gradient_tol * std::max(1.0, std::sqrt(cost))) {
            converged = true;
            break;
        }

        const Eigen::MatrixXd JtJ = J.transpose() * J;
        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-30);
            const Eigen::VectorXd delta = A.ldlt().solve(-g);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd p_try = p + delta;
            const Eigen::VectorXd r_try = residuals(p_try);
            const double cost_try = r_try.squaredNorm();
            if (std::isfinite(cost_try) && cost_try < cost) {
                const double rel_drop = (cost - cost_try) / std::max(cost, 1e-300);
                p = p_try;
                r = r_try;
                cost = cost_try;
                lambda = std::max(lambda * 0.1, 1e-12);
                stepped = true;
                if (rel_drop < 1e-15) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // No downhill step at any damping: at a (numerical) minimum.
            converged = true;
            break;
        }
        if (converged) break;
        J = detail::numeric_jacobian(residuals, p, m, opt.jacobian_rel_step);
    }

    out.parameters = p;
    out.residual_norm = std::sqrt(cost);
    out.iterations = it;

    // Rank test and covariance on the column-equilibrated Jacobian; raw
    // parameter scales can differ by many orders of magnitude. The rank is
    // judged on J itself, not J^T J, to avoid squaring the conditioning.
    J = detail::numeric_jacobian(residuals, p, m, opt.jacobian_rel_step);
    Eigen::VectorXd colscale(n);
    for (int j = 0; j < n; ++j) colscale[j] = J.col(j).norm();
    const bool zero_col = degenerate || (colscale.minCoeff() == 0.0);
    Eigen::MatrixXd Js = J;
    if (!zero_col)
        for (int j = 0; j < n; ++j) Js.col(j) /= colscale[j];

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Js);
    qr.setThreshold(1e-10);
    if (zero_col || qr.rank() < n) {
        out.status = FitStatus::degenerate;
        out.covariance = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
        out.uncertainties =
            Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
        return out;
    }

    const double dof = std::max(1, m - n);
    const double s2 = opt.scale_covariance ? cost / dof : 1.0;
    const Eigen::MatrixXd inv_scaled =
        (Js.transpose() * Js).llt().solve(Eigen::MatrixXd::Identity(n, n));
    out.covariance.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.covariance(i, j) = inv_scaled(i, j) / (colscale[i] * colscale[j]) * s2;
    out.uncertainties = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    out.status = converged ? FitStatus::converged : FitStatus::max_iter;
    return out;
}

} // namespace libracool::fit

#endif
