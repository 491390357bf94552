#include "sarfx/lsq.hpp"

#include <cmath>

#include "sarfx/errors.hpp"

namespace sarfx {

namespace {

Eigen::VectorXd project(Eigen::VectorXd p, const LsqBounds& b) {
    return p.cwiseMax(b.lower).cwiseMin(b.upper);
}

}  // namespace

LsqResult levenberg_marquardt(const ResidualFn& fn, std::size_t num_residuals,
                              Eigen::VectorXd initial, const LsqBounds& bounds,
                              const LsqOptions& options) {
    const auto n = initial.size();
    if (bounds.lower.size() != n || bounds.upper.size() != n) {
        throw InvalidArgument("bounds do not match the parameter count");
    }
    Eigen::VectorXd p = project(std::move(initial), bounds);
    Eigen::VectorXd r(static_cast<Eigen::Index>(num_residuals));
    Eigen::MatrixXd J(static_cast<Eigen::Index>(num_residuals), n);
    fn(p, r, &J);
    double cost = r.squaredNorm();
    if (!std::isfinite(cost)) {
        throw ConvergenceError("least squares: non-finite cost at the initial point");
    }

    LsqResult result;
    result.initial_cost = cost;
    double lambda = options.initial_damping;
    // Cost at the start of each iteration, for the trend test at the cap.
    std::vector<double> history;

    Eigen::VectorXd r_try(r.size());
    for (int it = 0; it < options.max_iterations; ++it) {
        history.push_back(cost);
        result.iterations = it + 1;
        if (cost <= 1e-300) {
            result.converged = true;
            result.stop_reason = "zero residual";
            break;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::VectorXd diag = JtJ.diagonal().cwiseMax(1e-12 * (1.0 + JtJ.diagonal().maxCoeff()));

        bool accepted = false;
        while (lambda < 1e16) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += lambda * diag;
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            const Eigen::VectorXd p_try = project(p + step, bounds);
            fn(p_try, r_try, nullptr);
            const double cost_try = r_try.squaredNorm();
            if (std::isfinite(cost_try) && cost_try < cost) {
                const double rel_step = (p_try - p).norm() / (p.norm() + options.step_tolerance);
                const double rel_drop = (cost - cost_try) / cost;
                p = p_try;
                cost = cost_try;
                fn(p, r, &J);
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (rel_step <= options.step_tolerance) {
                    result.converged = true;
                    result.stop_reason = "relative step below tolerance";
                } else if (rel_drop <= options.residual_tolerance) {
                    result.converged = true;
                    result.stop_reason = "relative cost decrease below tolerance";
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No damped step lowers the cost: p is a stationary point within the bounds.
            result.converged = true;
            result.stop_reason = "no descent step available";
            break;
        }
        if (result.converged) {
            break;
        }
    }

    if (!result.converged) {
        const std::size_t window = std::min<std::size_t>(history.size(), 10);
        const double earlier = history[history.size() - window];
        if (!(cost < earlier * (1.0 - options.residual_tolerance))) {
            throw ConvergenceError("least squares: iteration cap reached without cost decrease");
        }
        result.stop_reason = "iteration cap reached while still improving";
    }
    result.params = p;
    result.cost = cost;
    return result;
}

}  // namespace sarfx
