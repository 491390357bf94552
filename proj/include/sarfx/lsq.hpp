#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace sarfx {

struct LsqOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-8;      ///< relative parameter step
    double residual_tolerance = 1e-10; ///< relative decrease of the sum of squares
    double initial_damping = 1e-3;
};

/// Fills residuals (size m) and, when `jacobian` is non-null, the m x n Jacobian.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residuals,
                       Eigen::MatrixXd* jacobian)>;

struct LsqBounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct LsqResult {
    Eigen::VectorXd params;
    double cost = 0.0;  ///< sum of squared residuals at `params`
    double initial_cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
};

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal scaling),
/// projected onto box bounds. Throws ConvergenceError when the iteration cap is
/// reached while the cost is no longer decreasing, or when the cost becomes
/// non-finite.
LsqResult levenberg_marquardt(const ResidualFn& fn, std::size_t num_residuals,
                              Eigen::VectorXd initial, const LsqBounds& bounds,
                              const LsqOptions& options = {});

}  // namespace sarfx
