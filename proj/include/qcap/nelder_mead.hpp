#pragma once

#include <functional>

#include <Eigen/Dense>

namespace qcap {

struct NelderMeadOptions {
    double initial_step = 0.1;
    /// Converged once every vertex lies within this distance of the best one.
    double diameter_tol = 1e-7;
    int max_evaluations = 2000;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f by the downhill simplex method (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Deterministic for a given start.
NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0,
                                      const NelderMeadOptions& options = {});

}  // namespace qcap
