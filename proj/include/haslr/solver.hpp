#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "haslr/dictionary.hpp"
#include "haslr/penalty.hpp"

namespace haslr {

struct LassoSettings {
    int max_sweeps = 200;
    double tol = 1e-8;  // exit when the largest coordinate change drops below
};

/// Tunables for the sparse + low-rank ADMM problem
///   min_{x,L}  alpha * ||Mat(L)||_*  +  sum_i pi(|x_i|)   s.t.  y = Ax + L.
struct SolverConfig {
    double alpha = 100.0;  // nuclear-norm weight
    double beta = 1.0;     // ADMM penalty
    PenaltyFunction penalty;
    int image_height = 42;  // Mat() shape for the error term
    int image_width = 30;
    double rel_tol = 1e-6;
    int max_iters = 500;
    LassoSettings lasso_inner;

    void validate(long d) const;
};

struct SolverResult {
    Eigen::VectorXd x;  // coefficients, length n
    Eigen::VectorXd L;  // error term, length d
    Eigen::VectorXd z;  // multiplier, length d
    int iterations = 0;
    bool converged = false;
    double primal_residual = 0;  // ||y - Ax - L||_2 at exit
    std::vector<double> objective_trace;
};

/// sign(t) * max(|t| - tau, 0).
double soft_threshold(double t, double tau);

/// Proximal operator of tau*||.||_* applied to Mat(v): reshape to h x w,
/// soft-threshold the singular values, recompose, flatten. Throws
/// NumericError on non-finite input.
Eigen::VectorXd svt(const Eigen::VectorXd& v, double tau, int height, int width);

/// Cyclic coordinate descent for
///   min_x  sum_j weights_j |x_j|  +  (beta/2) ||b - Ax||_2^2
/// warm-started from x0.
Eigen::VectorXd weighted_lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& weights, double beta,
                               const LassoSettings& inner, const Eigen::VectorXd& x0);

/// ADMM iteration of the sparse + low-rank regression: SVT step for L,
/// reweighted lasso step for x (weights recomputed from the previous x each
/// outer iteration), multiplier ascent for z. Initialization x=0, L=0,
/// z=1. Converged when the relative change of both ||x||_2 and ||L||_2
/// drops below rel_tol.
SolverResult admm_solve(const Dictionary& A, const Eigen::VectorXd& y, const SolverConfig& cfg);

}  // namespace haslr
