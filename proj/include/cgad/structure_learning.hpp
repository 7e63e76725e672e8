#pragma once

#include "cgad/errors.hpp"
#include "cgad/lagged_design.hpp"
#include "cgad/types.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace cgad {

struct SolverConfig {
    double lambda_w = 0.05;          // intra-slice L1 weight
    double lambda_a = 0.05;          // inter-slice L1 weight
    double edge_threshold = 0.1;
    double h_tolerance = 1e-8;
    double rho_init = 1.0;
    double rho_max = 1e16;
    double rho_growth = 10.0;
    int max_outer_iters = 100;
    int inner_max_iters = 500;
    double inner_grad_tol = 1e-7;
    std::uint64_t seed = 0;

    void validate() const;           // throws Error{InvalidConfig}
};

struct SolverTrace {
    struct OuterStep {
        double objective = 0.0;      // augmented inner objective at the accepted iterate
        double h = 0.0;
        double rho = 0.0;
        double alpha = 0.0;          // multiplier after the update
        int inner_iters = 0;
    };
    std::vector<OuterStep> outer;
    bool converged = false;

    double final_h() const { return outer.empty() ? 0.0 : outer.back().h; }
};

/// Raised by fit_dbn when rho exceeds rho_max with h above tolerance;
/// carries the trace for diagnosis.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::string message, SolverTrace trace)
        : Error(ErrorCode::DidNotConverge, std::move(message)), trace_(std::move(trace)) {}

    const SolverTrace& trace() const { return trace_; }

private:
    SolverTrace trace_;
};

/// (1/2R) * ||X - X*W - Y*A||_F^2
double sem_loss(const Matrix& intra, const Matrix& inter, const LaggedDesign& design);

/// d(sem_loss)/dW = -(1/R) X^T (X - XW - YA), d/dA analogous with Y^T.
std::pair<Matrix, Matrix> sem_loss_gradient(const Matrix& intra, const Matrix& inter,
                                            const LaggedDesign& design);

/// h(W) = tr(exp(W o W)) - K; zero exactly when the support of W is acyclic.
double acyclicity(const Matrix& intra);

/// grad h = exp(W o W)^T o 2W
Matrix acyclicity_gradient(const Matrix& intra);

/// Smooth augmented-Lagrangian inner objective over split non-negative
/// coordinates theta = [W+, W-, A+, A-], where W = W+ - W-. The L1 terms
/// become linear, so a bound-constrained quasi-Newton method applies
/// directly. Gram matrices are precomputed; evaluation cost is independent
/// of the design row count.
class InnerProblem {
public:
    InnerProblem(const LaggedDesign& design, double lambda_w, double lambda_a);

    Index dim() const { return 2 * (num_intra_ + num_inter_); }
    Vector lower_bounds() const;
    Vector upper_bounds() const;     // diagonal of both W splits pinned at 0

    double value_and_gradient(const Vector& theta, double rho, double alpha,
                              Vector& grad) const;

    Matrix intra_of(const Vector& theta) const;
    Matrix inter_of(const Vector& theta) const;

private:
    Matrix sxx_, sxy_, syy_;         // X^T X / R, X^T Y / R, Y^T Y / R
    Index k_ = 0, pk_ = 0;
    Index num_intra_ = 0, num_inter_ = 0;
    double lambda_w_ = 0.0, lambda_a_ = 0.0;
};

struct BoxLbfgsOptions {
    int max_iters = 500;
    double grad_tol = 1e-7;          // infinity norm of the projected gradient
    int memory = 10;
};

struct BoxLbfgsResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Projected-gradient L-BFGS for min f(x) s.t. lower <= x <= upper.
/// The quasi-Newton direction is built from the gradient restricted to the
/// free variables and followed along the projection arc with Armijo
/// backtracking. Deterministic.
BoxLbfgsResult minimize_box_lbfgs(
    const std::function<double(const Vector&, Vector&)>& value_and_gradient,
    Vector x0, const Vector& lower, const Vector& upper,
    const BoxLbfgsOptions& options = {});

/// Augmented-Lagrangian solve of
///   min sem_loss + lambda_w ||W||_1 + lambda_a ||A||_1  s.t.  h(W) = 0.
/// Multiplier update alpha += rho * h after each outer step; rho grows by
/// rho_growth whenever h fails to shrink by a factor of 4. Deterministic.
/// Throws ConvergenceError when rho_max is exceeded with h above tolerance.
std::pair<WeightedDbn, SolverTrace> fit_dbn(const LaggedDesign& design,
                                            const SolverConfig& config,
                                            std::vector<std::string> sensor_names = {});

/// Edge present iff |weight| > threshold. Verifies the intra graph is
/// acyclic by DFS and throws Error{CyclicAfterThreshold} otherwise.
BinaryDbn threshold(const WeightedDbn& dbn, double edge_threshold);

} // namespace cgad
