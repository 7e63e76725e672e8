#include "cgad/structure_learning.hpp"

#include "cgad/matrix_exponential.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace cgad {

void SolverConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidConfig, what);
    };
    require(lambda_w >= 0.0, "lambda_w must be >= 0");
    require(lambda_a >= 0.0, "lambda_a must be >= 0");
    require(edge_threshold >= 0.0, "edge_threshold must be >= 0");
    require(h_tolerance > 0.0, "h_tolerance must be > 0");
    require(rho_init > 0.0, "rho_init must be > 0");
    require(rho_max >= rho_init, "rho_max must be >= rho_init");
    require(rho_growth > 1.0, "rho_growth must be > 1");
    require(max_outer_iters >= 1, "max_outer_iters must be >= 1");
    require(inner_max_iters >= 1, "inner_max_iters must be >= 1");
    require(inner_grad_tol > 0.0, "inner_grad_tol must be > 0");
}

namespace {

void check_design_shapes(const Matrix& intra, const Matrix& inter, const LaggedDesign& design) {
    const Index k = design.current.cols();
    if (intra.rows() != k || intra.cols() != k) {
        throw Error(ErrorCode::ShapeMismatch, "intra matrix must be K x K");
    }
    if (inter.rows() != design.lagged.cols() || (inter.rows() > 0 && inter.cols() != k)) {
        throw Error(ErrorCode::ShapeMismatch, "inter matrix must be (lag*K) x K");
    }
}

Matrix residual(const Matrix& intra, const Matrix& inter, const LaggedDesign& design) {
    Matrix r = design.current - design.current * intra;
    if (inter.rows() > 0) r -= design.lagged * inter;
    return r;
}

} // namespace

double sem_loss(const Matrix& intra, const Matrix& inter, const LaggedDesign& design) {
    check_design_shapes(intra, inter, design);
    const Matrix r = residual(intra, inter, design);
    return 0.5 * r.squaredNorm() / static_cast<double>(design.rows());
}

std::pair<Matrix, Matrix> sem_loss_gradient(const Matrix& intra, const Matrix& inter,
                                            const LaggedDesign& design) {
    check_design_shapes(intra, inter, design);
    const Matrix r = residual(intra, inter, design);
    const double scale = -1.0 / static_cast<double>(design.rows());
    Matrix grad_intra = scale * (design.current.transpose() * r);
    Matrix grad_inter = scale * (design.lagged.transpose() * r);
    return {std::move(grad_intra), std::move(grad_inter)};
}

double acyclicity(const Matrix& intra) {
    if (intra.rows() != intra.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "acyclicity needs a square matrix");
    }
    const Matrix e = matrix_exponential(intra.cwiseProduct(intra));
    return e.trace() - static_cast<double>(intra.rows());
}

Matrix acyclicity_gradient(const Matrix& intra) {
    if (intra.rows() != intra.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "acyclicity needs a square matrix");
    }
    const Matrix e = matrix_exponential(intra.cwiseProduct(intra));
    return e.transpose().cwiseProduct(2.0 * intra);
}

// ---------------------------------------------------------------------------
// InnerProblem

InnerProblem::InnerProblem(const LaggedDesign& design, double lambda_w, double lambda_a)
    : k_(design.current.cols()),
      pk_(design.lagged.cols()),
      num_intra_(k_ * k_),
      num_inter_(pk_ * k_),
      lambda_w_(lambda_w),
      lambda_a_(lambda_a) {
    const double r = static_cast<double>(design.rows());
    sxx_ = design.current.transpose() * design.current / r;
    sxy_ = design.current.transpose() * design.lagged / r;
    syy_ = design.lagged.transpose() * design.lagged / r;
}

Vector InnerProblem::lower_bounds() const { return Vector::Zero(dim()); }

Vector InnerProblem::upper_bounds() const {
    Vector upper = Vector::Constant(dim(), std::numeric_limits<double>::infinity());
    for (Index i = 0; i < k_; ++i) {
        upper(i * k_ + i) = 0.0;                 // W+ diagonal
        upper(num_intra_ + i * k_ + i) = 0.0;    // W- diagonal
    }
    return upper;
}

Matrix InnerProblem::intra_of(const Vector& theta) const {
    using MapT = Eigen::Map<const Matrix>;
    return MapT(theta.data(), k_, k_) - MapT(theta.data() + num_intra_, k_, k_);
}

Matrix InnerProblem::inter_of(const Vector& theta) const {
    if (num_inter_ == 0) return Matrix(0, k_);
    using MapT = Eigen::Map<const Matrix>;
    const Index base = 2 * num_intra_;
    return MapT(theta.data() + base, pk_, k_) - MapT(theta.data() + base + num_inter_, pk_, k_);
}

double InnerProblem::value_and_gradient(const Vector& theta, double rho, double alpha,
                                        Vector& grad) const {
    const Matrix w = intra_of(theta);
    const Matrix a = inter_of(theta);
    const Matrix u = Matrix::Identity(k_, k_) - w;

    // loss = (1/2R)||X - XW - YA||^2 expressed through the Gram matrices
    const Matrix sxx_u = sxx_ * u;
    double loss = 0.5 * (u.transpose() * sxx_u).trace();
    Matrix grad_w = -sxx_u;
    Matrix grad_a;
    if (num_inter_ > 0) {
        const Matrix syx_u = sxy_.transpose() * u;
        loss += -(a.transpose() * syx_u).trace() + 0.5 * (a.transpose() * syy_ * a).trace();
        grad_w += sxy_ * a;
        grad_a = -syx_u + syy_ * a;
    }

    const Matrix e = matrix_exponential(w.cwiseProduct(w));
    const double h = e.trace() - static_cast<double>(k_);
    const Matrix h_grad = e.transpose().cwiseProduct(2.0 * w);
    grad_w += (rho * h + alpha) * h_grad;

    double value = loss + 0.5 * rho * h * h + alpha * h;
    value += lambda_w_ * theta.head(2 * num_intra_).sum();
    if (num_inter_ > 0) value += lambda_a_ * theta.tail(2 * num_inter_).sum();

    grad.resize(dim());
    using MapT = Eigen::Map<Matrix>;
    MapT(grad.data(), k_, k_) = grad_w.array() + lambda_w_;
    MapT(grad.data() + num_intra_, k_, k_) = -grad_w.array() + lambda_w_;
    if (num_inter_ > 0) {
        const Index base = 2 * num_intra_;
        MapT(grad.data() + base, pk_, k_) = grad_a.array() + lambda_a_;
        MapT(grad.data() + base + num_inter_, pk_, k_) = -grad_a.array() + lambda_a_;
    }
    return value;
}

// ---------------------------------------------------------------------------
// Box-constrained L-BFGS

BoxLbfgsResult minimize_box_lbfgs(
    const std::function<double(const Vector&, Vector&)>& value_and_gradient,
    Vector x0, const Vector& lower, const Vector& upper, const BoxLbfgsOptions& options) {
    const Index n = x0.size();
    Vector x = x0.cwiseMax(lower).cwiseMin(upper);
    Vector grad(n);
    double value = value_and_gradient(x, grad);

    std::deque<Vector> mem_s, mem_y;
    Vector direction(n), candidate(n), candidate_grad(n);

    BoxLbfgsResult result;
    if (!std::isfinite(value)) {
        result.x = std::move(x);
        result.value = value;
        return result;
    }
    int iter = 0;
    for (; iter < options.max_iters; ++iter) {
        // variables pinned at a bound with the gradient pushing outward
        Eigen::Array<bool, Eigen::Dynamic, 1> active(n);
        for (Index i = 0; i < n; ++i) {
            active(i) = (x(i) - lower(i) <= 1e-12 && grad(i) > 0.0) ||
                        (upper(i) - x(i) <= 1e-12 && grad(i) < 0.0);
        }
        Vector pg = active.select(Vector::Zero(n), grad);
        if (pg.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
            result.converged = true;
            break;
        }

        // two-loop recursion on the restricted gradient
        Vector q = pg;
        const size_t hist = mem_s.size();
        std::vector<double> alpha_coef(hist), rho_coef(hist);
        for (size_t idx = hist; idx-- > 0;) {
            rho_coef[idx] = 1.0 / mem_s[idx].dot(mem_y[idx]);
            alpha_coef[idx] = rho_coef[idx] * mem_s[idx].dot(q);
            q -= alpha_coef[idx] * mem_y[idx];
        }
        if (hist > 0) {
            const Vector& s = mem_s.back();
            const Vector& y = mem_y.back();
            q *= s.dot(y) / y.dot(y);
        }
        for (size_t idx = 0; idx < hist; ++idx) {
            const double beta = rho_coef[idx] * mem_y[idx].dot(q);
            q += (alpha_coef[idx] - beta) * mem_s[idx];
        }
        direction = -q;
        direction = active.select(Vector::Zero(n), direction);
        if (direction.dot(grad) > -1e-12) direction = -pg;

        // cap the step so stiff penalty terms cannot launch the iterate
        // into overflow territory; backtracking handles the rest
        const double cap = 100.0 * std::max(1.0, x.lpNorm<Eigen::Infinity>());
        const double direction_norm = direction.lpNorm<Eigen::Infinity>();
        if (direction_norm > cap) direction *= cap / direction_norm;

        // backtracking along the projection arc
        double step = 1.0;
        bool accepted = false;
        double candidate_value = value;
        for (int ls = 0; ls < 40; ++ls) {
            candidate = (x + step * direction).cwiseMax(lower).cwiseMin(upper);
            candidate_value = value_and_gradient(candidate, candidate_grad);
            if (std::isfinite(candidate_value) &&
                candidate_value <= value + 1e-4 * grad.dot(candidate - x)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;   // flat to machine precision along the arc

        Vector s_vec = candidate - x;
        Vector y_vec = candidate_grad - grad;
        const double sy = s_vec.dot(y_vec);
        if (sy > 1e-10 * s_vec.norm() * y_vec.norm()) {
            mem_s.push_back(std::move(s_vec));
            mem_y.push_back(std::move(y_vec));
            if (static_cast<int>(mem_s.size()) > options.memory) {
                mem_s.pop_front();
                mem_y.pop_front();
            }
        }
        x = candidate;
        grad = candidate_grad;
        value = candidate_value;
    }
    result.x = std::move(x);
    result.value = value;
    result.iterations = iter;
    return result;
}

// ---------------------------------------------------------------------------
// Augmented-Lagrangian outer loop

std::pair<WeightedDbn, SolverTrace> fit_dbn(const LaggedDesign& design,
                                            const SolverConfig& config,
                                            std::vector<std::string> sensor_names) {
    config.validate();
    if (design.rows() < 1) throw Error(ErrorCode::ShapeMismatch, "empty design");
    if (!sensor_names.empty() &&
        static_cast<Index>(sensor_names.size()) != design.current.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "sensor_names do not match design width");
    }

    const InnerProblem problem(design, config.lambda_w, config.lambda_a);
    const Vector lower = problem.lower_bounds();
    const Vector upper = problem.upper_bounds();
    BoxLbfgsOptions inner_options;
    inner_options.max_iters = config.inner_max_iters;
    inner_options.grad_tol = config.inner_grad_tol;

    Vector theta = Vector::Zero(problem.dim());
    double alpha = 0.0;
    double rho = config.rho_init;
    double h_prev = std::numeric_limits<double>::infinity();

    SolverTrace trace;
    for (int outer = 0; outer < config.max_outer_iters; ++outer) {
        BoxLbfgsResult inner;
        double h = 0.0;
        for (;;) {
            inner = minimize_box_lbfgs(
                [&](const Vector& t, Vector& g) {
                    return problem.value_and_gradient(t, rho, alpha, g);
                },
                theta, lower, upper, inner_options);
            h = acyclicity(problem.intra_of(inner.x));
            if (h > h_prev / 4.0 && rho < config.rho_max) {
                rho *= config.rho_growth;
                continue;
            }
            break;
        }
        theta = inner.x;
        h_prev = h;
        alpha += rho * h;
        trace.outer.push_back({inner.value, h, rho, alpha, inner.iterations});
        if (h <= config.h_tolerance) {
            trace.converged = true;
            break;
        }
        if (rho >= config.rho_max) break;
    }

    if (!trace.converged) {
        throw ConvergenceError("acyclicity residual " + std::to_string(trace.final_h()) +
                                   " above tolerance with rho exhausted",
                               trace);
    }

    WeightedDbn dbn;
    dbn.intra = problem.intra_of(theta);
    dbn.inter = problem.inter_of(theta);
    dbn.lag = design.lag;
    dbn.sensor_names = std::move(sensor_names);
    dbn.intra.diagonal().setZero();
    return {std::move(dbn), std::move(trace)};
}

BinaryDbn threshold(const WeightedDbn& dbn, double edge_threshold) {
    if (edge_threshold < 0.0) {
        throw Error(ErrorCode::InvalidConfig, "edge_threshold must be >= 0");
    }
    const int k = static_cast<int>(dbn.node_count());
    BinaryDbn g;
    g.node_count = k;
    g.lag = dbn.lag;
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
            if (i != j && std::abs(dbn.intra(j, i)) > edge_threshold) {
                g.intra_edges.emplace(j, i);
            }
        }
    }
    for (int l = 1; l <= dbn.lag; ++l) {
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < k; ++i) {
                if (std::abs(dbn.inter((l - 1) * k + j, i)) > edge_threshold) {
                    g.inter_edges.emplace(j, l, i);
                }
            }
        }
    }
    if (!intra_is_acyclic(g)) {
        throw Error(ErrorCode::CyclicAfterThreshold,
                    "thresholded intra graph contains a cycle (threshold too small or solver "
                    "failure)");
    }
    return g;
}

} // namespace cgad
