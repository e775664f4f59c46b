#include "anvlc/conic_subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace anvlc {

double QuadraticConstraint::value(const Vec& u) const
{
    return (factor * u).squaredNorm() + linear.dot(u) - bound;
}

Vec QuadraticConstraint::gradient(const Vec& u) const
{
    return 2.0 * factor.transpose() * (factor * u) + linear;
}

Vec CcpSubproblem::pack(const Vec& v, const Vec& w) const
{
    if (!artificial_noise) {
        return v;
    }
    Vec u(dim());
    u << v, w;
    return u;
}

Vec CcpSubproblem::noise_part(const Vec& u) const
{
    return artificial_noise ? Vec(u.tail(luminaires())) : Vec::Zero(luminaires());
}

double CcpSubproblem::transformed_objective(const Vec& v) const
{
    const double s = data.chips * data.bob_gain.dot(v);
    return s * s;
}

std::string_view to_string(SolverStatus status)
{
    switch (status) {
    case SolverStatus::optimal:
        return "optimal";
    case SolverStatus::max_iterations:
        return "max-iters";
    case SolverStatus::infeasible:
        return "infeasible-detected";
    }
    return "unknown";
}

CcpSubproblem build_subproblem(const TildeData& data, const Vec& v_prev, const Vec& w_prev,
                               double lambda, const Vec& budget, bool artificial_noise)
{
    const auto n = budget.size();
    if (n == 0 || data.bob_gain.size() != n || data.eve_gain.size() != n || v_prev.size() != n ||
        w_prev.size() != n) {
        throw std::invalid_argument("build_subproblem: inconsistent dimensions");
    }
    if (!data.bob_gain.allFinite() || !data.eve_gain.allFinite() || !v_prev.allFinite() ||
        !w_prev.allFinite() || !budget.allFinite() || !std::isfinite(data.bob_floor) ||
        !std::isfinite(data.eve_floor) || !std::isfinite(lambda)) {
        throw std::invalid_argument("build_subproblem: non-finite input");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("build_subproblem: lambda must be positive");
    }
    if (!(data.bob_floor > 0.0) || !(data.eve_floor > 0.0)) {
        throw std::invalid_argument("build_subproblem: distortion floors must be positive");
    }
    if ((budget.array() < 0.0).any()) {
        throw std::invalid_argument("build_subproblem: power budgets must be non-negative");
    }

    CcpSubproblem sp;
    sp.data = data;
    sp.lambda = lambda;
    sp.budget = budget;
    sp.v_prev = v_prev;
    sp.w_prev = artificial_noise ? w_prev : Vec::Zero(n);
    sp.artificial_noise = artificial_noise;

    const double nc = data.chips;
    const Eigen::Index dim = sp.dim();
    const double floor_ratio = data.eve_floor / data.bob_floor;

    sp.objective_gradient = Vec::Zero(dim);
    const double bob_proj = data.bob_gain.dot(v_prev);
    sp.objective_gradient.head(n) = 2.0 * nc * nc * bob_proj * data.bob_gain;
    sp.objective_offset = -nc * nc * bob_proj * bob_proj;

    // Eve cap with the AN leakage term linearized about w_prev and the
    // c_E/c_B-weighted Bob leakage moved to the left side.
    QuadraticConstraint eve;
    eve.factor = Eigen::MatrixXd::Zero(artificial_noise ? 2 : 1, dim);
    eve.factor.row(0).head(n) = (nc / std::sqrt(lambda)) * data.eve_gain.transpose();
    eve.linear = Vec::Zero(dim);
    eve.bound = floor_ratio;
    if (artificial_noise) {
        const double eve_proj = data.eve_gain.dot(sp.w_prev);
        eve.factor.row(1).tail(n) = nc * std::sqrt(floor_ratio) * data.bob_gain.transpose();
        eve.linear.tail(n) = -2.0 * nc * nc * eve_proj * data.eve_gain;
        eve.bound -= nc * nc * eve_proj * eve_proj;
    }
    sp.constraints.push_back(std::move(eve));

    for (Eigen::Index k = 0; k < n; ++k) {
        QuadraticConstraint power;
        power.factor = Eigen::MatrixXd::Zero(artificial_noise ? 3 : 1, dim);
        power.factor(0, k) = 1.0;
        if (artificial_noise) {
            power.factor(1, n + k) = 1.0;
            power.factor.row(2).tail(n) =
                nc * std::sqrt(budget[k] / data.bob_floor) * data.bob_gain.transpose();
        }
        power.linear = Vec::Zero(dim);
        power.bound = budget[k] / data.bob_floor;
        sp.constraints.push_back(std::move(power));
    }
    return sp;
}

namespace {

// min c^T y  s.t.  f_j(y) <= 0, each f_j a QuadraticConstraint.
struct ScaledProblem {
    Vec cost;
    std::vector<QuadraticConstraint> constraints;
};

struct IpmResult {
    Vec y;
    Vec multipliers;
    int iterations = 0;
    bool converged = false;
    bool stopped_early = false;
};

Vec constraint_values(const ScaledProblem& p, const Vec& y)
{
    Vec f(static_cast<Eigen::Index>(p.constraints.size()));
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
        f[static_cast<Eigen::Index>(j)] = p.constraints[j].value(y);
    }
    return f;
}

Vec dual_residual(const ScaledProblem& p, const Vec& y, const Vec& lambda)
{
    Vec r = p.cost;
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
        r += lambda[static_cast<Eigen::Index>(j)] * p.constraints[j].gradient(y);
    }
    return r;
}

double residual_norm(const ScaledProblem& p, const Vec& y, const Vec& lambda, const Vec& f,
                     double t)
{
    const Vec rd = dual_residual(p, y, lambda);
    const Vec rc = (-lambda.array() * f.array() - 1.0 / t).matrix();
    return std::sqrt(rd.squaredNorm() + rc.squaredNorm());
}

// Primal-dual interior-point method with a backtracking line search on the
// residual norm. y0 must be strictly feasible.
IpmResult interior_point(const ScaledProblem& p, Vec y0, const SolverOptions& opts,
                         const std::function<bool(const Vec&)>& stop_when = {},
                         const Vec* lambda0 = nullptr)
{
    constexpr double mu = 10.0;
    constexpr double alpha = 0.01;
    constexpr double beta = 0.5;
    const auto m = static_cast<Eigen::Index>(p.constraints.size());
    const auto dim = y0.size();

    IpmResult out;
    out.y = std::move(y0);
    Vec f = constraint_values(p, out.y);
    out.multipliers = lambda0 ? *lambda0 : Vec((1.0 / (-f.array())).matrix());

    for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
        Vec& lambda = out.multipliers;
        const double gap = -f.dot(lambda);
        const Vec rd = dual_residual(p, out.y, lambda);
        if (rd.lpNorm<Eigen::Infinity>() <= opts.opt_tol && gap <= opts.opt_tol) {
            out.converged = true;
            return out;
        }
        const double t = mu * static_cast<double>(m) / gap;

        Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(dim, dim);
        Vec rhs = -p.cost;
        std::vector<Vec> grads(static_cast<std::size_t>(m));
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto& c = p.constraints[static_cast<std::size_t>(j)];
            Vec g = c.gradient(out.y);
            const double slack = -f[j];
            hessian.noalias() += 2.0 * lambda[j] * c.factor.transpose() * c.factor;
            hessian.noalias() += (lambda[j] / slack) * g * g.transpose();
            rhs -= g / (t * slack);
            grads[static_cast<std::size_t>(j)] = std::move(g);
        }
        hessian.diagonal().array() += 1e-14 * std::max(1.0, hessian.diagonal().maxCoeff());
        const Vec dy = hessian.ldlt().solve(rhs);
        Vec dlambda(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double slack = -f[j];
            dlambda[j] = -lambda[j] + 1.0 / (t * slack) +
                         lambda[j] * grads[static_cast<std::size_t>(j)].dot(dy) / slack;
        }

        double step = 1.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (dlambda[j] < 0.0) {
                step = std::min(step, -lambda[j] / dlambda[j]);
            }
        }
        step *= 0.99;
        const double r0 = residual_norm(p, out.y, lambda, f, t);
        Vec y_new;
        Vec f_new;
        Vec lambda_new;
        bool accepted = false;
        for (int k = 0; k < 80; ++k, step *= beta) {
            y_new = out.y + step * dy;
            f_new = constraint_values(p, y_new);
            if ((f_new.array() >= 0.0).any()) {
                continue;
            }
            lambda_new = lambda + step * dlambda;
            if (residual_norm(p, y_new, lambda_new, f_new, t) <= (1.0 - alpha * step) * r0) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Search stalled at machine precision; keep the current iterate.
            return out;
        }
        out.y = std::move(y_new);
        f = std::move(f_new);
        lambda = std::move(lambda_new);
        if (stop_when && stop_when(out.y)) {
            out.stopped_early = true;
            ++out.iterations;
            return out;
        }
    }
    return out;
}

// Log-barrier path following with damped Newton centering steps. Slower than the
// primal-dual method but insensitive to starting close to the boundary.
IpmResult barrier_path(const ScaledProblem& p, Vec y0, const SolverOptions& opts,
                       double final_gap)
{
    constexpr double growth = 10.0;
    const auto m = static_cast<Eigen::Index>(p.constraints.size());
    const auto dim = y0.size();
    IpmResult out;
    out.y = std::move(y0);
    Vec f = constraint_values(p, out.y);

    const auto barrier_value = [&](const Vec& y, const Vec& fy, double t) {
        return t * p.cost.dot(y) - (-fy.array()).log().sum();
    };
    const double t_final = static_cast<double>(m) / final_gap;
    double t = 1.0;
    int budget = std::max(opts.max_iterations, 400);
    while (true) {
        for (int inner = 0; inner < 100 && out.iterations < budget; ++inner, ++out.iterations) {
            Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(dim, dim);
            Vec grad = t * p.cost;
            for (Eigen::Index j = 0; j < m; ++j) {
                const auto& c = p.constraints[static_cast<std::size_t>(j)];
                const Vec g = c.gradient(out.y);
                const double slack = -f[j];
                grad += g / slack;
                hessian.noalias() += g * g.transpose() / (slack * slack);
                hessian.noalias() += (2.0 / slack) * c.factor.transpose() * c.factor;
            }
            const Vec dy = -hessian.ldlt().solve(grad);
            const double decrement = -grad.dot(dy);
            if (decrement / 2.0 <= 1e-14 || !(decrement >= 0.0)) {
                break;
            }
            double step = 1.0;
            const double phi0 = barrier_value(out.y, f, t);
            bool accepted = false;
            for (int k = 0; k < 80; ++k, step *= 0.5) {
                const Vec y_new = out.y + step * dy;
                const Vec f_new = constraint_values(p, y_new);
                if ((f_new.array() >= 0.0).any()) {
                    continue;
                }
                if (barrier_value(y_new, f_new, t) <= phi0 - 0.25 * step * decrement) {
                    out.y = y_new;
                    f = f_new;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                break;
            }
        }
        out.multipliers = (1.0 / (t * -f.array())).matrix();
        if (t >= t_final || out.iterations >= budget) {
            break;
        }
        t = std::min(t * growth, t_final);
    }
    const Vec rd = dual_residual(p, out.y, out.multipliers);
    out.converged = rd.lpNorm<Eigen::Infinity>() <= opts.opt_tol &&
                    -f.dot(out.multipliers) <= opts.opt_tol;
    return out;
}

struct Scaling {
    double variable = 1.0;
    std::vector<double> constraint;
    double cost = 1.0;
};

QuadraticConstraint scale_constraint(const QuadraticConstraint& c, double var_scale,
                                     double& weight)
{
    QuadraticConstraint s;
    s.factor = c.factor * var_scale;
    s.linear = c.linear * var_scale;
    s.bound = c.bound;
    weight = std::max({s.factor.squaredNorm(), s.linear.norm(), std::abs(s.bound),
                       std::numeric_limits<double>::min()});
    s.factor /= std::sqrt(weight);
    s.linear /= weight;
    s.bound /= weight;
    return s;
}

// Finds a strictly feasible point with margin, or reports infeasibility.
bool strictly_feasible_start(const ScaledProblem& p, const std::vector<Vec>& candidates,
                             const SolverOptions& opts, Vec& start, int& iterations)
{
    double best = -1e-10;
    for (const auto& y : candidates) {
        const double worst = constraint_values(p, y).maxCoeff();
        if (worst < best) {
            best = worst;
            start = y;
        }
    }
    if (best < -1e-10) {
        return true;
    }
    // Phase I: minimize s subject to f_j(y) <= s, s >= -1.
    const auto dim = candidates.front().size();
    ScaledProblem phase1;
    phase1.cost = Vec::Zero(dim + 1);
    phase1.cost[dim] = 1.0;
    for (const auto& c : p.constraints) {
        QuadraticConstraint e;
        e.factor = Eigen::MatrixXd::Zero(c.factor.rows(), dim + 1);
        e.factor.leftCols(dim) = c.factor;
        e.linear = Vec::Zero(dim + 1);
        e.linear.head(dim) = c.linear;
        e.linear[dim] = -1.0;
        e.bound = c.bound;
        phase1.constraints.push_back(std::move(e));
    }
    QuadraticConstraint floor;
    floor.factor = Eigen::MatrixXd::Zero(1, dim + 1);
    floor.linear = Vec::Zero(dim + 1);
    floor.linear[dim] = -1.0;
    floor.bound = 1.0;
    phase1.constraints.push_back(std::move(floor));

    Vec y0(dim + 1);
    y0.head(dim) = candidates.front();
    y0[dim] = std::max(0.0, constraint_values(p, candidates.front()).maxCoeff()) + 1.0;
    const auto done = [&](const Vec& y) {
        return constraint_values(p, y.head(dim)).maxCoeff() < -1e-10;
    };
    const auto res = interior_point(phase1, y0, opts, done);
    iterations += res.iterations;
    if (!res.stopped_early) {
        return false;
    }
    start = res.y.head(dim);
    return true;
}

}  // namespace

SubproblemSolution solve_subproblem(const CcpSubproblem& sp, const SolverOptions& opts)
{
    const auto n = sp.luminaires();
    SubproblemSolution sol;
    sol.v = Vec::Zero(n);
    sol.w = Vec::Zero(n);
    sol.multipliers = Vec::Zero(static_cast<Eigen::Index>(sp.constraints.size()));

    // Luminaires without budget are pinned to zero and dropped from the problem.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (sp.budget[k] > 0.0) {
            keep.push_back(k);
        }
    }
    const auto dim_full = sp.dim();
    std::vector<Eigen::Index> cols;
    for (auto k : keep) {
        cols.push_back(k);
    }
    if (sp.artificial_noise) {
        for (auto k : keep) {
            cols.push_back(n + k);
        }
    }
    const auto dim = static_cast<Eigen::Index>(cols.size());

    const auto finish = [&](const Vec& u_full) {
        sol.v = sp.info_part(u_full);
        sol.w = sp.noise_part(u_full);
        sol.objective = sp.surrogate(u_full);
    };

    const Vec u_prev = sp.pack(sp.v_prev, sp.w_prev);
    const auto feasible_full = [&](const Vec& u) {
        for (const auto& c : sp.constraints) {
            if (c.value(u) > opts.feas_tol * std::max(1.0, std::abs(c.bound))) {
                return false;
            }
        }
        return true;
    };

    if (dim == 0) {
        finish(Vec::Zero(dim_full));
        return sol;
    }
    if (sp.objective_gradient.lpNorm<Eigen::Infinity>() == 0.0) {
        // Every feasible point ties; prefer the origin.
        const Vec zero = Vec::Zero(dim_full);
        finish(feasible_full(zero) ? zero : u_prev);
        return sol;
    }

    double max_budget = 0.0;
    for (auto k : keep) {
        max_budget = std::max(max_budget, sp.budget[k]);
    }
    Scaling scaling;
    scaling.variable = std::sqrt(max_budget / sp.data.bob_floor);

    const auto select = [&](const Vec& u_full) {
        Vec y(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            y[i] = u_full[cols[static_cast<std::size_t>(i)]] / scaling.variable;
        }
        return y;
    };
    const auto expand = [&](const Vec& y) {
        Vec u = Vec::Zero(dim_full);
        for (Eigen::Index i = 0; i < dim; ++i) {
            u[cols[static_cast<std::size_t>(i)]] = y[i] * scaling.variable;
        }
        return u;
    };

    ScaledProblem p;
    Vec cost(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        cost[i] = -sp.objective_gradient[cols[static_cast<std::size_t>(i)]];
    }
    cost *= scaling.variable;
    scaling.cost = cost.norm();
    p.cost = cost / scaling.cost;

    std::vector<std::size_t> kept_constraints;
    for (std::size_t j = 0; j < sp.constraints.size(); ++j) {
        if (j > 0 && sp.budget[static_cast<Eigen::Index>(j - 1)] <= 0.0) {
            continue;
        }
        const auto& c = sp.constraints[j];
        QuadraticConstraint reduced;
        reduced.factor = Eigen::MatrixXd(c.factor.rows(), dim);
        reduced.linear = Vec(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            reduced.factor.col(i) = c.factor.col(cols[static_cast<std::size_t>(i)]);
            reduced.linear[i] = c.linear[cols[static_cast<std::size_t>(i)]];
        }
        reduced.bound = c.bound;
        double weight = 1.0;
        p.constraints.push_back(scale_constraint(reduced, scaling.variable, weight));
        scaling.constraint.push_back(weight);
        kept_constraints.push_back(j);
    }

    std::vector<Vec> candidates;
    candidates.push_back(Vec::Zero(dim));
    if (sp.artificial_noise) {
        for (double theta : {0.999, 0.99, 0.9, 0.5}) {
            candidates.push_back(select(sp.pack(Vec::Zero(n), theta * sp.w_prev)));
        }
    }
    for (double theta : {0.999, 0.99, 0.9}) {
        candidates.push_back(select(theta * u_prev));
    }

    Vec start;
    int iterations = 0;
    if (!strictly_feasible_start(p, candidates, opts, start, iterations)) {
        sol.status = SolverStatus::infeasible;
        sol.iterations = iterations;
        finish(u_prev);
        return sol;
    }

    auto res = interior_point(p, start, opts);
    if (!res.converged) {
        // Re-center along the barrier path, then polish with the primal-dual method.
        auto fallback = barrier_path(p, start, opts, 1e-6);
        const auto polished = interior_point(p, fallback.y, opts, {}, &fallback.multipliers);
        res.iterations += fallback.iterations + polished.iterations;
        if (polished.converged) {
            fallback = polished;
        }
        if (fallback.converged ||
            dual_residual(p, fallback.y, fallback.multipliers).lpNorm<Eigen::Infinity>() <
                dual_residual(p, res.y, res.multipliers).lpNorm<Eigen::Infinity>()) {
            const int total = res.iterations;
            res = fallback;
            res.iterations = total;
        }
    }
    sol.iterations = iterations + res.iterations;
    sol.status = res.converged ? SolverStatus::optimal : SolverStatus::max_iterations;

    const Vec f = constraint_values(p, res.y);
    sol.max_violation = std::max(0.0, f.maxCoeff());
    sol.stationarity = dual_residual(p, res.y, res.multipliers).lpNorm<Eigen::Infinity>();
    sol.complementarity = (res.multipliers.array() * f.array().abs()).maxCoeff();
    for (std::size_t j = 0; j < kept_constraints.size(); ++j) {
        sol.multipliers[static_cast<Eigen::Index>(kept_constraints[j])] =
            res.multipliers[static_cast<Eigen::Index>(j)];
    }
    if (sol.status == SolverStatus::optimal && sol.max_violation > opts.feas_tol) {
        sol.status = SolverStatus::max_iterations;
    }
    finish(expand(res.y));
    return sol;
}

void dump_subproblem(std::ostream& os, const CcpSubproblem& sp)
{
    const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, " ", "\n");
    const auto precision = os.precision(17);
    os << "# ccp subproblem: maximize c^T u + c0 s.t. ||F_j u||^2 + a_j^T u <= b_j\n";
    os << "dim " << sp.dim() << "\n";
    os << "artificial_noise " << (sp.artificial_noise ? 1 : 0) << "\n";
    os << "lambda " << sp.lambda << "\n";
    os << "c0 " << sp.objective_offset << "\n";
    os << "c\n" << sp.objective_gradient.transpose().format(fmt) << "\n";
    for (std::size_t j = 0; j < sp.constraints.size(); ++j) {
        const auto& c = sp.constraints[j];
        os << "constraint " << j << (j == 0 ? " eve" : " power") << "\n";
        os << "F " << c.factor.rows() << " " << c.factor.cols() << "\n"
           << c.factor.format(fmt) << "\n";
        os << "a\n" << c.linear.transpose().format(fmt) << "\n";
        os << "b " << c.bound << "\n";
    }
    os.precision(precision);
}

}  // namespace anvlc
