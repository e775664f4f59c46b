#pragma once

#include "anvlc/channel_model.hpp"

#include <iosfwd>
#include <string_view>
#include <vector>

namespace anvlc {

/// ||F u||^2 + a^T u <= b. Storing the factor F keeps every constraint an explicit
/// second-order cone: ||(2 F u, 1 - s)|| <= 1 + s with s = b - a^T u.
struct QuadraticConstraint {
    Eigen::MatrixXd factor;
    Vec linear;
    double bound = 0.0;

    /// Left side minus right side; <= 0 when satisfied.
    double value(const Vec& u) const;
    Vec gradient(const Vec& u) const;
};

/// Channel data evaluated with every luminaire at its power cap.
struct TildeData {
    Vec bob_gain;       ///< h_B (.) R~
    Vec eve_gain;       ///< h_E (.) R~
    double bob_floor;   ///< c_B = (n_c h_B^T sigma~_clip)^2 + sigma~^2_B,norm
    double eve_floor;   ///< c_E, same for Eve
    int chips = 1;
};

/// One convexified step of the CCP: maximize a linear surrogate of (n_c h~_B^T vbar)^2
/// subject to the linearized Eve cap and the per-luminaire power caps, in the
/// Charnes-Cooper variables u = (vbar, wbar). Without artificial noise u = vbar.
struct CcpSubproblem {
    TildeData data;
    double lambda = 1.0;  ///< Eve SINR cap, linear scale
    Vec budget;           ///< P_n (A^2)
    Vec v_prev;
    Vec w_prev;
    bool artificial_noise = true;

    Vec objective_gradient;  ///< over u
    double objective_offset = 0.0;
    /// constraints[0] is the Eve cap, constraints[1 + n] the power cap of luminaire n.
    std::vector<QuadraticConstraint> constraints;

    Eigen::Index luminaires() const { return budget.size(); }
    Eigen::Index dim() const { return artificial_noise ? 2 * luminaires() : luminaires(); }

    Vec pack(const Vec& v, const Vec& w) const;
    Vec info_part(const Vec& u) const { return u.head(luminaires()); }
    Vec noise_part(const Vec& u) const;

    /// Linearized objective at u.
    double surrogate(const Vec& u) const { return objective_offset + objective_gradient.dot(u); }
    /// The true transformed objective (n_c h~_B^T vbar)^2.
    double transformed_objective(const Vec& v) const;
};

/// Throws std::invalid_argument on non-finite data or lambda <= 0.
CcpSubproblem build_subproblem(const TildeData& data, const Vec& v_prev, const Vec& w_prev,
                               double lambda, const Vec& budget, bool artificial_noise = true);

enum class SolverStatus { optimal, max_iterations, infeasible };

std::string_view to_string(SolverStatus status);

struct SolverOptions {
    double feas_tol = 1e-8;
    double opt_tol = 1e-8;
    int max_iterations = 200;
};

struct SubproblemSolution {
    Vec v;
    Vec w;
    double objective = 0.0;  ///< linearized objective at the solution
    double max_violation = 0.0;  ///< largest scaled constraint value, clipped at 0
    double stationarity = 0.0;   ///< ||grad Lagrangian||_inf on the scaled problem
    double complementarity = 0.0;  ///< max_j multiplier_j * |constraint_j| on the scaled problem
    Vec multipliers;  ///< one per constraint, for the scaled problem
    int iterations = 0;
    SolverStatus status = SolverStatus::optimal;
};

/// Primal-dual interior-point solve. A strictly feasible start is searched for among
/// cheap candidates, falling back to a phase-I problem.
SubproblemSolution solve_subproblem(const CcpSubproblem& sp, const SolverOptions& opts = {});

/// Plain-text dump of the subproblem data (objective and each constraint's F, a, b).
void dump_subproblem(std::ostream& os, const CcpSubproblem& sp);

}  // namespace anvlc
