#pragma once

#include "anvlc/channel_model.hpp"
#include "anvlc/conic_subproblem.hpp"
#include "anvlc/secrecy_metrics.hpp"

#include <stdexcept>
#include <vector>

namespace anvlc {

/// Raised when the optimizer produces something the model says cannot happen.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Smallest accepted Eve SINR cap (linear); the Eve constraint divides by it.
constexpr double kMinLambdaLinear = 1e-6;

struct CcpConfig {
    int max_iters = 10;      ///< L_max
    double rel_tol = 1e-2;   ///< epsilon on the relative precoder steps
    double lambda_db = 0.0;  ///< Eve SINR cap
    SolverOptions solver;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    double lambda_linear() const;
};

struct CcpTrace {
    double initial_objective = 0.0;
    std::vector<double> objective;  ///< (n_c h~_B^T vbar)^2 after each iteration
    std::vector<double> surrogate;  ///< linearized objective at each subproblem optimum
    std::vector<double> step_v;     ///< ||vbar_i - vbar_{i-1}|| / ||vbar_i||
    std::vector<double> step_w;
    std::vector<SolverStatus> status;
    bool converged = false;
    int iterations = 0;
    int solver_iterations = 0;
};

struct SecrecyReport {
    SinrPair exact;  ///< from the actual per-luminaire powers
    SinrPair tilde;  ///< with clipping statistics at the power caps
    double secrecy_rate = 0.0;
    double secrecy_rate_clamped = 0.0;
    double tilde_secrecy_rate = 0.0;
    double tilde_secrecy_rate_clamped = 0.0;
    bool artificial_noise = true;
    bool feasible = true;    ///< power caps and tilde Eve cap hold on the returned precoders
    bool degenerate = false; ///< zero-forcing start collapsed (Bob and Eve channels parallel)
    double scale = 0.0;      ///< Charnes-Cooper t
};

struct DesignResult {
    PrecoderPair precoders;
    SecrecyReport report;
    CcpTrace trace;
};

TildeData tilde_data(const RoomScene& scene, const ChannelVector& h_bob, const ChannelVector& h_eve,
                     const Vec& budget, double dc_bias);

struct InitialPoint {
    Vec v;
    Vec w;
    bool degenerate = false;
};

/// Feasible start in the Charnes-Cooper variables: the information beam is
/// zero-forced at Eve; with artificial noise the jamming beam lies in Bob's
/// null space. Both are scaled so the power caps hold with a 0.9 margin.
InitialPoint initial_point(const TildeData& data, const Vec& budget, bool artificial_noise);

/// Artificial-noise design: CCP over the Charnes-Cooper transformed problem.
DesignResult ccp_solve(const RoomScene& scene, const ChannelVector& h_bob,
                       const ChannelVector& h_eve, const CcpConfig& cfg, const Vec& budget,
                       double dc_bias);

/// Baseline with the AN precoder pinned to zero.
DesignResult no_an_solve(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const CcpConfig& cfg, const Vec& budget,
                         double dc_bias);

}  // namespace anvlc
