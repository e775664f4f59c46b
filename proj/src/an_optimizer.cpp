#include "anvlc/an_optimizer.hpp"

#include "anvlc/clipping_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anvlc {

void CcpConfig::validate() const
{
    if (max_iters < 1) {
        throw std::invalid_argument("optimizer.max_iters: must be at least 1");
    }
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
        throw std::invalid_argument("optimizer.rel_tol: must be positive");
    }
    if (!std::isfinite(lambda_db) || lambda_linear() < kMinLambdaLinear) {
        throw std::invalid_argument("optimizer.lambda_db: Eve SINR cap must be at least -60 dB");
    }
    if (!(solver.feas_tol > 0.0) || !(solver.opt_tol > 0.0)) {
        throw std::invalid_argument("optimizer.feas_tol: solver tolerances must be positive");
    }
    if (solver.max_iterations < 1) {
        throw std::invalid_argument("optimizer.solver_max_iters: must be at least 1");
    }
}

double CcpConfig::lambda_linear() const { return from_db(lambda_db); }

TildeData tilde_data(const RoomScene& scene, const ChannelVector& h_bob, const ChannelVector& h_eve,
                     const Vec& budget, double dc_bias)
{
    const auto stats = stats_vector(scene, budget, dc_bias);
    const auto bob = sinr_inputs(scene, h_bob, stats.attenuation, stats.clip_noise_std, dc_bias);
    const auto eve = sinr_inputs(scene, h_eve, stats.attenuation, stats.clip_noise_std, dc_bias);
    TildeData data;
    data.bob_gain = bob.effective_gain;
    data.eve_gain = eve.effective_gain;
    data.bob_floor = bob.distortion_floor();
    data.eve_floor = eve.distortion_floor();
    data.chips = scene.led.chips;
    return data;
}

namespace {

// Component of `a` orthogonal to `b`.
Vec reject(const Vec& a, const Vec& b)
{
    const double bb = b.squaredNorm();
    return bb > 0.0 ? Vec(a - (a.dot(b) / bb) * b) : a;
}

// Largest tau with tau^2 * d_n^2 <= cap_n for all n.
double fit_to_caps(const Vec& d, const Vec& cap)
{
    double tau = std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < d.size(); ++n) {
        if (d[n] != 0.0) {
            tau = std::min(tau, std::sqrt(cap[n]) / std::abs(d[n]));
        }
    }
    return std::isfinite(tau) ? tau : 0.0;
}

double relative_step(const Vec& next, const Vec& prev)
{
    const double diff = (next - prev).norm();
    if (diff == 0.0) {
        return 0.0;
    }
    const double norm = next.norm();
    return norm > 0.0 ? diff / norm : std::numeric_limits<double>::infinity();
}

// Matched-filter start for a collapsed zero-forcing direction, shrunk until the
// Eve cap holds with margin. Splits the power caps with the jamming beam.
Vec matched_start(const TildeData& d, Vec& w, double lambda, const Vec& budget)
{
    w *= std::sqrt(0.5);
    const Vec& dir = d.bob_gain;
    const double leak = d.chips * dir.dot(w);
    const double t2 = (1.0 - leak * leak) / d.bob_floor;
    if (dir.norm() == 0.0 || !(t2 > 0.0)) {
        return Vec::Zero(dir.size());
    }
    Vec v = fit_to_caps(dir, 0.45 * budget * t2) * dir;
    const double jam = d.chips * d.eve_gain.dot(w);
    const double allowed = 0.9 * lambda * (jam * jam + d.eve_floor * t2);
    const double seen = std::abs(d.chips * d.eve_gain.dot(v));
    if (seen * seen > allowed) {
        v *= std::sqrt(allowed) / seen;
    }
    return v;
}

DesignResult solve_design(const RoomScene& scene, const ChannelVector& h_bob,
                          const ChannelVector& h_eve, const CcpConfig& cfg, const Vec& budget,
                          double dc_bias, bool artificial_noise)
{
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(scene.size());
    if (h_bob.size() != n || h_eve.size() != n || budget.size() != n) {
        throw std::invalid_argument("design: channel and budget lengths must match the scene");
    }
    const double lambda = cfg.lambda_linear();
    const TildeData data = tilde_data(scene, h_bob, h_eve, budget, dc_bias);

    DesignResult result;
    auto& trace = result.trace;
    const auto start = initial_point(data, budget, artificial_noise);
    result.report.degenerate = start.degenerate;
    Vec w = start.w;
    Vec v = start.degenerate ? matched_start(data, w, lambda, budget) : start.v;
    const double nc = data.chips;
    trace.initial_objective = std::pow(nc * data.bob_gain.dot(v), 2);

    for (int i = 1; i <= cfg.max_iters; ++i) {
        const auto sp = build_subproblem(data, v, w, lambda, budget, artificial_noise);
        const auto sol = solve_subproblem(sp, cfg.solver);
        if (sol.status == SolverStatus::infeasible) {
            throw SolverError("CCP subproblem reported infeasible at a feasible linearization point");
        }
        trace.solver_iterations += sol.iterations;
        trace.status.push_back(sol.status);
        trace.surrogate.push_back(sol.objective);
        trace.objective.push_back(sp.transformed_objective(sol.v));
        trace.step_v.push_back(relative_step(sol.v, v));
        trace.step_w.push_back(relative_step(sol.w, w));
        trace.iterations = i;
        v = sol.v;
        w = sol.w;
        if (trace.step_v.back() <= cfg.rel_tol && trace.step_w.back() <= cfg.rel_tol) {
            trace.converged = true;
            break;
        }
    }

    // Charnes-Cooper recovery from the Bob normalization equality.
    const double leak = nc * data.bob_gain.dot(w);
    const double numerator = 1.0 - leak * leak;
    if (!(numerator > 0.0)) {
        throw SolverError("Charnes-Cooper recovery failed: AN leakage to Bob reached the normalization");
    }
    const double t = std::sqrt(numerator / data.bob_floor);

    auto& pc = result.precoders;
    pc.v = v / t;
    pc.w = artificial_noise ? Vec(w / t) : Vec::Zero(n);
    pc.budget = budget;

    auto& rep = result.report;
    rep.artificial_noise = artificial_noise;
    rep.scale = t;
    rep.exact = exact_sinr_pair(scene, h_bob, h_eve, pc, dc_bias);
    rep.tilde = tilde_sinr_pair(scene, h_bob, h_eve, pc, dc_bias);
    rep.secrecy_rate = secrecy_rate(rep.exact.bob, rep.exact.eve);
    rep.secrecy_rate_clamped = clamped_secrecy_rate(rep.exact.bob, rep.exact.eve);
    rep.tilde_secrecy_rate = secrecy_rate(rep.tilde.bob, rep.tilde.eve);
    rep.tilde_secrecy_rate_clamped = clamped_secrecy_rate(rep.tilde.bob, rep.tilde.eve);
    rep.feasible = pc.feasible(1e-9) && rep.tilde.eve <= lambda + 1e-6;
    return result;
}

}  // namespace

InitialPoint initial_point(const TildeData& data, const Vec& budget, bool artificial_noise)
{
    const auto n = budget.size();
    InitialPoint out{Vec::Zero(n), Vec::Zero(n), false};

    Vec info_dir = reject(data.bob_gain, data.eve_gain);
    if (info_dir.norm() <= 1e-12 * data.bob_gain.norm() || data.bob_gain.norm() == 0.0) {
        out.degenerate = true;
        info_dir.setZero();
    }
    Vec noise_dir = artificial_noise ? reject(data.eve_gain, data.bob_gain) : Vec(Vec::Zero(n));
    if (noise_dir.norm() <= 1e-12 * data.eve_gain.norm()) {
        noise_dir.setZero();
    }

    // With the jamming beam orthogonal to h~_B the normalization gives t^2 = 1/c_B,
    // so the caps read vbar_n^2 + wbar_n^2 <= P_n / c_B.
    const Vec caps = 0.9 * budget / data.bob_floor;
    const bool both = info_dir.norm() > 0.0 && noise_dir.norm() > 0.0;
    const double share = both ? 0.5 : 1.0;
    out.v = fit_to_caps(info_dir, share * caps) * info_dir;
    out.w = fit_to_caps(noise_dir, share * caps) * noise_dir;
    return out;
}

DesignResult ccp_solve(const RoomScene& scene, const ChannelVector& h_bob,
                       const ChannelVector& h_eve, const CcpConfig& cfg, const Vec& budget,
                       double dc_bias)
{
    return solve_design(scene, h_bob, h_eve, cfg, budget, dc_bias, true);
}

DesignResult no_an_solve(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const CcpConfig& cfg, const Vec& budget,
                         double dc_bias)
{
    return solve_design(scene, h_bob, h_eve, cfg, budget, dc_bias, false);
}

}  // namespace anvlc
