#pragma once

#include "anvlc/an_optimizer.hpp"
#include "anvlc/channel_model.hpp"
#include "anvlc/clipping_stats.hpp"
#include "anvlc/secrecy_metrics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace anvlc {

/// Empirical estimates from a time-domain simulation of one link.
struct LinkReport {
    double sinr_bob = 0.0;
    double sinr_eve = 0.0;
    /// Mean of clip(x_n) - R_n x_n per luminaire, with R_n from the analytic model.
    Vec clip_noise_mean;
    std::uint64_t samples = 0;
};

/// Draws d, z ~ N(0,1), clips v_n d + w_n z to the LED window, sends it through
/// both channels with receiver noise, and estimates each SINR by regressing the
/// received signal on d.
LinkReport simulate_link(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const PrecoderPair& pc, double dc_bias,
                         std::uint64_t samples, std::uint64_t seed);

/// Sample estimates of the Bussgang decomposition of clip(x), x ~ N(0, sigma^2).
struct ClipEstimate {
    double attenuation = 0.0;       ///< sum(clip(x) x) / sum(x^2)
    double attenuation_se = 0.0;
    double clip_noise_var = 0.0;    ///< Var[clip(x) - R^ x]
    double clip_noise_var_se = 0.0;
    double clip_output_var = 0.0;   ///< Var[clip(x)]
    double clip_noise_mean = 0.0;
    /// Standard errors of the two estimators under the analytic model with the
    /// reference attenuation; unlike the sample versions they stay informative
    /// when few samples clip.
    double attenuation_se_model = 0.0;
    double clip_noise_var_se_model = 0.0;
    /// corr(clip(x) - R_ref x, x) for the supplied reference attenuation.
    double residual_correlation = 0.0;
    std::uint64_t samples = 0;
};

ClipEstimate bussgang_monte_carlo(const ClipWindow& window, double sigma, std::uint64_t samples,
                                  std::uint64_t seed, double reference_attenuation);

enum class Scheme { artificial_noise, no_artificial_noise };

std::string scheme_name(Scheme scheme);

struct SweepConfig {
    CcpConfig ccp;
    std::vector<double> sigma_p{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
    int placements = 500;
    std::uint64_t seed = 1;
    int workers = 0;  ///< 0 picks the hardware concurrency
};

/// Averages over placements for one (lambda, sigma_P, scheme). SINRs are averaged
/// in linear scale; rates are plain means of the raw (possibly negative) values.
struct SweepRow {
    double lambda_db = 0.0;
    double sigma_p = 0.0;
    double dc_bias = 0.0;
    Scheme scheme = Scheme::artificial_noise;
    int placements = 0;
    SinrPair exact;
    SinrPair tilde;
    SinrPair exact_mean_db;  ///< mean of per-placement dB values, for comparison
    SinrPair tilde_mean_db;
    double secrecy_rate = 0.0;
    double secrecy_rate_clamped = 0.0;
    double tilde_secrecy_rate = 0.0;
    double tilde_secrecy_rate_clamped = 0.0;
    double mean_iterations = 0.0;
    int degenerate = 0;
    int infeasible = 0;
    double max_eve_excess = 0.0;    ///< max over placements of tilde Eve SINR - lambda
    double max_power_excess = 0.0;  ///< max over placements and luminaires of v^2 + w^2 - P
};

struct PlacementOutcome {
    ReceiverPosition bob;
    ReceiverPosition eve;
    DesignResult with_noise;
    DesignResult without_noise;
};

/// Bob and Eve positions for placement `index`, independent of worker count.
std::pair<ReceiverPosition, ReceiverPosition> draw_placement(const RoomScene& scene,
                                                             std::uint64_t seed,
                                                             std::uint64_t index);

/// Solves both schemes for every placement at one operating point.
std::vector<PlacementOutcome> solve_placements(const RoomScene& scene, const CcpConfig& cfg,
                                               double sigma_p, int placements,
                                               std::uint64_t seed, int workers);

std::vector<SweepRow> summarize(const std::vector<PlacementOutcome>& outcomes, double lambda_db,
                                double sigma_p);

/// Full sweep over sigma_P for the configured lambda. Every finished operating point is
/// handed to `sink` before the next starts, so a failure leaves earlier rows intact.
std::vector<SweepRow> placement_sweep(const RoomScene& scene, const SweepConfig& cfg,
                                      const std::function<void(const SweepRow&)>& sink = {});

}  // namespace anvlc
