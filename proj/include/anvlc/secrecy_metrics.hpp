#pragma once

#include "anvlc/channel_model.hpp"

#include <utility>

namespace anvlc {

/// Information precoder v, AN precoder w (both in A) and per-luminaire power caps P (A^2).
struct PrecoderPair {
    Vec v;
    Vec w;
    Vec budget;

    /// v_n^2 + w_n^2 <= P_n + tol for every luminaire.
    bool feasible(double tol = 1e-9) const;
    Vec power() const { return v.array().square() + w.array().square(); }
};

/// Everything one receiver's SINR depends on besides the precoders.
struct SinrInputs {
    Vec effective_gain;   ///< h (.) R
    Vec gain;             ///< h
    Vec clip_noise_std;   ///< sigma_clip per luminaire (A)
    double noise = 0.0;   ///< receiver noise / (gamma eta)^2 (A^2)
    int chips = 1;

    /// Clipping noise plus receiver noise, the precoder-independent denominator.
    double distortion_floor() const;
};

double sinr(const SinrInputs& in, const Vec& v, const Vec& w);

SinrInputs sinr_inputs(const RoomScene& scene, const ChannelVector& h, const Vec& attenuation,
                       const Vec& clip_noise_std, double dc_bias);

struct SinrPair {
    double bob = 0.0;
    double eve = 0.0;
};

/// Clipping statistics from the actual per-luminaire powers of `pc`.
SinrPair exact_sinr_pair(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const PrecoderPair& pc, double dc_bias);

/// Clipping statistics evaluated as if every luminaire ran at its cap.
SinrPair tilde_sinr_pair(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const PrecoderPair& pc, double dc_bias);

/// log2(1 + sinr_bob) - log2(1 + sinr_eve); negative when Eve is better off.
double secrecy_rate(double sinr_bob, double sinr_eve);
double clamped_secrecy_rate(double sinr_bob, double sinr_eve);

double to_db(double linear);
double from_db(double db);

}  // namespace anvlc
