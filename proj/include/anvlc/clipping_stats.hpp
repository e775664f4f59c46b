#pragma once

#include "anvlc/channel_model.hpp"

namespace anvlc {

/// Clipping levels relative to the DC bias: lower = I_min - I_DC, upper = I_max - I_DC.
struct ClipWindow {
    double lower = -0.5;
    double upper = 0.5;

    static ClipWindow from_bias(const LedParams& led, double dc_bias)
    {
        return {led.i_min - dc_bias, led.i_max - dc_bias};
    }
};

/// Bussgang decomposition of a hard-clipped zero-mean Gaussian:
/// clip(x) = attenuation * x + zeta, with zeta uncorrelated with x.
struct ClippingStats {
    double attenuation = 1.0;     ///< R in [0, 1]
    double clip_noise_std = 0.0;  ///< standard deviation of zeta (A)
    double input_std = 0.0;       ///< sigma of the unclipped drive (A)
};

/// Standard normal density.
double std_normal_pdf(double t);

/// Gaussian upper-tail probability Q(t) = P(N(0,1) > t).
double q_function(double t);

/// Throws std::invalid_argument for sigma < 0 or a non-finite / empty window.
ClippingStats bussgang_stats(const ClipWindow& window, double sigma);

struct ClippingVectors {
    Vec attenuation;
    Vec clip_noise_std;
};

/// Element-wise Bussgang statistics with sigma_n = sqrt(power[n]).
ClippingVectors stats_vector(const RoomScene& scene, const Vec& power, double dc_bias);

}  // namespace anvlc
