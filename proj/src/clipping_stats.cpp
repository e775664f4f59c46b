#include "anvlc/clipping_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anvlc {

double std_normal_pdf(double t)
{
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

double q_function(double t)
{
    return 0.5 * std::erfc(t / std::sqrt(2.0));
}

ClippingStats bussgang_stats(const ClipWindow& window, double sigma)
{
    if (!std::isfinite(window.lower) || !std::isfinite(window.upper) ||
        !(window.lower < window.upper)) {
        throw std::invalid_argument("clip window must be finite with lower < upper");
    }
    if (!std::isfinite(sigma) || sigma < 0.0) {
        throw std::invalid_argument("input standard deviation must be finite and non-negative");
    }
    ClippingStats out;
    out.input_std = sigma;
    if (sigma == 0.0) {
        // No drive: the clipper never engages unless the bias itself sits outside
        // the window, in which case the output is a constant and carries no signal.
        out.attenuation = (window.lower <= 0.0 && window.upper >= 0.0) ? 1.0 : 0.0;
        return out;
    }

    const double alpha = window.lower / sigma;
    const double beta = window.upper / sigma;
    // P(x < lower) as Q(-alpha) rather than 1 - Q(alpha), which loses the tail.
    const double lower_tail = q_function(-alpha);
    const double above = q_function(beta);
    const double pdf_a = std_normal_pdf(alpha);
    const double pdf_b = std_normal_pdf(beta);
    const double attenuation = std::max(0.0, 1.0 - lower_tail - above);

    // Var[clip]/sigma^2 - R^2 rearranged so that every term vanishes with the tails:
    //   E[y^2] - R^2 = R(1-R) + a phi(a) - b phi(b) + a^2 Q(-a) + b^2 Q(b)
    //   E[y]         = phi(a) - phi(b) + a Q(-a) + b Q(b)
    const auto tail_term = [](double level, double mass) {
        return mass == 0.0 ? 0.0 : level * level * mass;
    };
    const auto edge_term = [](double level, double pdf) { return pdf == 0.0 ? 0.0 : level * pdf; };
    const double mean = pdf_a - pdf_b + (lower_tail == 0.0 ? 0.0 : alpha * lower_tail) +
                        (above == 0.0 ? 0.0 : beta * above);
    const double second = attenuation * (lower_tail + above) + edge_term(alpha, pdf_a) -
                          edge_term(beta, pdf_b) + tail_term(alpha, lower_tail) +
                          tail_term(beta, above);
    const double normalized_var = std::max(0.0, second - mean * mean);

    out.attenuation = attenuation;
    out.clip_noise_std = sigma * std::sqrt(normalized_var);
    return out;
}

ClippingVectors stats_vector(const RoomScene& scene, const Vec& power, double dc_bias)
{
    if (power.size() != static_cast<Eigen::Index>(scene.size())) {
        throw std::invalid_argument("power vector length does not match the scene");
    }
    const auto window = ClipWindow::from_bias(scene.led, dc_bias);
    ClippingVectors out{Vec(power.size()), Vec(power.size())};
    for (Eigen::Index n = 0; n < power.size(); ++n) {
        if (!(power[n] >= 0.0)) {
            throw std::invalid_argument("per-luminaire power must be non-negative");
        }
        const auto s = bussgang_stats(window, std::sqrt(power[n]));
        out.attenuation[n] = s.attenuation;
        out.clip_noise_std[n] = s.clip_noise_std;
    }
    return out;
}

}  // namespace anvlc
