#include "anvlc/secrecy_metrics.hpp"

#include "anvlc/clipping_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anvlc {

bool PrecoderPair::feasible(double tol) const
{
    if (v.size() != w.size() || v.size() != budget.size()) {
        return false;
    }
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        if (budget[n] < 0.0 || v[n] * v[n] + w[n] * w[n] > budget[n] + tol) {
            return false;
        }
    }
    return true;
}

double SinrInputs::distortion_floor() const
{
    const double clip = chips * gain.dot(clip_noise_std);
    return clip * clip + noise;
}

double sinr(const SinrInputs& in, const Vec& v, const Vec& w)
{
    const auto n = in.effective_gain.size();
    if (v.size() != n || w.size() != n || in.gain.size() != n || in.clip_noise_std.size() != n) {
        throw std::invalid_argument("sinr: inconsistent vector lengths");
    }
    if (!(in.noise > 0.0)) {
        throw std::invalid_argument("sinr: normalized noise variance must be positive");
    }
    const double signal = in.chips * in.effective_gain.dot(v);
    const double jamming = in.chips * in.effective_gain.dot(w);
    return signal * signal / (jamming * jamming + in.distortion_floor());
}

SinrInputs sinr_inputs(const RoomScene& scene, const ChannelVector& h, const Vec& attenuation,
                       const Vec& clip_noise_std, double dc_bias)
{
    SinrInputs in;
    in.gain = h;
    in.effective_gain = h.cwiseProduct(attenuation);
    in.clip_noise_std = clip_noise_std;
    in.noise = normalized_noise_variance(scene, h, dc_bias);
    in.chips = scene.led.chips;
    return in;
}

namespace {

SinrPair pair_from_stats(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const PrecoderPair& pc, double dc_bias,
                         const Vec& power)
{
    const auto stats = stats_vector(scene, power, dc_bias);
    const auto bob = sinr_inputs(scene, h_bob, stats.attenuation, stats.clip_noise_std, dc_bias);
    const auto eve = sinr_inputs(scene, h_eve, stats.attenuation, stats.clip_noise_std, dc_bias);
    return {sinr(bob, pc.v, pc.w), sinr(eve, pc.v, pc.w)};
}

}  // namespace

SinrPair exact_sinr_pair(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const PrecoderPair& pc, double dc_bias)
{
    return pair_from_stats(scene, h_bob, h_eve, pc, dc_bias, pc.power());
}

SinrPair tilde_sinr_pair(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const PrecoderPair& pc, double dc_bias)
{
    return pair_from_stats(scene, h_bob, h_eve, pc, dc_bias, pc.budget);
}

double secrecy_rate(double sinr_bob, double sinr_eve)
{
    return std::log2(1.0 + sinr_bob) - std::log2(1.0 + sinr_eve);
}

double clamped_secrecy_rate(double sinr_bob, double sinr_eve)
{
    return std::max(0.0, secrecy_rate(sinr_bob, sinr_eve));
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace anvlc
