#include "anvlc/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace anvlc {

namespace {

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok) {
        throw std::invalid_argument(key + ": " + what);
    }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void RoomScene::validate() const
{
    require(finite(length) && length > 0.0, "scene.length", "must be positive");
    require(finite(width) && width > 0.0, "scene.width", "must be positive");
    require(finite(height) && height > 0.0, "scene.height", "must be positive");
    require(finite(receiver_height) && receiver_height > 0.0, "scene.receiver_height",
            "must be positive");
    require(receiver_height < height, "scene.receiver_height", "must be below the ceiling");
    require(!luminaires.empty(), "scene.luminaires", "at least one luminaire is required");
    for (std::size_t k = 0; k < luminaires.size(); ++k) {
        const auto& lum = luminaires[k];
        const std::string key = "scene.luminaires[" + std::to_string(k) + "]";
        require(lum.position.allFinite(), key + ".position", "must be finite");
        require(std::abs(lum.position.z() - height) < 1e-9, key + ".position",
                "luminaires must be mounted at the ceiling height");
        require(std::abs(lum.position.x()) <= length / 2 && std::abs(lum.position.y()) <= width / 2,
                key + ".position", "outside the room footprint");
        require(finite(lum.lambertian_order) && lum.lambertian_order >= 0.0,
                key + ".lambertian_order", "must be non-negative");
    }
    require(led.chips >= 1, "scene.led.chips", "must be at least 1");
    require(finite(led.conversion) && led.conversion > 0.0, "scene.led.conversion",
            "must be positive");
    require(finite(led.i_min) && finite(led.i_max), "scene.led.i_min", "must be finite");
    require(led.i_min < led.i_max, "scene.led.i_min", "must be below i_max");
    require(finite(detector.area) && detector.area > 0.0, "scene.detector.area",
            "must be positive");
    require(finite(detector.responsivity) && detector.responsivity > 0.0,
            "scene.detector.responsivity", "must be positive");
    require(finite(detector.field_of_view) && detector.field_of_view > 0.0 &&
                detector.field_of_view <= kPi / 2 + 1e-12,
            "scene.detector.field_of_view_deg", "must lie in (0, 90] degrees");
    require(finite(noise.bandwidth) && noise.bandwidth > 0.0, "scene.noise.bandwidth",
            "must be positive");
    require(finite(noise.ambient_current) && noise.ambient_current >= 0.0,
            "scene.noise.ambient_current", "must be non-negative");
    require(finite(noise.amplifier_density) && noise.amplifier_density >= 0.0,
            "scene.noise.amplifier_density", "must be non-negative");
    require(finite(noise.elementary_charge) && noise.elementary_charge > 0.0,
            "scene.noise.elementary_charge", "must be positive");
}

RoomScene RoomScene::reference()
{
    RoomScene scene;
    const double a = std::sqrt(2.0);
    for (auto [x, y] : {std::pair{-a, -a}, std::pair{a, -a}, std::pair{a, a}, std::pair{-a, a}}) {
        Luminaire lum;
        lum.position = {x, y, scene.height};
        scene.luminaires.push_back(lum);
    }
    return scene;
}

bool inside_footprint(const RoomScene& scene, const ReceiverPosition& rx)
{
    return std::abs(rx.x) <= scene.length / 2 && std::abs(rx.y) <= scene.width / 2;
}

double los_gain(const RoomScene& scene, std::size_t index, const ReceiverPosition& rx)
{
    if (index >= scene.size()) {
        throw std::out_of_range("luminaire index out of range");
    }
    if (!std::isfinite(rx.x) || !std::isfinite(rx.y)) {
        throw std::invalid_argument("receiver position must be finite");
    }
    const auto& lum = scene.luminaires[index];
    const Eigen::Vector3d offset =
        lum.position - Eigen::Vector3d{rx.x, rx.y, scene.receiver_height};
    const double dist = offset.norm();
    if (!(dist > 0.0)) {
        throw std::invalid_argument("receiver coincides with a luminaire");
    }
    // Both normals are vertical, so irradiance and incidence angles coincide.
    const double cos_angle = offset.z() / dist;
    if (cos_angle <= 0.0 || std::acos(std::min(cos_angle, 1.0)) > scene.detector.field_of_view) {
        return 0.0;
    }
    const double m = lum.lambertian_order;
    return (m + 1.0) * scene.detector.area / (2.0 * kPi * dist * dist) * std::pow(cos_angle, m) *
           cos_angle;
}

ChannelVector channel_vector(const RoomScene& scene, const ReceiverPosition& rx)
{
    ChannelVector h(static_cast<Eigen::Index>(scene.size()));
    for (std::size_t k = 0; k < scene.size(); ++k) {
        h[static_cast<Eigen::Index>(k)] = los_gain(scene, k, rx);
    }
    return h;
}

double receiver_noise_variance(const RoomScene& scene, const ChannelVector& h, double dc_bias)
{
    if (h.size() != static_cast<Eigen::Index>(scene.size())) {
        throw std::invalid_argument("channel vector length does not match the scene");
    }
    const auto& n = scene.noise;
    const auto& pd = scene.detector;
    const double received_power = scene.led.chips * scene.led.conversion * dc_bias * h.sum();
    if (!(received_power >= 0.0)) {
        throw std::invalid_argument("average received optical power must be non-negative");
    }
    const double shot = 2.0 * n.elementary_charge * pd.responsivity * received_power * n.bandwidth;
    const double ambient = 4.0 * kPi * n.elementary_charge * pd.responsivity * pd.area *
                           n.ambient_current * (1.0 - std::cos(pd.field_of_view)) * n.bandwidth;
    const double amplifier = n.amplifier_density * n.amplifier_density * n.bandwidth;
    return shot + ambient + amplifier;
}

double normalized_noise_variance(const RoomScene& scene, const ChannelVector& h, double dc_bias)
{
    const double scale = scene.detector.responsivity * scene.led.conversion;
    return receiver_noise_variance(scene, h, dc_bias) / (scale * scale);
}

}  // namespace anvlc
