#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace anvlc {

using Vec = Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kElementaryCharge = 1.602176634e-19;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// A ceiling luminaire. The normal always points straight down.
struct Luminaire {
    Eigen::Vector3d position{0.0, 0.0, 3.0};
    double lambertian_order = 1.0;
};

/// LED parameters shared by every luminaire in a scene.
struct LedParams {
    int chips = 24;            ///< n_c, closely packed chips per luminaire
    double conversion = 0.44;  ///< eta, W/A
    double i_min = 0.0;        ///< A
    double i_max = 1.0;        ///< A
};

/// Photodiode front end. The receiver normal always points straight up.
struct DetectorParams {
    double area = 1e-4;                  ///< A_r, m^2
    double responsivity = 0.54;          ///< gamma, A/W
    double field_of_view = deg_to_rad(70.0);  ///< Psi, rad
};

struct NoiseParams {
    double bandwidth = 20e6;           ///< B_mod, Hz
    double ambient_current = 10.93;    ///< chi_amb, A/(m^2 sr)
    double amplifier_density = 5e-12;  ///< i_amp, A/sqrt(Hz)
    double elementary_charge = kElementaryCharge;
};

/// Room geometry, centered at the origin in x/y with the floor at z = 0.
struct RoomScene {
    double length = 5.0;
    double width = 5.0;
    double height = 3.0;
    double receiver_height = 0.85;
    std::vector<Luminaire> luminaires;
    LedParams led;
    DetectorParams detector;
    NoiseParams noise;

    std::size_t size() const { return luminaires.size(); }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// The four-luminaire reference layout with the default parameters above.
    static RoomScene reference();
};

struct ReceiverPosition {
    double x = 0.0;
    double y = 0.0;
};

/// Per-luminaire LoS DC gains for one receiver (per chip).
using ChannelVector = Vec;

/// Lambertian point-source LoS gain from luminaire `index` to `rx`.
/// Zero outside the detector field of view.
double los_gain(const RoomScene& scene, std::size_t index, const ReceiverPosition& rx);

ChannelVector channel_vector(const RoomScene& scene, const ReceiverPosition& rx);

/// Shot + ambient + amplifier noise variance (A^2) at a receiver with gains `h`,
/// with every luminaire biased at `dc_bias`.
double receiver_noise_variance(const RoomScene& scene, const ChannelVector& h, double dc_bias);

/// Receiver noise divided by (gamma * eta)^2, the form used in the SINR expressions.
double normalized_noise_variance(const RoomScene& scene, const ChannelVector& h, double dc_bias);

bool inside_footprint(const RoomScene& scene, const ReceiverPosition& rx);

}  // namespace anvlc
