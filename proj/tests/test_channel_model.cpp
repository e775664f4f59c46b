#include "anvlc/channel_model.hpp"

#include <doctest.h>

#include <cmath>

using namespace anvlc;

namespace {

RoomScene one_luminaire(double fov_deg = 70.0)
{
    RoomScene s = RoomScene::reference();
    s.length = 12.0;
    s.width = 12.0;
    s.luminaires = {Luminaire{{0.0, 0.0, s.height}, 1.0}};
    s.detector.field_of_view = deg_to_rad(fov_deg);
    return s;
}

// Irradiance of a unit-power Lambertian source integrated over a square detector
// of the scene's area, by midpoint quadrature.
double integrated_gain(const RoomScene& s, const Luminaire& lum, ReceiverPosition rx)
{
    const int n = 200;
    const double side = std::sqrt(s.detector.area);
    const double cell = side / n;
    const double m = lum.lambertian_order;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double px = rx.x - side / 2 + (i + 0.5) * cell;
            const double py = rx.y - side / 2 + (j + 0.5) * cell;
            const double dx = lum.position.x() - px;
            const double dy = lum.position.y() - py;
            const double dz = lum.position.z() - s.receiver_height;
            const double d2 = dx * dx + dy * dy + dz * dz;
            const double cos_phi = dz / std::sqrt(d2);
            const double intensity = (m + 1.0) / (2.0 * kPi) * std::pow(cos_phi, m);
            total += intensity * cos_phi / d2 * cell * cell;
        }
    }
    return total;
}

}  // namespace

TEST_CASE("gain directly beneath a luminaire")
{
    const auto s = one_luminaire();
    const double h = los_gain(s, 0, {0.0, 0.0});
    CHECK(h == doctest::Approx(6.886e-6).epsilon(1e-3));
    CHECK(h == doctest::Approx(integrated_gain(s, s.luminaires[0], {0.0, 0.0})).epsilon(1e-4));
}

TEST_CASE("gain at sixty degrees follows the cosine-squared law")
{
    const auto s = one_luminaire();
    const double gap = s.height - s.receiver_height;
    const ReceiverPosition rx{gap * std::tan(deg_to_rad(60.0)), 0.0};
    const double h = los_gain(s, 0, rx);
    CHECK(h == doctest::Approx(4.304e-7).epsilon(1e-3));
    CHECK(h == doctest::Approx(integrated_gain(s, s.luminaires[0], rx)).epsilon(1e-4));
    // d grows by 1/cos60 and two cosine factors apply.
    const double below = los_gain(s, 0, {0.0, 0.0});
    CHECK(h == doctest::Approx(below * std::pow(0.5, 2) * std::pow(0.5, 2)).epsilon(1e-12));
}

TEST_CASE("field of view cutoff")
{
    const auto s = one_luminaire();
    const double gap = s.height - s.receiver_height;
    CHECK(los_gain(s, 0, {gap * std::tan(deg_to_rad(69.0)), 0.0}) > 0.0);
    CHECK(los_gain(s, 0, {gap * std::tan(deg_to_rad(71.0)), 0.0}) == 0.0);
    auto wide = one_luminaire(90.0);
    wide.length = wide.width = 40.0;
    const ReceiverPosition far{gap * std::tan(deg_to_rad(80.0)), 0.0};
    CHECK(los_gain(wide, 0, far) > 0.0);
    auto s40 = s;
    s40.length = s40.width = 40.0;
    CHECK(los_gain(s40, 0, far) == 0.0);
}

TEST_CASE("higher Lambertian order")
{
    auto s = one_luminaire();
    s.luminaires[0].lambertian_order = 3.0;
    const ReceiverPosition rx{1.2, -0.7};
    CHECK(los_gain(s, 0, rx) ==
          doctest::Approx(integrated_gain(s, s.luminaires[0], rx)).epsilon(1e-4));
}

TEST_CASE("los_gain input errors")
{
    auto s = one_luminaire();
    CHECK_THROWS_AS(los_gain(s, 1, {0.0, 0.0}), std::out_of_range);
    CHECK_THROWS_AS(los_gain(s, 0, {NAN, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(los_gain(s, 0, {0.0, INFINITY}), std::invalid_argument);
    s.receiver_height = s.height;
    CHECK_THROWS_AS(los_gain(s, 0, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("reference scene channel vectors")
{
    const auto s = RoomScene::reference();
    REQUIRE(s.size() == 4);

    const auto center = channel_vector(s, {0.0, 0.0});
    for (Eigen::Index k = 0; k < 4; ++k) {
        CHECK(center[k] == doctest::Approx(center[0]).epsilon(1e-15));
        CHECK(center[k] == doctest::Approx(integrated_gain(s, s.luminaires[k], {0.0, 0.0}))
                               .epsilon(1e-4));
    }

    const auto& p0 = s.luminaires[0].position;
    const auto under = channel_vector(s, {p0.x(), p0.y()});
    for (Eigen::Index k = 1; k < 4; ++k) {
        CHECK(under[0] > under[k]);
    }
}

TEST_CASE("quarter-turn rotation permutes the reference channel")
{
    const auto s = RoomScene::reference();
    // Luminaires sit at (-a,-a), (a,-a), (a,a), (-a,a); (x,y) -> (-y,x) maps k -> k+1.
    for (auto rx : {ReceiverPosition{0.3, -1.1}, ReceiverPosition{2.2, 2.4},
                    ReceiverPosition{-1.9, 0.05}}) {
        const auto h = channel_vector(s, rx);
        const auto r = channel_vector(s, {-rx.y, rx.x});
        for (Eigen::Index k = 0; k < 4; ++k) {
            CHECK(r[(k + 1) % 4] == doctest::Approx(h[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("gain decreases with horizontal offset")
{
    const auto s = one_luminaire();
    double prev = los_gain(s, 0, {0.0, 0.0});
    for (double x = 0.05; x < 5.8; x += 0.05) {
        const double h = los_gain(s, 0, {x, 0.0});
        if (h == 0.0) {
            break;
        }
        CHECK(h < prev);
        prev = h;
    }
}

TEST_CASE("receiver noise terms")
{
    auto s = RoomScene::reference();
    const double amp = s.noise.amplifier_density * s.noise.amplifier_density * s.noise.bandwidth;

    auto dark = s;
    dark.noise.ambient_current = 0.0;
    CHECK(receiver_noise_variance(dark, Vec::Zero(4), 0.5) == doctest::Approx(amp).epsilon(1e-15));

    const auto h = channel_vector(s, {0.0, 0.0});
    const double total = receiver_noise_variance(s, h, 0.5);
    CHECK(total > amp);

    // Term-by-term evaluation with the reference values written out.
    const double e = 1.602176634e-19;
    const double pr = 24 * 0.44 * 0.5 * h.sum();
    const double shot = 2 * e * 0.54 * pr * 20e6;
    const double ambient =
        4 * 3.14159265358979 * e * 0.54 * 1e-4 * 10.93 * (1 - std::cos(70 * 3.14159265358979 / 180)) * 20e6;
    const double amplifier = 5e-12 * 5e-12 * 20e6;
    CHECK(total == doctest::Approx(shot + ambient + amplifier).epsilon(1e-12));
    CHECK(normalized_noise_variance(s, h, 0.5) ==
          doctest::Approx(total / std::pow(0.54 * 0.44, 2)).epsilon(1e-14));
}

TEST_CASE("receiver noise is affine and increasing in the bias")
{
    const auto s = RoomScene::reference();
    const auto h = channel_vector(s, {0.7, -1.3});
    const double n0 = receiver_noise_variance(s, h, 0.0);
    const double n1 = receiver_noise_variance(s, h, 0.5);
    const double n2 = receiver_noise_variance(s, h, 1.0);
    CHECK(n1 > n0);
    CHECK(n2 > n1);
    CHECK(n1 - n0 == doctest::Approx(n2 - n1).epsilon(1e-12));
    CHECK(n0 >= s.noise.amplifier_density * s.noise.amplifier_density * s.noise.bandwidth);
    CHECK_THROWS_AS(receiver_noise_variance(s, -h, 0.5), std::invalid_argument);
}

TEST_CASE("scene validation names the field")
{
    auto s = RoomScene::reference();
    CHECK_NOTHROW(s.validate());
    s.detector.field_of_view = deg_to_rad(-10.0);
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("field_of_view_deg"), std::invalid_argument);
    s = RoomScene::reference();
    s.led.i_min = 1.0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("scene.led.i_min"), std::invalid_argument);
    s = RoomScene::reference();
    s.luminaires.clear();
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("scene.luminaires"), std::invalid_argument);
}
