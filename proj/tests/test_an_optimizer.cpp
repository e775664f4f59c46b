#include "anvlc/an_optimizer.hpp"
#include "anvlc/clipping_stats.hpp"
#include "anvlc/montecarlo.hpp"

#include <doctest.h>

#include <cmath>

using namespace anvlc;

namespace {

struct Setup {
    RoomScene scene = RoomScene::reference();
    ChannelVector hb;
    ChannelVector he;
    Vec budget;
    double dc = 0.5;
};

Setup setup(ReceiverPosition bob, ReceiverPosition eve, double sigma_p = 0.25)
{
    Setup s;
    s.hb = channel_vector(s.scene, bob);
    s.he = channel_vector(s.scene, eve);
    s.budget = Vec::Constant(4, sigma_p * sigma_p);
    s.dc = 2.0 * sigma_p;
    return s;
}

// Transformed Eve cap and power caps checked by direct substitution, with t from the
// Bob normalization.
bool transformed_feasible(const TildeData& d, const Vec& v, const Vec& w, double lambda,
                          const Vec& budget)
{
    double sb = 0.0;
    double se = 0.0;
    double je = 0.0;
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        sb += d.chips * d.bob_gain[n] * w[n];
        se += d.chips * d.eve_gain[n] * v[n];
        je += d.chips * d.eve_gain[n] * w[n];
    }
    const double t2 = (1.0 - sb * sb) / d.bob_floor;
    if (!(t2 > 0.0)) {
        return false;
    }
    if (se * se > lambda * (je * je + d.eve_floor * t2) * (1.0 + 1e-12)) {
        return false;
    }
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        if (v[n] * v[n] + w[n] * w[n] > budget[n] * t2 * (1.0 + 1e-12)) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("initial point with orthogonal channels")
{
    TildeData d;
    d.bob_gain = (Vec(4) << 1, 0, 1, 0).finished() * 1e-5;
    d.eve_gain = (Vec(4) << 0, 1, 0, 1).finished() * 1e-5;
    d.bob_floor = 1e-12;
    d.eve_floor = 1e-12;
    d.chips = 24;
    const Vec budget = Vec::Constant(4, 0.0625);
    const auto p = initial_point(d, budget, true);
    CHECK_FALSE(p.degenerate);
    // Projection leaves the Bob direction unchanged.
    CHECK(std::abs(p.v.normalized().dot(d.bob_gain.normalized())) == doctest::Approx(1.0));
    CHECK(d.eve_gain.dot(p.v) == doctest::Approx(0.0));
    CHECK(d.bob_gain.dot(p.w) == doctest::Approx(0.0));
    CHECK(transformed_feasible(d, p.v, p.w, 1.0, budget));
}

TEST_CASE("initial point with parallel channels is degenerate")
{
    TildeData d;
    d.bob_gain = (Vec(3) << 1, 2, 3).finished() * 1e-6;
    d.eve_gain = 0.5 * d.bob_gain;
    d.bob_floor = 1e-12;
    d.eve_floor = 1e-12;
    d.chips = 24;
    const auto p = initial_point(d, Vec::Constant(3, 0.04), true);
    CHECK(p.degenerate);
    CHECK(p.v.isZero());
}

TEST_CASE("initial point is feasible on random reference placements")
{
    const auto scene = RoomScene::reference();
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto [bob, eve] = draw_placement(scene, 17, i);
        for (double sp : {0.05, 0.25, 0.45}) {
            const auto s = setup(bob, eve, sp);
            const auto d = tilde_data(scene, s.hb, s.he, s.budget, s.dc);
            for (bool an : {true, false}) {
                const auto p = initial_point(d, s.budget, an);
                for (double lambda_db : {0.0, -5.0, -20.0}) {
                    CHECK(transformed_feasible(d, p.v, p.w, from_db(lambda_db), s.budget));
                }
                if (!an) {
                    CHECK(p.w.isZero());
                }
            }
        }
    }
}

TEST_CASE("single luminaire with a slack cap transmits at full power")
{
    RoomScene scene = RoomScene::reference();
    scene.luminaires.resize(1);
    const auto hb = channel_vector(scene, {-1.0, -1.2});
    const auto he = channel_vector(scene, {2.0, 2.0});
    const double sp = 0.25;
    const Vec budget = Vec::Constant(1, sp * sp);
    CcpConfig cfg;
    cfg.lambda_db = 60.0;
    const auto res = ccp_solve(scene, hb, he, cfg, budget, 2 * sp);
    CHECK(std::abs(res.precoders.v[0]) == doctest::Approx(sp).epsilon(1e-6));
    CHECK(std::abs(res.precoders.w[0]) <= 1e-6 * sp);
    const auto d = tilde_data(scene, hb, he, budget, 2 * sp);
    const double expected = std::pow(d.chips * d.bob_gain[0], 2) * budget[0] / d.bob_floor;
    CHECK(res.report.tilde.bob == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("designs satisfy the caps and the Charnes-Cooper recovery is consistent")
{
    const auto scene = RoomScene::reference();
    for (std::uint64_t i = 0; i < 40; ++i) {
        const auto [bob, eve] = draw_placement(scene, 3, i);
        const auto s = setup(bob, eve);
        for (double lambda_db : {0.0, -5.0}) {
            CcpConfig cfg;
            cfg.lambda_db = lambda_db;
            for (bool an : {true, false}) {
                const auto res = an ? ccp_solve(scene, s.hb, s.he, cfg, s.budget, s.dc)
                                    : no_an_solve(scene, s.hb, s.he, cfg, s.budget, s.dc);
                const auto& r = res.report;
                CHECK(r.feasible);
                CHECK(res.precoders.feasible(1e-9));
                CHECK(r.tilde.eve <= from_db(lambda_db) + 1e-6);
                CHECK(r.tilde.bob == doctest::Approx(res.trace.objective.back()).epsilon(1e-9));
                CHECK(r.secrecy_rate ==
                      doctest::Approx(std::log2(1 + r.exact.bob) - std::log2(1 + r.exact.eve)));
                CHECK(r.scale > 0.0);
                if (!an) {
                    CHECK(res.precoders.w.isZero());
                }
                // CCP objective never decreases.
                double prev = res.trace.initial_objective;
                for (double value : res.trace.objective) {
                    CHECK(value >= prev - 1e-7 * std::max(1.0, value));
                    prev = value;
                }
                CHECK(res.trace.iterations <= cfg.max_iters);
            }
        }
    }
}

TEST_CASE("artificial noise helps on average")
{
    const auto scene = RoomScene::reference();
    CcpConfig cfg;
    double an_rate = 0.0;
    double plain_rate = 0.0;
    int an_not_worse = 0;
    const int count = 40;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto [bob, eve] = draw_placement(scene, 8, i);
        const auto s = setup(bob, eve);
        const auto a = ccp_solve(scene, s.hb, s.he, cfg, s.budget, s.dc);
        const auto b = no_an_solve(scene, s.hb, s.he, cfg, s.budget, s.dc);
        an_rate += a.report.tilde_secrecy_rate;
        plain_rate += b.report.tilde_secrecy_rate;
        an_not_worse += a.report.tilde.bob >= b.report.tilde.bob * (1.0 - 1e-6) ? 1 : 0;
    }
    CHECK(an_rate > plain_rate);
    CHECK(an_not_worse >= count * 9 / 10);
}

TEST_CASE("coincident Bob and Eve is reported as degenerate")
{
    const auto s = setup({0.3, 0.4}, {0.3, 0.4});
    CcpConfig cfg;
    const auto res = ccp_solve(s.scene, s.hb, s.he, cfg, s.budget, s.dc);
    CHECK(res.report.degenerate);
    CHECK(res.report.feasible);
    CHECK(res.report.tilde.eve <= 1.0 + 1e-6);
    CHECK(res.precoders.feasible(1e-9));
}

TEST_CASE("single luminaire under a binding cap stays feasible")
{
    RoomScene scene = RoomScene::reference();
    scene.luminaires.resize(1);
    const auto hb = channel_vector(scene, {-1.0, -1.2});
    const auto he = channel_vector(scene, {-0.5, -0.5});
    const Vec budget = Vec::Constant(1, 0.0625);
    for (double lambda_db : {0.0, -5.0}) {
        CcpConfig cfg;
        cfg.lambda_db = lambda_db;
        for (bool an : {true, false}) {
            const auto res = an ? ccp_solve(scene, hb, he, cfg, budget, 0.5)
                                : no_an_solve(scene, hb, he, cfg, budget, 0.5);
            CHECK(res.report.degenerate);
            CHECK(res.report.feasible);
            CHECK(res.report.tilde.bob > 0.0);
            CHECK(res.report.tilde.eve <= from_db(lambda_db) + 1e-6);
        }
    }
}

TEST_CASE("configuration checks")
{
    CcpConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.lambda_linear() == doctest::Approx(1.0));
    cfg.lambda_db = -70.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("lambda_db"), std::invalid_argument);
    cfg = {};
    cfg.max_iters = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("max_iters"), std::invalid_argument);
    cfg = {};
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    const auto s = setup({0.0, 0.0}, {1.0, 1.0});
    CHECK_THROWS_AS(ccp_solve(s.scene, s.hb, s.he, CcpConfig{}, Vec::Ones(3), s.dc),
                    std::invalid_argument);
}
