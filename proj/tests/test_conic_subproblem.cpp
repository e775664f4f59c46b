#include "anvlc/conic_subproblem.hpp"

#include "subproblem_oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace anvlc;

namespace {

TildeData scalar_data(double hb, double he, double cb, double ce, int chips)
{
    TildeData d;
    d.bob_gain = Vec::Constant(1, hb);
    d.eve_gain = Vec::Constant(1, he);
    d.bob_floor = cb;
    d.eve_floor = ce;
    d.chips = chips;
    return d;
}

}  // namespace

TEST_CASE("single-luminaire coefficients by hand expansion")
{
    const double hb = 0.8;
    const double he = 0.3;
    const double cb = 0.5;
    const double ce = 2.0;
    const int nc = 3;
    const double lambda = 0.25;
    const double p = 4.0;
    const double v0 = 0.7;
    const double w0 = -0.2;
    const auto sp = build_subproblem(scalar_data(hb, he, cb, ce, nc), Vec::Constant(1, v0),
                                     Vec::Constant(1, w0), lambda, Vec::Constant(1, p));
    REQUIRE(sp.dim() == 2);
    REQUIRE(sp.constraints.size() == 2);

    // Objective: (nc hb v0)^2 + 2 nc^2 v0 hb^2 (v - v0).
    CHECK(sp.objective_gradient[0] == doctest::Approx(2 * nc * nc * v0 * hb * hb));
    CHECK(sp.objective_gradient[1] == 0.0);
    CHECK(sp.objective_offset == doctest::Approx(-nc * nc * hb * hb * v0 * v0));

    // Eve: (nc he v)^2 / lambda + ce/cb (nc hb w)^2 - 2 nc^2 he^2 w0 w <= ce/cb - (nc he w0)^2.
    const auto& eve = sp.constraints[0];
    for (auto [v, w] : {std::pair{0.3, 0.9}, std::pair{-1.1, 0.4}, std::pair{0.0, -2.0}}) {
        Vec u(2);
        u << v, w;
        const double lhs = std::pow(nc * he * v, 2) / lambda + ce / cb * std::pow(nc * hb * w, 2) -
                           2 * nc * nc * he * he * w0 * w;
        const double rhs = ce / cb - std::pow(nc * he * w0, 2);
        CHECK(eve.value(u) == doctest::Approx(lhs - rhs).epsilon(1e-13));

        // Power: v^2 + w^2 + p/cb (nc hb w)^2 <= p/cb.
        const double plhs = v * v + w * w + p / cb * std::pow(nc * hb * w, 2);
        CHECK(sp.constraints[1].value(u) == doctest::Approx(plhs - p / cb).epsilon(1e-13));
    }
}

TEST_CASE("constraint quadratic forms are positive semidefinite")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const auto sp = oracle::random_instance(rng);
        for (const auto& c : sp.constraints) {
            const Eigen::MatrixXd q = c.factor.transpose() * c.factor;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()));
        }
    }
}

TEST_CASE("gradient of a quadratic constraint")
{
    QuadraticConstraint c;
    c.factor = (Eigen::MatrixXd(2, 3) << 1, 2, 0, 0, -1, 3).finished();
    c.linear = (Vec(3) << 0.5, -1, 2).finished();
    c.bound = 1.5;
    const Vec u = (Vec(3) << 0.3, -0.2, 0.7).finished();
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < 3; ++i) {
        Vec e = Vec::Zero(3);
        e[i] = h;
        const double fd = (c.value(u + e) - c.value(u - e)) / (2 * h);
        CHECK(c.gradient(u)[i] == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("zero linearization point gives a zero gradient and returns the origin")
{
    const auto data = scalar_data(1.0, 0.5, 1.0, 1.0, 1);
    const auto sp = build_subproblem(data, Vec::Zero(1), Vec::Zero(1), 1.0, Vec::Constant(1, 1.0));
    CHECK(sp.objective_gradient.isZero());
    const auto sol = solve_subproblem(sp);
    CHECK(sol.status == SolverStatus::optimal);
    CHECK(sol.v.isZero());
    CHECK(sol.w.isZero());
}

TEST_CASE("single luminaire with a slack Eve cap has the closed-form solution")
{
    // Eve sees almost nothing, so the cap is inactive: maximize g v subject to
    // v^2 + w^2 + kappa w^2 <= rho.
    const double cb = 2.0;
    const double p = 0.0625;
    for (double sign : {1.0, -1.0}) {
        const auto data = scalar_data(1e-3, 1e-9, cb, 1.0, 24);
        const auto sp = build_subproblem(data, Vec::Constant(1, sign * 0.01), Vec::Zero(1), 1e6,
                                         Vec::Constant(1, p));
        const auto sol = solve_subproblem(sp);
        CHECK(sol.status == SolverStatus::optimal);
        CHECK(sol.v[0] == doctest::Approx(sign * std::sqrt(p / cb)).epsilon(1e-7));
        CHECK(std::abs(sol.w[0]) <= 1e-7 * std::sqrt(p / cb));
    }
}

TEST_CASE("random instances agree with the dual oracle")
{
    std::mt19937_64 rng(2024);
    const SolverOptions opts;
    for (int i = 0; i < 60; ++i) {
        CAPTURE(i);
        const auto sp = oracle::random_instance(rng);
        const auto sol = solve_subproblem(sp, opts);
        REQUIRE(sol.status == SolverStatus::optimal);
        const auto bounds = oracle::DualOracle(sp).solve();
        REQUIRE(bounds.upper - bounds.lower <= 1e-8 * std::abs(bounds.upper));
        CHECK(std::abs(sol.objective - bounds.upper) <= 1e-6 * std::abs(bounds.upper));

        CHECK(sol.stationarity <= opts.opt_tol);
        CHECK(sol.complementarity <= opts.opt_tol);
        CHECK(sol.max_violation <= opts.feas_tol);
        // Feasibility on the original quadratic forms.
        const Vec u = sp.pack(sol.v, sol.w);
        for (const auto& c : sp.constraints) {
            const double scale = std::max({std::abs(c.bound), (c.factor * u).squaredNorm(), 1.0});
            CHECK(c.value(u) <= opts.feas_tol * scale);
        }
        CHECK(sol.objective == doctest::Approx(sp.surrogate(u)).epsilon(1e-14));
    }
}

TEST_CASE("solver is deterministic")
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 10; ++i) {
        const auto sp = oracle::random_instance(rng);
        const auto a = solve_subproblem(sp);
        const auto b = solve_subproblem(sp);
        CHECK(a.v == b.v);
        CHECK(a.w == b.w);
        CHECK(a.iterations == b.iterations);
    }
}

TEST_CASE("luminaires without budget are pinned to zero")
{
    std::mt19937_64 rng(1);
    TildeData data;
    data.bob_gain = (Vec(3) << 1e-5, 2e-5, 1.5e-5).finished();
    data.eve_gain = (Vec(3) << 2e-6, 1e-5, 3e-6).finished();
    data.bob_floor = 1e-12;
    data.eve_floor = 2e-12;
    data.chips = 24;
    const Vec budget = (Vec(3) << 0.04, 0.0, 0.04).finished();
    const auto start = initial_point(data, budget, true);
    const auto sp = build_subproblem(data, start.v, start.w, 1.0, budget, true);
    const auto sol = solve_subproblem(sp);
    CHECK(sol.status == SolverStatus::optimal);
    CHECK(sol.v[1] == 0.0);
    CHECK(sol.w[1] == 0.0);
}

TEST_CASE("build_subproblem rejects bad input")
{
    const auto d = scalar_data(1.0, 1.0, 1.0, 1.0, 1);
    const Vec one = Vec::Ones(1);
    CHECK_THROWS_AS(build_subproblem(d, one, one, 0.0, one), std::invalid_argument);
    CHECK_THROWS_AS(build_subproblem(d, one, one, -1.0, one), std::invalid_argument);
    CHECK_THROWS_AS(build_subproblem(d, Vec::Constant(1, NAN), one, 1.0, one), std::invalid_argument);
    CHECK_THROWS_AS(build_subproblem(d, Vec::Ones(2), one, 1.0, one), std::invalid_argument);
    auto bad = d;
    bad.bob_floor = 0.0;
    CHECK_THROWS_AS(build_subproblem(bad, one, one, 1.0, one), std::invalid_argument);
}

TEST_CASE("scheme without artificial noise has half the variables")
{
    const auto d = scalar_data(1.0, 0.5, 1.0, 1.0, 2);
    const auto sp = build_subproblem(d, Vec::Constant(1, 0.1), Vec::Constant(1, 0.3), 1.0,
                                     Vec::Constant(1, 1.0), false);
    CHECK(sp.dim() == 1);
    CHECK(sp.w_prev.isZero());
    const auto sol = solve_subproblem(sp);
    CHECK(sol.w.isZero());
}

TEST_CASE("dump lists every constraint at full precision")
{
    const auto d = scalar_data(0.123456789012345, 0.5, 1.0, 1.0, 2);
    const auto sp = build_subproblem(d, Vec::Constant(1, 0.1), Vec::Constant(1, 0.3), 1.0 / 3.0,
                                     Vec::Constant(1, 1.0));
    std::ostringstream os;
    dump_subproblem(os, sp);
    const auto text = os.str();
    CHECK(text.find("constraint 0 eve") != std::string::npos);
    CHECK(text.find("constraint 1 power") != std::string::npos);
    CHECK(text.find("lambda 0.33333333333333331") != std::string::npos);
    CHECK(os.precision() == 6);
    CHECK(to_string(SolverStatus::infeasible) == "infeasible-detected");
}
