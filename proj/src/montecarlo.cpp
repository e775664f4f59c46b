#include "anvlc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace anvlc {

namespace {

// Running mean and co-moments of (a, b).
struct CoMoments {
    std::uint64_t n = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double m2_a = 0.0;
    double m2_b = 0.0;
    double c_ab = 0.0;

    void add(double a, double b)
    {
        ++n;
        const double da = a - mean_a;
        mean_a += da / static_cast<double>(n);
        const double db = b - mean_b;
        mean_b += db / static_cast<double>(n);
        m2_a += da * (a - mean_a);
        m2_b += db * (b - mean_b);
        c_ab += da * (b - mean_b);
    }

    // Power of the component of b explained by a, over the residual power.
    double regression_snr() const
    {
        if (m2_a <= 0.0) {
            return 0.0;
        }
        const double explained = c_ab * c_ab / m2_a;
        const double residual = m2_b - explained;
        return residual > 0.0 ? explained / residual : std::numeric_limits<double>::infinity();
    }

    double correlation() const
    {
        return (m2_a > 0.0 && m2_b > 0.0) ? c_ab / std::sqrt(m2_a * m2_b) : 0.0;
    }
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

LinkReport simulate_link(const RoomScene& scene, const ChannelVector& h_bob,
                         const ChannelVector& h_eve, const PrecoderPair& pc, double dc_bias,
                         std::uint64_t samples, std::uint64_t seed)
{
    const auto n = static_cast<Eigen::Index>(scene.size());
    if (pc.v.size() == 0 || pc.w.size() == 0) {
        throw std::invalid_argument("simulate_link: precoders must be non-empty");
    }
    if (pc.v.size() != n || pc.w.size() != n || h_bob.size() != n || h_eve.size() != n) {
        throw std::invalid_argument("simulate_link: lengths must match the scene");
    }
    if (samples < 2) {
        throw std::invalid_argument("simulate_link: at least two samples are required");
    }

    const auto window = ClipWindow::from_bias(scene.led, dc_bias);
    const auto stats = stats_vector(scene, pc.power(), dc_bias);
    const double front_end =
        scene.detector.responsivity * scene.led.conversion * scene.led.chips;
    const double bob_noise_std = std::sqrt(receiver_noise_variance(scene, h_bob, dc_bias));
    const double eve_noise_std = std::sqrt(receiver_noise_variance(scene, h_eve, dc_bias));

    auto rng = make_rng(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CoMoments bob;
    CoMoments eve;
    Vec clip_sum = Vec::Zero(n);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double d = gauss(rng);
        const double z = gauss(rng);
        double rx_bob = 0.0;
        double rx_eve = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double x = pc.v[k] * d + pc.w[k] * z;
            // The DC bias is added after clipping and removed again at the receiver.
            const double y = std::clamp(x, window.lower, window.upper);
            clip_sum[k] += y - stats.attenuation[k] * x;
            rx_bob += h_bob[k] * y;
            rx_eve += h_eve[k] * y;
        }
        bob.add(d, front_end * rx_bob + bob_noise_std * gauss(rng));
        eve.add(d, front_end * rx_eve + eve_noise_std * gauss(rng));
    }

    LinkReport out;
    out.sinr_bob = bob.regression_snr();
    out.sinr_eve = eve.regression_snr();
    out.clip_noise_mean = clip_sum / static_cast<double>(samples);
    out.samples = samples;
    return out;
}

// Polynomial in t, lowest degree first.
using Poly = std::vector<double>;

Poly multiply(const Poly& a, const Poly& b)
{
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

// int_lo^hi p(t) phi(t) dt, with infinite limits allowed.
double gaussian_integral(const Poly& p, double lo, double hi)
{
    const auto edge = [](double t, int k) {
        if (!std::isfinite(t)) {
            return 0.0;
        }
        return std::pow(t, k) * std_normal_pdf(t);
    };
    // m_k = int t^k phi = -[t^(k-1) phi] + (k-1) m_(k-2)
    std::vector<double> m(p.size(), 0.0);
    m[0] = q_function(lo) - q_function(hi);
    if (m.size() > 1) {
        m[1] = edge(lo, 0) - edge(hi, 0);
    }
    for (std::size_t k = 2; k < m.size(); ++k) {
        const int j = static_cast<int>(k) - 1;
        m[k] = edge(lo, j) - edge(hi, j) + static_cast<double>(j) * m[k - 2];
    }
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        total += p[k] * m[k];
    }
    return total;
}

// E[f(t)] for f given piecewise on the three clipping regions.
template <typename F>
double expect(const ClipWindow& w, double sigma, F&& f)
{
    const double a = w.lower / sigma;
    const double b = w.upper / sigma;
    const double inf = std::numeric_limits<double>::infinity();
    return gaussian_integral(f(Poly{a, 0.0}), -inf, a) + gaussian_integral(f(Poly{0.0, 1.0}), a, b) +
           gaussian_integral(f(Poly{b, 0.0}), b, inf);
}

ClipEstimate bussgang_monte_carlo(const ClipWindow& window, double sigma, std::uint64_t samples,
                                  std::uint64_t seed, double reference_attenuation)
{
    if (!(sigma > 0.0) || samples < 2 || !(window.lower < window.upper)) {
        throw std::invalid_argument("bussgang_monte_carlo: need sigma > 0, a valid window, n >= 2");
    }
    const double count = static_cast<double>(samples);

    // Pass 1: attenuation (ratio estimator) and output variance.
    auto rng = make_rng(seed, 1);
    std::normal_distribution<double> gauss(0.0, sigma);
    double sum_xy = 0.0;
    double sum_xx = 0.0;
    CoMoments output;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double x = gauss(rng);
        const double y = std::clamp(x, window.lower, window.upper);
        sum_xy += x * y;
        sum_xx += x * x;
        output.add(x, y);
    }
    ClipEstimate est;
    est.samples = samples;
    est.attenuation = sum_xy / sum_xx;
    est.clip_output_var = output.m2_b / count;
    // Pass 2 replays the same draws: residual moments for the estimated and reference R.
    rng = make_rng(seed, 1);
    gauss.reset();
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
    double e4 = 0.0;
    double score2 = 0.0;
    CoMoments reference;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double x = gauss(rng);
        const double y = std::clamp(x, window.lower, window.upper);
        const double e = y - est.attenuation * x;
        const double ee = e * e;
        e1 += e;
        e2 += ee;
        e3 += ee * e;
        e4 += ee * ee;
        score2 += x * x * ee;
        reference.add(x, y - reference_attenuation * x);
    }
    const double mu = e1 / count;
    const double m2 = e2 / count - mu * mu;
    const double m4 = e4 / count - 4.0 * mu * e3 / count + 6.0 * mu * mu * e2 / count -
                      3.0 * mu * mu * mu * mu;
    // Standard errors are floored at the rounding level of the accumulated sums, which
    // is reached when no sample clips.
    const double eps = std::numeric_limits<double>::epsilon();
    est.attenuation_se =
        std::max(std::sqrt(score2 / count) / (sum_xx / count) / std::sqrt(count), 4.0 * eps);
    est.clip_noise_mean = mu;
    est.clip_noise_var = m2;
    est.clip_noise_var_se =
        std::max(std::sqrt(std::max(0.0, m4 - m2 * m2) / count), 4.0 * eps * sigma * sigma);
    est.residual_correlation = reference.correlation();

    // Model standard errors in units of sigma: residual g(t) = clip(t) - R t.
    const double r = reference_attenuation;
    const auto residual = [r](const Poly& clipped) {
        Poly g = clipped;
        g[1] -= r;
        return g;
    };
    const double g1 = expect(window, sigma, [&](const Poly& c) { return residual(c); });
    const auto centered = [&](const Poly& c) {
        Poly g = residual(c);
        g[0] -= g1;
        return g;
    };
    const double tg2 = expect(window, sigma, [&](const Poly& c) {
        const Poly g = residual(c);
        return multiply(multiply(g, g), Poly{0.0, 0.0, 1.0});
    });
    const double mu2 = expect(window, sigma, [&](const Poly& c) {
        const Poly g = centered(c);
        return multiply(g, g);
    });
    const double mu4 = expect(window, sigma, [&](const Poly& c) {
        const Poly g = centered(c);
        const Poly g2 = multiply(g, g);
        return multiply(g2, g2);
    });
    const double s2 = sigma * sigma;
    est.attenuation_se_model = std::max(std::sqrt(std::max(tg2, 0.0) / count), 4.0 * eps);
    est.clip_noise_var_se_model =
        std::max(s2 * std::sqrt(std::max(mu4 - mu2 * mu2, 0.0) / count), 4.0 * eps * s2);
    return est;
}

std::string scheme_name(Scheme scheme)
{
    return scheme == Scheme::artificial_noise ? "an" : "no_an";
}

std::pair<ReceiverPosition, ReceiverPosition> draw_placement(const RoomScene& scene,
                                                             std::uint64_t seed,
                                                             std::uint64_t index)
{
    auto rng = make_rng(seed, index + 2);
    std::uniform_real_distribution<double> ux(-scene.length / 2, scene.length / 2);
    std::uniform_real_distribution<double> uy(-scene.width / 2, scene.width / 2);
    ReceiverPosition bob{ux(rng), uy(rng)};
    ReceiverPosition eve{ux(rng), uy(rng)};
    return {bob, eve};
}

std::vector<PlacementOutcome> solve_placements(const RoomScene& scene, const CcpConfig& cfg,
                                               double sigma_p, int placements,
                                               std::uint64_t seed, int workers)
{
    if (placements < 1) {
        throw std::invalid_argument("sweep.placements: must be at least 1");
    }
    if (!(sigma_p > 0.0) || 2.0 * sigma_p < scene.led.i_min || 2.0 * sigma_p > scene.led.i_max) {
        throw std::invalid_argument(
            "sweep.sigma_p: values must be positive with 2*sigma_p inside [i_min, i_max]");
    }
    const auto count = static_cast<std::size_t>(placements);
    const Vec budget = Vec::Constant(static_cast<Eigen::Index>(scene.size()), sigma_p * sigma_p);
    const double dc_bias = 2.0 * sigma_p;

    std::vector<PlacementOutcome> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                auto& o = out[i];
                std::tie(o.bob, o.eve) = draw_placement(scene, seed, i);
                const auto h_bob = channel_vector(scene, o.bob);
                const auto h_eve = channel_vector(scene, o.eve);
                o.with_noise = ccp_solve(scene, h_bob, h_eve, cfg, budget, dc_bias);
                o.without_noise = no_an_solve(scene, h_bob, h_eve, cfg, budget, dc_bias);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int pool = std::clamp(workers > 0 ? workers : hw, 1, placements);
    if (pool == 1) {
        work();
    } else {
        std::vector<std::jthread> threads;
        for (int t = 0; t < pool; ++t) {
            threads.emplace_back(work);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

std::vector<SweepRow> summarize(const std::vector<PlacementOutcome>& outcomes, double lambda_db,
                                double sigma_p)
{
    const double lambda = from_db(lambda_db);
    std::vector<SweepRow> rows;
    for (Scheme scheme : {Scheme::artificial_noise, Scheme::no_artificial_noise}) {
        SweepRow row;
        row.lambda_db = lambda_db;
        row.sigma_p = sigma_p;
        row.dc_bias = 2.0 * sigma_p;
        row.scheme = scheme;
        row.placements = static_cast<int>(outcomes.size());
        row.max_eve_excess = -std::numeric_limits<double>::infinity();
        row.max_power_excess = -std::numeric_limits<double>::infinity();
        for (const auto& o : outcomes) {
            const auto& d = scheme == Scheme::artificial_noise ? o.with_noise : o.without_noise;
            const auto& r = d.report;
            row.exact.bob += r.exact.bob;
            row.exact.eve += r.exact.eve;
            row.tilde.bob += r.tilde.bob;
            row.tilde.eve += r.tilde.eve;
            row.exact_mean_db.bob += to_db(r.exact.bob);
            row.exact_mean_db.eve += to_db(r.exact.eve);
            row.tilde_mean_db.bob += to_db(r.tilde.bob);
            row.tilde_mean_db.eve += to_db(r.tilde.eve);
            row.secrecy_rate += r.secrecy_rate;
            row.secrecy_rate_clamped += r.secrecy_rate_clamped;
            row.tilde_secrecy_rate += r.tilde_secrecy_rate;
            row.tilde_secrecy_rate_clamped += r.tilde_secrecy_rate_clamped;
            row.mean_iterations += d.trace.iterations;
            row.degenerate += r.degenerate ? 1 : 0;
            row.infeasible += r.feasible ? 0 : 1;
            row.max_eve_excess = std::max(row.max_eve_excess, r.tilde.eve - lambda);
            row.max_power_excess = std::max(
                row.max_power_excess, (d.precoders.power() - d.precoders.budget).maxCoeff());
        }
        const double m = static_cast<double>(outcomes.size());
        for (double* x : {&row.exact.bob, &row.exact.eve, &row.tilde.bob, &row.tilde.eve,
                          &row.exact_mean_db.bob, &row.exact_mean_db.eve, &row.tilde_mean_db.bob,
                          &row.tilde_mean_db.eve, &row.secrecy_rate, &row.secrecy_rate_clamped,
                          &row.tilde_secrecy_rate, &row.tilde_secrecy_rate_clamped,
                          &row.mean_iterations}) {
            *x /= m;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<SweepRow> placement_sweep(const RoomScene& scene, const SweepConfig& cfg,
                                      const std::function<void(const SweepRow&)>& sink)
{
    cfg.ccp.validate();
    std::vector<SweepRow> rows;
    for (double sigma_p : cfg.sigma_p) {
        const auto outcomes =
            solve_placements(scene, cfg.ccp, sigma_p, cfg.placements, cfg.seed, cfg.workers);
        for (const auto& row : summarize(outcomes, cfg.ccp.lambda_db, sigma_p)) {
            if (sink) {
                sink(row);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace anvlc
