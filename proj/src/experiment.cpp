#include "anvlc/experiment.hpp"

#include "anvlc/clipping_stats.hpp"
#include "anvlc/montecarlo.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace anvlc {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) {
        throw ConfigError(prefix + ": expected an object");
    }
    for (const auto& item : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return item.key() == k; })) {
            throw ConfigError(prefix + "." + item.key() + ": unknown key");
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& prefix, T& out)
{
    if (!obj.contains(key)) {
        return;
    }
    const auto& node = obj.at(key);
    if constexpr (std::is_floating_point_v<T>) {
        if (!node.is_number()) {
            throw ConfigError(prefix + "." + key + ": expected a number");
        }
    } else if constexpr (std::is_integral_v<T>) {
        if (!node.is_number_integer() && !node.is_number_unsigned()) {
            throw ConfigError(prefix + "." + key + ": expected an integer");
        }
    }
    try {
        out = node.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(prefix + "." + key + ": wrong type");
    }
}

std::vector<double> read_list(const json& node, const std::string& key)
{
    if (!node.is_array() || node.empty()) {
        throw ConfigError(key + ": expected a non-empty array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : node) {
        if (!x.is_number()) {
            throw ConfigError(key + ": expected a non-empty array of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

ReceiverPosition read_position(const json& node, const std::string& key)
{
    const auto xy = read_list(node, key);
    if (xy.size() != 2) {
        throw ConfigError(key + ": expected [x, y]");
    }
    return {xy[0], xy[1]};
}

void parse_scene(const json& s, RoomScene& scene)
{
    const std::string p = "scene";
    check_keys(s, p,
               {"length", "width", "height", "receiver_height", "luminaires", "led", "detector",
                "noise"});
    read(s, "length", p, scene.length);
    read(s, "width", p, scene.width);
    read(s, "height", p, scene.height);
    read(s, "receiver_height", p, scene.receiver_height);
    if (s.contains("luminaires")) {
        const auto& list = s.at("luminaires");
        if (!list.is_array()) {
            throw ConfigError("scene.luminaires: expected an array");
        }
        scene.luminaires.clear();
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string lp = "scene.luminaires[" + std::to_string(k) + "]";
            check_keys(list[k], lp, {"position", "lambertian_order"});
            if (!list[k].contains("position")) {
                throw ConfigError(lp + ".position: required");
            }
            const auto pos = read_list(list[k].at("position"), lp + ".position");
            if (pos.size() != 2 && pos.size() != 3) {
                throw ConfigError(lp + ".position: expected [x, y] or [x, y, z]");
            }
            Luminaire lum;
            lum.position = {pos[0], pos[1], pos.size() == 3 ? pos[2] : scene.height};
            read(list[k], "lambertian_order", lp, lum.lambertian_order);
            scene.luminaires.push_back(lum);
        }
    } else {
        // Keep the reference layout on the (possibly overridden) ceiling.
        for (auto& lum : scene.luminaires) {
            lum.position.z() = scene.height;
        }
    }
    if (s.contains("led")) {
        const auto& led = s.at("led");
        check_keys(led, "scene.led", {"chips", "conversion", "i_min", "i_max"});
        read(led, "chips", "scene.led", scene.led.chips);
        read(led, "conversion", "scene.led", scene.led.conversion);
        read(led, "i_min", "scene.led", scene.led.i_min);
        read(led, "i_max", "scene.led", scene.led.i_max);
    }
    if (s.contains("detector")) {
        const auto& pd = s.at("detector");
        check_keys(pd, "scene.detector", {"area", "responsivity", "field_of_view_deg"});
        read(pd, "area", "scene.detector", scene.detector.area);
        read(pd, "responsivity", "scene.detector", scene.detector.responsivity);
        if (pd.contains("field_of_view_deg")) {
            double deg = 0.0;
            read(pd, "field_of_view_deg", "scene.detector", deg);
            scene.detector.field_of_view = deg_to_rad(deg);
        }
    }
    if (s.contains("noise")) {
        const auto& n = s.at("noise");
        check_keys(n, "scene.noise",
                   {"bandwidth", "ambient_current", "amplifier_density", "elementary_charge"});
        read(n, "bandwidth", "scene.noise", scene.noise.bandwidth);
        read(n, "ambient_current", "scene.noise", scene.noise.ambient_current);
        read(n, "amplifier_density", "scene.noise", scene.noise.amplifier_density);
        read(n, "elementary_charge", "scene.noise", scene.noise.elementary_charge);
    }
}

std::string num(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string db(double linear) { return linear > 0.0 ? num(to_db(linear)) : "-inf"; }

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_) {
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        }
        write(header);
    }

    void write(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
        out_.flush();
        ++rows_;
    }

    int data_rows() const { return rows_ - 1; }

private:
    std::ofstream out_;
    int rows_ = 0;
};

struct Metadata {
    std::vector<std::pair<std::string, std::string>> entries;
    void set(const std::string& k, const std::string& v) { entries.emplace_back(k, v); }
};

void write_metadata(const std::filesystem::path& path, const Metadata& meta)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& [k, v] : meta.entries) {
        out << k << '=' << v << '\n';
    }
}

std::vector<std::string> sweep_header()
{
    return {"lambda_dB",
            "sigma_p_A",
            "dc_bias_A",
            "scheme",
            "placements",
            "sinr_bob_dB",
            "sinr_eve_dB",
            "tilde_sinr_bob_dB",
            "tilde_sinr_eve_dB",
            "sinr_bob_mean_dB",
            "sinr_eve_mean_dB",
            "tilde_sinr_bob_mean_dB",
            "tilde_sinr_eve_mean_dB",
            "secrecy_rate_bpsHz",
            "secrecy_rate_clamped_bpsHz",
            "tilde_secrecy_rate_bpsHz",
            "tilde_secrecy_rate_clamped_bpsHz",
            "mean_iterations",
            "degenerate",
            "infeasible"};
}

std::vector<std::string> sweep_cells(const SweepRow& r)
{
    return {num(r.lambda_db),
            num(r.sigma_p),
            num(r.dc_bias),
            scheme_name(r.scheme),
            std::to_string(r.placements),
            db(r.exact.bob),
            db(r.exact.eve),
            db(r.tilde.bob),
            db(r.tilde.eve),
            num(r.exact_mean_db.bob),
            num(r.exact_mean_db.eve),
            num(r.tilde_mean_db.bob),
            num(r.tilde_mean_db.eve),
            num(r.secrecy_rate),
            num(r.secrecy_rate_clamped),
            num(r.tilde_secrecy_rate),
            num(r.tilde_secrecy_rate_clamped),
            num(r.mean_iterations),
            std::to_string(r.degenerate),
            std::to_string(r.infeasible)};
}

void run_sweep(const ExperimentConfig& cfg, CsvWriter& csv)
{
    for (double lambda_db : cfg.lambda_db) {
        SweepConfig sc;
        sc.ccp = cfg.optimizer;
        sc.ccp.lambda_db = lambda_db;
        sc.sigma_p = cfg.sigma_p;
        sc.placements = cfg.placements;
        sc.seed = cfg.seed;
        sc.workers = cfg.workers;
        placement_sweep(cfg.scene, sc, [&](const SweepRow& row) { csv.write(sweep_cells(row)); });
    }
}

void run_single(const ExperimentConfig& cfg, CsvWriter& csv)
{
    auto [bob, eve] = draw_placement(cfg.scene, cfg.seed, 0);
    if (cfg.bob) {
        bob = *cfg.bob;
    }
    if (cfg.eve) {
        eve = *cfg.eve;
    }
    const auto h_bob = channel_vector(cfg.scene, bob);
    const auto h_eve = channel_vector(cfg.scene, eve);
    const double sp = cfg.focus_sigma_p;
    const Vec budget = Vec::Constant(static_cast<Eigen::Index>(cfg.scene.size()), sp * sp);
    for (double lambda_db : cfg.lambda_db) {
        CcpConfig cc = cfg.optimizer;
        cc.lambda_db = lambda_db;
        for (Scheme scheme : {Scheme::artificial_noise, Scheme::no_artificial_noise}) {
            const auto res = scheme == Scheme::artificial_noise
                                 ? ccp_solve(cfg.scene, h_bob, h_eve, cc, budget, 2.0 * sp)
                                 : no_an_solve(cfg.scene, h_bob, h_eve, cc, budget, 2.0 * sp);
            const auto& r = res.report;
            std::vector<std::string> cells{num(lambda_db),
                                           scheme_name(scheme),
                                           num(bob.x),
                                           num(bob.y),
                                           num(eve.x),
                                           num(eve.y),
                                           num(sp),
                                           num(2.0 * sp),
                                           db(r.exact.bob),
                                           db(r.exact.eve),
                                           db(r.tilde.bob),
                                           db(r.tilde.eve),
                                           num(r.secrecy_rate),
                                           num(r.secrecy_rate_clamped),
                                           num(r.tilde_secrecy_rate),
                                           num(r.tilde_secrecy_rate_clamped),
                                           std::to_string(res.trace.iterations),
                                           res.trace.converged ? "1" : "0",
                                           r.feasible ? "1" : "0",
                                           r.degenerate ? "1" : "0"};
            for (Eigen::Index k = 0; k < res.precoders.v.size(); ++k) {
                cells.push_back(num(res.precoders.v[k]));
            }
            for (Eigen::Index k = 0; k < res.precoders.w.size(); ++k) {
                cells.push_back(num(res.precoders.w[k]));
            }
            csv.write(cells);
        }
    }
}

std::vector<std::string> single_header(std::size_t luminaires)
{
    std::vector<std::string> h{"lambda_dB",
                               "scheme",
                               "bob_x_m",
                               "bob_y_m",
                               "eve_x_m",
                               "eve_y_m",
                               "sigma_p_A",
                               "dc_bias_A",
                               "sinr_bob_dB",
                               "sinr_eve_dB",
                               "tilde_sinr_bob_dB",
                               "tilde_sinr_eve_dB",
                               "secrecy_rate_bpsHz",
                               "secrecy_rate_clamped_bpsHz",
                               "tilde_secrecy_rate_bpsHz",
                               "tilde_secrecy_rate_clamped_bpsHz",
                               "iterations",
                               "converged",
                               "feasible",
                               "degenerate"};
    for (std::size_t k = 0; k < luminaires; ++k) {
        h.push_back("v" + std::to_string(k + 1) + "_A");
    }
    for (std::size_t k = 0; k < luminaires; ++k) {
        h.push_back("w" + std::to_string(k + 1) + "_A");
    }
    return h;
}

void run_convergence(const ExperimentConfig& cfg, CsvWriter& csv)
{
    const int iters = cfg.optimizer.max_iters;
    for (double lambda_db : cfg.lambda_db) {
        CcpConfig cc = cfg.optimizer;
        cc.lambda_db = lambda_db;
        const auto outcomes = solve_placements(cfg.scene, cc, cfg.focus_sigma_p, cfg.placements,
                                               cfg.seed, cfg.workers);
        std::vector<double> objective(static_cast<std::size_t>(iters), 0.0);
        std::vector<double> relative(static_cast<std::size_t>(iters), 0.0);
        std::vector<double> step_v(static_cast<std::size_t>(iters), 0.0);
        std::vector<double> step_w(static_cast<std::size_t>(iters), 0.0);
        std::vector<int> converged(static_cast<std::size_t>(iters), 0);
        for (const auto& o : outcomes) {
            const auto& t = o.with_noise.trace;
            const double final_value = t.objective.back();
            for (int i = 0; i < iters; ++i) {
                // Converged runs stay at their last iterate.
                const auto k = static_cast<std::size_t>(std::min(i, t.iterations - 1));
                const auto idx = static_cast<std::size_t>(i);
                objective[idx] += t.objective[k];
                relative[idx] += final_value > 0.0 ? t.objective[k] / final_value : 1.0;
                step_v[idx] += i < t.iterations ? std::min(t.step_v[k], 1e300) : 0.0;
                step_w[idx] += i < t.iterations ? std::min(t.step_w[k], 1e300) : 0.0;
                converged[idx] += (t.converged && i >= t.iterations - 1) ? 1 : 0;
            }
        }
        const double m = static_cast<double>(outcomes.size());
        for (int i = 0; i < iters; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            csv.write({num(lambda_db), num(cfg.focus_sigma_p), std::to_string(i + 1),
                       num(objective[idx] / m), num(relative[idx] / m), num(step_v[idx] / m),
                       num(step_w[idx] / m), num(converged[idx] / m)});
        }
    }
}

void run_validate(const ExperimentConfig& cfg, CsvWriter& csv)
{
    const auto& led = cfg.scene.led;
    for (std::size_t i = 0; i < cfg.sigma_p.size(); ++i) {
        const double sigma = cfg.sigma_p[i];
        const double bias = 2.0 * sigma;
        const auto window = ClipWindow::from_bias(led, bias);
        const auto analytic = bussgang_stats(window, sigma);
        const auto mc = bussgang_monte_carlo(window, sigma, cfg.validate_samples,
                                             cfg.seed + i, analytic.attenuation);
        const double var = analytic.clip_noise_std * analytic.clip_noise_std;
        const double z_r = (mc.attenuation - analytic.attenuation) / mc.attenuation_se_model;
        const double z_v = (mc.clip_noise_var - var) / mc.clip_noise_var_se_model;
        const double corr_bound = 3.0 / std::sqrt(static_cast<double>(mc.samples));
        const bool pass = std::abs(z_r) <= 3.0 && std::abs(z_v) <= 3.0 &&
                          std::abs(mc.residual_correlation) <= corr_bound;
        csv.write({num(sigma), num(bias), num(window.lower), num(window.upper),
                   num(analytic.attenuation), num(mc.attenuation), num(mc.attenuation_se),
                   num(mc.attenuation_se_model), num(z_r), num(analytic.clip_noise_std), num(std::sqrt(mc.clip_noise_var)),
                   num(z_v), num(mc.residual_correlation), num(corr_bound),
                   num(mc.clip_noise_mean), std::to_string(mc.samples), pass ? "1" : "0"});
    }
}

}  // namespace

void ExperimentConfig::validate() const
{
    try {
        scene.validate();
        optimizer.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto check_sigma = [&](double s, const std::string& key) {
        const double bias = 2.0 * s;
        if (!(s > 0.0) || bias < scene.led.i_min || bias > scene.led.i_max) {
            throw ConfigError(key + ": sigma_p must be positive with 2*sigma_p inside [i_min, i_max]");
        }
    };
    if (sigma_p.empty()) {
        throw ConfigError("sweep.sigma_p: at least one value is required");
    }
    for (double s : sigma_p) {
        check_sigma(s, "sweep.sigma_p");
    }
    check_sigma(focus_sigma_p, "single.sigma_p");
    if (lambda_db.empty()) {
        throw ConfigError("sweep.lambda_db: at least one value is required");
    }
    for (double l : lambda_db) {
        if (!std::isfinite(l) || from_db(l) < kMinLambdaLinear) {
            throw ConfigError("sweep.lambda_db: values must be finite and at least -60 dB");
        }
    }
    if (placements < 1) {
        throw ConfigError("sweep.placements: must be at least 1");
    }
    if (workers < 0) {
        throw ConfigError("sweep.workers: must be non-negative");
    }
    if (validate_samples < 2) {
        throw ConfigError("validate.samples: must be at least 2");
    }
    for (const auto& [pos, key] : {std::pair{bob, "single.bob"}, std::pair{eve, "single.eve"}}) {
        if (pos && (!std::isfinite(pos->x) || !std::isfinite(pos->y) ||
                    !inside_footprint(scene, *pos))) {
            throw ConfigError(std::string(key) + ": must lie inside the room footprint");
        }
    }
}

ExperimentConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object()
                                                                       : json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    check_keys(root, "config", {"scene", "optimizer", "sweep", "single", "validate"});
    if (root.contains("scene")) {
        parse_scene(root.at("scene"), cfg.scene);
    }
    if (root.contains("optimizer")) {
        const auto& o = root.at("optimizer");
        const std::string p = "optimizer";
        check_keys(o, p,
                   {"max_iters", "rel_tol", "lambda_db", "feas_tol", "opt_tol", "solver_max_iters"});
        read(o, "max_iters", p, cfg.optimizer.max_iters);
        read(o, "rel_tol", p, cfg.optimizer.rel_tol);
        read(o, "lambda_db", p, cfg.optimizer.lambda_db);
        read(o, "feas_tol", p, cfg.optimizer.solver.feas_tol);
        read(o, "opt_tol", p, cfg.optimizer.solver.opt_tol);
        read(o, "solver_max_iters", p, cfg.optimizer.solver.max_iterations);
    }
    if (root.contains("sweep")) {
        const auto& s = root.at("sweep");
        check_keys(s, "sweep", {"sigma_p", "lambda_db", "placements", "seed", "workers"});
        if (s.contains("sigma_p")) {
            cfg.sigma_p = read_list(s.at("sigma_p"), "sweep.sigma_p");
        }
        if (s.contains("lambda_db")) {
            cfg.lambda_db = read_list(s.at("lambda_db"), "sweep.lambda_db");
        }
        read(s, "placements", "sweep", cfg.placements);
        read(s, "seed", "sweep", cfg.seed);
        read(s, "workers", "sweep", cfg.workers);
    }
    if (root.contains("single")) {
        const auto& s = root.at("single");
        check_keys(s, "single", {"bob", "eve", "sigma_p"});
        if (s.contains("bob")) {
            cfg.bob = read_position(s.at("bob"), "single.bob");
        }
        if (s.contains("eve")) {
            cfg.eve = read_position(s.at("eve"), "single.eve");
        }
        read(s, "sigma_p", "single", cfg.focus_sigma_p);
    }
    if (root.contains("validate")) {
        const auto& v = root.at("validate");
        check_keys(v, "validate", {"samples"});
        read(v, "samples", "validate", cfg.validate_samples);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& cfg)
{
    json scene;
    const auto& s = cfg.scene;
    scene["length"] = s.length;
    scene["width"] = s.width;
    scene["height"] = s.height;
    scene["receiver_height"] = s.receiver_height;
    json lums = json::array();
    for (const auto& l : s.luminaires) {
        lums.push_back({{"position", {l.position.x(), l.position.y(), l.position.z()}},
                        {"lambertian_order", l.lambertian_order}});
    }
    scene["luminaires"] = lums;
    scene["led"] = {{"chips", s.led.chips},
                    {"conversion", s.led.conversion},
                    {"i_min", s.led.i_min},
                    {"i_max", s.led.i_max}};
    scene["detector"] = {{"area", s.detector.area},
                         {"responsivity", s.detector.responsivity},
                         {"field_of_view_deg", s.detector.field_of_view * 180.0 / kPi}};
    scene["noise"] = {{"bandwidth", s.noise.bandwidth},
                      {"ambient_current", s.noise.ambient_current},
                      {"amplifier_density", s.noise.amplifier_density},
                      {"elementary_charge", s.noise.elementary_charge}};
    json root;
    root["scene"] = scene;
    root["optimizer"] = {{"max_iters", cfg.optimizer.max_iters},
                         {"rel_tol", cfg.optimizer.rel_tol},
                         {"lambda_db", cfg.optimizer.lambda_db},
                         {"feas_tol", cfg.optimizer.solver.feas_tol},
                         {"opt_tol", cfg.optimizer.solver.opt_tol},
                         {"solver_max_iters", cfg.optimizer.solver.max_iterations}};
    // Worker count is excluded: results do not depend on it.
    root["sweep"] = {{"sigma_p", cfg.sigma_p},
                     {"lambda_db", cfg.lambda_db},
                     {"placements", cfg.placements},
                     {"seed", cfg.seed}};
    json single = {{"sigma_p", cfg.focus_sigma_p}};
    if (cfg.bob) {
        single["bob"] = {cfg.bob->x, cfg.bob->y};
    }
    if (cfg.eve) {
        single["eve"] = {cfg.eve->x, cfg.eve->y};
    }
    root["single"] = single;
    root["validate"] = {{"samples", cfg.validate_samples}};
    return root.dump();
}

std::string config_hash(const ExperimentConfig& cfg)
{
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& command,
                         const std::filesystem::path& out_dir)
{
    RunResult result;
    std::vector<std::string> header;
    if (command == "sweep") {
        header = sweep_header();
    } else if (command == "single") {
        header = single_header(cfg.scene.size());
    } else if (command == "convergence") {
        header = {"lambda_dB",     "sigma_p_A",       "iteration",       "objective",
                  "objective_rel_final", "step_v_rel", "step_w_rel", "converged_fraction"};
    } else if (command == "validate") {
        header = {"sigma_A",        "dc_bias_A",      "window_lower_A", "window_upper_A",
                  "attenuation",    "attenuation_mc", "attenuation_se", "attenuation_se_model",
                  "attenuation_z",  "clip_std_A",     "clip_std_mc_A",  "clip_var_z",
                  "residual_corr",  "residual_corr_bound", "clip_mean_mc_A", "samples", "pass"};
    } else {
        result.exit_code = kExitConfig;
        result.message = "unknown command '" + command + "'";
        return result;
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        result.exit_code = kExitConfig;
        result.message = e.what();
        return result;
    }

    std::filesystem::create_directories(out_dir);
    result.csv = out_dir / (command + ".csv");
    result.metadata = out_dir / (command + ".meta.txt");
    CsvWriter csv(result.csv, header);

    try {
        if (command == "sweep") {
            run_sweep(cfg, csv);
        } else if (command == "single") {
            run_single(cfg, csv);
        } else if (command == "convergence") {
            run_convergence(cfg, csv);
        } else {
            run_validate(cfg, csv);
        }
    } catch (const ConfigError& e) {
        result.exit_code = kExitConfig;
        result.partial = true;
        result.message = e.what();
    } catch (const std::invalid_argument& e) {
        result.exit_code = kExitConfig;
        result.partial = true;
        result.message = e.what();
    } catch (const std::exception& e) {
        result.exit_code = kExitSolver;
        result.partial = true;
        result.message = e.what();
    }

    Metadata meta;
    meta.set("tool", "anvlc");
    meta.set("tool_version", kToolVersion);
    meta.set("csv_schema_version", std::to_string(kCsvSchemaVersion));
    meta.set("command", command);
    meta.set("seed", std::to_string(cfg.seed));
    meta.set("config_hash", config_hash(cfg));
    meta.set("placements", std::to_string(cfg.placements));
    meta.set("sinr_averaging", "dB columns are 10log10 of the mean linear SINR; *_mean_dB columns "
                               "are the mean of per-placement dB values");
    meta.set("secrecy_rate_averaging",
             "mean of raw (unclamped) rates; *_clamped columns average max(0, rate)");
    meta.set("placement_rule", "bob and eve i.i.d. uniform over the receiver plane");
    meta.set("bias_rule", "dc_bias = 2 * sigma_p, power cap = sigma_p^2 per luminaire");
    meta.set("rows", std::to_string(csv.data_rows()));
    meta.set("partial", result.partial ? "true" : "false");
    if (!result.message.empty()) {
        meta.set("error", result.message);
    }
    write_metadata(result.metadata, meta);
    return result;
}

}  // namespace anvlc
