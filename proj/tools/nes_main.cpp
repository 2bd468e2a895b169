// nes: command line front end over the NES core library.  Every subcommand
// reads JSON/CSV inputs, writes its outputs into --out, and finishes by
// writing run_manifest.json (the manifest is the completion marker).

#include "nes/calibrate.hpp"
#include "nes/errors.hpp"
#include "nes/io.hpp"
#include "nes/measure.hpp"
#include "nes/mixture.hpp"
#include "nes/passage.hpp"
#include "nes/potential.hpp"
#include "nes/pricing.hpp"
#include "nes/simulate.hpp"
#include "nes/susy.hpp"
#include "nes/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Grid {
    double lo = 0.0, hi = 1.0;
    int n = 401;
};

Grid parse_grid(const std::string& s) {
    Grid g;
    char extra;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.n, &extra) != 3 ||
        !(g.lo < g.hi) || g.n < 2)
        throw std::invalid_argument("grid must be lo:hi:n with lo < hi and n >= 2, got '" + s +
                                    "'");
    return g;
}

std::vector<double> linspace(const Grid& g) {
    std::vector<double> out(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        out[static_cast<size_t>(i)] = g.lo + (g.hi - g.lo) * i / (g.n - 1);
    return out;
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("NES_SEED");
    if (!s || !*s) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end) throw std::invalid_argument("NES_SEED must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
}

struct Outputs {
    fs::path dir;
    std::vector<std::string> files;

    std::string path(const std::string& name) {
        files.push_back((dir / name).string());
        return files.back();
    }
};

void finish(Outputs& out, nes::RunManifest m) {
    m.outputs = out.files;
    nes::write_manifest((out.dir / "run_manifest.json").string(), m);
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write file: " + path);
    f << j.dump(2) << '\n';
}

nes::OptionKind parse_kind(const std::string& s) {
    if (s == "call") return nes::OptionKind::call;
    if (s == "put") return nes::OptionKind::put;
    throw std::invalid_argument("kind must be 'call' or 'put', got '" + s + "'");
}

std::string resolved(const std::string& p) { return fs::absolute(p).string(); }

nes::CalibConfig read_calib_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
    }
    nes::CalibConfig cfg;
    if (j.contains("reg_lambda")) cfg.reg_lambda = j["reg_lambda"].get<double>();
    if (j.contains("atm_weight_boost")) cfg.atm_weight_boost = j["atm_weight_boost"].get<double>();
    if (j.contains("n_starts")) cfg.n_starts = j["n_starts"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<int>();
    if (j.contains("horizon_T")) cfg.horizon_T = j["horizon_T"].get<double>();
    if (j.contains("bounds")) {
        const auto lo = j["bounds"]["lo"].get<std::vector<double>>();
        const auto hi = j["bounds"]["hi"].get<std::vector<double>>();
        if (lo.size() != 5 || hi.size() != 5)
            throw std::invalid_argument(path + ": bounds.lo/hi must have 5 entries");
        std::copy(lo.begin(), lo.end(), cfg.bounds.lo.begin());
        std::copy(hi.begin(), hi.end(), cfg.bounds.hi.begin());
    }
    if (j.contains("init_params")) {
        const auto& ip = j["init_params"];
        nes::NesParams p;
        p.mu1 = ip.at("mu1").get<double>();
        p.mu2 = ip.at("mu2").get<double>();
        p.sigma1 = ip.at("sigma1").get<double>();
        p.sigma2 = ip.at("sigma2").get<double>();
        p.a = ip.at("a").get<double>();
        p.h = ip.at("h").get<double>();
        if (ip.contains("T")) p.T = ip["T"].get<double>();
        cfg.init_params = p;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NES model: potentials, escape rates, densities, pricing, calibration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(NES_VERSION_STRING));

    std::string out_dir = ".";
    int threads = 1;
    app.add_option("--out", out_dir, "output directory (default: current)");
    app.add_option("--threads", threads, "worker threads for parallel sections")
        ->check(CLI::PositiveNumber);

    // potential
    auto* c_pot = app.add_subcommand("potential", "emit (y, Psi0, Psi0^2, V) curve");
    std::string pot_params, pot_grid;
    c_pot->add_option("--params", pot_params, "params JSON")->required();
    c_pot->add_option("--grid", pot_grid, "lo:hi:n (default: auto window)");

    // kramers
    auto* c_kra = app.add_subcommand("kramers", "emit (y0, lambda/h^2) escape-rate curve");
    std::string kra_params, kra_grid;
    double kra_ystar = std::numeric_limits<double>::quiet_NaN();
    c_kra->add_option("--params", kra_params, "params JSON")->required();
    c_kra->add_option("--y0-grid", kra_grid, "lo:hi:n")->required();
    c_kra->add_option("--ystar", kra_ystar, "absorbing threshold (default: global minimum)");

    // susy
    auto* c_susy = app.add_subcommand("susy", "emit (y, Psi0, Psi+, Psi1, G1) and summary");
    std::string susy_params, susy_grid;
    c_susy->add_option("--params", susy_params, "params JSON")->required();
    c_susy->add_option("--grid", susy_grid, "lo:hi:n (default: auto window)");

    // density
    auto* c_den = app.add_subcommand("density", "emit (y, pdf) for a measure density");
    std::string den_params, den_measure = "real", den_market, den_grid;
    double den_y0 = 0.0, den_t = 1.0;
    double den_ystar = std::numeric_limits<double>::quiet_NaN();
    c_den->add_option("--params", den_params, "params JSON")->required();
    c_den->add_option("--measure", den_measure, "real|rn")
        ->check(CLI::IsMember({"real", "rn"}));
    c_den->add_option("--market", den_market, "market JSON (required for rn)");
    c_den->add_option("--y0", den_y0, "initial log-return (real measure)");
    c_den->add_option("--t", den_t, "tilt decay time (real measure, default 1)");
    c_den->add_option("--ystar", den_ystar, "absorbing threshold for single-well potentials");
    c_den->add_option("--grid", den_grid, "lo:hi:n (default: auto window)");

    // price
    auto* c_pri = app.add_subcommand("price", "closed-form NES option prices");
    std::string pri_params, pri_market, pri_kind = "call";
    std::vector<double> pri_strikes;
    double pri_T = 1.0;
    c_pri->add_option("--params", pri_params, "params JSON")->required();
    c_pri->add_option("--market", pri_market, "market JSON")->required();
    c_pri->add_option("--strikes", pri_strikes, "comma-separated strikes")
        ->required()
        ->delimiter(',');
    c_pri->add_option("--T", pri_T, "expiry in years")->required();
    c_pri->add_option("--kind", pri_kind, "call|put")->check(CLI::IsMember({"call", "put"}));

    // calibrate
    auto* c_cal = app.add_subcommand("calibrate", "fit NES params to option quotes");
    std::string cal_quotes, cal_market, cal_kind = "put", cal_config;
    c_cal->add_option("--quotes", cal_quotes, "quotes CSV")->required();
    c_cal->add_option("--market", cal_market, "market JSON")->required();
    c_cal->add_option("--kind", cal_kind, "call|put")->check(CLI::IsMember({"call", "put"}));
    c_cal->add_option("--config", cal_config, "calibration config JSON");

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "Euler-Maruyama terminal sample");
    std::string sim_params, sim_cfg_path;
    c_sim->add_option("--params", sim_params, "params JSON")->required();
    c_sim->add_option("--sim", sim_cfg_path, "sim config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json err{{"error", {{"type", "usage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 2;
    }

    try {
        Outputs out{fs::path(out_dir), {}};
        fs::create_directories(out.dir);
        nes::RunManifest man;
        man.tool_version = NES_VERSION_STRING;

        if (c_pot->parsed()) {
            man.command = "potential";
            const nes::NesParams p = nes::read_params_json(pot_params);
            man.inputs = {{"params", resolved(pot_params)}};
            const nes::PotentialFn pot = nes::make_potential(p);
            const nes::GroundState gs = nes::ground_state(p);
            Grid g;
            if (!pot_grid.empty()) {
                g = parse_grid(pot_grid);
                man.inputs.emplace_back("grid", pot_grid);
            } else {
                auto [lo, hi] = nes::support_window(gs.density.mixture, 6.0);
                g = Grid{lo, hi, 401};
            }
            std::vector<double> ys = linspace(g), psi0(ys.size()), psq(ys.size()), V(ys.size());
            for (size_t i = 0; i < ys.size(); ++i) {
                const double lv = gs.psi.log_value(ys[i]);
                psi0[i] = std::exp(lv);
                psq[i] = std::exp(2.0 * lv);
                V[i] = nes::potential_value(pot, ys[i]);
            }
            nes::write_curve_csv(out.path("potential.csv"), {"y", "psi0", "psi0_sq", "V"},
                                 {ys, psi0, psq, V});
            finish(out, man);
            return 0;
        }

        if (c_kra->parsed()) {
            man.command = "kramers";
            const nes::NesParams p = nes::read_params_json(kra_params);
            man.inputs = {{"params", resolved(kra_params)}, {"y0-grid", kra_grid}};
            const Grid g = parse_grid(kra_grid);
            std::vector<double> y0s = linspace(g), rate(y0s.size());
            const double h2 = p.h * p.h;
            for (size_t i = 0; i < y0s.size(); ++i) {
                const double lam = std::isnan(kra_ystar) ? nes::escape_rate(p, y0s[i])
                                                         : nes::escape_rate(p, y0s[i], kra_ystar);
                rate[i] = lam / h2;
            }
            nes::write_curve_csv(out.path("kramers.csv"), {"y0", "lambda_over_h2"}, {y0s, rate});
            finish(out, man);
            return 0;
        }

        if (c_susy->parsed()) {
            man.command = "susy";
            const nes::NesParams p = nes::read_params_json(susy_params);
            man.inputs = {{"params", resolved(susy_params)}};
            const nes::PartnerGroundState pg(p);
            const nes::LptFirstOrder lpt(pg);
            const nes::FirstExcited psi1 = nes::first_excited_state(pg, lpt);
            Grid g;
            if (!susy_grid.empty()) {
                g = parse_grid(susy_grid);
                man.inputs.emplace_back("grid", susy_grid);
            } else {
                auto [lo, hi] = nes::support_window(pg.gs().density.mixture, 6.0);
                g = Grid{lo, hi, 401};
            }
            std::vector<double> ys = linspace(g), p0(ys.size()), pp(ys.size()), p1(ys.size()),
                G1(ys.size());
            for (size_t i = 0; i < ys.size(); ++i) {
                p0[i] = std::exp(pg.gs().psi.log_value(ys[i]));
                pp[i] = pg.psi_plus(ys[i]);
                p1[i] = psi1(ys[i]);
                G1[i] = lpt.G1(ys[i]);
            }
            nes::write_curve_csv(out.path("susy.csv"), {"y", "psi0", "psi_plus", "psi1", "G1"},
                                 {ys, p0, pp, p1, G1});
            json sum{{"alpha", lpt.alpha()},
                     {"I_plus", pg.I_plus()},
                     {"I_minus", pg.I_minus()},
                     {"E1_bar", lpt.E1_bar()},
                     {"E1_bar_gauss", lpt.E1_bar_gauss()},
                     {"E1", lpt.E1()},
                     {"C1", lpt.C1()},
                     {"escape_rate_E1_over_h2", lpt.E1() / (p.h * p.h)},
                     {"validity_warning", psi1.validity_warning()}};
            write_json_file(out.path("susy_summary.json"), sum);
            finish(out, man);
            return 0;
        }

        if (c_den->parsed()) {
            man.command = "density";
            const nes::NesParams p = nes::read_params_json(den_params);
            man.inputs = {{"params", resolved(den_params)}, {"measure", den_measure}};
            nes::MeasureDensity md;
            if (den_measure == "rn") {
                if (den_market.empty())
                    throw std::invalid_argument("density: --market is required for --measure rn");
                const nes::MarketInput mi = nes::read_market_json(den_market);
                man.inputs.emplace_back("market", resolved(den_market));
                md = nes::risk_neutral_density(p, mi.env);
            } else {
                man.inputs.emplace_back("y0", nes::fmt17(den_y0));
                man.inputs.emplace_back("t", nes::fmt17(den_t));
                md = std::isnan(den_ystar) ? nes::real_density(p, den_y0, den_t)
                                           : nes::real_density(p, den_y0, den_t, den_ystar);
            }
            Grid g;
            if (!den_grid.empty()) {
                g = parse_grid(den_grid);
                man.inputs.emplace_back("grid", den_grid);
            } else {
                auto [lo, hi] = nes::support_window(md.mixture, 8.0);
                g = Grid{lo, hi, 401};
            }
            std::vector<double> ys = linspace(g), f(ys.size());
            for (size_t i = 0; i < ys.size(); ++i) f[i] = nes::pdf(md.mixture, ys[i]);
            nes::write_curve_csv(out.path("density.csv"), {"y", "pdf"}, {ys, f});
            finish(out, man);
            return 0;
        }

        if (c_pri->parsed()) {
            man.command = "price";
            const nes::NesParams p = nes::read_params_json(pri_params);
            const nes::MarketInput mi = nes::read_market_json(pri_market);
            man.inputs = {{"params", resolved(pri_params)},
                          {"market", resolved(pri_market)},
                          {"T", nes::fmt17(pri_T)},
                          {"kind", pri_kind}};
            const nes::OptionKind kind = parse_kind(pri_kind);
            const nes::MeasureDensity q =
                nes::risk_neutral_density(nes::with_horizon(p, pri_T), mi.env);
            std::vector<double> prices(pri_strikes.size()), ivs(pri_strikes.size());
            for (size_t i = 0; i < pri_strikes.size(); ++i) {
                prices[i] = nes::nes_option_price(q, mi.env, pri_strikes[i], kind);
                try {
                    ivs[i] = nes::bs_implied_vol(prices[i], mi.env.spot, pri_strikes[i], pri_T,
                                                 mi.env.r_f, mi.env.q_div, kind);
                } catch (const std::exception&) {
                    ivs[i] = std::numeric_limits<double>::quiet_NaN();
                }
            }
            nes::write_curve_csv(out.path("prices.csv"), {"strike", "price", "implied_vol"},
                                 {pri_strikes, prices, ivs});
            finish(out, man);
            return 0;
        }

        if (c_cal->parsed()) {
            man.command = "calibrate";
            const nes::MarketInput mi = nes::read_market_json(cal_market);
            const nes::OptionKind kind = parse_kind(cal_kind);
            std::vector<nes::OptionQuote> all = nes::read_quotes_csv(cal_quotes);
            std::vector<nes::OptionQuote> quotes;
            for (const auto& q : all)
                if (q.kind == kind) quotes.push_back(q);
            if (quotes.empty())
                throw std::invalid_argument("calibrate: no quotes of kind '" + cal_kind + "' in " +
                                            cal_quotes);
            nes::CalibConfig cfg;
            man.inputs = {{"quotes", resolved(cal_quotes)},
                          {"market", resolved(cal_market)},
                          {"kind", cal_kind}};
            if (!cal_config.empty()) {
                cfg = read_calib_config(cal_config);
                man.inputs.emplace_back("config", resolved(cal_config));
            }
            if (auto s = env_seed()) cfg.seed = *s;
            cfg.threads = threads;
            man.seed = cfg.seed;

            const nes::CalibrationResult res = nes::calibrate(quotes, mi.env, cfg);
            nes::write_calibration_json(out.path("calibration.json"), res);

            const nes::PotentialReport rep = nes::implied_potential_report(res, mi.env, mi.y0);
            nes::write_curve_csv(out.path("implied_potential.csv"), {"y", "V"},
                                 {rep.grid_y, rep.grid_V});
            json crit = json::array();
            for (const auto& c : rep.critical_points)
                crit.push_back({{"y", c.y},
                                {"kind", c.kind == nes::CritKind::minimum ? "minimum" : "maximum"}});
            json rj{{"regime", nes::regime_name(rep.regime)},
                    {"double_well", rep.double_well},
                    {"y0", rep.y0},
                    {"y_global_min", rep.y_global_min},
                    {"sigma_eq", rep.sigma_eq},
                    {"barrier_height", rep.barrier_height},
                    {"critical_points", crit}};
            write_json_file(out.path("potential_report.json"), rj);
            finish(out, man);
            return 0;
        }

        if (c_sim->parsed()) {
            man.command = "simulate";
            const nes::NesParams p = nes::read_params_json(sim_params);
            std::ifstream in(sim_cfg_path, std::ios::binary);
            if (!in) throw std::invalid_argument("cannot open file: " + sim_cfg_path);
            json j;
            try {
                in >> j;
            } catch (const json::parse_error& e) {
                throw std::invalid_argument("invalid JSON in " + sim_cfg_path + ": " + e.what());
            }
            nes::SimConfig cfg;
            if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
            if (j.contains("n_paths")) cfg.n_paths = j["n_paths"].get<long>();
            if (j.contains("horizon")) cfg.horizon = j["horizon"].get<double>();
            if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("y0")) cfg.y0 = j["y0"].get<double>();
            if (auto s = env_seed()) cfg.seed = *s;
            cfg.threads = threads;
            man.inputs = {{"params", resolved(sim_params)}, {"sim", resolved(sim_cfg_path)}};
            man.seed = cfg.seed;

            const std::vector<double> terminal = nes::simulate_paths(p, cfg);
            nes::write_curve_csv(out.path("terminal.csv"), {"y_T"}, {terminal});

            double mean = 0.0;
            for (double v : terminal) mean += v;
            mean /= static_cast<double>(terminal.size());
            double m2 = 0.0, m3 = 0.0, m4 = 0.0;
            for (double v : terminal) {
                const double d = v - mean;
                m2 += d * d;
                m3 += d * d * d;
                m4 += d * d * d * d;
            }
            const double n = static_cast<double>(terminal.size());
            m2 /= n;
            m3 /= n;
            m4 /= n;
            json sum{{"n_paths", cfg.n_paths},
                     {"seed", cfg.seed},
                     {"dt", cfg.dt},
                     {"horizon", cfg.horizon},
                     {"y0", cfg.y0},
                     {"mean", mean},
                     {"variance", m2},
                     {"skewness", m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0},
                     {"kurtosis", m2 > 0 ? m4 / (m2 * m2) : 0.0}};
            write_json_file(out.path("sim_summary.json"), sum);
            finish(out, man);
            return 0;
        }

        json err{{"error", {{"type", "usage"}, {"message", "no subcommand"}}}};
        std::cerr << err.dump() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        json err{{"error", {{"type", "input"}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 3;
    } catch (const std::exception& e) {
        json err{{"error", {{"type", "numerical"}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 4;
    }
}
