// experiments.hpp — declarative experiment runner behind the CLI: JSON
// configs in, CSV time series / sweeps plus a machine-checkable JSON summary
// out. Every experiment evaluates its built-in assertions; the process exit
// code is 0 only when all of them hold.
//
// Exit codes: 0 success, 2 invalid config, 3 numerical contract failure.

#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "spinbath/lindblad.hpp"
#include "spinbath/repeated_interaction.hpp"
#include "spinbath/spin_system.hpp"
#include "spinbath/thermo.hpp"
#include "spinbath/twosite.hpp"

namespace spinbath::experiments {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- helpers

inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// Sweep points are independent; run them on a small worker pool and let the
// caller collect results in index order.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const unsigned workers = std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), 8u);
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------- config

inline json default_config(const std::string& experiment) {
    if (experiment == "fig1")
        return json{
            {"experiment", "fig1"},
            {"N", 5}, {"h", 1.0},
            {"Jx_xx", 1.0}, {"Jy_xx", 1.0},
            {"Jx_xy", 1.0}, {"Jy_xy", 2.0},
            {"beta_L", 1.0}, {"h_L", 1.0}, {"lambda_L", 1.0},
            {"t_final", 100.0}, {"dt", 0.01}, {"record_stride", 10},
            {"rho0", "thermal_product"}, {"rho0_beta", 0.75},
        };
    if (experiment == "fig2_sweep")
        return json{
            {"experiment", "fig2_sweep"},
            {"N", 5}, {"h", json::array({0.0, 5.0, 5.0, 5.0, 2.0})},
            {"Jx", 3.0}, {"Jy", 3.0},
            {"beta_L", 0.8}, {"h_L", 0.0}, {"lambda_L", 1.0},  // h_L is swept
            {"beta_R", 1.2}, {"h_R", 2.0}, {"lambda_R", 1.0},
            {"hL_min", 0.0}, {"hL_max", 6.0}, {"hL_step", 0.25},
            {"tie_h1", true},
        };
    if (experiment == "twosite")
        return json{
            {"experiment", "twosite"},
            {"J", 1.0}, {"h_L", 1.0}, {"h_R", 1.0}, {"lambda", 1.0},
            {"beta_L", 0.5}, {"beta_R", 2.0},
            {"t_final", 20.0}, {"dt", 0.0}, {"record_stride", 10},
        };
    if (experiment == "convergence")
        return json{
            {"experiment", "convergence"},
            {"N", 2}, {"h", 1.0}, {"Jx", 1.0}, {"Jy", 1.0},
            {"beta_L", 0.5}, {"h_L", 1.0}, {"lambda_L", 1.0},
            {"beta_R", 2.0}, {"h_R", 1.0}, {"lambda_R", 1.0},
            {"t_final", 2.0},
            {"tau_list", json::array({0.1, 0.05, 0.02, 0.01, 0.005})},
        };
    if (experiment == "regime_scan")
        return json{
            {"experiment", "regime_scan"},
            {"J", 1.0}, {"lambda", 1.0},
            {"beta_L_list", json::array({0.5, 0.75, 1.0, 1.5, 2.0})},
            {"beta_R_list", json::array({0.5, 0.75, 1.0, 1.5, 2.0})},
            {"hL_list", json::array({0.5, 1.0, 1.5, 2.0, 3.0})},
            {"hR_list", json::array({0.5, 1.0, 1.5, 2.0, 3.0})},
        };
    if (experiment == "ri_trace")
        return json{
            {"experiment", "ri_trace"},
            {"N", 3}, {"h", 1.0}, {"Jx", 1.0}, {"Jy", 1.0},
            {"beta_L", 0.5}, {"h_L", 1.0}, {"lambda_L", 1.0},
            {"beta_R", 2.0}, {"h_R", 1.0}, {"lambda_R", 1.0},
            {"tau", 0.05}, {"steps", 200}, {"scaling", "scaled"},
        };
    throw ConfigError("unknown experiment: " + experiment);
}

namespace detail {

inline double num(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_number())
        throw ConfigError("missing or non-numeric key: " + key);
    return cfg[key].get<double>();
}

inline int integer(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_number_integer())
        throw ConfigError("missing or non-integer key: " + key);
    return cfg[key].get<int>();
}

inline std::vector<double> field_list(const json& cfg, int n) {
    if (!cfg.contains("h")) throw ConfigError("missing key: h");
    const json& h = cfg["h"];
    if (h.is_number()) return std::vector<double>(size_t(n), h.get<double>());
    if (h.is_array()) {
        if (int(h.size()) != n) throw ConfigError("field list length != N");
        std::vector<double> out;
        for (const auto& v : h) {
            if (!v.is_number()) throw ConfigError("non-numeric field entry");
            out.push_back(v.get<double>());
        }
        return out;
    }
    throw ConfigError("key h must be a number or an array");
}

inline int chain_size(const json& cfg) {
    const int n = integer(cfg, "N");
    if (n < 1 || n > 8) throw ConfigError("N must be in [1, 8]");
    return n;
}

inline std::vector<BathSpec> baths_from_config(const json& cfg) {
    std::vector<BathSpec> baths;
    for (Side side : {Side::left, Side::right}) {
        const std::string suffix = side == Side::left ? "_L" : "_R";
        if (!cfg.contains("beta" + suffix)) continue;
        BathSpec b;
        b.side = side;
        b.beta = num(cfg, "beta" + suffix);
        b.h = num(cfg, "h" + suffix);
        b.lambda = num(cfg, "lambda" + suffix);
        if (b.beta < 0.0) throw ConfigError("beta" + suffix + " must be >= 0");
        if (!(b.lambda > 0.0)) throw ConfigError("lambda" + suffix + " must be > 0");
        baths.push_back(b);
    }
    return baths;
}

inline Mat initial_state(const json& cfg, const ChainSpec& chain) {
    const std::string mode = cfg.value("rho0", "maximally_mixed");
    if (mode == "maximally_mixed") return maximally_mixed(chain.dim());
    if (mode == "thermal_product")
        return thermal_product_state(num(cfg, "rho0_beta"), chain.h);
    throw ConfigError("rho0 must be maximally_mixed or thermal_product");
}

struct CheckSet {
    std::map<std::string, bool> checks;
    json metrics = json::object();

    void require(const std::string& name, bool ok) { checks[name] = ok; }
    bool all() const {
        for (const auto& [_, ok] : checks)
            if (!ok) return false;
        return true;
    }
    json to_json() const {
        json j = json::object();
        for (const auto& [name, ok] : checks) j[name] = ok;
        return j;
    }
};

inline std::vector<std::string> thermo_csv_header() {
    return {"t", "Wdot", "Qdot_L", "Qdot_R", "diS_dt", "S", "E_S"};
}

inline std::vector<std::string> thermo_csv_row(const ThermoRecord& r) {
    return {fmt12(r.t), fmt12(r.wdot()), fmt12(r.qdot_l), fmt12(r.qdot_r),
            fmt12(r.dis_dt), fmt12(r.entropy), fmt12(r.energy)};
}

}  // namespace detail

// ---------------------------------------------------------------- fig1

// Single left bath, N=5: the XX chain relaxes to the product equilibrium
// (all rates decay), the XY chain settles into a driven steady state with
// d_iS/dt = βẆ > 0.
inline detail::CheckSet run_fig1(const json& cfg, const std::filesystem::path& out_dir,
                                 std::vector<std::string>& artifacts) {
    detail::CheckSet cs;
    const int n = detail::chain_size(cfg);
    const std::vector<double> fields = detail::field_list(cfg, n);
    const std::vector<BathSpec> baths = detail::baths_from_config(cfg);
    if (baths.size() != 1) throw ConfigError("fig1 expects exactly one bath");
    const double beta = baths.front().beta;
    const double t_final = detail::num(cfg, "t_final");
    const double t_decay = std::min(50.0, t_final);

    struct Variant {
        const char* label;
        double jx, jy;
    };
    const Variant variants[] = {{"xx", detail::num(cfg, "Jx_xx"), detail::num(cfg, "Jy_xx")},
                                {"xy", detail::num(cfg, "Jx_xy"), detail::num(cfg, "Jy_xy")}};

    for (const Variant& var : variants) {
        ChainSpec chain{n, fields, var.jx, var.jy};
        const LindbladModel model = make_boundary_driven_model(chain, baths);
        EvolveOptions opt;
        opt.dt = detail::num(cfg, "dt");
        opt.record_stride = detail::integer(cfg, "record_stride");
        const EvolveResult ev = evolve(model, detail::initial_state(cfg, chain), t_final, opt);

        const std::string csv_name = std::string("fig1_") + var.label + ".csv";
        CsvWriter csv(out_dir / csv_name, detail::thermo_csv_header());
        artifacts.push_back(csv_name);

        double min_dis = 0.0, max_first_law = 0.0;
        const ThermoRecord* at_decay = nullptr;
        std::vector<ThermoRecord> records;
        records.reserve(ev.samples.size());
        for (const auto& s : ev.samples) {
            records.push_back(lindblad_rates(model, s.rho, s.t));
            csv.row(detail::thermo_csv_row(records.back()));
            min_dis = std::min(min_dis, records.back().dis_dt);
            max_first_law = std::max(max_first_law, first_law_residual(model, s.rho));
        }
        for (size_t i = 0; i < ev.samples.size(); ++i)
            if (std::fabs(ev.samples[i].t - t_decay) < 1e-9) at_decay = &records[i];

        const std::string prefix = var.label + std::string("_");
        cs.require(prefix + "trace_drift", ev.max_trace_drift < 1e-9);
        cs.require(prefix + "hermiticity_drift", ev.max_herm_drift < 1e-10);
        cs.require(prefix + "positivity", ev.max_positivity_violation < tol::psd);
        cs.require(prefix + "entropy_production_nonnegative", min_dis > -1e-9);
        cs.require(prefix + "first_law", max_first_law < 1e-9);
        cs.metrics[prefix + "min_diS_dt"] = min_dis;
        cs.metrics[prefix + "max_first_law_residual"] = max_first_law;

        if (std::string(var.label) == "xx") {
            const bool have = at_decay != nullptr;
            cs.require("xx_rates_decay_by_t50",
                       have && std::fabs(at_decay->wdot()) < 1e-6 && std::fabs(at_decay->qdot_l) < 1e-6 &&
                           std::fabs(at_decay->qdot_r) < 1e-6 && std::fabs(at_decay->dis_dt) < 1e-6);
            const Mat product = thermal_product_state(beta, fields);
            const double dist = (ev.samples.back().rho - product).fro_norm();
            cs.require("xx_final_state_is_thermal_product", dist < 1e-6);
            cs.metrics["xx_final_state_deviation"] = dist;
            if (have) cs.metrics["xx_rates_at_t50"] = std::max({std::fabs(at_decay->wdot()),
                                                                std::fabs(at_decay->qdot_l),
                                                                std::fabs(at_decay->dis_dt)});
        } else {
            const ThermoRecord& last = records.back();
            const ThermoRecord& v80 = records[records.size() * 4 / 5];
            const double identity_rel = std::fabs(last.dis_dt - beta * last.wdot()) / std::fabs(last.dis_dt);
            cs.require("xy_plateau", std::fabs(last.dis_dt - v80.dis_dt) < 1e-3 * std::fabs(last.dis_dt));
            cs.require("xy_identity_beta_w", identity_rel < 1e-8);
            cs.require("xy_driven", last.dis_dt > 0.0 && last.wdot() > 0.0);
            // at the driven steady state the bath absorbs the injected power
            cs.require("xy_power_balances_heat",
                       std::fabs(last.wdot() + last.qdot()) < 1e-8 * std::fabs(last.wdot()));
            cs.metrics["xy_identity_rel"] = identity_rel;
            cs.metrics["xy_diS_dt_plateau"] = last.dis_dt;
        }
    }
    return cs;
}

// ---------------------------------------------------------------- fig2 sweep

// NESS sweep over h_L for the N=5 XX two-bath chain. At β_L h_L = β_R h_R
// everything vanishes (equilibrium); at h_L = h_R the power vanishes and the
// heat flows balance (non-driven steady state).
inline detail::CheckSet run_fig2_sweep(const json& cfg, const std::filesystem::path& out_dir,
                                       std::vector<std::string>& artifacts) {
    detail::CheckSet cs;
    const int n = detail::chain_size(cfg);
    std::vector<double> fields = detail::field_list(cfg, n);
    const std::vector<BathSpec> baths = detail::baths_from_config(cfg);
    if (baths.size() != 2) throw ConfigError("fig2_sweep expects both baths (beta_R, h_R, lambda_R; h_L swept)");
    const bool tie = cfg.value("tie_h1", true);
    const double h_min = detail::num(cfg, "hL_min");
    const double h_max = detail::num(cfg, "hL_max");
    const double h_step = detail::num(cfg, "hL_step");
    if (!(h_step > 0.0) || h_max < h_min) throw ConfigError("invalid h_L grid");
    const int points = int(std::lround((h_max - h_min) / h_step)) + 1;

    struct Point {
        double h_l;
        ThermoRecord rates;
        std::string regime;
        double eta;
        double two_path_gap;
        double rhs_residual;
    };
    std::vector<Point> grid(points);

    parallel_for(points, [&](int i) {
        const double h_l = h_min + i * h_step;
        ChainSpec chain{n, fields, detail::num(cfg, "Jx"), detail::num(cfg, "Jy")};
        if (tie) chain.h[0] = h_l;
        std::vector<BathSpec> local = baths;
        for (auto& b : local)
            if (b.side == Side::left) b.h = h_l;
        const LindbladModel model = make_boundary_driven_model(chain, local);
        const NessResult nr = ness(model);
        const ThermoRecord rates = lindblad_rates(model, nr.rho);
        const ThermoRecord closed = boundary_rates_spin(model, nr.rho);
        const RegimeReport regime = classify_regime(rates, local[0], local[1]);
        Point& p = grid[i];
        p.h_l = h_l;
        p.rates = rates;
        p.regime = regime_name(regime.regime);
        p.eta = regime.eta;
        p.rhs_residual = nr.rhs_residual;
        p.two_path_gap = std::max({std::fabs(rates.qdot_l - closed.qdot_l),
                                   std::fabs(rates.qdot_r - closed.qdot_r),
                                   std::fabs(rates.wdot() - closed.wdot())});
    });

    CsvWriter csv(out_dir / "fig2_sweep.csv",
                  {"h_L", "Qdot_L", "Qdot_R", "Wdot", "diS_dt", "j_s", "regime", "eta"});
    artifacts.push_back("fig2_sweep.csv");
    double min_dis = 0.0, max_gap = 0.0, max_rhs = 0.0;
    const Point* at2 = nullptr;
    const Point* at3 = nullptr;
    for (const Point& p : grid) {
        csv.row({fmt12(p.h_l), fmt12(p.rates.qdot_l), fmt12(p.rates.qdot_r), fmt12(p.rates.wdot()),
                 fmt12(p.rates.dis_dt), fmt12(p.rates.j_s), p.regime, fmt12(p.eta)});
        min_dis = std::min(min_dis, p.rates.dis_dt);
        max_gap = std::max(max_gap, p.two_path_gap);
        max_rhs = std::max(max_rhs, p.rhs_residual);
        if (std::fabs(p.h_l - 2.0) < 1e-12) at2 = &p;
        if (std::fabs(p.h_l - 3.0) < 1e-12) at3 = &p;
    }

    cs.require("entropy_production_nonnegative", min_dis > -1e-9);
    cs.require("rate_paths_agree", max_gap < 1e-10);
    cs.require("ness_residuals", max_rhs < 1e-9);
    if (at3) {
        const bool equilibrium = std::fabs(at3->rates.qdot_l) < 1e-8 && std::fabs(at3->rates.qdot_r) < 1e-8 &&
                                 std::fabs(at3->rates.wdot()) < 1e-8 && std::fabs(at3->rates.dis_dt) < 1e-8;
        cs.require("equilibrium_at_hL3", equilibrium);
        cs.metrics["hL3_max_rate"] = std::max({std::fabs(at3->rates.qdot_l), std::fabs(at3->rates.qdot_r),
                                               std::fabs(at3->rates.wdot()), std::fabs(at3->rates.dis_dt)});
    }
    if (at2) {
        cs.require("non_driven_at_hL2", std::fabs(at2->rates.wdot()) < 1e-8 &&
                                            std::fabs(at2->rates.qdot_l + at2->rates.qdot_r) < 1e-8);
        cs.metrics["hL2_wdot"] = at2->rates.wdot();
    }
    cs.metrics["min_diS_dt"] = min_dis;
    cs.metrics["max_two_path_gap"] = max_gap;
    return cs;
}

// ---------------------------------------------------------------- twosite

inline detail::CheckSet run_twosite(const json& cfg, const std::filesystem::path& out_dir,
                                    std::vector<std::string>& artifacts) {
    detail::CheckSet cs;
    TwoSiteParams p;
    p.j = detail::num(cfg, "J");
    p.h_l = detail::num(cfg, "h_L");
    p.h_r = detail::num(cfg, "h_R");
    p.lambda = detail::num(cfg, "lambda");
    p.beta_l = detail::num(cfg, "beta_L");
    p.beta_r = detail::num(cfg, "beta_R");
    if (!(p.lambda > 0.0)) throw ConfigError("lambda must be > 0");

    const Mat rho0 = maximally_mixed(4);
    const OracleComparison cmp = oracle_vs_engine(p, rho0, detail::num(cfg, "t_final"),
                                                  detail::num(cfg, "dt"),
                                                  detail::integer(cfg, "record_stride"));

    CsvWriter csv(out_dir / "twosite.csv",
                  {"t", "X", "Y", "z1", "z2", "X_engine", "Y_engine", "z1_engine", "z2_engine", "max_dev"});
    artifacts.push_back("twosite.csv");
    for (const auto& row : cmp.trace) {
        const double dev = std::max({std::fabs(row.oracle.x - row.engine.x),
                                     std::fabs(row.oracle.y - row.engine.y),
                                     std::fabs(row.oracle.z1 - row.engine.z1),
                                     std::fabs(row.oracle.z2 - row.engine.z2)});
        csv.row({fmt12(row.t), fmt12(row.oracle.x), fmt12(row.oracle.y), fmt12(row.oracle.z1),
                 fmt12(row.oracle.z2), fmt12(row.engine.x), fmt12(row.engine.y),
                 fmt12(row.engine.z1), fmt12(row.engine.z2), fmt12(dev)});
    }

    cs.require("transient_agreement", cmp.max_deviation < 1e-6);
    cs.require("ness_agreement", cmp.ness_deviation < 1e-8);
    cs.metrics["max_transient_deviation"] = cmp.max_deviation;
    cs.metrics["ness_deviation"] = cmp.ness_deviation;
    cs.metrics["j_s"] = cmp.ness_js_closed;
    return cs;
}

// ---------------------------------------------------------------- convergence

inline detail::CheckSet run_convergence(const json& cfg, const std::filesystem::path& out_dir,
                                        std::vector<std::string>& artifacts) {
    detail::CheckSet cs;
    const int n = detail::chain_size(cfg);
    ChainSpec chain{n, detail::field_list(cfg, n), detail::num(cfg, "Jx"), detail::num(cfg, "Jy")};
    const std::vector<BathSpec> baths = detail::baths_from_config(cfg);
    if (!cfg.contains("tau_list") || !cfg["tau_list"].is_array() || cfg["tau_list"].empty())
        throw ConfigError("tau_list must be a non-empty array");
    std::vector<double> taus;
    for (const auto& v : cfg["tau_list"]) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("tau values must be positive");
        taus.push_back(v.get<double>());
    }
    const double t_final = detail::num(cfg, "t_final");
    const Mat rho0 = maximally_mixed(chain.dim());

    const ConvergenceStudy scaled = ri_lindblad_convergence(rho0, chain, baths, t_final, taus);
    const ConvergenceStudy fixed = ri_lindblad_convergence(rho0, chain, baths, t_final, taus, RIScaling::fixed_v);

    CsvWriter csv(out_dir / "convergence.csv", {"tau", "error", "slope_running"});
    artifacts.push_back("convergence.csv");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const auto& p : scaled.points) {
        double running = 0.0;
        if (p.error > 0.0) {
            const double lx = std::log(p.tau), ly = std::log(p.error);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++m;
            if (m >= 2) running = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        }
        csv.row({fmt12(p.tau), fmt12(p.error), fmt12(running)});
    }
    CsvWriter fixed_csv(out_dir / "convergence_fixed.csv", {"tau", "error", "slope_running"});
    artifacts.push_back("convergence_fixed.csv");
    for (const auto& p : fixed.points) fixed_csv.row({fmt12(p.tau), fmt12(p.error), fmt12(0.0)});

    cs.require("error_monotone", scaled.monotone);
    cs.require("slope_at_least_half_order", scaled.slope >= 0.45);
    cs.require("fixed_v_does_not_converge",
               !fixed.points.empty() && fixed.points.back().error > 0.5 * fixed.points.front().error);
    cs.metrics["slope"] = scaled.slope;
    cs.metrics["fixed_v_final_error"] = fixed.points.back().error;
    return cs;
}

// ---------------------------------------------------------------- regime scan

// Two-site NESS over a grid of (β_L, β_R, h_L, h_R): second-law sign
// structure, engine/refrigerator bounds, and the naive weak-coupling
// diagnostic (which is allowed to go negative).
inline detail::CheckSet run_regime_scan(const json& cfg, const std::filesystem::path& out_dir,
                                        std::vector<std::string>& artifacts) {
    detail::CheckSet cs;
    auto list = [&](const char* key) {
        if (!cfg.contains(key) || !cfg[key].is_array() || cfg[key].empty())
            throw ConfigError(std::string("missing list: ") + key);
        std::vector<double> out;
        for (const auto& v : cfg[key]) out.push_back(v.get<double>());
        return out;
    };
    const std::vector<double> betas_l = list("beta_L_list"), betas_r = list("beta_R_list");
    const std::vector<double> hs_l = list("hL_list"), hs_r = list("hR_list");
    const double j = detail::num(cfg, "J"), lambda = detail::num(cfg, "lambda");

    struct Row {
        TwoSiteParams p;
        ThermoRecord rates;
        RegimeReport regime;
        double naive_dis;
        double rhs_residual;
    };
    std::vector<TwoSiteParams> params;
    for (double bl : betas_l)
        for (double br : betas_r)
            for (double hl : hs_l)
                for (double hr : hs_r) {
                    TwoSiteParams p;
                    p.j = j; p.lambda = lambda;
                    p.beta_l = bl; p.beta_r = br; p.h_l = hl; p.h_r = hr;
                    params.push_back(p);
                }
    std::vector<Row> rows(params.size());
    parallel_for(int(params.size()), [&](int i) {
        Row& r = rows[i];
        r.p = params[i];
        const LindbladModel model = r.p.model();
        const NessResult nr = ness(model);
        r.rates = lindblad_rates(model, nr.rho);
        r.regime = classify_regime(r.rates, model.baths[0].spec, model.baths[1].spec);
        r.naive_dis = naive_weak_coupling_rates(model, nr.rho).dis_dt;
        r.rhs_residual = nr.rhs_residual;
    });

    CsvWriter csv(out_dir / "regime_scan.csv",
                  {"beta_L", "beta_R", "h_L", "h_R", "j_s", "Qdot_L", "Qdot_R", "Wdot", "diS_dt",
                   "regime", "eta", "eta_carnot", "naive_diS_dt"});
    artifacts.push_back("regime_scan.csv");

    double min_dis = 0.0, max_eq_dis = 0.0, min_naive = 0.0, max_rhs = 0.0;
    bool bounds_ok = true, efficiency_formula_ok = true;
    int negatives_naive = 0;
    for (const Row& r : rows) {
        csv.row({fmt12(r.p.beta_l), fmt12(r.p.beta_r), fmt12(r.p.h_l), fmt12(r.p.h_r),
                 fmt12(r.rates.j_s), fmt12(r.rates.qdot_l), fmt12(r.rates.qdot_r),
                 fmt12(r.rates.wdot()), fmt12(r.rates.dis_dt), regime_name(r.regime.regime),
                 fmt12(r.regime.eta), fmt12(r.regime.eta_carnot), fmt12(r.naive_dis)});
        min_dis = std::min(min_dis, r.rates.dis_dt);
        max_rhs = std::max(max_rhs, r.rhs_residual);
        min_naive = std::min(min_naive, r.naive_dis);
        if (r.naive_dis < -1e-9) ++negatives_naive;
        const double affinity = r.p.beta_l * r.p.h_l - r.p.beta_r * r.p.h_r;
        if (std::fabs(affinity) < 1e-12) max_eq_dis = std::max(max_eq_dis, std::fabs(r.rates.dis_dt));
        if (r.regime.regime == Regime::engine || r.regime.regime == Regime::refrigerator) {
            if (!(r.regime.eta <= r.regime.eta_carnot + 1e-9)) bounds_ok = false;
            // the efficiencies depend on the fields only
            const double hot_h = r.p.beta_l <= r.p.beta_r ? r.p.h_l : r.p.h_r;
            const double cold_h = r.p.beta_l <= r.p.beta_r ? r.p.h_r : r.p.h_l;
            const double expected = r.regime.regime == Regime::engine ? 1.0 - cold_h / hot_h
                                                                      : 1.0 / (hot_h / cold_h - 1.0);
            if (std::fabs(r.regime.eta - expected) > 1e-8) efficiency_formula_ok = false;
        }
    }

    cs.require("entropy_production_nonnegative", min_dis > -1e-9);
    cs.require("equilibrium_on_affinity_surface", max_eq_dis < 1e-9);
    cs.require("efficiency_bounds", bounds_ok);
    cs.require("efficiency_field_formula", efficiency_formula_ok);
    cs.require("ness_residuals", max_rhs < 1e-9);
    cs.metrics["min_diS_dt"] = min_dis;
    cs.metrics["min_naive_diS_dt"] = min_naive;
    cs.metrics["naive_second_law_violations"] = negatives_naive;
    return cs;
}

// ---------------------------------------------------------------- ri_trace

inline detail::CheckSet run_ri_trace(const json& cfg, const std::filesystem::path& out_dir,
                                     std::vector<std::string>& artifacts) {
    detail::CheckSet cs;
    const int n = detail::chain_size(cfg);
    RIConfig ri;
    ri.chain = ChainSpec{n, detail::field_list(cfg, n), detail::num(cfg, "Jx"), detail::num(cfg, "Jy")};
    ri.baths = detail::baths_from_config(cfg);
    ri.tau = detail::num(cfg, "tau");
    ri.steps = detail::integer(cfg, "steps");
    const std::string scaling = cfg.value("scaling", "scaled");
    if (scaling == "scaled") ri.scaling = RIScaling::scaled_v;
    else if (scaling == "fixed") ri.scaling = RIScaling::fixed_v;
    else throw ConfigError("scaling must be scaled or fixed");
    if (!(ri.tau > 0.0) || ri.steps < 1) throw ConfigError("need tau > 0 and steps >= 1");

    const Mat rho0 = maximally_mixed(ri.chain.dim());
    const double s0 = vn_entropy(rho0);
    const RITrajectory traj = ri_trajectory(rho0, ri);

    CsvWriter csv(out_dir / "ri_trace.csv", detail::thermo_csv_header());
    artifacts.push_back("ri_trace.csv");
    double min_dis = 0.0, min_term = 0.0, max_first_law = 0.0, max_joint = 0.0, max_incoming = 0.0;
    for (const auto& rec : traj.records) {
        ThermoRecord row;
        row.t = rec.n * ri.tau;
        row.wdot_l = rec.dw_l / ri.tau;
        row.wdot_r = rec.dw_r / ri.tau;
        row.qdot_l = rec.dq_l / ri.tau;
        row.qdot_r = rec.dq_r / ri.tau;
        row.dis_dt = rec.dis / ri.tau;
        row.entropy = vn_entropy(rec.rho_s);
        row.energy = rec.energy;
        csv.row(detail::thermo_csv_row(row));
        min_dis = std::min(min_dis, rec.dis);
        min_term = std::min({min_term, rec.d_term, rec.i_term});
        max_first_law = std::max(max_first_law, rec.first_law_residual);
        max_joint = std::max({max_joint, rec.joint_trace_err, rec.joint_purity_err});
        max_incoming = std::max(max_incoming, rec.incoming_work_residual);
    }

    // cumulative ΔS = Σ_r β_r Q_r + Σ Δ_iS (entropy balance over the run)
    const double ds = vn_entropy(traj.records.back().rho_s) - s0;
    double balance = traj.cum_dis;
    for (const auto& b : ri.baths)
        balance += b.beta * (b.side == Side::left ? traj.cum_q_l : traj.cum_q_r);
    cs.require("entropy_production_nonnegative", min_dis > -1e-10);
    cs.require("entropy_terms_nonnegative", min_term > -1e-10);
    cs.require("first_law_per_collision", max_first_law < 1e-10);
    cs.require("joint_unitary_invariants", max_joint < 1e-10);
    cs.require("incoming_work_vanishes", max_incoming < 1e-12);
    cs.require("entropy_balance", std::fabs(ds - balance) < 1e-8);
    cs.metrics["cumulative_diS"] = traj.cum_dis;
    cs.metrics["entropy_balance_residual"] = std::fabs(ds - balance);
    return cs;
}

// ---------------------------------------------------------------- dispatch

struct RunResult {
    int exit_code = 0;
    json summary;
};

inline RunResult run_experiment(const json& cfg, const std::string& out_dir) {
    RunResult result;
    std::string experiment;
    try {
        if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
            throw ConfigError("config must name an experiment");
        experiment = cfg["experiment"].get<std::string>();
        std::filesystem::create_directories(out_dir);

        std::vector<std::string> artifacts;
        detail::CheckSet cs;
        if (experiment == "fig1") cs = run_fig1(cfg, out_dir, artifacts);
        else if (experiment == "fig2_sweep") cs = run_fig2_sweep(cfg, out_dir, artifacts);
        else if (experiment == "twosite") cs = run_twosite(cfg, out_dir, artifacts);
        else if (experiment == "convergence") cs = run_convergence(cfg, out_dir, artifacts);
        else if (experiment == "regime_scan") cs = run_regime_scan(cfg, out_dir, artifacts);
        else if (experiment == "ri_trace") cs = run_ri_trace(cfg, out_dir, artifacts);
        else throw ConfigError("unknown experiment: " + experiment);

        result.summary = json{{"experiment", experiment},
                              {"pass", cs.all()},
                              {"checks", cs.to_json()},
                              {"metrics", cs.metrics},
                              {"artifacts", artifacts}};
        result.exit_code = cs.all() ? 0 : 3;
    } catch (const ConfigError& e) {
        result.summary = json{{"experiment", experiment}, {"pass", false}, {"error", e.what()}};
        result.exit_code = 2;
        return result;
    } catch (const std::exception& e) {
        result.summary = json{{"experiment", experiment}, {"pass", false}, {"error", e.what()}};
        result.exit_code = 3;
    }
    try {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(std::filesystem::path(out_dir) / "summary.json");
        out << result.summary.dump(2) << "\n";
    } catch (...) {
        // summary write failure must not mask the run result
    }
    return result;
}

}  // namespace spinbath::experiments
