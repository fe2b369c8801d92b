#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "heco/bohmian.hpp"
#include "heco/config.hpp"
#include "heco/csv.hpp"
#include "heco/fermatian.hpp"
#include "heco/hardwall_diffraction.hpp"
#include "heco/newtonian.hpp"
#include "heco/potential.hpp"
#include "heco/tdse.hpp"
#include "heco/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace heco;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

InteractionModel model_from(const RunConfig& cfg) {
    InteractionModel m;
    m.variant = variant_from_string(cfg.variant);
    m.morse = {cfg.D_meV, cfg.alpha_invA, cfg.z_m_A};
    m.lj.epsilon = cfg.epsilon_meV;
    m.lj.sigma = cfg.sigma_A;
    m.hardwall = {cfg.hardwall_a_A, cfg.hardwall_z_r_A};
    return m;
}

IntegratorConfig integrator_from(const RunConfig& cfg) {
    IntegratorConfig ic;
    ic.dt = cfg.dt_ps;
    ic.t_max = cfg.t_max_ps;
    ic.escape_z = cfg.escape_z_A;
    ic.x_cut = cfg.x_cut_A;
    return ic;
}

Grid2D grid_from(const RunConfig& cfg) {
    Grid2D g;
    g.nx = cfg.nx;
    g.nz = cfg.nz;
    g.x_min = cfg.x_min_A;
    g.x_max = cfg.x_max_A;
    g.z_min = cfg.z_min_A;
    g.z_max = cfg.z_max_A;
    return g;
}

InitialStateSpec initial_state_from(const RunConfig& cfg) {
    InitialStateSpec s;
    s.n_gaussians = cfg.n_gaussians;
    s.spacing = cfg.spacing_A;
    s.sigma_x = cfg.sigma_x_A;
    s.sigma_z = cfg.sigma_z_A;
    s.center_z = cfg.center_z_A;
    s.E_i = cfg.E_i_meV;
    s.theta_i = deg2rad(cfg.theta_i_deg);
    return s;
}

void write_spectrum_csv(const std::string& path, const DiffractionSpectrum& sp,
                        const DiffractionSpectrum* raw, std::vector<std::string>& artifacts) {
    if (raw) {
        CsvWriter w(path, {"delta_k", "theta_d_deg", "intensity", "intensity_raw"});
        for (std::size_t i = 0; i < sp.delta_k.size(); ++i) {
            w.field(sp.delta_k[i]).field(rad2deg(sp.theta_d[i])).field(sp.I_total[i]);
            w.field(raw->I_total[i]);
            w.endrow();
        }
    } else {
        CsvWriter w(path, {"theta_d_deg", "delta_k", "I_total", "I_illum", "I_fraun"});
        for (std::size_t i = 0; i < sp.delta_k.size(); ++i) {
            w.field(rad2deg(sp.theta_d[i])).field(sp.delta_k[i]).field(sp.I_total[i]);
            w.field(sp.I_illuminated[i]).field(sp.I_fraunhofer[i]);
            w.endrow();
        }
    }
    artifacts.push_back(path);
}

void write_deflection_csv(const std::string& path, const DeflectionFunction& df,
                          std::vector<std::string>& artifacts) {
    CsvWriter w(path, {"b", "theta_d_deg", "trapped", "E_z", "E_x", "t_final"});
    for (const auto& s : df.samples) {
        w.field(s.b);
        w.field(s.trapped ? std::numeric_limits<double>::quiet_NaN() : rad2deg(s.theta_d));
        w.field(s.trapped ? 1 : 0).field(s.E_z).field(s.E_x).field(s.t_final);
        w.endrow();
    }
    artifacts.push_back(path);
}

void write_rays_csv(const std::string& path, const std::vector<Ray>& rays,
                    std::vector<std::string>& artifacts) {
    CsvWriter w(path, {"b", "pattern", "theta_d_deg", "segment", "x0", "z0", "x1", "z1"});
    for (const auto& r : rays) {
        for (std::size_t s = 0; s < r.segments.size(); ++s) {
            w.field(r.b).field(to_string(r.pattern)).field(rad2deg(r.theta_d));
            w.field(static_cast<int>(s));
            w.field(r.segments[s].first.x).field(r.segments[s].first.z);
            w.field(r.segments[s].second.x).field(r.segments[s].second.z);
            w.endrow();
        }
    }
    artifacts.push_back(path);
}

struct TdseResult {
    SMatrixRow S_model, S_flat;
    WaveField final_field;
};

TdseResult run_tdse_pair(const RunConfig& cfg, const PhysicalConstants& c) {
    Grid2D g = grid_from(cfg);
    WaveField psi0 = build_initial_state(initial_state_from(cfg), g, c);
    InteractionModel model = model_from(cfg);
    InteractionModel flat = model;
    flat.variant = Variant::FlatSurfaceOnly;
    int n_steps = static_cast<int>(cfg.t_final_ps / cfg.tdse_dt_ps + 0.5);

    Propagator pm(psi0, model, cfg.tdse_dt_ps, c, cfg.v_cap_meV);
    Propagator pf(psi0, flat, cfg.tdse_dt_ps, c, cfg.v_cap_meV);
    std::thread th([&] { pf.run(n_steps); });
    pm.run(n_steps);
    th.join();

    TdseResult out;
    double theta_i = deg2rad(cfg.theta_i_deg);
    out.S_model = extract_smatrix(pm.field(), cfg.E_i_meV, theta_i,
                                  {cfg.cell_x_lo_A, cfg.cell_x_hi_A}, c, 5.0,
                                  cfg.stale_tolerance);
    out.S_flat = extract_smatrix(pf.field(), cfg.E_i_meV, theta_i,
                                 {cfg.cell_x_lo_A, cfg.cell_x_hi_A}, c, 5.0,
                                 cfg.stale_tolerance);
    out.final_field = pm.field();
    return out;
}

std::vector<std::string> execute(const RunConfig& cfg, const fs::path& out_dir) {
    PhysicalConstants c;
    std::vector<std::string> artifacts;
    InteractionModel model = model_from(cfg);
    double theta_i = deg2rad(cfg.theta_i_deg);
    auto out = [&](const char* name) { return (out_dir / name).string(); };

    if (cfg.kind == "potential-scan") {
        CsvWriter w(out("potential.csv"), {"x", "z", "V"});
        for (int i = 0; i < cfg.scan_samples; ++i) {
            double x = cfg.scan_min_A +
                       (cfg.scan_max_A - cfg.scan_min_A) * i / (cfg.scan_samples - 1);
            for (int j = 0; j < cfg.scan_samples; ++j) {
                double z = 0.2 + (12.0 - 0.2) * j / (cfg.scan_samples - 1);
                w.field(x).field(z).field(eval_potential(model, x, z));
                w.endrow();
            }
        }
        artifacts.push_back(out("potential.csv"));
    } else if (cfg.kind == "bound-states") {
        auto states = morse_bound_states(model.morse, c);
        CsvWriter w(out("bound_states.csv"), {"n", "E_meV", "jump_length_A"});
        for (int n = 0; n < states.count(); ++n) {
            w.field(n).field(states.energies[n]);
            w.field(jump_length(model.morse, cfg.E_i_meV, states.energies[n]));
            w.endrow();
        }
        artifacts.push_back(out("bound_states.csv"));
    } else if (cfg.kind == "fermat-trace") {
        std::vector<Ray> rays;
        for (int i = 0; i < cfg.scan_samples; ++i) {
            double b = cfg.scan_min_A +
                       (cfg.scan_max_A - cfg.scan_min_A) * i / (cfg.scan_samples - 1);
            rays.push_back(trace_ray(b, theta_i, model.hardwall));
        }
        write_rays_csv(out("rays.csv"), rays, artifacts);
    } else if (cfg.kind == "fermat-separatrices") {
        SeparatrixSet sep = find_separatrices(theta_i, model.hardwall);
        {
            CsvWriter w(out("separatrices.csv"), {"name", "b"});
            const std::pair<const char*, double> rows[] = {
                {"F1", sep.F1},   {"Falpha", sep.Falpha}, {"F2", sep.F2}, {"F2p", sep.F2p},
                {"F3", sep.F3},   {"F4", sep.F4},         {"Fbeta", sep.Fbeta},
                {"F5", sep.F5},   {"F6", sep.F6},         {"F7", sep.F7}};
            for (const auto& [name, b] : rows) {
                w.field(std::string(name)).field(b);
                w.endrow();
            }
            artifacts.push_back(out("separatrices.csv"));
        }
        std::vector<Ray> rays;
        for (double b : {sep.F1, sep.Falpha, sep.F2, sep.F3, sep.F4, sep.Fbeta, sep.F5,
                         sep.F6, sep.F7}) {
            if (std::isnan(b)) continue;
            rays.push_back(trace_ray(b, theta_i, model.hardwall));
        }
        write_rays_csv(out("separatrix_rays.csv"), rays, artifacts);
        CsvWriter w(out("shadow.csv"), {"theta_i_deg", "length"});
        w.field(cfg.theta_i_deg).field(shadow_length(theta_i, model.hardwall));
        w.endrow();
        artifacts.push_back(out("shadow.csv"));
    } else if (cfg.kind == "hardwall-intensity") {
        auto sp = hardwall_intensity_scan(cfg.E_i_meV, theta_i, cfg.n_angles, model.hardwall, c);
        write_spectrum_csv(out("hardwall_intensity.csv"), sp, nullptr, artifacts);
    } else if (cfg.kind == "newton-deflection" || cfg.kind == "newton-energy-diagram" ||
               cfg.kind == "newton-rainbows") {
        IntegratorConfig ic = integrator_from(cfg);
        auto df = deflection_scan(theta_i, cfg.E_i_meV, model, cfg.b_min_A, cfg.b_max_A,
                                  cfg.n_samples, ic, c, cfg.threads);
        if (cfg.kind != "newton-rainbows") {
            write_deflection_csv(out(cfg.kind == "newton-deflection" ? "deflection.csv"
                                                                     : "energy_diagram.csv"),
                                 df, artifacts);
            auto ts = trapping_summary(df);
            CsvWriter w(out("trapping.csv"), {"b_lo", "b_hi", "fraction"});
            for (const auto& iv : ts.intervals) {
                w.field(iv.first).field(iv.second).field(ts.fraction);
                w.endrow();
            }
            artifacts.push_back(out("trapping.csv"));
        }
        auto rb = find_rainbows(df, cfg.E_i_meV, model, integrator_from(cfg), c);
        CsvWriter w(out("rainbows.csv"), {"b_star", "theta_R_deg", "delta_K", "kind"});
        for (const auto& e : rb.extrema) {
            w.field(e.b_star).field(rad2deg(e.theta_R)).field(e.delta_K_R);
            w.field(std::string(e.is_max ? "max" : "min"));
            w.endrow();
        }
        artifacts.push_back(out("rainbows.csv"));
    } else if (cfg.kind == "tdse-propagate") {
        Grid2D g = grid_from(cfg);
        WaveField psi0 = build_initial_state(initial_state_from(cfg), g, c);
        Propagator prop(psi0, model, cfg.tdse_dt_ps, c, cfg.v_cap_meV);
        int n_steps = static_cast<int>(cfg.t_final_ps / cfg.tdse_dt_ps + 0.5);
        CsvWriter w(out("diagnostics.csv"), {"t", "norm", "energy"});
        artifacts.push_back(out("diagnostics.csv"));
        int snap_stride = cfg.snapshot_every_ps > 0
                              ? std::max(1, (int)(cfg.snapshot_every_ps / cfg.tdse_dt_ps + 0.5))
                              : 0;
        int diag_stride = std::max(1, n_steps / 50);
        for (int s = 1; s <= n_steps; ++s) {
            prop.step();
            if (s % diag_stride == 0 || s == n_steps) {
                w.field(prop.field().t).field(prop.norm()).field(prop.energy_expectation());
                w.endrow();
            }
            if (snap_stride && (s % snap_stride == 0)) {
                char name[64];
                std::snprintf(name, sizeof(name), "snapshot_%05d.wfld", s);
                save_snapshot(prop.field(), out(name));
                artifacts.push_back(out(name));
            }
        }
        save_snapshot(prop.field(), out("final.wfld"));
        artifacts.push_back(out("final.wfld"));
    } else if (cfg.kind == "tdse-intensity") {
        TdseResult r = run_tdse_pair(cfg, c);
        auto raw = reflection_coefficient(r.S_model, cfg.E_i_meV, c);
        auto sub = remove_plane_wave_contribution(r.S_model, r.S_flat);
        auto sp = reflection_coefficient(sub, cfg.E_i_meV, c);
        write_spectrum_csv(out("spectrum.csv"), sp, &raw, artifacts);
        save_snapshot(r.final_field, out("final.wfld"));
        artifacts.push_back(out("final.wfld"));
    } else if (cfg.kind == "bohm-trajectories" || cfg.kind == "bohm-vortices") {
        Grid2D g = grid_from(cfg);
        WaveField psi0 = build_initial_state(initial_state_from(cfg), g, c);
        int n_steps = static_cast<int>(cfg.t_final_ps / cfg.tdse_dt_ps + 0.5);
        if (cfg.kind == "bohm-vortices") {
            Propagator prop(psi0, model, cfg.tdse_dt_ps, c, cfg.v_cap_meV);
            CsvWriter w(out("vortices.csv"), {"t", "x", "z", "winding", "circulation"});
            int stride = std::max(1, n_steps / 20);
            for (int s = 1; s <= n_steps; ++s) {
                prop.step();
                if (s % stride) continue;
                auto rep = detect_vortices(prop.field(), -8.0, 8.0, 0.0, 8.0, c);
                for (const auto& n : rep.nodes) {
                    w.field(n.t).field(n.x).field(n.z).field(n.winding).field(n.circulation);
                    w.endrow();
                }
            }
            artifacts.push_back(out("vortices.csv"));
        } else {
            std::vector<std::string> labels;
            std::vector<Vec2> seeds =
                cfg.n_ensemble > 0
                    ? sample_born(psi0, cfg.n_ensemble, cfg.seed)
                    : seed_lines(cfg.center_z_A, cfg.seeds_per_line, cfg.half_width_A,
                                 &labels);
            BohmianConfig bc;
            bc.node_threshold = cfg.node_threshold;
            auto trajs = integrate_bohmian(psi0, model, cfg.tdse_dt_ps, n_steps, seeds, c,
                                           bc, cfg.v_cap_meV);
            CsvWriter w(out("trajectories.csv"), {"id", "t", "x", "z"});
            for (std::size_t id = 0; id < trajs.size(); ++id)
                for (const auto& p : trajs[id].path) {
                    w.field(static_cast<int>(id)).field(p[0]).field(p[1]).field(p[2]);
                    w.endrow();
                }
            artifacts.push_back(out("trajectories.csv"));
            CsvWriter ws(out("trajectory_summary.csv"),
                         {"id", "seed_x", "seed_z", "line", "exited", "trapped", "loops",
                          "min_abs_psi"});
            for (std::size_t id = 0; id < trajs.size(); ++id) {
                const auto& t = trajs[id];
                ws.field(static_cast<int>(id)).field(t.seed_x).field(t.seed_z);
                ws.field(id < labels.size() ? labels[id] : std::string("ensemble"));
                ws.field(t.exited ? 1 : 0).field(t.trapped ? 1 : 0).field(t.loops_completed);
                ws.field(t.min_abs_psi);
                ws.endrow();
            }
            artifacts.push_back(out("trajectory_summary.csv"));
        }
    } else {
        throw std::runtime_error("unhandled run kind: " + cfg.kind);
    }
    return artifacts;
}

int run_config(RunConfig cfg, const std::string& out_override) {
    if (const char* env = std::getenv("HECO_OUT")) cfg.out_dir = env;
    if (!out_override.empty()) cfg.out_dir = out_override;
    fs::path out_dir(cfg.out_dir);
    fs::create_directories(out_dir);

    auto t0 = std::chrono::steady_clock::now();
    std::string cfg_text = cfg.serialize();
    std::ofstream(out_dir / "config_used.cfg") << cfg_text;
    std::vector<std::string> artifacts = execute(cfg, out_dir);
    auto t1 = std::chrono::steady_clock::now();

    json manifest;
    manifest["kind"] = cfg.kind;
    manifest["config_hash"] = fnv1a(cfg_text);
    manifest["seed"] = cfg.seed;
    manifest["artifacts"] = artifacts;
    manifest["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
    manifest["format_version"] = 1;
    std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << "\n";
    return 0;
}

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& figures() {
    auto cfg = [](const char* kind, const char* extra) {
        return std::string("[run]\nkind = ") + kind + "\n" + extra;
    };
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> f = {
        {"fig2a", {{"", cfg("hardwall-intensity",
                            "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 0.0\n")}}},
        {"fig2b", {{"", cfg("hardwall-intensity",
                            "[incidence]\nE_i_meV = 40.0\ntheta_i_deg = 0.0\n")}}},
        {"fig4a", {{"", cfg("tdse-intensity",
                            "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 0.0\n"
                            "[tdse]\nnx = 1024\nx_min_A = -76.8\nx_max_A = 76.8\n"
                            "t_final_ps = 4.0\n")}}},
        {"fig4b", {{"", cfg("tdse-intensity",
                            "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 0.0\n"
                            "[potential]\nvariant = repulsive-adsorbate\n"
                            "[tdse]\nnx = 1024\nx_min_A = -76.8\nx_max_A = 76.8\n"
                            "t_final_ps = 4.0\n")}}},
        {"fig4c", {{"", cfg("tdse-intensity",
                            "[incidence]\nE_i_meV = 40.0\ntheta_i_deg = 0.0\n"
                            "[tdse]\nnx = 1024\nnz = 512\n"
                            "tdse_dt_ps = 2e-4\nt_final_ps = 2.2\n")}}},
        {"fig4d", {{"", cfg("tdse-intensity",
                            "[incidence]\nE_i_meV = 40.0\ntheta_i_deg = 0.0\n"
                            "[potential]\nvariant = repulsive-adsorbate\n"
                            "[tdse]\nnx = 1024\nnz = 512\n"
                            "tdse_dt_ps = 2e-4\nt_final_ps = 2.2\n")}}},
        {"fig5", {{"", cfg("fermat-separatrices",
                           "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 20.0\n"
                           "[potential]\nvariant = hard-wall\n")}}},
        {"fig7", {{"", cfg("newton-deflection",
                           "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 20.0\n")}}},
        {"fig9",
         {{"full", cfg("newton-deflection",
                       "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 0.0\n")},
          {"repulsive", cfg("newton-deflection",
                            "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 0.0\n"
                            "[potential]\nvariant = repulsive-adsorbate\n")}}},
        {"fig10", {{"", cfg("bohm-trajectories",
                            "[incidence]\nE_i_meV = 10.0\ntheta_i_deg = 0.0\n")}}},
    };
    return f;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"helium-CO/Pt(111) scattering toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_override, figure_id;
    int threads = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    CLI::App* run = app.add_subcommand("run", "execute a config file");
    run->add_option("--config", config_path, "path to run config")->required();
    run->add_option("--out", out_override, "output directory (overrides config and HECO_OUT)");
    run->add_option("--threads", threads, "worker threads (0 = hardware)");
    run->add_option("--seed", seed, "random seed override")->each([&](const std::string&) {
        seed_set = true;
    });

    CLI::App* rep = app.add_subcommand("reproduce", "run a bundled figure recipe");
    rep->add_option("figure", figure_id, "figure id")->required();
    rep->add_option("--out", out_override, "output directory");
    rep->add_option("--threads", threads, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            RunConfig cfg = RunConfig::parse_file(config_path);
            if (threads >= 0) cfg.threads = threads;
            if (seed_set) cfg.seed = seed;
            return run_config(cfg, out_override);
        }
        const auto& figs = figures();
        auto it = figs.find(figure_id);
        if (it == figs.end()) {
            std::fprintf(stderr, "unknown figure id '%s'; available:", figure_id.c_str());
            for (const auto& [id, _] : figs) std::fprintf(stderr, " %s", id.c_str());
            std::fprintf(stderr, "\n");
            return 2;
        }
        std::string base = out_override.empty() ? "out" : out_override;
        if (const char* env = std::getenv("HECO_OUT"); env && out_override.empty()) base = env;
        for (const auto& [sub, text] : it->second) {
            RunConfig cfg = RunConfig::parse(text);
            if (threads >= 0) cfg.threads = threads;
            std::string dir = base + "/" + figure_id + (sub.empty() ? "" : "_" + sub);
            run_config(cfg, dir);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        for (const auto& v : e.violations) std::fprintf(stderr, "  - %s\n", v.c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
