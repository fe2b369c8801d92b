#include "heco/newtonian.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "heco/fermatian.hpp"
#include "heco/numeric.hpp"

namespace heco {

namespace {

struct State {
    double x, z, px, pz;
};

struct Derivs {
    const InteractionModel* model;
    double inv_m;

    State operator()(const State& s) const {
        auto [dvx, dvz] = eval_gradient(*model, s.x, s.z);
        return {s.px * inv_m, s.pz * inv_m, -dvx, -dvz};
    }
};

State rk4_step(const State& s, double dt, const Derivs& f) {
    auto axpy = [](const State& a, double h, const State& k) {
        return State{a.x + h * k.x, a.z + h * k.z, a.px + h * k.px, a.pz + h * k.pz};
    };
    State k1 = f(s);
    State k2 = f(axpy(s, 0.5 * dt, k1));
    State k3 = f(axpy(s, 0.5 * dt, k2));
    State k4 = f(axpy(s, dt, k3));
    return State{s.x + dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                 s.z + dt / 6.0 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z),
                 s.px + dt / 6.0 * (k1.px + 2 * k2.px + 2 * k3.px + k4.px),
                 s.pz + dt / 6.0 * (k1.pz + 2 * k2.pz + 2 * k3.pz + k4.pz)};
}

double flat_potential(const InteractionModel& model, double z) {
    InteractionModel flat = model;
    flat.variant = Variant::FlatSurfaceOnly;
    return eval_potential(flat, 0.0, z);
}

}  // namespace

TrajectoryRecord integrate_trajectory(double b, double theta_i, double E_i,
                                      const InteractionModel& model,
                                      const IntegratorConfig& cfg,
                                      const PhysicalConstants& c) {
    if (model.variant == Variant::HardWall)
        throw std::invalid_argument("integrate_trajectory: hard wall is handled geometrically");
    if (cfg.dt <= 0.0 || cfg.t_max <= 0.0)
        throw std::invalid_argument("integrate_trajectory: dt and t_max must be positive");

    auto [pos, mom] = initial_conditions(b, theta_i, E_i, cfg.escape_z, c);
    State s{pos.x, pos.z, mom.x, mom.z};
    Derivs f{&model, 1.0 / c.mass()};
    double half_inv_m = 0.5 / c.mass();

    TrajectoryRecord rec;
    rec.b = b;
    rec.theta_i = theta_i;
    rec.E_i = E_i;

    auto record = [&](double t) {
        double V = eval_potential(model, s.x, s.z);
        rec.points.push_back({t, s.x, s.z, s.px, s.pz,
                              half_inv_m * (s.px * s.px + s.pz * s.pz) + V});
    };
    record(0.0);

    double t = 0.0;
    double dt_local = cfg.dt;
    long step = 0;
    while (t < cfg.t_max) {
        State next = rk4_step(s, dt_local, f);
        if (eval_potential(model, next.x, next.z) > cfg.core_energy) {
            int halvings = 0;
            do {
                if (++halvings > cfg.max_halvings)
                    throw IntegrationError("integrate_trajectory: repulsive core not resolved "
                                           "after maximum dt halvings");
                dt_local *= 0.5;
                next = rk4_step(s, dt_local, f);
            } while (eval_potential(model, next.x, next.z) > cfg.core_energy);
        }
        s = next;
        t += dt_local;
        dt_local = std::min(cfg.dt, 2.0 * dt_local);
        if (++step % cfg.record_every == 0) record(t);

        if (s.z > cfg.escape_z && s.pz > 0.0) {
            rec.escaped = true;
            break;
        }
        if (cfg.stop_trapped_early && std::fabs(s.x) > cfg.x_cut &&
            half_inv_m * s.pz * s.pz + flat_potential(model, s.z) < 0.0) {
            rec.trapped = true;
            break;
        }
    }
    if (rec.points.empty() || rec.points.back().t != t) record(t);

    rec.t_final = t;
    rec.E_x_final = half_inv_m * s.px * s.px;
    rec.E_z_final = half_inv_m * s.pz * s.pz + flat_potential(model, s.z);
    if (rec.escaped) rec.theta_d = std::atan2(s.px, s.pz);
    else rec.trapped = rec.E_z_final < 0.0;
    return rec;
}

DeflectionFunction deflection_scan(double theta_i, double E_i, const InteractionModel& model,
                                   double b_lo, double b_hi, int n_samples,
                                   const IntegratorConfig& cfg, const PhysicalConstants& c,
                                   int n_threads) {
    if (n_samples < 2) throw std::invalid_argument("deflection_scan: n_samples >= 2");
    DeflectionFunction df;
    df.theta_i = theta_i;
    df.E_i = E_i;
    df.variant = model.variant;
    df.samples.resize(n_samples);

    if (n_threads <= 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<int>(n_threads, n_samples);

    std::vector<std::exception_ptr> errors(n_threads);
    auto worker = [&](int tid) {
        try {
            for (int i = tid; i < n_samples; i += n_threads) {
                double b = b_lo + (b_hi - b_lo) * i / (n_samples - 1);
                TrajectoryRecord r = integrate_trajectory(b, theta_i, E_i, model, cfg, c);
                DeflectionSample& out = df.samples[i];
                out.b = b;
                out.trapped = r.trapped;
                if (r.escaped) out.theta_d = r.theta_d;
                out.E_z = r.E_z_final;
                out.E_x = r.E_x_final;
                out.t_final = r.t_final;
            }
        } catch (...) {
            errors[tid] = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    for (int tid = 1; tid < n_threads; ++tid) pool.emplace_back(worker, tid);
    worker(0);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return df;
}

EnergyDiagram energy_diagram(double theta_i, double E_i, const InteractionModel& model,
                             double b_lo, double b_hi, int n_samples,
                             const IntegratorConfig& cfg, const PhysicalConstants& c,
                             int n_threads) {
    return deflection_scan(theta_i, E_i, model, b_lo, b_hi, n_samples, cfg, c, n_threads);
}

RainbowReport find_rainbows(const DeflectionFunction& df, double E_i,
                            const InteractionModel& model, const IntegratorConfig& cfg,
                            const PhysicalConstants& c) {
    // An extremum counts only inside a smooth branch: a run of untrapped
    // samples without jumps, long enough to exclude resonant slivers inside
    // the trapping bands.
    constexpr double kJump = 0.15;        // rad, branch-break threshold
    constexpr double kProminence = 1e-5;  // rad, noise floor for an extremum
    constexpr int kMinBranch = 9;

    const auto& s = df.samples;
    RainbowReport report;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i].trapped) { ++i; continue; }
        size_t j = i;
        while (j + 1 < s.size() && !s[j + 1].trapped &&
               std::fabs(s[j + 1].theta_d - s[j].theta_d) < kJump)
            ++j;
        if (static_cast<int>(j - i + 1) >= kMinBranch) {
            for (size_t m = i + 1; m < j; ++m) {
                double y0 = s[m - 1].theta_d, y1 = s[m].theta_d, y2 = s[m + 1].theta_d;
                bool is_max = y1 > y0 + kProminence && y1 > y2 + kProminence;
                bool is_min = y1 < y0 - kProminence && y1 < y2 - kProminence;
                if (!is_max && !is_min) continue;
                double b_star = numeric::parabolic_vertex(s[m - 1].b, y0, s[m].b, y1,
                                                          s[m + 1].b, y2);
                b_star = std::clamp(b_star, s[m - 1].b, s[m + 1].b);
                TrajectoryRecord r = integrate_trajectory(b_star, df.theta_i, E_i, model, cfg, c);
                double theta_R = r.escaped ? r.theta_d : y1;
                report.extrema.push_back(
                    {b_star, theta_R, c.wavenumber(E_i) * std::sin(theta_R), is_max});
            }
        }
        i = j + 1;
    }
    return report;
}

std::vector<std::pair<double, double>> newton_homologous_pairs(
    double E_z_target, const EnergyDiagram& diagram, const InteractionModel& model,
    const IntegratorConfig& cfg, const PhysicalConstants& c) {
    const auto& s = diagram.samples;
    if (s.size() < 2) return {};

    IntegratorConfig fast = cfg;
    fast.stop_trapped_early = true;
    auto ez_of = [&](double b) {
        return integrate_trajectory(b, diagram.theta_i, diagram.E_i, model, fast, c).E_z_final;
    };

    // refined E_z(b) = target crossings, tagged with the crossing direction
    struct Crossing {
        double b;
        bool downward;  // E_z decreasing through the target
    };
    std::vector<Crossing> crossings;
    for (size_t i = 0; i + 1 < s.size(); ++i) {
        double gl = s[i].E_z - E_z_target, gr = s[i + 1].E_z - E_z_target;
        if (gl == 0.0) crossings.push_back({s[i].b, gr < 0.0});
        else if ((gl > 0) != (gr > 0)) {
            double b = numeric::bisect([&](double x) { return ez_of(x) - E_z_target; },
                                       s[i].b, s[i + 1].b, 1e-7);
            crossings.push_back({b, gl > 0.0});
        }
    }

    // a pair flanks a dip of E_z below the target
    std::vector<std::pair<double, double>> pairs;
    for (size_t i = 0; i + 1 < crossings.size(); ++i)
        if (crossings[i].downward && !crossings[i + 1].downward)
            pairs.emplace_back(crossings[i].b, crossings[i + 1].b);
    return pairs;
}

TrappingSummary trapping_summary(const DeflectionFunction& df) {
    TrappingSummary out;
    const auto& s = df.samples;
    int trapped_count = 0;
    size_t i = 0;
    while (i < s.size()) {
        if (!s[i].trapped) { ++i; continue; }
        size_t j = i;
        while (j + 1 < s.size() && s[j + 1].trapped) ++j;
        out.intervals.emplace_back(s[i].b, s[j].b);
        trapped_count += static_cast<int>(j - i + 1);
        i = j + 1;
    }
    if (!s.empty()) out.fraction = static_cast<double>(trapped_count) / s.size();
    return out;
}

}  // namespace heco
