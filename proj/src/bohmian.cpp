#include "heco/bohmian.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <thread>

namespace heco {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_angle(double a) {
    while (a > M_PI) a -= kTwoPi;
    while (a <= -M_PI) a += kTwoPi;
    return a;
}

void spectral_gradient(const WaveField& f, std::vector<std::complex<double>>& gx,
                       std::vector<std::complex<double>>& gz) {
    const Grid2D& g = f.grid;
    const std::size_t n = g.size();
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan fwd = fftw_plan_dft_2d(g.nx, g.nz, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_2d(g.nx, g.nz, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    auto* b = reinterpret_cast<std::complex<double>*>(buf);

    std::memcpy(buf, f.amp.data(), n * sizeof(fftw_complex));
    fftw_execute(fwd);
    std::vector<std::complex<double>> spec(b, b + n);

    double inv_n = 1.0 / static_cast<double>(n);
    gx.resize(n);
    for (int i = 0; i < g.nx; ++i) {
        double kx = Grid2D::mode_k(i, g.nx, g.dx());
        for (int j = 0; j < g.nz; ++j)
            b[g.index(i, j)] = spec[g.index(i, j)] * std::complex<double>(0.0, kx * inv_n);
    }
    fftw_execute(bwd);
    std::copy(b, b + n, gx.begin());

    gz.resize(n);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j)
            b[g.index(i, j)] =
                spec[g.index(i, j)] *
                std::complex<double>(0.0, Grid2D::mode_k(j, g.nz, g.dz()) * inv_n);
    fftw_execute(bwd);
    std::copy(b, b + n, gz.begin());

    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
}

// Catmull-Rom weights at fraction t for samples p[-1..2]
inline void catmull_rom(double t, double w[4]) {
    double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2 * t2 - t);
    w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

}  // namespace

VelocityInterpolator::VelocityInterpolator(const WaveField& psi, const PhysicalConstants& c,
                                           int order)
    : f_(psi), hbar_over_m_(c.hbar / c.mass()), order_(order) {
    if (order != 1 && order != 3)
        throw std::invalid_argument("VelocityInterpolator: order must be 1 or 3");
    spectral_gradient(f_, gx_, gz_);
    for (const auto& a : f_.amp) max_abs_ = std::max(max_abs_, std::abs(a));
}

std::complex<double> VelocityInterpolator::sample(const std::vector<std::complex<double>>& a,
                                                  double x, double z) const {
    const Grid2D& g = f_.grid;
    double u = (x - g.x_min) / g.dx();
    double v = (z - g.z_min) / g.dz();
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    double fu = u - i0, fv = v - j0;
    auto wrap = [](int m, int n) { return ((m % n) + n) % n; };

    if (order_ == 1) {
        std::complex<double> s{};
        double wu[2] = {1.0 - fu, fu}, wv[2] = {1.0 - fv, fv};
        for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
                s += wu[di] * wv[dj] *
                     a[g.index(wrap(i0 + di, g.nx), wrap(j0 + dj, g.nz))];
        return s;
    }
    double wu[4], wv[4];
    catmull_rom(fu, wu);
    catmull_rom(fv, wv);
    std::complex<double> s{};
    for (int di = -1; di <= 2; ++di) {
        int i = wrap(i0 + di, g.nx);
        std::complex<double> row{};
        for (int dj = -1; dj <= 2; ++dj)
            row += wv[dj + 1] * a[g.index(i, wrap(j0 + dj, g.nz))];
        s += wu[di + 1] * row;
    }
    return s;
}

std::complex<double> VelocityInterpolator::psi(double x, double z) const {
    return sample(f_.amp, x, z);
}
std::complex<double> VelocityInterpolator::dpsi_dx(double x, double z) const {
    return sample(gx_, x, z);
}
std::complex<double> VelocityInterpolator::dpsi_dz(double x, double z) const {
    return sample(gz_, x, z);
}

Vec2 VelocityInterpolator::velocity(double x, double z) const {
    std::complex<double> p = psi(x, z);
    if (p == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
    std::complex<double> inv = 1.0 / p;
    return {hbar_over_m_ * std::imag(dpsi_dx(x, z) * inv),
            hbar_over_m_ * std::imag(dpsi_dz(x, z) * inv)};
}

std::vector<Vec2> seed_lines(double z0, int per_line, double half_width,
                             std::vector<std::string>* labels) {
    static const double offsets[] = {-3.18, -2.12, -1.06, 0.0, 1.06, 2.12, 3.18};
    std::vector<Vec2> seeds;
    for (double off : offsets) {
        for (int i = 0; i < per_line; ++i) {
            double x = per_line == 1 ? 0.0
                                     : -half_width + 2.0 * half_width * i / (per_line - 1);
            seeds.push_back({x, z0 + off});
            if (labels) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "z0%+.2f", off);
                labels->push_back(buf);
            }
        }
    }
    return seeds;
}

std::vector<Vec2> sample_born(const WaveField& psi, int n, std::uint64_t seed) {
    const Grid2D& g = psi.grid;
    double pmax = 0.0;
    for (const auto& a : psi.amp) pmax = std::max(pmax, std::norm(a));
    if (pmax <= 0.0) throw std::invalid_argument("sample_born: empty field");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(g.x_min, g.x_max), uz(g.z_min, g.z_max),
        u01(0.0, 1.0);
    auto density = [&](double x, double z) {
        int i = std::clamp(static_cast<int>((x - g.x_min) / g.dx() + 0.5), 0, g.nx - 1);
        int j = std::clamp(static_cast<int>((z - g.z_min) / g.dz() + 0.5), 0, g.nz - 1);
        return std::norm(psi.amp[g.index(i, j)]);
    };
    std::vector<Vec2> out;
    out.reserve(n);
    while (static_cast<int>(out.size()) < n) {
        double x = ux(rng), z = uz(rng);
        if (u01(rng) * pmax <= density(x, z)) out.push_back({x, z});
    }
    return out;
}

namespace {

struct TwoLevel {
    const VelocityInterpolator* a;
    const VelocityInterpolator* b;
    double hbar_over_m;

    // psi interpolated linearly in time at fraction lam in [0, 1]
    Vec2 velocity(double lam, double x, double z, double* abs_psi = nullptr) const {
        std::complex<double> p = (1.0 - lam) * a->psi(x, z) + lam * b->psi(x, z);
        if (abs_psi) *abs_psi = std::abs(p);
        if (p == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
        std::complex<double> inv = 1.0 / p;
        std::complex<double> dx = (1.0 - lam) * a->dpsi_dx(x, z) + lam * b->dpsi_dx(x, z);
        std::complex<double> dz = (1.0 - lam) * a->dpsi_dz(x, z) + lam * b->dpsi_dz(x, z);
        return {hbar_over_m * std::imag(dx * inv), hbar_over_m * std::imag(dz * inv)};
    }
};

struct StepResult {
    Vec2 pos;
    double min_abs = std::numeric_limits<double>::infinity();
    double turn_angle = 0.0;
    bool capture = false;
};

// advance one trajectory across one wave step [t, t+dt]
StepResult advance(const TwoLevel& lv, Vec2 p, double dt, double d_max,
                   double node_abs, int max_doublings) {
    int n_sub = 1;
    for (int attempt = 0;; ++attempt) {
        StepResult r;
        r.pos = p;
        bool ok = true;
        Vec2 last_disp{0.0, 0.0};
        bool have_disp = false;
        for (int s = 0; s < n_sub && ok; ++s) {
            double h = dt / n_sub;
            double l0 = static_cast<double>(s) / n_sub;
            double lh = (s + 0.5) / n_sub;
            double l1 = static_cast<double>(s + 1) / n_sub;
            double ap = 0.0;
            Vec2 q = r.pos;
            Vec2 k1 = lv.velocity(l0, q.x, q.z, &ap);
            r.min_abs = std::min(r.min_abs, ap);
            if (ap < node_abs && n_sub < (1 << std::min(4, max_doublings))) { ok = false; break; }
            Vec2 k2 = lv.velocity(lh, q.x + 0.5 * h * k1.x, q.z + 0.5 * h * k1.z);
            Vec2 k3 = lv.velocity(lh, q.x + 0.5 * h * k2.x, q.z + 0.5 * h * k2.z);
            Vec2 k4 = lv.velocity(l1, q.x + h * k3.x, q.z + h * k3.z);
            Vec2 d{h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                   h / 6.0 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
            double len = std::hypot(d.x, d.z);
            if (len > d_max) {
                if (attempt >= max_doublings) {
                    // step-size underflow near a node: clamp and flag
                    d.x *= d_max / len;
                    d.z *= d_max / len;
                    r.capture = true;
                } else {
                    ok = false;
                    break;
                }
            }
            if (have_disp && len > 0.0) {
                double cross = last_disp.x * d.z - last_disp.z * d.x;
                double dot = last_disp.x * d.x + last_disp.z * d.z;
                r.turn_angle += std::atan2(cross, dot);
            }
            if (len > 0.0) { last_disp = d; have_disp = true; }
            r.pos.x += d.x;
            r.pos.z += d.z;
        }
        if (ok) return r;
        n_sub *= 2;
    }
}

}  // namespace

std::vector<BohmianTrajectory> integrate_bohmian(const WaveField& initial,
                                                 const InteractionModel& model, double dt,
                                                 int n_steps, const std::vector<Vec2>& seeds,
                                                 const PhysicalConstants& c,
                                                 const BohmianConfig& cfg, double v_cap) {
    const Grid2D& g = initial.grid;
    std::vector<BohmianTrajectory> trajs(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        trajs[s].seed_x = seeds[s].x;
        trajs[s].seed_z = seeds[s].z;
        trajs[s].min_abs_psi = std::numeric_limits<double>::infinity();
        trajs[s].path.push_back({initial.t, seeds[s].x, seeds[s].z});
    }
    std::vector<Vec2> pos(seeds.begin(), seeds.end());
    std::vector<double> turn(seeds.size(), 0.0);

    Propagator prop(initial, model, dt, c, v_cap);
    auto level_a =
        std::make_unique<VelocityInterpolator>(initial, c, cfg.interpolation_order);
    double d_max = 0.5 * std::min(g.dx(), g.dz());
    int record_every = std::max(1, n_steps / 400);

    const int n_threads =
        seeds.size() > 256 ? std::max(1u, std::thread::hardware_concurrency()) : 1;

    for (int step = 0; step < n_steps; ++step) {
        prop.step();
        auto level_b =
            std::make_unique<VelocityInterpolator>(prop.field(), c, cfg.interpolation_order);
        TwoLevel lv{level_a.get(), level_b.get(), c.hbar / c.mass()};
        double node_abs = cfg.node_threshold * level_a->max_abs();

        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t s = begin; s < end; ++s) {
                BohmianTrajectory& tr = trajs[s];
                if (tr.exited) continue;
                StepResult r = advance(lv, pos[s], dt, d_max, node_abs,
                                       cfg.max_substep_doublings);
                pos[s] = r.pos;
                turn[s] += r.turn_angle;
                tr.min_abs_psi = std::min(tr.min_abs_psi, r.min_abs / level_a->max_abs());
                if (r.capture) tr.vortex_capture = true;
                if (pos[s].x < g.x_min || pos[s].x > g.x_max - g.dx() ||
                    pos[s].z < g.z_min || pos[s].z > g.z_max - g.dz()) {
                    tr.exited = true;
                    tr.path.push_back({prop.field().t, pos[s].x, pos[s].z});
                } else if ((step + 1) % record_every == 0 || step + 1 == n_steps) {
                    tr.path.push_back({prop.field().t, pos[s].x, pos[s].z});
                }
            }
        };
        if (n_threads == 1) {
            work(0, trajs.size());
        } else {
            std::vector<std::thread> pool;
            std::size_t chunk = (trajs.size() + n_threads - 1) / n_threads;
            for (int tdx = 1; tdx < n_threads; ++tdx) {
                std::size_t b = tdx * chunk, e = std::min(trajs.size(), b + chunk);
                if (b < e) pool.emplace_back(work, b, e);
            }
            work(0, std::min(chunk, trajs.size()));
            for (auto& th : pool) th.join();
        }
        level_a = std::move(level_b);
    }

    for (std::size_t s = 0; s < trajs.size(); ++s) {
        BohmianTrajectory& tr = trajs[s];
        tr.loops_completed = static_cast<int>(std::fabs(turn[s]) / kTwoPi);
        tr.trapped = !tr.exited && pos[s].z < cfg.well_region_z &&
                     std::fabs(pos[s].x) > cfg.x_cut;
    }
    return trajs;
}

VortexReport detect_vortices(const WaveField& psi, double x_lo, double x_hi, double z_lo,
                             double z_hi, const PhysicalConstants& c,
                             double node_threshold) {
    const Grid2D& g = psi.grid;
    VelocityInterpolator interp(psi, c, 3);
    double thr = node_threshold * interp.max_abs();

    auto arg_at = [&](int i, int j) { return std::arg(psi.amp[g.index(i, j)]); };
    auto abs_at = [&](int i, int j) { return std::abs(psi.amp[g.index(i, j)]); };

    VortexReport report;
    std::vector<std::pair<int, int>> found;
    int i_lo = std::max(0, static_cast<int>((x_lo - g.x_min) / g.dx()));
    int i_hi = std::min(g.nx - 2, static_cast<int>((x_hi - g.x_min) / g.dx()));
    int j_lo = std::max(0, static_cast<int>((z_lo - g.z_min) / g.dz()));
    int j_hi = std::min(g.nz - 2, static_cast<int>((z_hi - g.z_min) / g.dz()));

    for (int i = i_lo; i <= i_hi; ++i) {
        for (int j = j_lo; j <= j_hi; ++j) {
            double w = wrap_angle(arg_at(i + 1, j) - arg_at(i, j)) +
                       wrap_angle(arg_at(i + 1, j + 1) - arg_at(i + 1, j)) +
                       wrap_angle(arg_at(i, j + 1) - arg_at(i + 1, j + 1)) +
                       wrap_angle(arg_at(i, j) - arg_at(i, j + 1));
            int n = static_cast<int>(std::lround(w / kTwoPi));
            if (n == 0) continue;
            double amp_min = std::min({abs_at(i, j), abs_at(i + 1, j), abs_at(i, j + 1),
                                       abs_at(i + 1, j + 1)});
            if (amp_min > thr) continue;
            bool near_existing = false;
            for (auto& [fi, fj] : found)
                if (std::abs(fi - i) <= 1 && std::abs(fj - j) <= 1) near_existing = true;
            if (near_existing) continue;
            found.emplace_back(i, j);

            VortexNode node;
            node.x = g.x(i) + 0.5 * g.dx();
            node.z = g.z(j) + 0.5 * g.dz();
            node.t = psi.t;

            // independent confirmation on an interpolated circle around the node
            double r = 0.8 * std::max(g.dx(), g.dz());
            int m_samples = 64;
            double winding = 0.0, circulation = 0.0;
            bool resolved = false;
            for (int pass = 0; pass < 2 && !resolved; ++pass, m_samples *= 4) {
                winding = 0.0;
                circulation = 0.0;
                resolved = true;
                double prev_arg = std::arg(interp.psi(node.x + r, node.z));
                for (int s = 1; s <= m_samples; ++s) {
                    double phi = kTwoPi * s / m_samples;
                    double px = node.x + r * std::cos(phi), pz = node.z + r * std::sin(phi);
                    double a = std::arg(interp.psi(px, pz));
                    double d = wrap_angle(a - prev_arg);
                    if (std::fabs(d) > M_PI - 1e-6) resolved = false;
                    winding += d;
                    prev_arg = a;
                    Vec2 v = interp.velocity(px, pz);
                    // tangent direction (-sin, cos), arc length r dphi
                    circulation +=
                        (-v.x * std::sin(phi) + v.z * std::cos(phi)) * r * kTwoPi / m_samples;
                }
            }
            node.winding = static_cast<int>(std::lround(winding / kTwoPi));
            node.circulation = circulation;
            node.indeterminate = !resolved || node.winding == 0;
            if (!node.indeterminate) report.nodes.push_back(node);
        }
    }
    return report;
}

double ensemble_density_check(const std::vector<BohmianTrajectory>& trajectories,
                              const WaveField& psi_final, int bins) {
    if (trajectories.empty())
        throw std::invalid_argument("ensemble_density_check: no trajectories");
    const Grid2D& g = psi_final.grid;
    std::vector<double> p(static_cast<std::size_t>(bins) * bins, 0.0), q = p;

    double wx = (g.x_max - g.x_min) / bins, wz = (g.z_max - g.z_min) / bins;
    double np = 0.0;
    for (const auto& tr : trajectories) {
        if (tr.path.empty()) continue;
        double x = tr.path.back()[1], z = tr.path.back()[2];
        int bi = std::clamp(static_cast<int>((x - g.x_min) / wx), 0, bins - 1);
        int bj = std::clamp(static_cast<int>((z - g.z_min) / wz), 0, bins - 1);
        p[static_cast<std::size_t>(bi) * bins + bj] += 1.0;
        np += 1.0;
    }
    double nq = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        int bi = std::clamp(static_cast<int>((g.x(i) - g.x_min) / wx), 0, bins - 1);
        for (int j = 0; j < g.nz; ++j) {
            int bj = std::clamp(static_cast<int>((g.z(j) - g.z_min) / wz), 0, bins - 1);
            double w = std::norm(psi_final.amp[g.index(i, j)]);
            q[static_cast<std::size_t>(bi) * bins + bj] += w;
            nq += w;
        }
    }
    double l1 = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b) l1 += std::fabs(p[b] / np - q[b] / nq);
    return l1;
}

}  // namespace heco
