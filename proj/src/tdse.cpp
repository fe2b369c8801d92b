#include "heco/tdse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace heco {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

double Grid2D::mode_k(int m, int n, double d) {
    int folded = m < n / 2 ? m : m - n;
    return 2.0 * M_PI * folded / (n * d);
}

void Grid2D::validate(double lambda_dB) const {
    auto pow2 = [](int n) { return n >= 8 && (n & (n - 1)) == 0; };
    if (!pow2(nx) || !pow2(nz))
        throw std::invalid_argument("Grid2D: nx and nz must be powers of two (>= 8)");
    if (x_max <= x_min || z_max <= z_min)
        throw std::invalid_argument("Grid2D: empty extent");
    if (dx() > lambda_dB / 8.0 || dz() > lambda_dB / 8.0)
        throw std::invalid_argument("Grid2D: spacing must resolve lambda_dB / 8");
    if (x_min > -26.5 || x_max < 26.5 || z_min > 0.5 || z_max < 30.0)
        throw std::invalid_argument("Grid2D: domain must contain the 53 A analysis cell");
}

double WaveField::norm() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return s * grid.dx() * grid.dz();
}

WaveField build_initial_state(const InitialStateSpec& spec, const Grid2D& grid,
                              const PhysicalConstants& c) {
    if (spec.n_gaussians < 1 || spec.spacing <= 0 || spec.sigma_x <= 0 || spec.sigma_z <= 0)
        throw std::invalid_argument("build_initial_state: bad spec");
    grid.validate(c.de_broglie(spec.E_i));

    double k = c.wavenumber(spec.E_i);
    double kx = k * std::sin(spec.theta_i), kz = -k * std::cos(spec.theta_i);

    WaveField psi;
    psi.grid = grid;
    psi.amp.assign(grid.size(), {});
    psi.t = 0.0;

    double x0 = spec.center_x - 0.5 * (spec.n_gaussians - 1) * spec.spacing;
    for (int i = 0; i < grid.nx; ++i) {
        double x = grid.x(i);
        // comb of identical Gaussians along x
        double comb = 0.0;
        for (int g = 0; g < spec.n_gaussians; ++g) {
            double u = x - (x0 + g * spec.spacing);
            comb += std::exp(-u * u / (4.0 * spec.sigma_x * spec.sigma_x));
        }
        for (int j = 0; j < grid.nz; ++j) {
            double z = grid.z(j);
            double w = z - spec.center_z;
            double env = comb * std::exp(-w * w / (4.0 * spec.sigma_z * spec.sigma_z));
            psi.amp[grid.index(i, j)] =
                env * std::exp(std::complex<double>(0.0, kx * x + kz * z));
        }
    }

    double n = psi.norm();
    if (n <= 0.0) throw std::invalid_argument("build_initial_state: empty state");
    double scale = 1.0 / std::sqrt(n);
    double peak = 0.0;
    for (auto& a : psi.amp) {
        a *= scale;
        peak = std::max(peak, std::abs(a));
    }

    // support check on the vacuum-side edges (top and both x edges); the
    // bottom edge sits behind the repulsive wall, where the physical tail of a
    // beam launched at finite height necessarily lives
    double edge = 0.0;
    for (int j = 0; j < grid.nz; ++j) {
        edge = std::max(edge, std::abs(psi.amp[grid.index(0, j)]));
        edge = std::max(edge, std::abs(psi.amp[grid.index(grid.nx - 1, j)]));
    }
    for (int i = 0; i < grid.nx; ++i)
        edge = std::max(edge, std::abs(psi.amp[grid.index(i, grid.nz - 1)]));
    if (edge > 1e-8 * peak)
        throw std::invalid_argument("build_initial_state: support clipped by the grid edge");
    return psi;
}

struct Propagator::Impl {
    WaveField prev, cur;  // cur lags by one level until the bootstrap step
    InteractionModel model;
    PhysicalConstants consts;
    double dt;
    double v_cap;
    double norm0 = 0.0;
    long steps = 0;
    bool started = false;

    std::vector<double> V;     // capped potential, meV
    std::vector<double> kfac;  // hbar^2 k^2 / 2m per FFT mode, meV
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;
    std::vector<std::complex<double>> tmp, tmp2;

    explicit Impl(const WaveField& initial) : prev(initial), cur(initial) {}

    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }

    const Grid2D& grid() const { return prev.grid; }

    void apply_h(const std::vector<std::complex<double>>& in,
                 std::vector<std::complex<double>>& out) {
        const std::size_t n = in.size();
        std::memcpy(buf, in.data(), n * sizeof(fftw_complex));
        fftw_execute(fwd);
        auto* b = reinterpret_cast<std::complex<double>*>(buf);
        double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t m = 0; m < n; ++m) b[m] *= kfac[m] * inv_n;
        fftw_execute(bwd);
        out.resize(n);
        for (std::size_t m = 0; m < n; ++m) out[m] = b[m] + V[m] * in[m];
    }

    void bootstrap() {
        // second-order Taylor start: psi(dt) = (1 - i dt H/hbar - dt^2 H^2/2hbar^2) psi(0)
        double hbar = consts.hbar;
        apply_h(prev.amp, tmp);
        apply_h(tmp, tmp2);
        cur.amp.resize(prev.amp.size());
        std::complex<double> c1(0.0, -dt / hbar);
        double c2 = -dt * dt / (2.0 * hbar * hbar);
        for (std::size_t m = 0; m < prev.amp.size(); ++m)
            cur.amp[m] = prev.amp[m] + c1 * tmp[m] + c2 * tmp2[m];
        cur.t = prev.t + dt;
        started = true;
    }

    void leapfrog() {
        apply_h(cur.amp, tmp);
        std::complex<double> c2(0.0, -2.0 * dt / consts.hbar);
        for (std::size_t m = 0; m < cur.amp.size(); ++m)
            prev.amp[m] += c2 * tmp[m];
        prev.t = cur.t + dt;
        std::swap(prev, cur);
    }
};

Propagator::Propagator(const WaveField& initial, const InteractionModel& model, double dt,
                       const PhysicalConstants& c, double v_cap)
    : impl_(std::make_unique<Impl>(initial)) {
    if (model.variant == Variant::HardWall)
        throw std::invalid_argument("Propagator: hard wall is not a finite potential");
    if (dt <= 0.0) throw std::invalid_argument("Propagator: dt must be positive");

    Impl& im = *impl_;
    im.model = model;
    im.consts = c;
    im.dt = dt;
    im.v_cap = v_cap;

    const Grid2D& g = im.grid();
    im.V.resize(g.size());
    double v_max_abs = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.nz; ++j) {
            double x = g.x(i), z = g.z(j);
            double v;
            if (x == 0.0 && z == 0.0) v = v_cap;
            else v = std::min(eval_potential(model, x, z), v_cap);
            im.V[g.index(i, j)] = v;
            v_max_abs = std::max(v_max_abs, std::fabs(v));
        }
    }

    im.kfac.resize(g.size());
    double k_max_energy = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        double kx = Grid2D::mode_k(i, g.nx, g.dx());
        for (int j = 0; j < g.nz; ++j) {
            double kz = Grid2D::mode_k(j, g.nz, g.dz());
            double e = c.hbar2_over_2m * (kx * kx + kz * kz);
            im.kfac[g.index(i, j)] = e;
            k_max_energy = std::max(k_max_energy, e);
        }
    }

    double e_max = k_max_energy + v_max_abs;
    if (dt >= c.hbar / e_max)
        throw PropagationError("Propagator: dt violates the stability bound hbar/E_max = " +
                               std::to_string(c.hbar / e_max) + " ps");

    im.buf = fftw_alloc_complex(g.size());
    im.fwd = fftw_plan_dft_2d(g.nx, g.nz, im.buf, im.buf, FFTW_FORWARD, FFTW_MEASURE);
    im.bwd = fftw_plan_dft_2d(g.nx, g.nz, im.buf, im.buf, FFTW_BACKWARD, FFTW_MEASURE);
    im.norm0 = im.prev.norm();
}

Propagator::~Propagator() = default;

void Propagator::step() {
    Impl& im = *impl_;
    if (!im.started) im.bootstrap();
    else im.leapfrog();
    if (++im.steps % 200 == 0) {
        double n = im.cur.norm();
        if (std::fabs(n / im.norm0 - 1.0) > 1e-5)
            throw PropagationError("Propagator: norm drift " +
                                   std::to_string(n / im.norm0 - 1.0) + " after " +
                                   std::to_string(im.steps) + " steps (t = " +
                                   std::to_string(im.cur.t) + " ps)");
    }
}

void Propagator::run(int n_steps, const std::function<void(const WaveField&)>& on_step) {
    for (int s = 0; s < n_steps; ++s) {
        step();
        if (on_step) on_step(impl_->cur);
    }
}

const WaveField& Propagator::field() const {
    return impl_->started ? impl_->cur : impl_->prev;
}

double Propagator::dt() const { return impl_->dt; }

double Propagator::norm() const { return field().norm(); }

double Propagator::energy_expectation() const {
    Impl& im = *impl_;
    const auto& psi = field().amp;
    im.apply_h(psi, im.tmp);
    double e = 0.0, n = 0.0;
    for (std::size_t m = 0; m < psi.size(); ++m) {
        e += std::real(std::conj(psi[m]) * im.tmp[m]);
        n += std::norm(psi[m]);
    }
    return e / n;
}

double Propagator::potential_at(int i, int j) const {
    return impl_->V[impl_->grid().index(i, j)];
}

namespace {

std::complex<double> amplitude_from_modes(const std::vector<std::complex<double>>& modes) {
    double power = 0.0, best = -1.0;
    std::complex<double> lead(1.0, 0.0);
    for (const auto& m : modes) {
        double p = std::norm(m);
        power += p;
        if (p > best) { best = p; lead = m; }
    }
    double mag = std::sqrt(power);
    double lead_abs = std::abs(lead);
    return lead_abs > 0.0 ? mag * lead / lead_abs : std::complex<double>(mag, 0.0);
}

}  // namespace

double SMatrixRow::total_probability() const {
    double s = 0.0;
    for (const auto& e : entries) s += std::norm(e.amplitude);
    return s;
}

SMatrixRow extract_smatrix(const WaveField& psi, double E_i, double theta_i,
                           std::pair<double, double> cell, const PhysicalConstants& c,
                           double interaction_z, double stale_tolerance) {
    const Grid2D& g = psi.grid;
    auto [x_lo, x_hi] = cell;
    if (x_hi <= x_lo || x_lo < g.x_min || x_hi > g.x_max)
        throw std::invalid_argument("extract_smatrix: cell outside grid");

    double total = 0.0, near_surface = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.nz; ++j) {
            double p = std::norm(psi.amp[g.index(i, j)]);
            total += p;
            if (g.z(j) < interaction_z && g.x(i) >= x_lo && g.x(i) <= x_hi) near_surface += p;
        }
    }
    if (total <= 0.0) throw std::invalid_argument("extract_smatrix: empty field");
    double stale = near_surface / total;
    if (stale > stale_tolerance)
        throw StaleExtractionError("extract_smatrix: " + std::to_string(stale * 100.0) +
                                   "% of the norm still in the interaction region");

    double L = x_hi - x_lo;
    double k = c.wavenumber(E_i);
    double Lz = g.nz * g.dz();

    SMatrixRow row;
    row.k = k;
    row.k_ix = k * std::sin(theta_i);
    row.cell_length = L;
    row.t = psi.t;

    int n_max = static_cast<int>(std::floor(k * L / (2.0 * M_PI)));
    std::vector<int> cols;
    for (int i = 0; i < g.nx; ++i)
        if (g.x(i) >= x_lo && g.x(i) <= x_hi) cols.push_back(i);

    std::vector<std::complex<double>> f(g.nz);
    for (int n = -n_max; n <= n_max; ++n) {
        double k_n = 2.0 * M_PI * n / L;
        // x projection onto the cell harmonic
        std::fill(f.begin(), f.end(), std::complex<double>());
        for (int i : cols) {
            std::complex<double> ph = std::exp(std::complex<double>(0.0, -k_n * g.x(i)));
            const std::complex<double>* colp = &psi.amp[g.index(i, 0)];
            for (int j = 0; j < g.nz; ++j) f[j] += ph * colp[j];
        }
        double meas = g.dx() * g.dz() / std::sqrt(L * Lz);
        SMatrixEntry entry;
        entry.k_dx = k_n;
        entry.delta_k = k_n - row.k_ix;
        // upward (k_z > 0) z-modes of the cell harmonic
        for (int m = 0; m < g.nz; ++m) {
            double k_m = Grid2D::mode_k(m, g.nz, g.dz());
            if (k_m <= 0.0) continue;
            std::complex<double> cm;
            for (int j = 0; j < g.nz; ++j)
                cm += f[j] * std::exp(std::complex<double>(0.0, -k_m * g.z(j)));
            entry.modes.push_back(cm * meas);
        }
        entry.amplitude = amplitude_from_modes(entry.modes);
        row.entries.push_back(std::move(entry));
    }
    return row;
}

SMatrixRow remove_plane_wave_contribution(const SMatrixRow& S_full, const SMatrixRow& S_flat) {
    if (S_full.entries.size() != S_flat.entries.size() ||
        std::fabs(S_full.k - S_flat.k) > 1e-12 ||
        std::fabs(S_full.cell_length - S_flat.cell_length) > 1e-12 ||
        std::fabs(S_full.t - S_flat.t) > 1e-9)
        throw std::invalid_argument(
            "remove_plane_wave_contribution: rows from mismatched runs");
    SMatrixRow out = S_full;
    for (std::size_t e = 0; e < out.entries.size(); ++e) {
        auto& a = out.entries[e];
        const auto& b = S_flat.entries[e];
        if (std::fabs(a.k_dx - b.k_dx) > 1e-12 || a.modes.size() != b.modes.size())
            throw std::invalid_argument(
                "remove_plane_wave_contribution: mismatched discretization");
        for (std::size_t m = 0; m < a.modes.size(); ++m) a.modes[m] -= b.modes[m];
        a.amplitude = amplitude_from_modes(a.modes);
    }
    return out;
}

DiffractionSpectrum reflection_coefficient(const SMatrixRow& S, double E_i,
                                           const PhysicalConstants& c) {
    double k = c.wavenumber(E_i);
    DiffractionSpectrum sp;
    sp.model = "tdse";
    sp.E_i = E_i;
    sp.theta_i = std::asin(std::clamp(S.k_ix / k, -1.0, 1.0));
    for (const auto& e : S.entries) {
        double s = e.k_dx / k;
        if (std::fabs(s) >= 1.0) continue;  // evanescent channels carry no flux
        double k_dz = k * std::sqrt(1.0 - s * s);
        sp.theta_d.push_back(std::asin(s));
        sp.delta_k.push_back(e.delta_k);
        sp.I_total.push_back(k_dz * std::norm(e.amplitude));
    }
    double peak = 0.0;
    for (double v : sp.I_total) peak = std::max(peak, v);
    if (peak > 0.0)
        for (double& v : sp.I_total) v /= peak;
    return sp;
}

void save_snapshot(const WaveField& psi, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
    unsigned char header[128] = {};
    std::memcpy(header, "WFLD", 4);
    std::uint32_t v32 = 1;
    std::memcpy(header + 4, &v32, 4);
    v32 = static_cast<std::uint32_t>(psi.grid.nx);
    std::memcpy(header + 8, &v32, 4);
    v32 = static_cast<std::uint32_t>(psi.grid.nz);
    std::memcpy(header + 12, &v32, 4);
    double f64[5] = {psi.grid.x_min, psi.grid.x_max, psi.grid.z_min, psi.grid.z_max, psi.t};
    std::memcpy(header + 16, f64, sizeof(f64));
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(psi.amp.data()),
              static_cast<std::streamsize>(psi.amp.size() * sizeof(std::complex<double>)));
    if (!out) throw std::runtime_error("save_snapshot: write failed for " + path);
}

WaveField load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_snapshot: cannot open " + path);
    unsigned char header[128];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || std::memcmp(header, "WFLD", 4) != 0)
        throw std::runtime_error("load_snapshot: bad magic in " + path);
    std::uint32_t version, nx, nz;
    std::memcpy(&version, header + 4, 4);
    std::memcpy(&nx, header + 8, 4);
    std::memcpy(&nz, header + 12, 4);
    if (version != 1) throw std::runtime_error("load_snapshot: unsupported version");
    double f64[5];
    std::memcpy(f64, header + 16, sizeof(f64));
    WaveField psi;
    psi.grid.nx = static_cast<int>(nx);
    psi.grid.nz = static_cast<int>(nz);
    psi.grid.x_min = f64[0];
    psi.grid.x_max = f64[1];
    psi.grid.z_min = f64[2];
    psi.grid.z_max = f64[3];
    psi.t = f64[4];
    psi.amp.resize(psi.grid.size());
    in.read(reinterpret_cast<char*>(psi.amp.data()),
            static_cast<std::streamsize>(psi.amp.size() * sizeof(std::complex<double>)));
    if (!in) throw std::runtime_error("load_snapshot: truncated data in " + path);
    return psi;
}

}  // namespace heco
