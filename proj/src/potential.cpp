#include "heco/potential.hpp"

#include <cmath>

#include "heco/numeric.hpp"

namespace heco {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Full: return "full";
        case Variant::RepulsiveAdsorbate: return "repulsive-adsorbate";
        case Variant::FlatSurfaceOnly: return "flat-surface-only";
        case Variant::HardWall: return "hard-wall";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "full") return Variant::Full;
    if (s == "repulsive-adsorbate") return Variant::RepulsiveAdsorbate;
    if (s == "flat-surface-only") return Variant::FlatSurfaceOnly;
    if (s == "hard-wall") return Variant::HardWall;
    throw std::invalid_argument("unknown potential variant: " + s);
}

namespace {

double morse_value(const MorseParams& p, double z) {
    double e = std::exp(-p.alpha * (z - p.z_m));
    double u = 1.0 - e;
    return p.D * u * u - p.D;
}

double morse_derivative(const MorseParams& p, double z) {
    double e = std::exp(-p.alpha * (z - p.z_m));
    return 2.0 * p.D * p.alpha * e * (1.0 - e);
}

}  // namespace

double eval_potential(const InteractionModel& model, double x, double z) {
    if (model.variant == Variant::HardWall)
        throw std::invalid_argument("eval_potential: hard wall has no finite energy");
    model.morse.validate();
    double v = morse_value(model.morse, z);
    if (model.variant == Variant::FlatSurfaceOnly) return v;

    model.lj.validate();
    double r2 = x * x + z * z;
    if (r2 == 0.0) throw SingularInputError("eval_potential: r = 0");
    double s2 = model.lj.sigma * model.lj.sigma / r2;
    double s6 = s2 * s2 * s2;
    if (model.variant == Variant::RepulsiveAdsorbate)
        v += 4.0 * model.lj.epsilon * s6 * s6;
    else
        v += 4.0 * model.lj.epsilon * (s6 * s6 - s6);
    return v;
}

std::pair<double, double> eval_gradient(const InteractionModel& model, double x, double z) {
    if (model.variant == Variant::HardWall)
        throw std::invalid_argument("eval_gradient: hard wall has no finite gradient");
    model.morse.validate();
    double dz = morse_derivative(model.morse, z);
    double dx = 0.0;
    if (model.variant != Variant::FlatSurfaceOnly) {
        model.lj.validate();
        double r2 = x * x + z * z;
        if (r2 == 0.0) throw SingularInputError("eval_gradient: r = 0");
        double s2 = model.lj.sigma * model.lj.sigma / r2;
        double s6 = s2 * s2 * s2;
        // d/dr of the LJ term, divided by r
        double dlj_over_r;
        if (model.variant == Variant::RepulsiveAdsorbate)
            dlj_over_r = 4.0 * model.lj.epsilon * (-12.0 * s6 * s6) / r2;
        else
            dlj_over_r = 4.0 * model.lj.epsilon * (-12.0 * s6 * s6 + 6.0 * s6) / r2;
        dx += dlj_over_r * x;
        dz += dlj_over_r * z;
    }
    return {dx, dz};
}

std::pair<double, double> morse_turning_points(const MorseParams& p, double E_z) {
    p.validate();
    if (!(E_z > -p.D && E_z < 0.0))
        throw std::domain_error("morse_turning_points: E_z must lie in (-D, 0)");
    double s = std::sqrt(1.0 - std::fabs(E_z) / p.D);
    double z_minus = p.z_m - std::log(1.0 + s) / p.alpha;
    double z_plus = p.z_m - std::log(1.0 - s) / p.alpha;
    return {z_minus, z_plus};
}

double morse_frequency(const MorseParams& p, double E_z, const PhysicalConstants& c) {
    p.validate();
    if (E_z >= 0.0 || E_z < -p.D)
        throw std::domain_error("morse_frequency: E_z must lie in [-D, 0)");
    return std::sqrt(2.0 * p.alpha * p.alpha * std::fabs(E_z) / c.mass());
}

double jump_length(const MorseParams& p, double E_i, double E_z) {
    p.validate();
    if (E_z >= 0.0) throw std::domain_error("jump_length: no bound motion for E_z >= 0");
    if (E_i <= 0.0) throw std::domain_error("jump_length: E_i must be positive");
    return (2.0 * M_PI / p.alpha) * std::sqrt((E_i - E_z) / std::fabs(E_z));
}

BoundStateSet morse_bound_states(const MorseParams& p, const PhysicalConstants& c) {
    p.validate();
    double Omega = std::sqrt(2.0 * p.alpha * p.alpha * p.D / c.mass());
    double hO = c.hbar * Omega;
    BoundStateSet out;
    auto well_bottom_energy = [&](int n) {
        double nh = n + 0.5;
        return hO * nh * (1.0 - hO * nh / (4.0 * p.D));
    };
    for (int n = 0;; ++n) {
        // dE_{n+1,n} >= 0  <=>  n+1 <= 2D / (hbar Omega)
        if (n > 0 && well_bottom_energy(n) - well_bottom_energy(n - 1) < 0.0) break;
        double e = well_bottom_energy(n) - p.D;
        if (e >= 0.0) break;
        out.energies.push_back(e);
    }
    return out;
}

double on_axis_well_depth(const MorseParams& morse, double epsilon, double sigma) {
    InteractionModel m;
    m.variant = Variant::Full;
    m.morse = morse;
    m.lj.epsilon = epsilon;
    m.lj.sigma = sigma;
    // coarse scan then golden refine; the on-axis well sits between the LJ
    // core and the Morse tail
    double best_z = morse.z_m, best_v = eval_potential(m, 0.0, morse.z_m);
    for (double z = 0.3; z <= 12.0; z += 0.05) {
        double v = eval_potential(m, 0.0, z);
        if (v < best_v) { best_v = v; best_z = z; }
    }
    double z0 = numeric::golden_min([&](double z) { return eval_potential(m, 0.0, z); },
                                    best_z - 0.06, best_z + 0.06, 1e-12);
    return -eval_potential(m, 0.0, z0);
}

double calibrate_sigma(double target_well_depth, const MorseParams& morse, double epsilon) {
    morse.validate();
    if (epsilon <= 0.0)
        throw std::invalid_argument("calibrate_sigma: epsilon must be positive (no adsorbate)");
    auto mismatch = [&](double s) { return on_axis_well_depth(morse, epsilon, s) - target_well_depth; };
    double lo = 1.0, hi = 6.0;
    double flo = mismatch(lo), fhi = mismatch(hi);
    if ((flo > 0) == (fhi > 0)) {
        std::string diag = "calibrate_sigma: target depth " + std::to_string(target_well_depth) +
                           " meV not bracketed on sigma in [1,6] A; depth(1)=" +
                           std::to_string(on_axis_well_depth(morse, epsilon, lo)) + ", depth(6)=" +
                           std::to_string(on_axis_well_depth(morse, epsilon, hi));
        throw CalibrationError(diag);
    }
    return numeric::bisect(mismatch, lo, hi, 1e-7);
}

}  // namespace heco
