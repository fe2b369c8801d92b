#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heco/units.hpp"

namespace heco {

struct SingularInputError : std::domain_error {
    using std::domain_error::domain_error;
};
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// He-Pt(111): Morse well along z.
struct MorseParams {
    double D = 4.0;       // well depth, meV
    double alpha = 1.13;  // inverse range, 1/A
    double z_m = 1.22;    // minimum position, A

    void validate() const {
        if (D <= 0 || alpha <= 0)
            throw std::invalid_argument("MorseParams: D and alpha must be positive");
    }
};

// He-CO: Lennard-Jones in r = sqrt(x^2+z^2).
struct LennardJonesParams {
    // sigma fitted so that the on-axis well depth of the full model equals
    // the 2.96 meV target (see calibrate_sigma and its unit test).
    static constexpr double kCalibratedSigma = 3.1306562;

    double epsilon = 2.37;                  // well depth, meV
    double sigma = kCalibratedSigma;        // zero-crossing radius, A

    void validate() const {
        if (epsilon <= 0 || sigma <= 0)
            throw std::invalid_argument("LennardJonesParams: epsilon and sigma must be positive");
    }
};

// Hard-wall stand-in for the 10 meV equipotential: half-disc of radius a
// clipped by the flat wall at z = z_r.
struct HardWallParams {
    double a = 2.86;    // adsorbate radius, A
    double z_r = 0.28;  // flat-wall height above the CO center of mass, A
};

enum class Variant { Full, RepulsiveAdsorbate, FlatSurfaceOnly, HardWall };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct InteractionModel {
    Variant variant = Variant::Full;
    MorseParams morse;
    LennardJonesParams lj;
    HardWallParams hardwall;
};

struct BoundStateSet {
    std::vector<double> energies;  // meV, dissociation-referenced (negative)
    int count() const { return static_cast<int>(energies.size()); }
};

// V(x, z) in meV. Not defined for Variant::HardWall.
double eval_potential(const InteractionModel& model, double x, double z);

// Analytic (dV/dx, dV/dz) in meV/A.
std::pair<double, double> eval_gradient(const InteractionModel& model, double x, double z);

// Classical turning points (z_minus, z_plus) of the Morse well at E_z in (-D, 0).
std::pair<double, double> morse_turning_points(const MorseParams& p, double E_z);

// Anharmonic oscillation frequency at E_z in [-D, 0), in 1/ps.
double morse_frequency(const MorseParams& p, double E_z, const PhysicalConstants& c);

// Per-period advance along x of a trapped trajectory, in A.
double jump_length(const MorseParams& p, double E_i, double E_z);

// Morse eigenenergies, dissociation-referenced; count fixed by dE_{n+1,n} >= 0.
BoundStateSet morse_bound_states(const MorseParams& p, const PhysicalConstants& c);

// Finds sigma in [1, 6] A such that min_z V_full(0, z) = -target_well_depth.
double calibrate_sigma(double target_well_depth, const MorseParams& morse, double epsilon);

// Depth (positive meV) of the on-axis well of the full model for a given sigma.
double on_axis_well_depth(const MorseParams& morse, double epsilon, double sigma);

}  // namespace heco
