#pragma once

#include <cmath>

namespace heco {

// Unit system: energy in meV, length in Angstrom, time in ps.
// The He mass enters only through hbar^2/2m.
struct PhysicalConstants {
    double hbar2_over_2m = 0.5224;     // meV A^2, for 4He
    double hbar = 0.6582119569;        // meV ps

    double hbar2_over_m() const { return 2.0 * hbar2_over_2m; }
    double mass() const { return hbar * hbar / (2.0 * hbar2_over_2m); }  // meV ps^2 / A^2

    // k = sqrt(2mE)/hbar
    double wavenumber(double energy_meV) const { return std::sqrt(energy_meV / hbar2_over_2m); }
    // |p| = hbar k, in meV ps / A
    double momentum(double energy_meV) const { return hbar * wavenumber(energy_meV); }
    double de_broglie(double energy_meV) const { return 2.0 * M_PI / wavenumber(energy_meV); }
};

constexpr double deg2rad(double d) { return d * M_PI / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / M_PI; }

}  // namespace heco
