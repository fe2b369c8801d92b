#pragma once

#include <complex>
#include <vector>

#include "heco/potential.hpp"
#include "heco/units.hpp"

namespace heco {

// Asymptotic hard-cylinder scattering amplitude split into its two terms:
// the specular (illuminated-face) part and the Fraunhofer edge part.
struct AmplitudeDecomposition {
    std::complex<double> f_total;
    std::complex<double> f_illuminated;
    std::complex<double> f_fraunhofer;
    double theta = 0.0;  // scattering angle fed to the cylinder formula, rad
};

struct DiffractionSpectrum {
    std::string model;     // provenance: which level produced the intensities
    double E_i = 0.0;      // meV
    double theta_i = 0.0;  // rad
    std::vector<double> theta_d;   // rad
    std::vector<double> delta_k;   // 1/A
    std::vector<double> I_total;   // peak-normalized
    std::vector<double> I_illuminated;
    std::vector<double> I_fraunhofer;
};

// dK = k_i (sin theta_d - sin theta_i)
double parallel_momentum_transfer(double E_i, double theta_i, double theta_d,
                                  const PhysicalConstants& c);

// Two-term asymptotic (ka >> 1) amplitude of a hard cylinder of radius a at
// wavenumber k, for theta in (0, pi]. The removable theta -> 0 limit of the
// Fraunhofer term is 2ka / sqrt(2 pi k) (up to phase); at theta = pi it is 0.
AmplitudeDecomposition cylinder_amplitude(double theta, double k, double a);

// Reflection-symmetrized amplitude: f_cyl(|theta_d - theta_i|) minus the
// surface-image contribution f_cyl(pi - |theta_d + theta_i|).
std::complex<double> symmetrized_amplitude(double theta_i, double theta_d, double k, double a);

// Sweeps theta_d across (-pi/2, pi/2) and returns peak-normalized
// |symmetrized amplitude|^2 together with the per-term intensities.
DiffractionSpectrum hardwall_intensity_scan(double E_i, double theta_i, int n_angles,
                                            const HardWallParams& geom,
                                            const PhysicalConstants& c);

}  // namespace heco
