#include "heco/hardwall_diffraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heco {

double parallel_momentum_transfer(double E_i, double theta_i, double theta_d,
                                  const PhysicalConstants& c) {
    if (E_i <= 0.0) throw std::domain_error("parallel_momentum_transfer: E_i must be positive");
    return c.wavenumber(E_i) * (std::sin(theta_d) - std::sin(theta_i));
}

AmplitudeDecomposition cylinder_amplitude(double theta, double k, double a) {
    if (!(theta > -1e-15 && theta <= M_PI + 1e-15))
        throw std::domain_error("cylinder_amplitude: theta must lie in (0, pi]");
    if (k <= 0.0 || a <= 0.0)
        throw std::invalid_argument("cylinder_amplitude: k and a must be positive");

    AmplitudeDecomposition out;
    out.theta = theta;

    double sh = std::sin(0.5 * theta);
    out.f_illuminated =
        -std::sqrt(0.5 * a * sh) * std::exp(std::complex<double>(0.0, -2.0 * k * a * sh));

    // (1 + cos t)/sin t * sin(ka sin t), with removable limits at 0 and pi
    double g;
    if (std::fabs(theta) < 1e-6) {
        g = 2.0 * k * a;  // limit as theta -> 0, error O(theta^2)
    } else if (std::fabs(M_PI - theta) < 1e-6) {
        double u = M_PI - theta;  // both factors vanish linearly in u
        g = 0.5 * u * k * a * u;
    } else {
        g = (1.0 + std::cos(theta)) / std::sin(theta) * std::sin(k * a * std::sin(theta));
    }
    out.f_fraunhofer = std::exp(std::complex<double>(0.0, -M_PI / 4.0)) /
                       std::sqrt(2.0 * M_PI * k) * g;

    out.f_total = out.f_illuminated + out.f_fraunhofer;
    return out;
}

std::complex<double> symmetrized_amplitude(double theta_i, double theta_d, double k, double a) {
    auto direct = cylinder_amplitude(std::fabs(theta_d - theta_i), k, a);
    auto image = cylinder_amplitude(M_PI - std::fabs(theta_d + theta_i), k, a);
    return direct.f_total - image.f_total;
}

DiffractionSpectrum hardwall_intensity_scan(double E_i, double theta_i, int n_angles,
                                            const HardWallParams& geom,
                                            const PhysicalConstants& c) {
    if (n_angles < 2) throw std::invalid_argument("hardwall_intensity_scan: n_angles >= 2");
    DiffractionSpectrum sp;
    sp.model = "hard-wall";
    sp.E_i = E_i;
    sp.theta_i = theta_i;

    double k = c.wavenumber(E_i);
    const double lim = M_PI / 2.0 * (1.0 - 1e-9);  // open interval, avoid exact grazing
    for (int i = 0; i < n_angles; ++i) {
        double td = -lim + 2.0 * lim * i / (n_angles - 1);
        auto direct = cylinder_amplitude(std::fabs(td - theta_i), k, geom.a);
        auto image = cylinder_amplitude(M_PI - std::fabs(td + theta_i), k, geom.a);
        sp.theta_d.push_back(td);
        sp.delta_k.push_back(parallel_momentum_transfer(E_i, theta_i, td, c));
        sp.I_total.push_back(std::norm(direct.f_total - image.f_total));
        sp.I_illuminated.push_back(std::norm(direct.f_illuminated - image.f_illuminated));
        sp.I_fraunhofer.push_back(std::norm(direct.f_fraunhofer - image.f_fraunhofer));
    }

    double peak = *std::max_element(sp.I_total.begin(), sp.I_total.end());
    if (peak > 0.0) {
        for (auto* v : {&sp.I_total, &sp.I_illuminated, &sp.I_fraunhofer})
            for (double& x : *v) x /= peak;
    }
    return sp;
}

}  // namespace heco
