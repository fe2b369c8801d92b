#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "heco/fermatian.hpp"
#include "heco/tdse.hpp"

namespace heco {

// Samples psi and its spectral derivatives anywhere on the (periodic) grid.
// order 1 = bilinear (fast, large ensembles), 3 = bicubic (default).
class VelocityInterpolator {
  public:
    VelocityInterpolator(const WaveField& psi, const PhysicalConstants& c, int order = 3);

    std::complex<double> psi(double x, double z) const;
    std::complex<double> dpsi_dx(double x, double z) const;
    std::complex<double> dpsi_dz(double x, double z) const;
    // guidance velocity v = (hbar/m) Im(grad psi / psi), A/ps
    Vec2 velocity(double x, double z) const;
    double max_abs() const { return max_abs_; }
    const WaveField& field() const { return f_; }

  private:
    std::complex<double> sample(const std::vector<std::complex<double>>& a, double x,
                                double z) const;
    WaveField f_;
    std::vector<std::complex<double>> gx_, gz_;  // spectral d/dx, d/dz
    double hbar_over_m_;
    double max_abs_ = 0.0;
    int order_;
};

struct BohmianConfig {
    double node_threshold = 1e-8;  // fraction of max |psi|
    int interpolation_order = 3;
    int max_substep_doublings = 10;
    double well_region_z = 3.0;  // A; below this at end time counts as trapped
    double x_cut = 10.6;         // A
};

struct BohmianTrajectory {
    double seed_x = 0.0, seed_z = 0.0;
    std::string line_label;
    std::vector<std::array<double, 3>> path;  // (t, x, z)
    bool exited = false;
    bool trapped = false;
    bool vortex_capture = false;  // step-size underflow near a node
    double min_abs_psi = 0.0;     // relative to the field maximum
    int loops_completed = 0;
};

struct VortexNode {
    double x = 0.0, z = 0.0, t = 0.0;
    int winding = 0;
    double circulation = 0.0;  // A^2/ps
    bool indeterminate = false;
};

struct VortexReport {
    std::vector<VortexNode> nodes;
};

// Seven seed lines at z0 + {-3.18, -2.12, -1.06, 0, 1.06, 2.12, 3.18} A with
// per_line seeds uniform in x over [-half_width, half_width].
std::vector<Vec2> seed_lines(double z0, int per_line, double half_width,
                             std::vector<std::string>* labels = nullptr);

// Deterministic rejection sampling of |psi|^2 (Born rule).
std::vector<Vec2> sample_born(const WaveField& psi, int n, std::uint64_t seed);

// Propagates the wave with its own Propagator and advances all trajectories in
// lock-step (RK4 across each wave step, psi linearly interpolated in time,
// displacement-limited substepping near nodes).
std::vector<BohmianTrajectory> integrate_bohmian(const WaveField& initial,
                                                 const InteractionModel& model, double dt,
                                                 int n_steps, const std::vector<Vec2>& seeds,
                                                 const PhysicalConstants& c,
                                                 const BohmianConfig& cfg = {},
                                                 double v_cap = 300.0);

// Nodes of psi inside [x_lo, x_hi] x [z_lo, z_hi] with integer phase winding;
// circulation measured independently as the loop integral of the guidance
// velocity around each node. node_threshold is a relative amplitude ceiling
// for the plaquette corners (an aliasing guard, not the node criterion: a
// grid-resolved zero still has corner amplitudes ~ spacing * |grad psi|);
// the winding and the interpolated-circle confirmation do the real filtering.
VortexReport detect_vortices(const WaveField& psi, double x_lo, double x_hi, double z_lo,
                             double z_hi, const PhysicalConstants& c,
                             double node_threshold = 0.3);

// L1 distance between the endpoint histogram and |psi_final|^2 on bins x bins.
double ensemble_density_check(const std::vector<BohmianTrajectory>& trajectories,
                              const WaveField& psi_final, int bins = 64);

}  // namespace heco
