#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "heco/potential.hpp"
#include "heco/units.hpp"

namespace heco {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
    double dt = 1e-4;         // ps
    double t_max = 50.0;      // ps
    double escape_z = 10.27;  // A; asymptotic height
    double x_cut = 10.6;      // A; adsorbate influence half-width
    double core_energy = 1e6; // meV; above this a step is rejected and dt halved
    int max_halvings = 20;
    bool stop_trapped_early = false;  // classify trapped before t_max (scan speed-up)
    int record_every = 10;            // store one sample per this many steps
};

struct TrajectoryPoint {
    double t, x, z, px, pz, E;
};

struct TrajectoryRecord {
    double b = 0.0, theta_i = 0.0, E_i = 0.0;
    std::vector<TrajectoryPoint> points;
    bool escaped = false;
    bool trapped = false;
    double theta_d = std::numeric_limits<double>::quiet_NaN();  // valid when escaped
    double E_x_final = 0.0;  // meV, px^2/2m
    double E_z_final = 0.0;  // meV, pz^2/2m + flat-surface potential
    double t_final = 0.0;
};

struct DeflectionSample {
    double b = 0.0;
    double theta_d = std::numeric_limits<double>::quiet_NaN();  // NaN when trapped
    bool trapped = false;
    double E_z = 0.0, E_x = 0.0, t_final = 0.0;
};

struct DeflectionFunction {
    double theta_i = 0.0, E_i = 0.0;
    Variant variant = Variant::Full;
    std::vector<DeflectionSample> samples;
};

// Asymptotic E_z vs b shares the sample layout of the deflection function.
using EnergyDiagram = DeflectionFunction;

struct RainbowExtremum {
    double b_star = 0.0;
    double theta_R = 0.0;    // rad
    double delta_K_R = 0.0;  // 1/A
    bool is_max = false;
};

struct RainbowReport {
    std::vector<RainbowExtremum> extrema;
};

struct TrappingSummary {
    std::vector<std::pair<double, double>> intervals;  // (b_lo, b_hi)
    double fraction = 0.0;  // trapped share of the scanned b range
};

// Hamilton's equations with fixed-step RK4; dt is halved (up to max_halvings)
// for steps that would land in the repulsive core above core_energy.
TrajectoryRecord integrate_trajectory(double b, double theta_i, double E_i,
                                      const InteractionModel& model,
                                      const IntegratorConfig& cfg,
                                      const PhysicalConstants& c);

DeflectionFunction deflection_scan(double theta_i, double E_i, const InteractionModel& model,
                                   double b_lo, double b_hi, int n_samples,
                                   const IntegratorConfig& cfg, const PhysicalConstants& c,
                                   int n_threads = 0);

EnergyDiagram energy_diagram(double theta_i, double E_i, const InteractionModel& model,
                             double b_lo, double b_hi, int n_samples,
                             const IntegratorConfig& cfg, const PhysicalConstants& c,
                             int n_threads = 0);

// Local extrema of theta_d(b) on smooth (untrapped, same-branch) runs of the
// scan, refined by a parabolic fit and one re-integration at the vertex.
RainbowReport find_rainbows(const DeflectionFunction& df, double E_i,
                            const InteractionModel& model, const IntegratorConfig& cfg,
                            const PhysicalConstants& c);

// All pairs (b_left, b_right) bracketing a dip of the asymptotic E_z(b) below
// the target; roots refined by bisection with fresh integrations.
std::vector<std::pair<double, double>> newton_homologous_pairs(
    double E_z_target, const EnergyDiagram& diagram, const InteractionModel& model,
    const IntegratorConfig& cfg, const PhysicalConstants& c);

TrappingSummary trapping_summary(const DeflectionFunction& df);

}  // namespace heco
