#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "heco/potential.hpp"
#include "heco/units.hpp"

namespace heco {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0, z = 0.0;
};

enum class Surface { Adsorbate, Flat };

enum class BouncePattern { FlatOnly, AdsorbateOnly, FlatThenAdsorbate, AdsorbateThenFlat };

enum class Direction { Forward, Backward, Normal, Grazing };

std::string to_string(BouncePattern p);

// One geometric trajectory on the hard wall.
//
// theta_d is the signed angle of the outgoing direction from the surface
// normal: positive on the side of the incident parallel momentum (forward),
// negative backward, +-pi/2 parallel to the surface.
struct Ray {
    double b = 0.0;
    double theta_i = 0.0;
    std::vector<std::pair<Vec2, Vec2>> segments;            // (start, end)
    std::vector<std::pair<Vec2, Surface>> bounce_points;
    double theta_d = 0.0;
    BouncePattern pattern = BouncePattern::FlatOnly;
    Direction direction = Direction::Normal;
};

// Named separatrix impact parameters for a fixed incidence angle.
// Members are NaN when the corresponding separatrix does not exist at that
// incidence (e.g. the flat-then-adsorbate branch is absent at theta_i = 0).
struct SeparatrixSet {
    static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    double theta_i = 0.0;
    double F1 = kNaN, Falpha = kNaN, F2 = kNaN, F2p = kNaN;
    double F3 = kNaN, F4 = kNaN, Fbeta = kNaN;
    double F5 = kNaN, F6 = kNaN, F7 = kNaN;
};

enum class PairBranch { ForwardInner, ForwardOuter, BackwardInner, BackwardOuter };

struct HomologousPair {
    PairBranch branch;
    std::optional<double> b_single;
    std::optional<double> b_double;
};

// Launch state shared with the Newtonian integrator: the undeflected ray
// crosses z = 0 at x = b.
std::pair<Vec2, Vec2> initial_conditions(double b, double theta_i, double E_i, double z0,
                                         const PhysicalConstants& c);

Ray trace_ray(double b, double theta_i, const HardWallParams& geom, double z0 = 10.27);

// Length of the flat-surface interval unreachable by any trajectory, from the
// circle/flat junction to the landing point of the tangent ray. Returns +inf
// as theta_i -> pi/2.
double shadow_length(double theta_i, const HardWallParams& geom);

SeparatrixSet find_separatrices(double theta_i, const HardWallParams& geom);

// All single/double partners deflected at theta_d. Unreachable branches are
// omitted; a branch where only one partner exists keeps the other empty.
std::vector<HomologousPair> homologous_pairs(double theta_d, double theta_i,
                                             const HardWallParams& geom);

// Angle of an adsorbate impact point measured from the +z axis toward +x.
double impact_angle(const Vec2& p);

}  // namespace heco
