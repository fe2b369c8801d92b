#include "heco/fermatian.hpp"

#include <algorithm>
#include <cmath>

#include "heco/numeric.hpp"

namespace heco {

std::string to_string(BouncePattern p) {
    switch (p) {
        case BouncePattern::FlatOnly: return "F";
        case BouncePattern::AdsorbateOnly: return "A";
        case BouncePattern::FlatThenAdsorbate: return "FA";
        case BouncePattern::AdsorbateThenFlat: return "AF";
    }
    return "?";
}

double impact_angle(const Vec2& p) { return std::atan2(p.x, p.z); }

std::pair<Vec2, Vec2> initial_conditions(double b, double theta_i, double E_i, double z0,
                                         const PhysicalConstants& c) {
    if (!(std::fabs(theta_i) < M_PI / 2.0))
        throw std::domain_error("initial_conditions: |theta_i| must be < pi/2");
    if (E_i <= 0.0) throw std::domain_error("initial_conditions: E_i must be positive");
    double s = std::sin(theta_i), co = std::cos(theta_i);
    Vec2 pos{b - z0 * s / co, z0};
    double p = c.momentum(E_i);
    Vec2 mom{p * s, -p * co};
    return {pos, mom};
}

namespace {

constexpr double kTinyT = 1e-9;    // minimum advance along a ray leg
constexpr double kGeomEps = 1e-12;

struct Hit {
    double t;
    Vec2 point;
    Vec2 normal;
    Surface surface;
};

// Nearest intersection of o + t d (t > kTinyT) with the clipped circle
// (|p| = a, z >= z_r) or the flat wall (z = z_r, |x| >= x_c).
std::optional<Hit> next_hit(const Vec2& o, const Vec2& d, const HardWallParams& g) {
    double x_c = std::sqrt(g.a * g.a - g.z_r * g.z_r);
    std::optional<Hit> best;

    // circle
    double bq = o.x * d.x + o.z * d.z;
    double cq = o.x * o.x + o.z * o.z - g.a * g.a;
    double disc = bq * bq - cq;
    if (disc > kGeomEps) {
        double sq = std::sqrt(disc);
        for (double t : {-bq - sq, -bq + sq}) {
            if (t <= kTinyT) continue;
            Vec2 p{o.x + t * d.x, o.z + t * d.z};
            if (p.z < g.z_r - kGeomEps) continue;
            Vec2 n{p.x / g.a, p.z / g.a};
            // only hits approached from outside count; this rejects the exit
            // root of a through-passing line and exact tangent grazes
            if (d.x * n.x + d.z * n.z >= -1e-10) continue;
            if (!best || t < best->t) best = Hit{t, p, n, Surface::Adsorbate};
            break;  // roots are ordered; the first admissible one is nearest
        }
    }

    // flat wall
    if (d.z < -kGeomEps) {
        double t = (g.z_r - o.z) / d.z;
        if (t > kTinyT) {
            Vec2 p{o.x + t * d.x, g.z_r};
            if (std::fabs(p.x) >= x_c - kGeomEps && (!best || t < best->t))
                best = Hit{t, p, Vec2{0.0, 1.0}, Surface::Flat};
        }
    }
    return best;
}

BouncePattern classify_pattern(const std::vector<std::pair<Vec2, Surface>>& bounces) {
    if (bounces.size() == 1)
        return bounces[0].second == Surface::Flat ? BouncePattern::FlatOnly
                                                  : BouncePattern::AdsorbateOnly;
    return bounces[0].second == Surface::Flat ? BouncePattern::FlatThenAdsorbate
                                              : BouncePattern::AdsorbateThenFlat;
}

}  // namespace

Ray trace_ray(double b, double theta_i, const HardWallParams& geom, double z0) {
    if (!(std::fabs(theta_i) < M_PI / 2.0))
        throw std::domain_error("trace_ray: |theta_i| must be < pi/2");
    if (geom.a <= 0.0 || geom.z_r < 0.0 || geom.z_r >= geom.a)
        throw std::invalid_argument("trace_ray: need 0 <= z_r < a");
    if (z0 <= geom.a) throw std::invalid_argument("trace_ray: z0 must start above the wall");

    Ray ray;
    ray.b = b;
    ray.theta_i = theta_i;

    double s = std::sin(theta_i), co = std::cos(theta_i);
    Vec2 o{b - z0 * s / co, z0};
    Vec2 d{s, -co};

    for (int leg = 0;; ++leg) {
        auto hit = next_hit(o, d, geom);
        if (!hit) break;
        if (leg >= 2) {
            // rays at the grazing separatrix leave parallel to the surface and
            // would graze the flat wall arbitrarily far away; idealize as escape
            if (std::fabs(d.z) < 1e-9) break;
            throw GeometryError("trace_ray: more than two bounces on the hard wall");
        }
        ray.segments.push_back({o, hit->point});
        ray.bounce_points.push_back({hit->point, hit->surface});
        double dn = d.x * hit->normal.x + d.z * hit->normal.z;
        d = Vec2{d.x - 2.0 * dn * hit->normal.x, d.z - 2.0 * dn * hit->normal.z};
        o = hit->point;
    }
    if (ray.bounce_points.empty())
        throw GeometryError("trace_ray: ray never reached the wall");

    // extend the outgoing leg back to the launch height (or a fixed length
    // when the ray leaves parallel to the surface)
    double t_out = d.z > kGeomEps ? (z0 - o.z) / d.z : 2.0 * z0;
    ray.segments.push_back({o, Vec2{o.x + t_out * d.x, o.z + t_out * d.z}});

    ray.theta_d = std::atan2(d.x, d.z);
    ray.pattern = classify_pattern(ray.bounce_points);

    constexpr double tol = 1e-9;
    if (std::fabs(ray.theta_d) < tol) ray.direction = Direction::Normal;
    else if (std::fabs(std::fabs(ray.theta_d) - M_PI / 2.0) < tol) ray.direction = Direction::Grazing;
    else ray.direction = ray.theta_d > 0.0 ? Direction::Forward : Direction::Backward;
    return ray;
}

double shadow_length(double theta_i, const HardWallParams& geom) {
    if (theta_i < 0.0 || theta_i > M_PI / 2.0)
        throw std::domain_error("shadow_length: theta_i must lie in [0, pi/2]");
    if (theta_i == M_PI / 2.0) return std::numeric_limits<double>::infinity();
    // below the critical incidence the tangent point of the grazing ray lies on
    // the clipped-away part of the circle (z < z_r): nothing is shadowed
    if (std::sin(theta_i) <= geom.z_r / geom.a) return 0.0;
    double x_c = std::sqrt(geom.a * geom.a - geom.z_r * geom.z_r);
    // landing point of the grazing tangent ray minus the circle/flat junction
    return geom.a / std::cos(theta_i) - geom.z_r * std::tan(theta_i) - x_c;
}

namespace {

// b-scan sample: deflection and bounce pattern
struct Sample {
    double b;
    double theta_d;
    BouncePattern pattern;
};

std::vector<Sample> scan_impact_parameters(double theta_i, const HardWallParams& geom, int n) {
    double b_tan = geom.a / std::cos(theta_i);
    double lo = -(b_tan + 2.0), hi = b_tan + 2.0;
    std::vector<Sample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        double b = lo + (hi - lo) * i / (n - 1);
        Ray r = trace_ray(b, theta_i, geom);
        out.push_back({b, r.theta_d, r.pattern});
    }
    return out;
}

// Bisect a pattern boundary between bl (pattern pl) and br.
double refine_boundary(double bl, double br, BouncePattern pl, double theta_i,
                       const HardWallParams& geom) {
    for (int i = 0; i < 60 && br - bl > 1e-12; ++i) {
        double m = 0.5 * (bl + br);
        if (trace_ray(m, theta_i, geom).pattern == pl) bl = m;
        else br = m;
    }
    return 0.5 * (bl + br);
}

double refine_deflection_root(double bl, double br, double target, double theta_i,
                              const HardWallParams& geom) {
    return numeric::bisect(
        [&](double b) { return trace_ray(b, theta_i, geom).theta_d - target; }, bl, br, 1e-11);
}

}  // namespace

SeparatrixSet find_separatrices(double theta_i, const HardWallParams& geom) {
    if (theta_i < 0.0 || theta_i >= M_PI / 2.0)
        throw std::domain_error("find_separatrices: theta_i must lie in [0, pi/2)");

    SeparatrixSet out;
    out.theta_i = theta_i;

    auto samples = scan_impact_parameters(theta_i, geom, 8192);

    for (size_t i = 0; i + 1 < samples.size(); ++i) {
        const Sample &l = samples[i], &r = samples[i + 1];
        if (l.pattern == r.pattern) continue;
        double b = refine_boundary(l.b, r.b, l.pattern, theta_i, geom);
        using P = BouncePattern;
        if (l.pattern == P::FlatOnly && r.pattern == P::FlatThenAdsorbate) out.F1 = b;
        else if (l.pattern == P::FlatThenAdsorbate && r.pattern == P::AdsorbateThenFlat)
            out.F2 = out.F2p = b;
        else if (r.pattern == P::AdsorbateOnly) out.F3 = b;
        else if (l.pattern == P::AdsorbateOnly) out.F6 = b;
        else if (l.pattern == P::AdsorbateThenFlat && r.pattern == P::FlatOnly) out.F7 = b;
        // the mirror F -> AF boundary at normal incidence carries no name
    }

    // deflection-angle roots within a fixed branch
    auto root_on = [&](BouncePattern pat, double target) {
        for (size_t i = 0; i + 1 < samples.size(); ++i) {
            const Sample &l = samples[i], &r = samples[i + 1];
            if (l.pattern != pat || r.pattern != pat) continue;
            double gl = l.theta_d - target, gr = r.theta_d - target;
            if (gl == 0.0) return std::optional<double>(l.b);
            if ((gl > 0) != (gr > 0))
                return std::optional<double>(refine_deflection_root(l.b, r.b, target, theta_i, geom));
        }
        return std::optional<double>();
    };

    if (auto b = root_on(BouncePattern::FlatThenAdsorbate, 0.0)) out.Falpha = *b;
    if (auto b = root_on(BouncePattern::AdsorbateOnly, -theta_i)) out.F4 = *b;
    if (auto b = root_on(BouncePattern::AdsorbateOnly, 0.0)) out.Fbeta = *b;
    if (auto b = root_on(BouncePattern::AdsorbateOnly, theta_i)) out.F5 = *b;
    return out;
}

std::vector<HomologousPair> homologous_pairs(double theta_d, double theta_i,
                                             const HardWallParams& geom) {
    if (theta_i < 0.0 || theta_i >= M_PI / 2.0)
        throw std::domain_error("homologous_pairs: theta_i must lie in [0, pi/2)");
    if (std::fabs(theta_d) > M_PI / 2.0)
        throw std::domain_error("homologous_pairs: |theta_d| must be <= pi/2");

    auto samples = scan_impact_parameters(theta_i, geom, 8192);

    struct Root {
        double b;
        BouncePattern pattern;
    };
    std::vector<Root> roots;
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
        const Sample &l = samples[i], &r = samples[i + 1];
        // flat-only rays all share theta_d = theta_i and form no pair
        if (l.pattern != r.pattern || l.pattern == BouncePattern::FlatOnly) continue;
        double gl = l.theta_d - theta_d, gr = r.theta_d - theta_d;
        if (gl == 0.0) roots.push_back({l.b, l.pattern});
        else if ((gl > 0) != (gr > 0))
            roots.push_back({refine_deflection_root(l.b, r.b, theta_d, theta_i, geom), l.pattern});
    }

    // inner pairs live between the specular lobes (|theta_d| < theta_i and the
    // flat-then-adsorbate branch); outer pairs outside them
    auto branch_of = [&](const Root& root) {
        bool forward = theta_d > 0.0 || (theta_d == 0.0);
        bool inner = root.pattern == BouncePattern::FlatThenAdsorbate ||
                     (root.pattern == BouncePattern::AdsorbateOnly &&
                      std::fabs(theta_d) < theta_i);
        if (forward) return inner ? PairBranch::ForwardInner : PairBranch::ForwardOuter;
        return inner ? PairBranch::BackwardInner : PairBranch::BackwardOuter;
    };

    std::vector<HomologousPair> pairs;
    auto slot = [&](PairBranch br) -> HomologousPair& {
        for (auto& p : pairs)
            if (p.branch == br) return p;
        pairs.push_back({br, std::nullopt, std::nullopt});
        return pairs.back();
    };
    for (const auto& root : roots) {
        HomologousPair& p = slot(branch_of(root));
        if (root.pattern == BouncePattern::AdsorbateOnly) {
            if (!p.b_single) p.b_single = root.b;
        } else if (!p.b_double) {
            p.b_double = root.b;
        }
    }
    return pairs;
}

}  // namespace heco
