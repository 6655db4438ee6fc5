#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace crmsfem {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned rectangular computational domain.
struct DomainSpec {
    double x_min, x_max, y_min, y_max;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

/// One square obstacle, given by its center and side length.
struct Square {
    double cx, cy, side;

    double x_lo() const { return cx - 0.5 * side; }
    double x_hi() const { return cx + 0.5 * side; }
    double y_lo() const { return cy - 0.5 * side; }
    double y_hi() const { return cy + 0.5 * side; }
};

/// The obstacle set: pairwise-disjoint closed squares of common side epsilon,
/// all strictly inside the domain.
struct ObstacleSet {
    std::vector<Square> squares;
    double epsilon = 0.0;

    bool empty() const { return squares.empty(); }
    /// True iff the point lies in the closed square of some obstacle.
    bool contains(double x, double y) const;

    /// FNV-1a over the raw coordinates; used as a provenance stamp.
    std::uint64_t hash() const;

    std::string to_json() const;
    static ObstacleSet from_json(const std::string& text);
};

enum class BoundaryKind { CavityLid, ChannelParabolic, CustomDirichlet };

enum class Side { Left = 0, Right = 1, Bottom = 2, Top = 3 };

/// Boundary-condition preset. CavityLid: Dirichlet on all four sides, lid
/// velocity (1,0) on top, no-slip elsewhere. ChannelParabolic: parabolic
/// inflow on the left, no-slip top/bottom, natural outflow on the right.
struct BoundaryPreset {
    BoundaryKind kind = BoundaryKind::CavityLid;
    std::function<Vec2(double, double)> custom_velocity;  // CustomDirichlet only
    std::array<bool, 4> dirichlet_side = {true, true, true, true};

    bool is_dirichlet(Side s) const { return dirichlet_side[static_cast<int>(s)]; }
    bool all_dirichlet() const;
    /// Prescribed velocity at a boundary point (only meaningful on Dirichlet sides).
    Vec2 velocity(double x, double y, const DomainSpec& domain) const;

    static BoundaryPreset cavity_lid();
    static BoundaryPreset channel_parabolic();
};

/// Penalized coefficient fields: nu^k = 1/h and sigma^k = 1/h^3 inside the
/// obstacles, (nu_fluid, 0) in the fluid.
struct PenalizedCoefficients {
    double nu_fluid = 1.0;
    double h = 0.0;

    double nu_obstacle() const { return 1.0 / h; }
    double sigma_obstacle() const { return 1.0 / (h * h * h); }
};

struct CoefficientSample {
    double nu;
    double sigma;
    Vec2 f;
};

using BodyForce = std::function<Vec2(double, double)>;

/// Pointwise evaluation of (nu^k, sigma^k, f^k).
CoefficientSample coefficients_at(const PenalizedCoefficients& coeffs,
                                  const ObstacleSet& obstacles, double x, double y,
                                  const BodyForce& body_force = nullptr);

/// Rejection-sampled placement of `count` disjoint squares of side `epsilon`,
/// centers uniform over the domain shrunk by margin + epsilon/2. Deterministic
/// in the seed. Throws PackingFailure after 10000*count failed attempts.
ObstacleSet generate_obstacles(int count, double epsilon, const DomainSpec& domain,
                               double margin, std::uint64_t seed);

}  // namespace crmsfem
