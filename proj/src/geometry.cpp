#include "crmsfem/geometry.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include <nlohmann/json.hpp>

#include "crmsfem/errors.hpp"

namespace crmsfem {

bool ObstacleSet::contains(double x, double y) const {
    for (const auto& s : squares) {
        if (x >= s.x_lo() && x <= s.x_hi() && y >= s.y_lo() && y <= s.y_hi()) return true;
    }
    return false;
}

std::uint64_t ObstacleSet::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(epsilon);
    for (const auto& s : squares) {
        mix(s.cx);
        mix(s.cy);
        mix(s.side);
    }
    return h;
}

std::string ObstacleSet::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : squares) arr.push_back({{"cx", s.cx}, {"cy", s.cy}, {"side", s.side}});
    return arr.dump(2);
}

ObstacleSet ObstacleSet::from_json(const std::string& text) {
    ObstacleSet set;
    auto arr = nlohmann::json::parse(text);
    for (const auto& item : arr) {
        set.squares.push_back({item.at("cx").get<double>(), item.at("cy").get<double>(),
                               item.at("side").get<double>()});
    }
    if (!set.squares.empty()) set.epsilon = set.squares.front().side;
    return set;
}

bool BoundaryPreset::all_dirichlet() const {
    return dirichlet_side[0] && dirichlet_side[1] && dirichlet_side[2] && dirichlet_side[3];
}

Vec2 BoundaryPreset::velocity(double x, double y, const DomainSpec& domain) const {
    switch (kind) {
        case BoundaryKind::CavityLid:
            // Lid wins at the top corners.
            if (y >= domain.y_max) return {1.0, 0.0};
            return {0.0, 0.0};
        case BoundaryKind::ChannelParabolic:
            if (x <= domain.x_min) return {1.0 - y * y, 0.0};
            return {0.0, 0.0};
        case BoundaryKind::CustomDirichlet:
            return custom_velocity(x, y);
    }
    return {0.0, 0.0};
}

BoundaryPreset BoundaryPreset::cavity_lid() {
    BoundaryPreset p;
    p.kind = BoundaryKind::CavityLid;
    p.dirichlet_side = {true, true, true, true};
    return p;
}

BoundaryPreset BoundaryPreset::channel_parabolic() {
    BoundaryPreset p;
    p.kind = BoundaryKind::ChannelParabolic;
    p.dirichlet_side = {true, false, true, true};  // right side is natural outflow
    return p;
}

CoefficientSample coefficients_at(const PenalizedCoefficients& coeffs,
                                  const ObstacleSet& obstacles, double x, double y,
                                  const BodyForce& body_force) {
    if (obstacles.contains(x, y)) {
        return {coeffs.nu_obstacle(), coeffs.sigma_obstacle(), {0.0, 0.0}};
    }
    Vec2 f{0.0, 0.0};
    if (body_force) f = body_force(x, y);
    return {coeffs.nu_fluid, 0.0, f};
}

ObstacleSet generate_obstacles(int count, double epsilon, const DomainSpec& domain,
                               double margin, std::uint64_t seed) {
    if (count < 0) throw ValidationError("generate_obstacles: count must be >= 0");
    if (epsilon <= 0.0) throw ValidationError("generate_obstacles: epsilon must be > 0");
    if (margin < 0.0) throw ValidationError("generate_obstacles: margin must be >= 0");

    ObstacleSet set;
    set.epsilon = epsilon;
    if (count == 0) return set;

    const double inset = margin + 0.5 * epsilon;
    const double x_lo = domain.x_min + inset;
    const double x_hi = domain.x_max - inset;
    const double y_lo = domain.y_min + inset;
    const double y_hi = domain.y_max - inset;
    if (x_lo >= x_hi || y_lo >= y_hi)
        throw PackingFailure("generate_obstacles: domain too small for margin and epsilon");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x_lo, x_hi);
    std::uniform_real_distribution<double> uy(y_lo, y_hi);

    const long budget = 10000L * count;
    long attempts = 0;
    while (static_cast<int>(set.squares.size()) < count) {
        if (attempts++ >= budget)
            throw PackingFailure("generate_obstacles: attempt budget exhausted");
        const double cx = ux(rng);
        const double cy = uy(rng);
        bool clash = false;
        for (const auto& s : set.squares) {
            // Closed squares must be disjoint: strict separation in some axis.
            if (std::abs(cx - s.cx) <= epsilon && std::abs(cy - s.cy) <= epsilon) {
                clash = true;
                break;
            }
        }
        if (!clash) set.squares.push_back({cx, cy, epsilon});
    }
    return set;
}

}  // namespace crmsfem
