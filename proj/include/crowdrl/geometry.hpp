#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>

#include "crowdrl/common.hpp"

namespace crowdrl {

struct Circle {
    Vec2 center;
    double radius = 1.0;
};

/// A segment swept by a disc of diameter `thickness` (a capsule). Thickness 0 is a bare segment.
struct Segment {
    Vec2 a;
    Vec2 b;
    double thickness = 0.0;
};

using Shape = std::variant<Circle, Segment>;

inline Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = squared_norm(ab);
    if (len2 == 0.0) return a;
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return a + ab * t;
}

/// Signed distance from `p` to the surface of a shape (negative inside).
inline double signed_distance(Vec2 p, const Shape& shape) {
    return std::visit(
        [p](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return norm(p - s.center) - s.radius;
            } else {
                return norm(p - closest_point_on_segment(p, s.a, s.b)) - 0.5 * s.thickness;
            }
        },
        shape);
}

/// Outward unit normal of the shape surface nearest to `p`. Falls back to +x when `p` sits on the core.
inline Vec2 outward_normal(Vec2 p, const Shape& shape) {
    const Vec2 core = std::visit(
        [p](const auto& s) -> Vec2 {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return s.center;
            } else {
                return closest_point_on_segment(p, s.a, s.b);
            }
        },
        shape);
    const Vec2 d = p - core;
    const double n = norm(d);
    if (n > 0.0) return d / n;
    if (const auto* seg = std::get_if<Segment>(&shape)) {
        const Vec2 ab = seg->b - seg->a;
        const double l = norm(ab);
        if (l > 0.0) return Vec2{-ab.y, ab.x} / l;
    }
    return {1.0, 0.0};
}

inline Shape translated(const Shape& shape, Vec2 offset) {
    return std::visit(
        [offset](auto s) -> Shape {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                s.center += offset;
            } else {
                s.a += offset;
                s.b += offset;
            }
            return s;
        },
        shape);
}

namespace detail {

// Smallest t >= 0 with |origin + t dir - center| = radius, for unit dir.
inline std::optional<double> ray_circle(Vec2 origin, Vec2 dir, Vec2 center, double radius) {
    const Vec2 oc = origin - center;
    const double b = dot(oc, dir);
    const double c = squared_norm(oc) - radius * radius;
    if (c <= 0.0) return 0.0;
    const double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    const double t = -b - std::sqrt(disc);
    if (t < 0.0) return std::nullopt;
    return t;
}

inline std::optional<double> ray_segment(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double denom = cross(dir, ab);
    if (denom == 0.0) return std::nullopt;
    const Vec2 ao = a - origin;
    const double t = cross(ao, ab) / denom;
    const double u = cross(ao, dir) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

}  // namespace detail

/// Distance along a unit ray to the first hit on the shape surface, if any.
inline std::optional<double> ray_cast(Vec2 origin, Vec2 dir, const Shape& shape) {
    if (const auto* c = std::get_if<Circle>(&shape)) return detail::ray_circle(origin, dir, c->center, c->radius);

    const auto& s = std::get<Segment>(shape);
    const double h = 0.5 * s.thickness;
    if (signed_distance(origin, shape) <= 0.0) return 0.0;

    std::optional<double> best;
    auto consider = [&best](std::optional<double> t) {
        if (t && (!best || *t < *best)) best = t;
    };
    if (h == 0.0) {
        consider(detail::ray_segment(origin, dir, s.a, s.b));
        return best;
    }
    consider(detail::ray_circle(origin, dir, s.a, h));
    consider(detail::ray_circle(origin, dir, s.b, h));
    const Vec2 ab = s.b - s.a;
    const double l = norm(ab);
    if (l > 0.0) {
        const Vec2 n = Vec2{-ab.y, ab.x} * (h / l);
        consider(detail::ray_segment(origin, dir, s.a + n, s.b + n));
        consider(detail::ray_segment(origin, dir, s.a - n, s.b - n));
    }
    return best;
}

}  // namespace crowdrl
