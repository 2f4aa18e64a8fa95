#ifndef SWARMSIM_GEOMETRY_HPP
#define SWARMSIM_GEOMETRY_HPP

#include <algorithm>
#include <cmath>

namespace swarmsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline double distance_sq(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Mission area: axis-aligned rectangle anchored at the origin, [0,width] x [0,height].
struct Rect {
    double width_m = 0.0;
    double height_m = 0.0;

    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.x <= width_m && p.y >= 0.0 && p.y <= height_m;
    }
    Vec2 clamp(Vec2 p) const {
        return {std::clamp(p.x, 0.0, width_m), std::clamp(p.y, 0.0, height_m)};
    }
    friend bool operator==(const Rect& a, const Rect& b) {
        return a.width_m == b.width_m && a.height_m == b.height_m;
    }
};

}  // namespace swarmsim

#endif  // SWARMSIM_GEOMETRY_HPP
