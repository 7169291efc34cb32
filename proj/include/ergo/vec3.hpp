#pragma once

#include <cmath>

#include "ergo/error.hpp"

namespace ergo {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3& o) const = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }

    // Throws when the vector is too short to carry a direction.
    Vec3 normalized(const char* module = "geometry") const {
        double n = norm();
        if (n < 1e-12)
            throw PreconditionError(module, "cannot normalize near-zero vector");
        return *this / n;
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline Vec3 midpoint(const Vec3& a, const Vec3& b) { return (a + b) * 0.5; }

constexpr double kDegPerRad = 57.29577951308232;

// Unsigned angle between two vectors, degrees in [0, 180].
inline double angle_between_deg(const Vec3& a, const Vec3& b,
                                const char* module = "geometry") {
    double na = a.norm(), nb = b.norm();
    if (na < 1e-12 || nb < 1e-12)
        throw PreconditionError(module, "angle between degenerate vectors");
    double c = a.dot(b) / (na * nb);
    c = std::fmin(1.0, std::fmax(-1.0, c));
    return std::acos(c) * kDegPerRad;
}

}  // namespace ergo
