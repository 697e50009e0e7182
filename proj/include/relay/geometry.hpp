#pragma once

#include <cmath>
#include <random>

namespace relay {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point2 a, Point2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Area-uniform point in the disk: radius = R*sqrt(u), angle = 2*pi*v.
inline Point2 sample_in_disk(Point2 center, double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * M_PI * unit(rng);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace relay
