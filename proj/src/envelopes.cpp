#include "moegf/envelopes.hpp"

#include <cmath>
#include <stdexcept>

namespace moegf {

namespace {

double signed_square(double x) { return x * std::abs(x); }

// Tangent of u = x|x| at point z: u = 2|z| x - z|z|.
// As a <=-halfspace on [x, u]:
//   lower cut (u >= ...): -2|z| x + u >= -z|z|  ->  2|z| x - u <= z|z|
//   upper cut (u <= ...):  u - 2|z| x <= -z|z|
Halfspace signed_square_lower_tangent(double z) {
    return {{2.0 * std::abs(z), -1.0}, signed_square(z)};
}
Halfspace signed_square_upper_tangent(double z) {
    return {{-2.0 * std::abs(z), 1.0}, -signed_square(z)};
}

} // namespace

Envelope envelope_square(double lo, double hi, int points) {
    if (!(lo < hi)) throw std::invalid_argument("envelope_square: lo < hi required");
    if (points < 2) throw std::invalid_argument("envelope_square: at least 2 points required");

    Envelope env{EnvelopeFamily::Square, {}, {}};
    for (int h = 0; h < points; ++h) {
        const double xh = lo + (hi - lo) * h / (points - 1);
        env.points.push_back(xh);
        // v >= 2 xh x - xh^2  ->  2 xh x - v <= xh^2
        env.halfspaces.push_back({{2.0 * xh, -1.0}, xh * xh});
    }
    // Secant: v <= (hi + lo) x - hi lo  ->  -(hi+lo) x + v <= -hi lo
    env.halfspaces.push_back({{-(hi + lo), 1.0}, -hi * lo});
    return env;
}

Envelope envelope_signed_square(double lo, double hi) {
    if (!(lo < 0.0 && hi > 0.0))
        throw std::invalid_argument("envelope_signed_square: requires lo < 0 < hi");

    const double sqrt2 = std::sqrt(2.0);
    const double alpha = lo * (1.0 - sqrt2);  // > 0
    const double beta = hi * (1.0 - sqrt2);   // < 0
    // Tangents of x^2 at two positive points a, b intersect at x = (a+b)/2;
    // same for -x^2 at negative points.
    const double gamma = 0.5 * (alpha + hi);
    const double delta = 0.5 * (beta + lo);

    Envelope env{EnvelopeFamily::SignedSquare, {}, {alpha, beta, gamma, delta}};
    env.halfspaces.push_back(signed_square_lower_tangent(alpha));
    env.halfspaces.push_back(signed_square_lower_tangent(hi));
    env.halfspaces.push_back(signed_square_lower_tangent(gamma));
    env.halfspaces.push_back(signed_square_upper_tangent(beta));
    env.halfspaces.push_back(signed_square_upper_tangent(lo));
    env.halfspaces.push_back(signed_square_upper_tangent(delta));
    return env;
}

Envelope envelope_avg_pressure(double xlo, double xhi, double ylo, double yhi) {
    if (!(xlo > 0.0 && ylo > 0.0 && xlo < xhi && ylo < yhi))
        throw std::invalid_argument(
            "envelope_avg_pressure: requires 0 < xlo < xhi and 0 < ylo < yhi");

    auto f = [](double x, double y) { return -x * y / (x + y); };
    auto fx = [](double x, double y) {
        const double s = x + y;
        return -y * y / (s * s);
    };
    auto fy = [](double x, double y) {
        const double s = x + y;
        return -x * x / (s * s);
    };

    Envelope env{EnvelopeFamily::AvgPressure, {}, {xlo, xhi, ylo, yhi}};

    // Lower tangent planes at the four corners:
    //   w >= f + fx (x - x0) + fy (y - y0)
    //   -> fx x + fy y - w <= fx x0 + fy y0 - f
    auto lower = [&](double x0, double y0) {
        const double gx = fx(x0, y0), gy = fy(x0, y0);
        env.halfspaces.push_back(
            {{gx, gy, -1.0}, gx * x0 + gy * y0 - f(x0, y0)});
    };
    lower(xhi, yhi);
    lower(xlo, ylo);
    lower(xhi, ylo);
    lower(xlo, yhi);

    // Upper planes from corner-point cross products. Corner points:
    // p1=(xlo,ylo,f), p2=(xhi,ylo,f), p3=(xlo,yhi,f), p4=(xhi,yhi,f).
    struct P3 { double x, y, z; };
    const P3 p1{xlo, ylo, f(xlo, ylo)};
    const P3 p2{xhi, ylo, f(xhi, ylo)};
    const P3 p3{xlo, yhi, f(xlo, yhi)};
    const P3 p4{xhi, yhi, f(xhi, yhi)};
    auto sub = [](P3 a, P3 b) { return P3{a.x - b.x, a.y - b.y, a.z - b.z}; };
    auto cross = [](P3 a, P3 b) {
        return P3{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
                  a.x * b.y - a.y * b.x};
    };
    // w <= f0 - (nx/nz)(x - x0) - (ny/nz)(y - y0)
    auto upper = [&](P3 n, double x0, double y0, double f0) {
        const double cx = n.x / n.z, cy = n.y / n.z;
        env.halfspaces.push_back({{cx, cy, 1.0}, f0 + cx * x0 + cy * y0});
    };
    upper(cross(sub(p2, p1), sub(p3, p1)), p1.x, p1.y, p1.z);
    upper(cross(sub(p2, p4), sub(p3, p4)), p4.x, p4.y, p4.z);
    return env;
}

Envelope pwl_cost_epigraph(double c2, double dt, double plo, double phi,
                           int segments) {
    if (c2 < 0.0) throw std::invalid_argument("pwl_cost_epigraph: c2 >= 0 required");
    if (segments < 1) throw std::invalid_argument("pwl_cost_epigraph: segments >= 1 required");

    Envelope env{EnvelopeFamily::CostEpigraph, {}, {}};
    if (c2 == 0.0) return env;

    // Tangency at the midpoints of `segments` uniform intervals keeps the
    // worst-case gap at (s (phi-plo) / (2 segments))^2.
    const double s = std::sqrt(c2) * dt;
    for (int h = 0; h < segments; ++h) {
        const double ph = plo + (phi - plo) * (h + 0.5) / segments;
        env.points.push_back(ph);
        // q >= s^2 (2 ph p - ph^2)  ->  2 s^2 ph p - q <= s^2 ph^2
        env.halfspaces.push_back({{2.0 * s * s * ph, -1.0}, s * s * ph * ph});
    }
    return env;
}

} // namespace moegf
