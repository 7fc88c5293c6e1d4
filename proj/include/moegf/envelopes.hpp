#pragma once

#include <vector>

namespace moegf {

// One halfspace over a small set of local variables:
//   sum_j coeff[j] * var[j] <= rhs
// The local variable layout is fixed per envelope family and documented on the
// construction functions below.
struct Halfspace {
    std::vector<double> coeff;
    double rhs = 0.0;
};

enum class EnvelopeFamily { Square, SignedSquare, AvgPressure, CostEpigraph };

struct Envelope {
    EnvelopeFamily family;
    std::vector<Halfspace> halfspaces;
    // Construction metadata (tangency points, breakpoints) for diagnostics.
    std::vector<double> points;
};

// Outer envelope of {(x, v) : v = x^2, x in [lo, hi]}.
// Local variables: [x, v]. `points` lower tangents at uniformly spaced points
// (endpoints included) plus the secant upper halfspace.
Envelope envelope_square(double lo, double hi, int points);

// Outer envelope of {(x, u) : u = x|x|, x in [lo, hi]}, requires lo < 0 < hi.
// Local variables: [x, u]. Six halfspaces: three lower tangents (at
// alpha = lo(1-sqrt2), hi, and their tangent intersection gamma) and three
// upper tangents (at beta = hi(1-sqrt2), lo, and their intersection delta).
Envelope envelope_signed_square(double lo, double hi);

// Outer envelope of {(x, y, w) : w = -xy/(x+y), (x,y) in box}, positive box.
// Local variables: [x, y, w]. Four corner tangent planes below, two corner
// planes above.
Envelope envelope_avg_pressure(double xlo, double xhi, double ylo, double yhi);

// Epigraph of the scaled quadratic q = (sqrt(c2) * dt * p)^2 over [plo, phi]:
// tangent underestimators at the midpoints of `segments` uniform intervals.
// Local variables: [p, q]. Degenerate (c2 == 0) yields no halfspaces.
Envelope pwl_cost_epigraph(double c2, double dt, double plo, double phi,
                           int segments);

} // namespace moegf
