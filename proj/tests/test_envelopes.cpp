#include <cmath>
#include <vector>

#include "doctest.h"
#include "moegf/envelopes.hpp"

using namespace moegf;

namespace {

double eval(const Halfspace& h, const std::vector<double>& p) {
    double s = 0.0;
    for (size_t j = 0; j < h.coeff.size(); ++j) s += h.coeff[j] * p[j];
    return s - h.rhs;  // <= 0 when satisfied
}

bool contains(const Envelope& env, const std::vector<double>& p, double tol) {
    for (const Halfspace& h : env.halfspaces)
        if (eval(h, p) > tol) return false;
    return true;
}

// Max of the lower tangents of v = x^2 in envelope form at a given x.
double square_lower_bound(const Envelope& env, double x) {
    double best = -1e300;
    for (const Halfspace& h : env.halfspaces) {
        if (h.coeff[1] != -1.0) continue;  // skip the secant
        best = std::max(best, h.coeff[0] * x - h.rhs);
    }
    return best;
}

} // namespace

TEST_CASE("square envelope contains and supports the graph") {
    const double lo = -0.5, hi = 0.4;
    for (int l : {2, 10}) {
        const Envelope env = envelope_square(lo, hi, l);
        CHECK(env.halfspaces.size() == (size_t)l + 1);
        for (int i = 0; i <= 1000; ++i) {
            const double x = lo + (hi - lo) * i / 1000.0;
            CHECK(contains(env, {x, x * x}, 1e-9));
        }
        // Every halfspace touches the graph somewhere.
        for (const Halfspace& h : env.halfspaces) {
            double closest = 1e300;
            for (int i = 0; i <= 20000; ++i) {
                const double x = lo + (hi - lo) * i / 20000.0;
                closest = std::min(closest, -eval(h, {x, x * x}));
            }
            CHECK(closest < 1e-6);
        }
    }
}

TEST_CASE("more tangent points tighten the square envelope") {
    const double lo = -0.5, hi = 0.4;
    const Envelope e2 = envelope_square(lo, hi, 2);
    const Envelope e10 = envelope_square(lo, hi, 10);
    for (int i = 0; i <= 200; ++i) {
        const double x = lo + (hi - lo) * i / 200.0;
        CHECK(square_lower_bound(e10, x) >=
              square_lower_bound(e2, x) - 1e-12);
    }
}

TEST_CASE("signed square envelope contains and supports the graph") {
    const double lo = -0.6, hi = 0.6;
    const Envelope env = envelope_signed_square(lo, hi);
    CHECK(env.halfspaces.size() == 6);
    auto u = [](double x) { return x * std::abs(x); };
    for (int i = 0; i <= 1000; ++i) {
        const double x = lo + (hi - lo) * i / 1000.0;
        CHECK(contains(env, {x, u(x)}, 1e-9));
    }
    for (const Halfspace& h : env.halfspaces) {
        double closest = 1e300;
        for (int i = 0; i <= 20000; ++i) {
            const double x = lo + (hi - lo) * i / 20000.0;
            closest = std::min(closest, -eval(h, {x, u(x)}));
        }
        CHECK(closest < 1e-6);
    }
}

TEST_CASE("average pressure envelope contains and supports the graph") {
    const double xlo = 2.0, xhi = 6.0, ylo = 2.5, yhi = 7.0;
    const Envelope env = envelope_avg_pressure(xlo, xhi, ylo, yhi);
    CHECK(env.halfspaces.size() == 6);
    auto w = [](double x, double y) { return -x * y / (x + y); };
    for (int i = 0; i <= 31; ++i)
        for (int j = 0; j <= 31; ++j) {
            const double x = xlo + (xhi - xlo) * i / 31.0;
            const double y = ylo + (yhi - ylo) * j / 31.0;
            CHECK(contains(env, {x, y, w(x, y)}, 1e-9));
        }
    for (const Halfspace& h : env.halfspaces) {
        double closest = 1e300;
        for (int i = 0; i <= 200; ++i)
            for (int j = 0; j <= 200; ++j) {
                const double x = xlo + (xhi - xlo) * i / 200.0;
                const double y = ylo + (yhi - ylo) * j / 200.0;
                closest = std::min(closest, -eval(h, {x, y, w(x, y)}));
            }
        CHECK(closest < 1e-6);
    }
}

TEST_CASE("cost epigraph under-approximation stays within its bound") {
    const double c2 = 2.0e3, dt = 1.0, plo = 0.0, phi = 1.2;
    const double s = std::sqrt(c2) * dt;
    for (int segments : {1, 4, 32}) {
        const Envelope env = pwl_cost_epigraph(c2, dt, plo, phi, segments);
        CHECK(env.halfspaces.size() == (size_t)segments);
        const double bound =
            std::pow(s * (phi - plo) / (2.0 * segments), 2);
        double worst = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double p = plo + (phi - plo) * i / 4000.0;
            const double truth = s * s * p * p;
            double approx = -1e300;
            for (const Halfspace& h : env.halfspaces)
                approx = std::max(approx, h.coeff[0] * p - h.rhs);
            CHECK(approx <= truth + 1e-9);  // valid underestimator
            worst = std::max(worst, truth - approx);
        }
        CHECK(worst <= bound + 1e-9);
    }
    // One segment: exact at the interval midpoint.
    const Envelope one = pwl_cost_epigraph(c2, dt, plo, phi, 1);
    const double mid = 0.5 * (plo + phi);
    CHECK(one.halfspaces[0].coeff[0] * mid - one.halfspaces[0].rhs ==
          doctest::Approx(s * s * mid * mid).epsilon(1e-12));
    // Degenerate linear cost.
    CHECK(pwl_cost_epigraph(0.0, dt, plo, phi, 8).halfspaces.empty());
}
