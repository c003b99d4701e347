#pragma once

#include <vector>

#include "fracheat/fields.hpp"

namespace fracheat {

enum class Shift { none, minus, plus };

struct MollifierSpec {
    double eps = 0.1;
    // minus: kernel centred at t = +eps (support stays in t >= 0); plus: centred at t = -eps
    Shift shift = Shift::none;
};

// C-infinity step: 0 for s <= 0, 1 for s >= 1
double smooth_step(double s);

// Unit-mass bump exp(-1/(1 - 2r^2)) in (x, t), r^2 = |x|^2 + t^2, supported in |x| + |t| <= 1.
double bump_kernel(const double *x, int dims, double t);

Field mollify(const Field &f, const MollifierSpec &spec);
Field cutoff(const Field &f, double radius_scale);

enum class ExtendMode { even_cutoff, zero_past, taylor };

struct ExtendSpec {
    ExtendMode mode = ExtendMode::even_cutoff;
    double past = 0.0;    // length prepended before start
    double future = 0.0;  // length appended after stop
    int q = 0;            // Taylor order
    bool strict = true;   // zero_past refuses nonzero traces
};

// Lengths are rounded to whole time steps.
Field extend_time(const Field &f, const ExtendSpec &spec);

// n-fold cumulative integral from the left edge, then a smooth cutoff over one
// time unit past the last time slice where f is nonzero.
Field antiderivative_lift(const Field &f, int n);

struct BlowupFit {
    double slope = 0;
    std::vector<double> eps, seminorms;
};

// slope of log <f_eps>_t^{(alpha)} against log eps
BlowupFit jump_blowup_scan(const Field &f, double alpha, const std::vector<double> &eps_ladder);

} // namespace fracheat
