#pragma once

#include <limits>
#include <vector>

#include "fracheat/config.hpp"
#include "fracheat/fields.hpp"

namespace fracheat {

constexpr int kTimeAxis = -1;

// Restriction of base points (and every point a difference touches) to a time interval.
struct TimeWindow {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct SeminormSpec {
    int axis = kTimeAxis;  // space axis index or kTimeAxis
    int group = -1;        // >= 0: use every axis of this space group instead of `axis`
    double l = 0.5;
    int k = 1;
    std::vector<int> steps;  // lattice multiples; empty selects the dyadic ladder 1, 2, 4, ...
    std::size_t stride = 0;  // base-point stride; 0 selects max(1, points / 4096)
    TimeWindow window;
};

// sup over sampled base points and ladder steps of |k-th difference| / h^l
double seminorm(const Field &u, const SeminormSpec &spec);

// forward difference of order k with lattice step s along an axis, evaluated at flat index p of slice j.
// Space axes wrap periodically.
double lattice_difference(const Field &u, int axis, std::size_t p, int j, int k, int s);

enum class NormKind { solution, data };

struct HolderReport {
    NormKind kind = NormKind::solution;
    double sup_norm = 0;
    std::vector<double> space_exponents;  // per group
    std::vector<double> space_seminorms;  // per group
    double time_exponent = 0;
    double time_seminorm = 0;
    double total = 0;
    std::vector<double> fitted_space;  // per axis, NaN when the fit degenerates
    double fitted_time = 0;
};

HolderReport full_norm(const Field &u, const AnisotropyConfig &cfg, NormKind kind = NormKind::solution,
                       bool fit_exponents = false);

struct ExponentFit {
    double exponent = 0;
    double residual = 0;
    bool saturated = false;  // fitted exponent reached the difference order
    std::vector<double> steps, sups;
};

// Slope of log sup|k-th difference| against log h over a dyadic ladder. For the time
// axis the default window is the first eighth of the interval.
ExponentFit exponent_scan(const Field &u, int axis, int k, TimeWindow window = {});

struct MixedReport {
    double ratio = 0;
    double S1 = 0, S2 = 0;
    bool passed = false;
};

struct MixedSpec {
    int axis1 = kTimeAxis, axis2 = 0;
    int order1 = 1, order2 = 1;
    double l1 = 0.5, l2 = 0.5;
    double a = 0.25, b = 0.25;
    double eps = 1.0;
    double budget = 10.0;
    std::size_t stride = 0;
};

MixedReport mixed_difference_check(const Field &u, const MixedSpec &spec);

// order-m difference with lattice step s divided by h^a. Along time the output grid
// drops the last m*s samples.
Field difference_quotient_field(const Field &u, int axis, int s, double a, int m);

bool zero_trace_check(const Field &u, int q);

} // namespace fracheat
