#pragma once

#include <vector>

#include "fracheat/fields.hpp"

namespace fracheat {

struct TimeSeries {
    TimeGrid grid;
    std::vector<double> v;       // M+1 samples
    std::vector<double> traces;  // g^{(k)}(0), k = 0.., empty when unknown

    TimeSeries() = default;
    TimeSeries(const TimeGrid &g, std::vector<double> values, std::vector<double> tr = {});
};

struct MarchaudParams {
    double theta = 0.5;
    int m = 1;
    // quadrature nodes per time step in the difference variable; 0 selects m
    int nodes_per_step = 0;
};

// Finite-difference weights (Fornberg) for the derivative of order `order`
// at z from samples at the nodes x.
std::vector<double> fd_weights(double z, const std::vector<double> &x, int order);
// Derivative of order k at node j, from the nearest `width` samples (width > k).
double node_derivative(const std::vector<double> &v, double dt, int j, int k, int width);
// Second-order nodal first derivative (central inside, one-sided at the ends).
std::vector<double> discrete_derivative(const std::vector<double> &v, double dt);

TimeSeries caputo(double theta, const TimeSeries &g);
TimeSeries riemann_liouville(double theta, const TimeSeries &g);
TimeSeries frac_integral(double theta, const TimeSeries &h);
TimeSeries marchaud(const MarchaudParams &p, const TimeSeries &g);
double marchaud_constant(double theta, int m);
TimeSeries caputo_shifted(double theta, const TimeSeries &g, double origin);
TimeSeries taylor_extend(const TimeSeries &g, int q, double origin, double new_stop);
double vanishing_at_zero_check(double theta, const TimeSeries &g);

std::vector<TimeSeries> caputo_batch(double theta, const std::vector<TimeSeries> &gs);

// L1 weights b_l = (l+1)^{1-a} - l^{1-a}, l = 0..M-1, for order a in (0,1)
std::vector<double> l1_weights(double a, int M);

} // namespace fracheat
