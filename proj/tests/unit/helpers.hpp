#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracheat/fields.hpp"

namespace testing {

inline fracheat::AnisotropyConfig one_group(double theta, double alpha, double sigma, double L = 2.0 * M_PI,
                                             double T = 1.0)
{
    fracheat::AnisotropyConfig c;
    c.theta = theta;
    c.alpha = alpha;
    c.groups = {{1, sigma}};
    c.box = {L};
    c.T = T;
    return c;
}

inline fracheat::SpaceGrid line(int n, double L)
{
    fracheat::SpaceGrid g;
    g.n = {n};
    g.L = {L};
    g.group = {0};
    return g;
}

inline double max_abs_diff(const std::vector<double> &a, const std::vector<double> &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double rel_sup(const fracheat::Field &a, const fracheat::Field &ref)
{
    return max_abs_diff(a.data, ref.data) / ref.sup();
}

} // namespace testing
