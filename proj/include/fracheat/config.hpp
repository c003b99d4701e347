#pragma once

#include <vector>

namespace fracheat {

// One group of space variables z_k with its own fractional order.
struct Group {
    int dim = 1;
    double sigma = 1.0;
};

struct AnisotropyConfig {
    double theta = 0.5;
    double alpha = 0.5;
    std::vector<Group> groups;
    std::vector<double> box;  // one length per space axis
    double T = 1.0;

    int space_dim() const;
    // group index owning the given space axis
    int group_of_axis(int axis) const;
    std::vector<int> axes_of_group(int k) const;
};

struct DerivedExponents {
    double time_order = 0;      // theta + theta*alpha
    double rhs_time_order = 0;  // theta*alpha
    std::vector<double> space_orders;
    std::vector<double> rhs_space_orders;
    std::vector<std::vector<double>> trace_orders;  // [i][k]
    std::vector<double> lift_space_orders;          // sigma_k/theta
};

struct RegimeFlags {
    bool frac_small = false;
    bool frac_large = false;
    bool theta_integer = false;
    int n_alpha_band = 0;
    bool needs_compat = false;
    bool needs_higher_compat = false;
};

constexpr double kIntegerTolerance = 1e-6;

bool near_integer(double x, double tol = kIntegerTolerance);
bool theta_is_integer(double theta);
// [theta] for fractional theta, n-1 for theta = n.
int max_trace_index(double theta);
// number of traces carried by the Cauchy problem
int trace_count(double theta);
// n with theta in (n-1, n]; for integer theta this is theta itself.
int ceil_order(double theta);
double frac_part(double theta);

RegimeFlags validate(const AnisotropyConfig &cfg);
std::vector<double> trace_space(const AnisotropyConfig &cfg, int i);
DerivedExponents derive_exponents(const AnisotropyConfig &cfg);

} // namespace fracheat
