#pragma once

#include <vector>

#include "fracheat/fields.hpp"

namespace fracheat {

struct HypersingularParams {
    int group = 0;
    double sigma = 0.5;
    int m = 1;
    // symmetric differences (u(x+h) - 2u(x) + u(x-h))^{m/2} instead of forward ones; m must be even
    bool centered = false;
    // radial rule in the scaled variable q = r|zeta.e|
    double inner_cutoff = 1e-8;
    double outer_cutoff = 4000.0 * 3.14159265358979323846;
    int log_panels = 60;
    int angular_nodes = 4096;  // directions for groups of dimension >= 2
    // skip the compact-support guard for inputs that are periodic by construction
    bool periodic_input = false;
};

enum class Backend { spectral, hypersingular };

struct OperatorTerm {
    int group = 0;
    double power = 1.0;
};

struct OperatorSpec {
    std::vector<OperatorTerm> terms;
    Backend backend = Backend::spectral;
};

// |zeta_k| for the group-k components of the spatial frequency with flat FFT index s
double group_frequency_norm(const SpaceGrid &g, int k, std::size_t s);
// Sum_k |zeta_k|^{p_k} at flat FFT index s
double operator_symbol(const SpaceGrid &g, const std::vector<OperatorTerm> &terms, std::size_t s);

Field frac_laplacian_spectral(const Field &u, int k, double sigma);
Field frac_laplacian_hypersingular(const Field &u, const HypersingularParams &p);
// the uncalibrated quadrature of the difference integral, as a modal factor
std::vector<cplx> hypersingular_modal_factor(const SpaceGrid &g, const HypersingularParams &p);

struct Calibration {
    double constant = 0;
    double residual = 0;  // relative l2 mismatch on the reference Gaussian
};
Calibration calibrate(int dim, double sigma, int m, bool centered = false);
double calibrate_constant(int dim, double sigma, int m, bool centered = false);

Field apply_operator(const Field &u, const OperatorSpec &spec);
// operator of the lift: Sum_k (-Laplace_k)^{sigma_k/(2 theta)}
OperatorSpec lift_operator(const AnisotropyConfig &cfg);
OperatorSpec space_operator(const AnisotropyConfig &cfg);

struct DecayFit {
    double slope = 0;
    double residual = 0;
    double x_lo = 0, x_hi = 0;
    int points = 0;
};
DecayFit schwartz_decay_check(const Field &u, double sigma);

} // namespace fracheat
