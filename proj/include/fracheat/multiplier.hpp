#pragma once

#include <functional>
#include <vector>

#include "fracheat/config.hpp"
#include "fracheat/fields.hpp"

namespace fracheat {

enum class SymbolVariant { m0, mi, Gn, denom, custom };

// Fourier symbol in the variables (xi, xi0), xi the N spatial frequencies.
struct SymbolDescriptor {
    SymbolVariant variant = SymbolVariant::m0;
    AnisotropyConfig cfg;
    int index = 0;  // group for mi, power n for Gn
    // perturbation hook for constructed counterexamples
    std::function<cplx(const std::vector<double> &xi, double xi0)> custom;
};

// (i xi0)^theta = |xi0|^theta exp(i theta pi/2 sign xi0), zero at xi0 = 0
cplx branch_power(double xi0, double theta);
// Sum_k |zeta_k|^{sigma_k}
double space_symbol(const AnisotropyConfig &cfg, const std::vector<double> &xi);
cplx eval(const SymbolDescriptor &sym, const std::vector<double> &xi, double xi0);

// deterministic points of the annulus nu <= |(xi, xi0)| <= 1/nu
std::vector<std::vector<double>> annulus_samples(int space_dim, double nu, int count, unsigned seed = 7);

// Points are (xi..., xi0); lambdas default to 2^{-8}..2^{8}.
double dilation_invariance_check(const SymbolDescriptor &sym, const std::vector<std::vector<double>> &points,
                                 std::vector<double> lambdas = {});

struct AnnulusSpec {
    double nu = 0.25;
    int nodes = 64;       // per coordinate half-axis; refinement doubles it
    double p = 0.0;       // 0 selects 1/(1-delta)
    double delta = 0.0;   // 0 selects the default
    std::vector<int> orders;  // s_0, s_1, ...; empty selects s_0 = 1, s_k = N_k
    std::vector<double> lambdas{1.0 / 16.0, 1.0, 16.0};
};

struct Condition410Report {
    double delta = 0, p = 0;
    double mu = 0;          // at the requested sampling
    double mu_refined = 0;  // at doubled sampling
    double drift = 0;       // |mu_refined - mu| / mu
    bool stable = false;    // drift <= 5%
    std::vector<double> mu_per_lambda;
};

double default_delta(const AnisotropyConfig &cfg);
Condition410Report condition_410_check(const SymbolDescriptor &sym, const AnnulusSpec &spec);

bool vanishing_condition_check(const SymbolDescriptor &sym, int samples = 64);
double denominator_distance(const AnisotropyConfig &cfg, double nu = 0.25, int rays = 720);

struct SupportReport {
    double leakage = 0;        // (E(t<0) + E(t=0)/2) / E
    double origin_share = 0;   // E(t=0) / E
    bool boundary_case = false;
};

// Inverse space-time transform of symbol * window on the given grids; the time
// window is the periodic interval [-P/2, P/2).
struct SupportOptions {
    bool causal_window = true;  // multiply by the transform of a smooth bump supported in t > 0
    bool reverse_time = false;  // conjugate the product (time reversal)
    double bump_start = 0.25, bump_width = 1.0;
};
SupportReport support_check(const SymbolDescriptor &sym, const SpaceGrid &space, const TimeGrid &time,
                            const SupportOptions &opt = {});

} // namespace fracheat
