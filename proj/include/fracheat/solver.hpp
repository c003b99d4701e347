#pragma once

#include <string>
#include <vector>

#include "fracheat/config.hpp"
#include "fracheat/fields.hpp"
#include "fracheat/holder.hpp"

namespace fracheat {

enum class SolverBackend { mode_stepping, spacetime_fourier };

struct CauchyProblem {
    AnisotropyConfig cfg;
    Field f;                    // right-hand side on the space-time grid, time from 0 to T
    std::vector<Field> traces;  // spatial fields u_0.. ; empty means all zero
    SolverBackend backend = SolverBackend::mode_stepping;
    bool strict = true;
    double tol = 1e-6;
};

struct CompatReport {
    bool required = false;
    bool pass = true;
    double defect_sup = 0;
    double scale = 1;
    Field defect;  // f(.,0) - M u_0
    bool higher_required = false;
    std::vector<double> higher_defects;  // sup |d^i f/dt^i (.,0)|, i = 1..[theta alpha]
};

CompatReport check_compatibility(const CauchyProblem &p);

struct Diagnostics {
    CompatReport compat;
    SolverBackend backend = SolverBackend::mode_stepping;
    int refinement = 0;
    bool outside_proven_regime = false;
    double residual_sup = 0;
    double residual_rel = 0;
    double leakage = 0;             // spacetime backend only
    double cross_backend_rel = -1;  // spacetime backend against mode stepping, -1 when not computed
    double max_imag = 0;
    std::vector<std::string> notes;
};

struct Solution {
    Field u;
    Field residual;
    HolderReport holder;
    Diagnostics diag;
};

struct SolveOptions {
    bool residual = true;
    bool holder = true;
};

Solution solve(const CauchyProblem &p, const SolveOptions &opt = {});

struct SpacetimeOptions {
    double past = -1;    // zero padding before t = 0; < 0 selects 2T
    double tail = -1;    // room after the lift cutoff; < 0 selects 4T + 4
    int lift_order = 0;  // order n of the G_n form; 0 selects max(3, ceil(theta) + 1)
    bool compare = true;
};

// Zero-trace problems only: extends f, lifts it to an n-fold antiderivative F and
// applies (i xi0)^n / ((i xi0)^theta + Lambda) in space-time Fourier variables.
Solution solve_spacetime(const CauchyProblem &p, const SpacetimeOptions &opt = {});

struct LiftResult {
    Field w;
    std::vector<Field> psi;  // psi_j = sum_s C(j,s) M^s phi_{j-s}
    std::string path;        // "chain" or "direct"
    std::vector<double> trace_errors;
};

// Function with time-derivative traces phi_0..phi_q at t = 0, built from the chain of
// first-order problems with operator d/dt + Sum (-Laplace_k)^{sigma_k/(2 theta)}.
LiftResult lift_initial_data(const AnisotropyConfig &cfg, const std::vector<Field> &traces, const TimeGrid &time);

struct Reduction {
    CauchyProblem reduced;
    Field lift;
};

Reduction reduce_to_zero_data(const CauchyProblem &p);

// Continues a solution on [0, T] to the horizon of `extended`, whose f covers [0, T'] with the same step.
Solution extend_past_T(const Solution &s, const CauchyProblem &extended);

struct EstimateReport {
    double solution_norm = 0;     // sup + seminorms in the solution space
    double solution_seminorm = 0;
    double data_norm = 0;         // |f| in the data space + trace norms
    double ratio = 0;             // solution_norm / data_norm
    double seminorm_ratio = 0;    // seminorm form
    // sup-norm forms: (|u|_0 - |u_0|_0) / (data * factor)
    double sup_ratio_theta = 0;   // factor 1 + T^{theta + theta alpha}
    double sup_ratio_integer = 0; // factor 1 + T^{n + alpha}
    bool zero_case = false;
};

EstimateReport verify_estimate(const Solution &s, const CauchyProblem &p);

double uniqueness_probe(const AnisotropyConfig &cfg, const SpaceGrid &space, const TimeGrid &time,
                        SolverBackend backend = SolverBackend::mode_stepping, double perturb = 0.0);

struct BootstrapReport {
    std::vector<double> steps;
    std::vector<double> ratios;  // seminorm of the quotient field / seminorm of u
    double max_ratio = 0;
    bool uniform = false;        // max_ratio <= budget
    double time_residual = -1;   // differentiated equation residual, -1 when not applicable
    double time_trace_defect = -1;
};

BootstrapReport bootstrap_exponent_check(const Solution &s, const CauchyProblem &p, int group, double budget = 10.0);

} // namespace fracheat
