#include "fracheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracheat/error.hpp"
#include "fracheat/frac_space.hpp"
#include "fracheat/frac_time.hpp"
#include "fracheat/mollify.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat {

namespace {

const Field *trace_or_null(const CauchyProblem &p, int i)
{
    return i < static_cast<int>(p.traces.size()) ? &p.traces[i] : nullptr;
}

void check_problem(const CauchyProblem &p)
{
    if (p.f.time.start != 0.0) throw Error(ErrorKind::InvalidArgument, "the right-hand side must start at t = 0");
    check_grids(p.f.space, p.f.time);
    const int need = trace_count(p.cfg.theta);
    if (!p.traces.empty() && static_cast<int>(p.traces.size()) != need) {
        std::ostringstream os;
        os << "expected " << need << " traces, got " << p.traces.size();
        throw Error(ErrorKind::MissingTraces, os.str());
    }
    for (const auto &tr : p.traces)
        if (!(tr.space == p.f.space) || tr.time.points() != 1)
            throw Error(ErrorKind::ShapeMismatch, "traces must be spatial fields on the problem grid");
}

Field zero_spatial(const SpaceGrid &g) { return spatial_field(g); }

std::vector<double> mode_symbols(const SpaceGrid &g, const OperatorSpec &op)
{
    std::vector<double> lam(g.size());
    for (std::size_t s = 0; s < lam.size(); ++s) lam[s] = operator_symbol(g, op.terms, s);
    return lam;
}

// Modal time stepping for D^theta v + lam v = g with v^{(k)}(0) = c_k.
class Stepper {
public:
    Stepper(double theta, const TimeGrid &tg) : theta_(theta), M_(tg.M), dt_(tg.dt())
    {
        integer_ = theta_is_integer(theta);
        n_ = ceil_order(theta);
        if (!integer_) {
            const double a = theta - (n_ - 1);
            b_ = l1_weights(a, M_);
            c0_ = std::pow(dt_, -a) / std::tgamma(2.0 - a);
            // backward stencil for the (n-1)-th derivative on nodes j-n..j
            std::vector<double> x(n_ + 1);
            for (int i = 0; i <= n_; ++i) x[i] = i - n_;
            w_ = fd_weights(0.0, x, n_ - 1);
            scale_ = std::pow(dt_, -(n_ - 1));
        }
    }

    // v[0..J] known on entry (J >= 0); fills v[J+1..M]
    void run(double lam, const std::vector<cplx> &g, const std::vector<cplx> &c, std::vector<cplx> &v, int J) const
    {
        if (integer_ && n_ == 1) return exponential(lam, g, v, J);
        if (integer_) return trapezoid(lam, g, c, v, J);
        fractional(lam, g, c, v, J);
    }

private:
    void exponential(double lam, const std::vector<cplx> &g, std::vector<cplx> &v, int J) const
    {
        const double z = lam * dt_;
        const double e = std::exp(-z);
        double p1, p2;
        if (z < 1e-3) {
            p1 = 1.0 - z / 2 + z * z / 6 - z * z * z / 24;
            p2 = 0.5 - z / 6 + z * z / 24 - z * z * z / 120;
        } else {
            p1 = -std::expm1(-z) / z;
            p2 = (z + std::expm1(-z)) / (z * z);
        }
        for (int j = J; j < M_; ++j) v[j + 1] = e * v[j] + dt_ * ((p1 - p2) * g[j] + p2 * g[j + 1]);
    }

    void trapezoid(double lam, const std::vector<cplx> &g, const std::vector<cplx> &c, std::vector<cplx> &v,
                   int J) const
    {
        if (J != 0) throw Error(ErrorKind::RegimeUnsupported, "restart of higher integer orders");
        const int n = n_;
        // companion matrix A, B = I - h/2 A, C = I + h/2 A; Binv by Gauss-Jordan
        std::vector<double> A(n * n, 0.0), B(n * n), C(n * n), Bi(n * n, 0.0);
        for (int i = 0; i + 1 < n; ++i) A[i * n + i + 1] = 1.0;
        A[(n - 1) * n] = -lam;
        for (int i = 0; i < n * n; ++i) {
            const double id = (i % (n + 1) == 0) ? 1.0 : 0.0;
            B[i] = id - 0.5 * dt_ * A[i];
            C[i] = id + 0.5 * dt_ * A[i];
        }
        for (int i = 0; i < n; ++i) Bi[i * n + i] = 1.0;
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::fabs(B[r * n + col]) > std::fabs(B[piv * n + col])) piv = r;
            for (int k = 0; k < n; ++k) {
                std::swap(B[col * n + k], B[piv * n + k]);
                std::swap(Bi[col * n + k], Bi[piv * n + k]);
            }
            const double d = B[col * n + col];
            for (int k = 0; k < n; ++k) {
                B[col * n + k] /= d;
                Bi[col * n + k] /= d;
            }
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                const double f = B[r * n + col];
                for (int k = 0; k < n; ++k) {
                    B[r * n + k] -= f * B[col * n + k];
                    Bi[r * n + k] -= f * Bi[col * n + k];
                }
            }
        }
        std::vector<double> P(n * n, 0.0);  // Binv * C
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) P[i * n + j] += Bi[i * n + k] * C[k * n + j];
        std::vector<cplx> Y(n), Z(n);
        for (int i = 0; i < n; ++i) Y[i] = i < static_cast<int>(c.size()) ? c[i] : 0.0;
        v[0] = Y[0];
        for (int j = 0; j < M_; ++j) {
            const cplx src = 0.5 * dt_ * (g[j] + g[j + 1]);
            for (int i = 0; i < n; ++i) {
                cplx acc = Bi[i * n + n - 1] * src;
                for (int k = 0; k < n; ++k) acc += P[i * n + k] * Y[k];
                Z[i] = acc;
            }
            Y.swap(Z);
            v[j + 1] = Y[0];
        }
    }

    // value at node m, with Taylor ghosts from the traces for m < 0
    cplx node(const std::vector<cplx> &v, const std::vector<cplx> &c, int m) const
    {
        if (m >= 0) return v[m];
        cplx acc = 0.0;
        double pw = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            acc += c[k] * pw;
            pw *= m * dt_ / double(k + 1);
        }
        return acc;
    }

    void fractional(double lam, const std::vector<cplx> &g, const std::vector<cplx> &c, std::vector<cplx> &v,
                    int J) const
    {
        const int n = n_;
        std::vector<cplx> y(M_ + 1);
        auto rest = [&](int j) {
            cplx r = 0.0;
            for (int i = 0; i < n; ++i) r += w_[i] * node(v, c, j - n + i);
            return r;
        };
        y[0] = n == 1 ? v[0] : (n - 1 < static_cast<int>(c.size()) ? c[n - 1] : 0.0);
        for (int j = 1; j <= J; ++j) y[j] = scale_ * (w_[n] * v[j] + rest(j));
        std::vector<cplx> d(M_);  // increments y_{k+1} - y_k
        for (int k = 0; k < J; ++k) d[k] = y[k + 1] - y[k];
        const double coef = c0_ * b_[0] * scale_ * w_[n];
        for (int j = std::max(J, 0) + 1; j <= M_; ++j) {
            cplx hist = 0.0;
            for (int k = 0; k + 1 < j; ++k) hist += b_[j - 1 - k] * d[k];
            const cplx rhs = g[j] - c0_ * hist + c0_ * b_[0] * (y[j - 1] - scale_ * rest(j));
            v[j] = rhs / (coef + lam);
            y[j] = scale_ * (w_[n] * v[j] + rest(j));
            d[j - 1] = y[j] - y[j - 1];
        }
    }

    double theta_;
    int M_;
    double dt_;
    bool integer_ = false;
    int n_ = 1;
    std::vector<double> b_, w_;
    double c0_ = 0, scale_ = 1;
};

// modal traces c_k(s), one vector per mode
std::vector<std::vector<cplx>> modal_traces(const CauchyProblem &p)
{
    const std::size_t S = p.f.slice_size();
    const int count = trace_count(p.cfg.theta);
    std::vector<std::vector<cplx>> c(S, std::vector<cplx>(count, 0.0));
    for (int i = 0; i < count; ++i) {
        const Field *tr = trace_or_null(p, i);
        if (!tr) continue;
        const auto sp = fft_space(*tr);
        for (std::size_t s = 0; s < S; ++s) c[s][i] = sp.data[s];
    }
    return c;
}

Field step_all(const CauchyProblem &p, const SpectralField *prefix, int J, double *max_imag)
{
    const auto sp = fft_space(p.f);
    const std::size_t S = p.f.slice_size();
    const int M = p.f.time.M;
    const auto lam = mode_symbols(p.f.space, space_operator(p.cfg));
    const auto c = modal_traces(p);
    const Stepper st(p.cfg.theta, p.f.time);
    SpectralField out = sp;
    parallel_for(S, [&](std::size_t s) {
        std::vector<cplx> g(M + 1), v(M + 1, 0.0);
        for (int j = 0; j <= M; ++j) g[j] = sp.data[j * S + s];
        if (prefix)
            for (int j = 0; j <= J; ++j) v[j] = prefix->data[j * S + s];
        else
            v[0] = c[s].empty() ? 0.0 : c[s][0];
        st.run(lam[s], g, c[s], v, J);
        for (int j = 0; j <= M; ++j) out.data[j * S + s] = v[j];
    });
    return ifft_space(out, max_imag);
}

// D^theta u + M u - f with the traces declared at every space point
Field compute_residual(const Field &u, const Field &f, const CauchyProblem &p)
{
    const Field Mu = apply_operator(u, space_operator(p.cfg));
    Field r(u.space, u.time);
    const std::size_t S = u.slice_size();
    const int P = u.time.points();
    const double theta = p.cfg.theta;
    const int count = trace_count(theta);
    parallel_for(S, [&](std::size_t s) {
        std::vector<double> v(P), d(P);
        for (int j = 0; j < P; ++j) v[j] = u.at(s, j);
        if (theta_is_integer(theta)) {
            const int n = static_cast<int>(std::lround(theta));
            for (int j = 0; j < P; ++j) d[j] = node_derivative(v, u.time.dt(), j, n, n + 2);
        } else {
            std::vector<double> tr(count, 0.0);
            for (int i = 0; i < count; ++i)
                if (const Field *t = trace_or_null(p, i)) tr[i] = t->at(s, 0);
            d = caputo(theta, TimeSeries(u.time, v, tr)).v;
        }
        for (int j = 0; j < P; ++j) r.at(s, j) = d[j] + Mu.at(s, j) - f.at(s, j);
    });
    return r;
}

void finish(Solution &sol, const CauchyProblem &p, const SolveOptions &opt)
{
    if (opt.residual) {
        sol.residual = compute_residual(sol.u, p.f, p);
        sol.diag.residual_sup = sol.residual.sup();
        const double scale = std::max(p.f.sup(), 1e-300);
        sol.diag.residual_rel = sol.diag.residual_sup / scale;
    }
    if (opt.holder) sol.holder = full_norm(sol.u, p.cfg, NormKind::solution);
}

void regime_gate(const CauchyProblem &p, Diagnostics &d)
{
    const double th = p.cfg.theta;
    if (!theta_is_integer(th) && th > 2.0 && frac_part(th) + th * p.cfg.alpha <= 1.0) {
        if (p.strict)
            throw Error(ErrorKind::RegimeUnsupported,
                        "theta > 2 with {theta} + theta*alpha <= 1 is outside the proven regime; use lax mode");
        d.outside_proven_regime = true;
        d.notes.push_back("outside proven regime");
    }
}

void compat_gate(const CauchyProblem &p, Diagnostics &d)
{
    d.compat = check_compatibility(p);
    if (d.compat.pass) return;
    std::ostringstream os;
    os << "compatibility defect " << d.compat.defect_sup;
    for (std::size_t i = 0; i < d.compat.higher_defects.size(); ++i)
        os << ", order-" << i + 1 << " defect " << d.compat.higher_defects[i];
    if (p.strict) throw Error(ErrorKind::CompatibilityFailed, os.str());
    d.notes.push_back(os.str() + " (lax mode, smoothness at t = 0 is lost)");
}

double sup_diff(const Field &a, const Field &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    return m;
}

} // namespace

CompatReport check_compatibility(const CauchyProblem &p)
{
    CompatReport r;
    const RegimeFlags fl = validate(p.cfg);
    r.required = fl.needs_compat;
    const SpaceGrid &g = p.f.space;
    Field f0 = zero_spatial(g);
    std::copy(p.f.slice(0), p.f.slice(0) + g.size(), f0.data.begin());
    Field Mu0 = zero_spatial(g);
    if (const Field *u0 = trace_or_null(p, 0)) Mu0 = apply_operator(*u0, space_operator(p.cfg));
    r.defect = f0;
    for (std::size_t s = 0; s < g.size(); ++s) r.defect.data[s] -= Mu0.data[s];
    r.defect_sup = r.defect.sup();
    r.scale = std::max({1.0, f0.sup(), Mu0.sup()});
    if (!r.required) return r;
    r.pass = r.defect_sup <= p.tol * r.scale;
    r.higher_required = fl.needs_higher_compat;
    if (r.higher_required) {
        const int top = static_cast<int>(std::floor(p.cfg.theta * p.cfg.alpha));
        const int P = p.f.time.points();
        std::vector<double> v(P);
        const double T = p.f.time.stop - p.f.time.start;
        for (int i = 1; i <= top; ++i) {
            double m = 0.0;
            for (std::size_t s = 0; s < g.size(); ++s) {
                for (int j = 0; j < P; ++j) v[j] = p.f.at(s, j);
                m = std::max(m, std::fabs(node_derivative(v, p.f.time.dt(), 0, i, std::min(i + 3, P))));
            }
            r.higher_defects.push_back(m);
            if (m > p.tol * std::max(1.0, p.f.sup()) / std::pow(T, i)) r.pass = false;
        }
    }
    return r;
}

Solution solve(const CauchyProblem &p, const SolveOptions &opt)
{
    validate(p.cfg);
    check_problem(p);
    if (p.backend == SolverBackend::spacetime_fourier) {
        SpacetimeOptions so;
        Solution s = solve_spacetime(p, so);
        return s;
    }
    Solution sol;
    sol.diag.backend = SolverBackend::mode_stepping;
    regime_gate(p, sol.diag);
    compat_gate(p, sol.diag);
    if (theta_is_integer(p.cfg.theta) && p.cfg.theta > 2.0)
        sol.diag.notes.push_back("integer order > 2: modes with growing roots amplify exponentially");
    sol.u = step_all(p, nullptr, 0, &sol.diag.max_imag);
    finish(sol, p, opt);
    return sol;
}

Solution solve_spacetime(const CauchyProblem &p, const SpacetimeOptions &opt)
{
    validate(p.cfg);
    check_problem(p);
    for (const auto &tr : p.traces)
        if (tr.sup() > 0.0) throw Error(ErrorKind::NonzeroTraces, "reduce to zero traces first");
    Solution sol;
    sol.diag.backend = SolverBackend::spacetime_fourier;
    regime_gate(p, sol.diag);
    compat_gate(p, sol.diag);

    const double T = p.f.time.stop;
    const double dt = p.f.time.dt();
    const double past = opt.past >= 0 ? opt.past : 2.0 * T;
    const double tail = opt.tail >= 0 ? opt.tail : 4.0 * T + 4.0;
    const int n = opt.lift_order > 0 ? opt.lift_order : std::max(3, ceil_order(p.cfg.theta) + 1);
    if (n <= p.cfg.theta) throw Error(ErrorKind::InvalidArgument, "lift order must exceed theta");

    Field fe = extend_time(p.f, {ExtendMode::even_cutoff, 0.0, T});
    fe = extend_time(fe, {ExtendMode::zero_past, past, 1.0 + tail, 0, true});
    const int kp = static_cast<int>(std::lround(past / dt));
    const Field F = antiderivative_lift(fe, n);
    SpectralField sp = fft_spacetime(F);

    const SpaceGrid &g = F.space;
    const std::size_t S = g.size();
    const auto lam = mode_symbols(g, space_operator(p.cfg));
    const int P = F.time.points();
    const bool integer = theta_is_integer(p.cfg.theta);
    for (int k = 0; k < P; ++k) {
        const double x0 = sp.time_freq(k);
        cplx lead;
        if (integer) {
            lead = 1.0;
            for (int i = 0; i < static_cast<int>(std::lround(p.cfg.theta)); ++i) lead *= cplx(0.0, x0);
        } else {
            lead = x0 == 0.0 ? cplx(0.0) : std::polar(std::pow(std::fabs(x0), p.cfg.theta),
                                                     0.5 * M_PI * p.cfg.theta * (x0 > 0 ? 1.0 : -1.0));
        }
        cplx gn = 1.0;
        for (int i = 0; i < n; ++i) gn *= cplx(0.0, x0);
        for (std::size_t s = 0; s < S; ++s) {
            const cplx den = lead + lam[s];
            cplx &v = sp.data[k * S + s];
            if (x0 == 0.0 && lam[s] == 0.0) {
                v = 0.0;  // G_n vanishes at the origin
                continue;
            }
            if (den == 0.0) throw Error(ErrorKind::OriginMode, "symbol denominator vanishes off the origin");
            v *= gn / den;
        }
    }
    const Field ue = ifft_spacetime(sp, &sol.diag.max_imag);
    double neg = 0.0, tot = 0.0;
    for (int j = 0; j < P; ++j)
        for (std::size_t s = 0; s < S; ++s) {
            const double e = ue.at(s, j) * ue.at(s, j);
            tot += e;
            if (j < kp) neg += e;
        }
    sol.diag.leakage = tot > 0 ? neg / tot : 0.0;
    sol.u = Field(g, p.f.time);
    for (int j = 0; j <= p.f.time.M; ++j) std::copy(ue.slice(kp + j), ue.slice(kp + j) + S, sol.u.slice(j));

    if (opt.compare) {
        CauchyProblem q = p;
        q.backend = SolverBackend::mode_stepping;
        q.strict = false;
        const Solution ms = solve(q, {false, false});
        const double ref = ms.u.sup();
        sol.diag.cross_backend_rel = ref > 0 ? sup_diff(sol.u, ms.u) / ref : sup_diff(sol.u, ms.u);
    }
    finish(sol, p, {});
    return sol;
}

LiftResult lift_initial_data(const AnisotropyConfig &cfg, const std::vector<Field> &traces, const TimeGrid &time)
{
    if (traces.empty()) throw Error(ErrorKind::InvalidArgument, "no traces to lift");
    const double th = cfg.theta;
    const int q = static_cast<int>(traces.size()) - 1;
    const int fl = static_cast<int>(std::floor(th + kIntegerTolerance));
    const bool heightened = frac_part(th) + th * cfg.alpha > 1.0;
    if (q > fl || (q == fl && !(heightened || th < 2.0))) {
        std::ostringstream os;
        os << "lifting " << q + 1 << " traces needs {theta} + theta*alpha > 1 or theta < 2";
        throw Error(ErrorKind::RegimeUnsupported, os.str());
    }
    const SpaceGrid &g = traces[0].space;
    const std::size_t S = g.size();
    const auto mu = mode_symbols(g, lift_operator(cfg));
    std::vector<std::vector<cplx>> phi(q + 1);
    for (int i = 0; i <= q; ++i) phi[i] = fft_space(traces[i]).data;

    LiftResult r;
    // psi_j = sum_s C(j,s) mu^s phi_{j-s}
    std::vector<std::vector<cplx>> psi(q + 1, std::vector<cplx>(S, 0.0));
    for (int j = 0; j <= q; ++j) {
        for (std::size_t s = 0; s < S; ++s) {
            double binom = 1.0, pw = 1.0;
            cplx acc = 0.0;
            for (int k = 0; k <= j; ++k) {
                acc += binom * pw * phi[j - k][s];
                binom = binom * (j - k) / (k + 1);
                pw *= mu[s];
            }
            psi[j][s] = acc;
        }
        SpectralField sf;
        sf.space = g;
        sf.time = traces[0].time;
        sf.data = psi[j];
        r.psi.push_back(ifft_space(sf));
    }

    const bool direct = q == 1 && th > 1.0 && th < 2.0;
    r.path = direct ? "direct" : "chain";
    SpectralField out;
    out.space = g;
    out.time = time;
    out.data.assign(S * time.points(), 0.0);
    for (int j = 0; j <= time.M; ++j) {
        const double t = time.t(j) - time.start;
        for (std::size_t s = 0; s < S; ++s) {
            cplx w;
            if (direct) {
                // w_t + M w = phi_1 + M phi_0, w(0) = phi_0
                const double m = mu[s];
                const double frac = m * t < 1e-8 ? t * (1.0 - 0.5 * m * t) : -std::expm1(-m * t) / m;
                w = phi[0][s] + phi[1][s] * frac;
            } else {
                cplx acc = 0.0;
                double pw = 1.0;
                for (int i = 0; i <= q; ++i) {
                    acc += psi[i][s] * pw;
                    pw *= t / (i + 1);
                }
                w = std::exp(-mu[s] * t) * acc;
            }
            out.data[j * S + s] = w;
        }
    }
    r.w = ifft_space(out);

    // discrete traces at t = 0
    const int P = time.points();
    const int width = std::min(q + 5, P);
    std::vector<double> v(P);
    for (int i = 0; i <= q; ++i) {
        double err = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            for (int j = 0; j < P; ++j) v[j] = r.w.at(s, j);
            const double d = i == 0 ? v[0] : node_derivative(v, time.dt(), 0, i, width);
            err = std::max(err, std::fabs(d - traces[i].at(s, 0)));
        }
        r.trace_errors.push_back(err);
    }
    return r;
}

Reduction reduce_to_zero_data(const CauchyProblem &p)
{
    check_problem(p);
    Reduction red;
    red.reduced = p;
    red.lift = Field(p.f.space, p.f.time);
    bool zero = true;
    for (const auto &tr : p.traces) zero = zero && tr.sup() == 0.0;
    if (zero) return red;
    const double th = p.cfg.theta;
    const std::size_t S = p.f.slice_size();
    if (!theta_is_integer(th) && th < 1.0) {
        const Field Mu0 = apply_operator(p.traces[0], space_operator(p.cfg));
        for (int j = 0; j <= p.f.time.M; ++j)
            for (std::size_t s = 0; s < S; ++s) {
                red.lift.at(s, j) = p.traces[0].at(s, 0);
                red.reduced.f.at(s, j) -= Mu0.at(s, 0);
            }
    } else {
        LiftResult lr;
        try {
            lr = lift_initial_data(p.cfg, p.traces, p.f.time);
        } catch (const Error &e) {
            if (e.kind() == ErrorKind::RegimeUnsupported) throw Error(ErrorKind::LiftUnavailable, e.what());
            throw;
        }
        red.lift = lr.w;
        // f' = f - (D^theta w + M w), with w carrying the declared traces
        CauchyProblem q = p;
        q.f = Field(p.f.space, p.f.time);
        const Field r = compute_residual(lr.w, q.f, q);
        for (std::size_t i = 0; i < red.reduced.f.data.size(); ++i) red.reduced.f.data[i] -= r.data[i];
    }
    for (auto &tr : red.reduced.traces) std::fill(tr.data.begin(), tr.data.end(), 0.0);
    return red;
}

Solution extend_past_T(const Solution &s, const CauchyProblem &extended)
{
    validate(extended.cfg);
    check_problem(extended);
    const double th = extended.cfg.theta;
    const bool ok = (!theta_is_integer(th) && th < 1.0) || (theta_is_integer(th) && std::lround(th) == 1);
    if (!ok) throw Error(ErrorKind::RegimeUnsupported, "continuation is implemented for theta in (0, 1] only");
    const TimeGrid &old = s.u.time;
    const TimeGrid &nw = extended.f.time;
    if (!(s.u.space == extended.f.space) || std::fabs(old.dt() - nw.dt()) > 1e-12 * old.dt() || nw.M < old.M)
        throw Error(ErrorKind::ShapeMismatch, "extension must keep the space grid and time step");
    Solution out;
    out.diag = s.diag;
    out.diag.backend = SolverBackend::mode_stepping;
    const SpectralField prefix = fft_space(s.u);
    out.u = step_all(extended, &prefix, old.M, &out.diag.max_imag);
    finish(out, extended, {});
    return out;
}

EstimateReport verify_estimate(const Solution &s, const CauchyProblem &p)
{
    EstimateReport r;
    const HolderReport hu = s.holder.total > 0 || s.u.sup() == 0 ? s.holder : full_norm(s.u, p.cfg);
    const HolderReport hf = full_norm(p.f, p.cfg, NormKind::data);
    r.solution_norm = hu.total;
    r.solution_seminorm = hu.total - hu.sup_norm;
    double data = hf.total;
    double u0sup = 0.0;
    for (std::size_t i = 0; i < p.traces.size(); ++i) {
        const auto ex = trace_space(p.cfg, static_cast<int>(i));
        double nrm = p.traces[i].sup();
        if (i == 0) u0sup = nrm;
        for (std::size_t k = 0; k < p.cfg.groups.size(); ++k) {
            SeminormSpec sp;
            sp.group = static_cast<int>(k);
            sp.l = ex[k];
            sp.k = static_cast<int>(std::floor(ex[k])) + 1;
            nrm += seminorm(p.traces[i], sp);
        }
        data += nrm;
    }
    r.data_norm = data;
    if (data == 0.0) {
        r.zero_case = true;
        return r;
    }
    r.ratio = r.solution_norm / data;
    r.seminorm_ratio = r.solution_seminorm / data;
    const double T = p.f.time.stop;
    const double usup = s.u.sup() - u0sup;
    r.sup_ratio_theta = usup / (data * (1.0 + std::pow(T, p.cfg.theta * (1.0 + p.cfg.alpha))));
    r.sup_ratio_integer = usup / (data * (1.0 + std::pow(T, ceil_order(p.cfg.theta) + p.cfg.alpha)));
    return r;
}

double uniqueness_probe(const AnisotropyConfig &cfg, const SpaceGrid &space, const TimeGrid &time,
                        SolverBackend backend, double perturb)
{
    CauchyProblem p;
    p.cfg = cfg;
    p.f = Field(space, time);
    p.backend = backend;
    p.strict = false;
    if (perturb != 0.0) {
        if (backend == SolverBackend::spacetime_fourier)
            throw Error(ErrorKind::InvalidArgument, "trace perturbation needs the mode-stepping backend");
        for (int i = 0; i < trace_count(cfg.theta); ++i) p.traces.push_back(spatial_field(space));
        p.traces[0] = sample(
            [&](const double *x, double) {
                double r2 = 0.0;
                for (int a = 0; a < space.dims(); ++a) r2 += x[a] * x[a];
                return perturb * std::exp(-r2);
            },
            space, TimeGrid{0, 0, 0});
    }
    return solve(p, {false, false}).u.sup();
}

BootstrapReport bootstrap_exponent_check(const Solution &s, const CauchyProblem &p, int group, double budget)
{
    BootstrapReport r;
    const auto axes = p.cfg.axes_of_group(group);
    const int axis = axes.at(0);
    const double l = p.cfg.groups[group].sigma * (1.0 + p.cfg.alpha);
    double a = 0.5 * l;
    if (near_integer(l - a, 0.05)) a += 0.1;
    const int m = static_cast<int>(std::floor(l)) + 1;
    SeminormSpec base;
    base.group = group;
    base.l = l;
    base.k = m;
    const double su = seminorm(s.u, base);
    SeminormSpec qs;
    qs.group = group;
    qs.l = l - a;
    qs.k = static_cast<int>(std::floor(l - a)) + 1;
    for (int st = 1; 4 * st <= s.u.space.n[axis]; st *= 2) {
        const Field qf = difference_quotient_field(s.u, axis, st, a, m);
        const double sq = seminorm(qf, qs);
        r.steps.push_back(st * s.u.space.dx(axis));
        r.ratios.push_back(su > 0 ? sq / su : 0.0);
        r.max_ratio = std::max(r.max_ratio, r.ratios.back());
    }
    r.uniform = r.max_ratio <= budget;

    // time bootstrap: v = u_t solves the differentiated equation with right side f_t
    const double th = p.cfg.theta;
    const bool unit = theta_is_integer(th) && std::lround(th) == 1;
    const bool u0zero = p.traces.empty() || p.traces[0].sup() == 0.0;
    const bool frac_ok = !theta_is_integer(th) && th < 1.0 && u0zero && th * (1.0 + p.cfg.alpha) > 1.0;
    if (!(unit || frac_ok)) return r;
    const std::size_t S = s.u.slice_size();
    const int P = s.u.time.points();
    const double dt = s.u.time.dt();
    Field v(s.u.space, s.u.time), g(s.u.space, s.u.time);
    for (std::size_t sp = 0; sp < S; ++sp) {
        std::vector<double> a1(P), b1(P);
        for (int j = 0; j < P; ++j) {
            a1[j] = s.u.at(sp, j);
            b1[j] = p.f.at(sp, j);
        }
        const auto da = discrete_derivative(a1, dt), db = discrete_derivative(b1, dt);
        for (int j = 0; j < P; ++j) {
            v.at(sp, j) = da[j];
            g.at(sp, j) = db[j];
        }
    }
    // expected v(., 0): f(., 0) - M u_0 for theta = 1, zero otherwise
    Field v0 = spatial_field(s.u.space);
    if (unit) {
        Field Mu0 = spatial_field(s.u.space);
        if (!u0zero) Mu0 = apply_operator(p.traces[0], space_operator(p.cfg));
        for (std::size_t sp = 0; sp < S; ++sp) v0.data[sp] = p.f.at(sp, 0) - Mu0.data[sp];
    }
    double td = 0.0;
    for (std::size_t sp = 0; sp < S; ++sp) td = std::max(td, std::fabs(v.at(sp, 0) - v0.data[sp]));
    r.time_trace_defect = td / std::max(v.sup(), 1e-300);
    CauchyProblem q = p;
    q.traces = {v0};
    const Field res = compute_residual(v, g, q);
    double rm = 0.0;
    for (int j = 2; j + 2 < P; ++j)
        for (std::size_t sp = 0; sp < S; ++sp) rm = std::max(rm, std::fabs(res.at(sp, j)));
    r.time_residual = rm / std::max(g.sup(), 1e-300);
    return r;
}

} // namespace fracheat
