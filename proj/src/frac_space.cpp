#include "fracheat/frac_space.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "fracheat/error.hpp"

namespace fracheat {

double group_frequency_norm(const SpaceGrid &g, int k, std::size_t s)
{
    std::size_t rest = s;
    double r2 = 0.0;
    for (int a = g.dims() - 1; a >= 0; --a) {
        const int i = static_cast<int>(rest % g.n[a]);
        rest /= g.n[a];
        if (g.group[a] != k) continue;
        const double z = g.freq(a, i);
        r2 += z * z;
    }
    return std::sqrt(r2);
}

double operator_symbol(const SpaceGrid &g, const std::vector<OperatorTerm> &terms, std::size_t s)
{
    double v = 0.0;
    for (const auto &t : terms) {
        const double z = group_frequency_norm(g, t.group, s);
        if (z > 0) v += std::pow(z, t.power);
    }
    return v;
}

namespace {

Field apply_modal(const Field &u, const std::vector<cplx> &factor, const char *what)
{
    auto sp = fft_space(u);
    const std::size_t S = u.space.size();
    for (int j = 0; j < u.time.points(); ++j)
        for (std::size_t s = 0; s < S; ++s) sp.data[j * S + s] *= factor[s];
    double mi = 0.0;
    Field out = ifft_space(sp, &mi);
    const double sup = out.sup();
    if (!(mi <= 1e-12 * std::max(sup, 1.0))) {
        std::ostringstream os;
        os << what << ": imaginary residue " << mi;
        throw Error(ErrorKind::NonRealOutput, os.str());
    }
    return out;
}

std::vector<cplx> symbol_factor(const SpaceGrid &g, const std::vector<OperatorTerm> &terms)
{
    std::vector<cplx> f(g.size());
    for (std::size_t s = 0; s < f.size(); ++s) f[s] = operator_symbol(g, terms, s);
    return f;
}

// frequencies and coefficients of the difference symbol as a trigonometric sum
std::vector<std::pair<int, double>> symbol_terms(int m, bool centered)
{
    std::vector<std::pair<int, double>> out;
    auto binom = [](int n, int k) {
        double b = 1.0;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    };
    if (!centered) {
        for (int j = 0; j <= m; ++j) out.emplace_back(j, binom(m, j) * (((m - j) % 2) ? -1.0 : 1.0));
    } else {
        const int h = m / 2;
        for (int l = 0; l <= 2 * h; ++l)
            out.emplace_back(l - h, binom(2 * h, l) * ((h + l) % 2 ? -1.0 : 1.0));
    }
    return out;
}

cplx difference_symbol(double q, int m, bool centered)
{
    const double s = std::sin(0.5 * q);
    if (centered) return std::pow(4.0 * s * s, m / 2);
    return std::pow(cplx(0.0, 2.0 * s) * std::exp(cplx(0.0, 0.5 * q)), m);
}

// integral over q in (0, inf) of symbol(q) q^{-1-sigma}, inner part [0, q0) dropped
cplx radial_integral(double sigma, int m, bool centered, const HypersingularParams &p)
{
    static std::mutex mu;
    static std::map<std::tuple<double, int, bool, double, double, int>, cplx> cache;
    const auto key = std::make_tuple(sigma, m, centered, p.inner_cutoff, p.outer_cutoff, p.log_panels);
    {
        std::lock_guard<std::mutex> lk(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto *gl16 = gsl_integration_glfixed_table_alloc(16);
    auto *gl8 = gsl_integration_glfixed_table_alloc(8);
    cplx acc = 0.0;
    const double q0 = p.inner_cutoff, q1 = 2.0 * M_PI, Q = p.outer_cutoff;
    for (int i = 0; i < p.log_panels; ++i) {
        const double a = q0 * std::pow(q1 / q0, double(i) / p.log_panels);
        const double b = q0 * std::pow(q1 / q0, double(i + 1) / p.log_panels);
        for (int k = 0; k < 16; ++k) {
            double x, w;
            gsl_integration_glfixed_point(a, b, k, &x, &w, gl16);
            acc += w * difference_symbol(x, m, centered) * std::pow(x, -1.0 - sigma);
        }
    }
    const double panel = 0.5 * M_PI;
    const int npan = static_cast<int>(std::ceil((Q - q1) / panel));
    for (int i = 0; i < npan; ++i) {
        const double a = q1 + i * panel, b = std::min(Q, a + panel);
        for (int k = 0; k < 8; ++k) {
            double x, w;
            gsl_integration_glfixed_point(a, b, k, &x, &w, gl8);
            acc += w * difference_symbol(x, m, centered) * std::pow(x, -1.0 - sigma);
        }
    }
    const double Qend = q1 + npan * panel > Q ? Q : q1 + npan * panel;
    const double pw = 1.0 + sigma;
    for (const auto &[freq, c] : symbol_terms(m, centered)) {
        if (freq == 0) {
            acc += c * std::pow(Qend, -sigma) / sigma;
            continue;
        }
        const double a = freq;
        const cplx iaQ(0.0, a * Qend);
        const cplx series = 1.0 + pw / iaQ + pw * (pw + 1.0) / (iaQ * iaQ) + pw * (pw + 1.0) * (pw + 2.0) / (iaQ * iaQ * iaQ);
        acc += c * std::exp(iaQ) * std::pow(Qend, -pw) * cplx(0.0, 1.0 / a) * series;
    }
    gsl_integration_glfixed_table_free(gl16);
    gsl_integration_glfixed_table_free(gl8);
    std::lock_guard<std::mutex> lk(mu);
    cache[key] = acc;
    return acc;
}

std::vector<std::vector<double>> directions(int dim, int count)
{
    std::vector<std::vector<double>> d;
    if (dim == 1) return {{1.0}, {-1.0}};
    if (dim == 2) {
        for (int j = 0; j < count; ++j) {
            const double phi = (j + 0.5) * 2.0 * M_PI / count;
            d.push_back({std::cos(phi), std::sin(phi)});
        }
        return d;
    }
    if (dim == 3) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < count; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / count;
            const double r = std::sqrt(1.0 - z * z);
            d.push_back({r * std::cos(golden * j), r * std::sin(golden * j), z});
            d.push_back({-r * std::cos(golden * j), -r * std::sin(golden * j), -z});
        }
        return d;
    }
    throw Error(ErrorKind::InvalidArgument, "hypersingular backend supports groups of dimension <= 3");
}

double sphere_area(int dim)
{
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

void check_params(const HypersingularParams &p)
{
    if (!(p.sigma > 0)) throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
    if (!(p.m > p.sigma)) throw Error(ErrorKind::InvalidArgument, "difference order must exceed sigma");
    if (p.centered && p.m % 2) throw Error(ErrorKind::InvalidArgument, "centered differences need even order");
}

} // namespace

Field frac_laplacian_spectral(const Field &u, int k, double sigma)
{
    if (!(sigma > 0)) throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
    return apply_modal(u, symbol_factor(u.space, {{k, sigma}}), "spectral fractional Laplacian");
}

std::vector<cplx> hypersingular_modal_factor(const SpaceGrid &g, const HypersingularParams &p)
{
    check_params(p);
    std::vector<int> axes;
    for (int a = 0; a < g.dims(); ++a)
        if (g.group[a] == p.group) axes.push_back(a);
    if (axes.empty()) throw Error(ErrorKind::IndexOutOfRange, "group has no axes");
    const int dim = static_cast<int>(axes.size());
    const cplx Rp = radial_integral(p.sigma, p.m, p.centered, p);
    const auto dirs = directions(dim, p.angular_nodes);
    const double w = dim == 1 ? 1.0 : sphere_area(dim) / dirs.size();
    std::vector<cplx> f(g.size());
    std::vector<int> idx(g.dims());
    for (std::size_t s = 0; s < f.size(); ++s) {
        g.unravel(s, idx.data());
        std::vector<double> z(dim);
        bool zero = true;
        for (int i = 0; i < dim; ++i) {
            z[i] = g.freq(axes[i], idx[axes[i]]);
            zero = zero && z[i] == 0.0;
        }
        if (zero) continue;
        cplx acc = 0.0;
        for (const auto &e : dirs) {
            double sdot = 0.0;
            for (int i = 0; i < dim; ++i) sdot += z[i] * e[i];
            if (sdot == 0.0) continue;
            acc += std::pow(std::fabs(sdot), p.sigma) * (sdot > 0 ? Rp : std::conj(Rp));
        }
        f[s] = w * acc;
    }
    return f;
}

Field frac_laplacian_hypersingular(const Field &u, const HypersingularParams &p)
{
    check_params(p);
    if (!p.periodic_input) {
        const double sup = u.sup();
        double edge = 0.0;
        std::vector<int> idx(u.space.dims());
        for (int j = 0; j < u.time.points(); ++j)
            for (std::size_t s = 0; s < u.space.size(); ++s) {
                u.space.unravel(s, idx.data());
                bool on_edge = false;
                for (int a = 0; a < u.space.dims(); ++a) on_edge = on_edge || idx[a] == 0;
                if (on_edge) edge = std::max(edge, std::fabs(u.at(s, j)));
            }
        if (sup > 0 && edge > 1e-8 * sup) {
            std::ostringstream os;
            os << "field reaches " << edge / sup << " of its sup on the box boundary";
            throw Error(ErrorKind::BoundaryContamination, os.str());
        }
    }
    int dim = 0;
    for (int a = 0; a < u.space.dims(); ++a) dim += u.space.group[a] == p.group;
    const double C = calibrate_constant(dim, p.sigma, p.m, p.centered);
    auto f = hypersingular_modal_factor(u.space, p);
    for (auto &v : f) v *= C;
    return apply_modal(u, f, "hypersingular fractional Laplacian");
}

Calibration calibrate(int dim, double sigma, int m, bool centered)
{
    HypersingularParams p;
    p.sigma = sigma;
    p.m = m;
    p.centered = centered;
    check_params(p);
    static std::mutex mu;
    static std::map<std::tuple<int, double, int, bool>, Calibration> cache;
    const auto key = std::make_tuple(dim, sigma, m, centered);
    {
        std::lock_guard<std::mutex> lk(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    // reference Gaussian of unit width on a box of side 16
    SpaceGrid g;
    const int n = dim == 1 ? 128 : (dim == 2 ? 48 : 16);
    for (int a = 0; a < dim; ++a) {
        g.n.push_back(n);
        g.L.push_back(16.0);
        g.group.push_back(0);
    }
    Field ref = sample(
        [dim](const double *x, double) {
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
            return std::exp(-0.5 * r2);
        },
        g, TimeGrid{0.0, 0.0, 0});
    const auto raw_factor = hypersingular_modal_factor(g, p);
    Field spec = apply_modal(ref, symbol_factor(g, {{0, sigma}}), "calibration");
    Field raw = apply_modal(ref, raw_factor, "calibration");
    double sr = 0.0, rr = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < raw.data.size(); ++i) {
        sr += spec.data[i] * raw.data[i];
        rr += raw.data[i] * raw.data[i];
        ss += spec.data[i] * spec.data[i];
    }
    if (ss < 1e-20 || rr < 1e-20 * ss) {
        std::ostringstream os;
        os << "difference kernel of order " << m << " degenerates for sigma=" << sigma;
        throw Error(ErrorKind::IllConditioned, os.str());
    }
    Calibration c;
    c.constant = sr / rr;
    double res = 0.0;
    for (std::size_t i = 0; i < raw.data.size(); ++i) {
        const double d = spec.data[i] - c.constant * raw.data[i];
        res += d * d;
    }
    c.residual = std::sqrt(res / ss);
    std::lock_guard<std::mutex> lk(mu);
    cache[key] = c;
    return c;
}

double calibrate_constant(int dim, double sigma, int m, bool centered)
{
    return calibrate(dim, sigma, m, centered).constant;
}

Field apply_operator(const Field &u, const OperatorSpec &spec)
{
    for (const auto &t : spec.terms)
        if (!(t.power > 0)) throw Error(ErrorKind::InvalidArgument, "operator powers must be positive");
    if (spec.backend == Backend::spectral)
        return apply_modal(u, symbol_factor(u.space, spec.terms), "spatial operator");
    Field out(u.space, u.time);
    out.data.assign(u.data.size(), 0.0);
    for (const auto &t : spec.terms) {
        HypersingularParams p;
        p.group = t.group;
        p.sigma = t.power;
        p.m = static_cast<int>(std::floor(t.power)) + 1;
        if (near_integer(t.power)) {
            p.centered = true;
            p.m += p.m % 2;
        }
        p.periodic_input = true;
        const Field part = frac_laplacian_hypersingular(u, p);
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += part.data[i];
    }
    return out;
}

OperatorSpec space_operator(const AnisotropyConfig &cfg)
{
    OperatorSpec s;
    for (std::size_t k = 0; k < cfg.groups.size(); ++k) s.terms.push_back({static_cast<int>(k), cfg.groups[k].sigma});
    return s;
}

OperatorSpec lift_operator(const AnisotropyConfig &cfg)
{
    OperatorSpec s;
    for (std::size_t k = 0; k < cfg.groups.size(); ++k)
        s.terms.push_back({static_cast<int>(k), cfg.groups[k].sigma / cfg.theta});
    return s;
}

DecayFit schwartz_decay_check(const Field &u, double sigma)
{
    if (u.space.dims() != 1) throw Error(ErrorKind::InsufficientDecayRange, "decay fit is one-dimensional");
    const int n = u.space.n[0];
    // rapid decay in frequency: the outer eighth of the spectrum must carry no energy
    auto sp = fft_space(u);
    double tot = 0.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = std::norm(sp.data[i]);
        tot += e;
        const int k = i < n / 2 ? i : n - i;
        if (k > 3 * n / 8) hi += e;
    }
    if (tot == 0.0 || hi > 1e-24 * tot)
        throw Error(ErrorKind::InsufficientDecayRange, "input spectrum is not rapidly decaying");
    const Field out = frac_laplacian_spectral(u, u.space.group[0], sigma);
    const double usup = u.sup(), osup = out.sup();
    double x_lo = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = std::fabs(u.space.coord(0, i));
        if (std::fabs(u.at(i, 0)) > 1e-12 * usup) x_lo = std::max(x_lo, x);
    }
    x_lo *= 1.5;
    // periodic images add ~2 zeta(1+sigma) (x/L)^{1+sigma} relative error; keep x well inside
    const double x_hi = u.space.L[0] / 64.0;
    if (x_hi < 2.0 * x_lo) throw Error(ErrorKind::InsufficientDecayRange, "box too narrow for a far-field window");
    std::vector<double> lx, ly;
    for (int i = 0; i < n; ++i) {
        const double x = u.space.coord(0, i);
        if (x < x_lo || x > x_hi) continue;
        const double v = std::fabs(out.at(i, 0));
        if (v < 1e-12 * osup) continue;
        lx.push_back(std::log(x));
        ly.push_back(std::log(v));
    }
    if (lx.size() < 8) throw Error(ErrorKind::InsufficientDecayRange, "too few far-field samples above the noise floor");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    DecayFit f;
    f.slope = sxy / sxx;
    double r = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double d = ly[i] - (my + f.slope * (lx[i] - mx));
        r += d * d;
    }
    f.residual = std::sqrt(r / lx.size());
    f.x_lo = x_lo;
    f.x_hi = x_hi;
    f.points = static_cast<int>(lx.size());
    return f;
}

} // namespace fracheat
