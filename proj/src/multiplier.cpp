#include "fracheat/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fracheat/error.hpp"
#include "fracheat/frac_time.hpp"

namespace fracheat {

cplx branch_power(double xi0, double theta)
{
    if (xi0 == 0.0) return 0.0;
    const double mag = std::pow(std::fabs(xi0), theta);
    const double arg = 0.5 * M_PI * theta * (xi0 > 0 ? 1.0 : -1.0);
    return std::polar(mag, arg);
}

double space_symbol(const AnisotropyConfig &cfg, const std::vector<double> &xi)
{
    double lam = 0.0;
    int a = 0;
    for (const auto &g : cfg.groups) {
        double r2 = 0.0;
        for (int i = 0; i < g.dim; ++i, ++a) r2 += xi[a] * xi[a];
        if (r2 > 0) lam += std::pow(r2, 0.5 * g.sigma);
    }
    return lam;
}

namespace {

double group_norm(const AnisotropyConfig &cfg, const std::vector<double> &xi, int k)
{
    double r2 = 0.0;
    for (int a : cfg.axes_of_group(k)) r2 += xi[a] * xi[a];
    return std::sqrt(r2);
}

cplx integer_power(double xi0, int n)
{
    cplx z(0.0, xi0), r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

} // namespace

cplx eval(const SymbolDescriptor &sym, const std::vector<double> &xi, double xi0)
{
    if (sym.variant == SymbolVariant::custom) return sym.custom(xi, xi0);
    const auto &cfg = sym.cfg;
    const cplx lead = theta_is_integer(cfg.theta) ? integer_power(xi0, static_cast<int>(std::lround(cfg.theta)))
                                                  : branch_power(xi0, cfg.theta);
    const cplx den = lead + space_symbol(cfg, xi);
    if (sym.variant == SymbolVariant::denom) return den;
    bool origin = xi0 == 0.0;
    for (double v : xi) origin = origin && v == 0.0;
    if (origin || den == 0.0) throw Error(ErrorKind::OriginSingularity, "symbol denominator vanishes");
    switch (sym.variant) {
    case SymbolVariant::m0: return lead / den;
    case SymbolVariant::mi: {
        const double z = group_norm(cfg, xi, sym.index);
        return z > 0 ? std::pow(z, cfg.groups[sym.index].sigma) / den : 0.0;
    }
    case SymbolVariant::Gn: return integer_power(xi0, sym.index) / den;
    default: break;
    }
    return den;
}

std::vector<std::vector<double>> annulus_samples(int space_dim, double nu, int count, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(std::log(nu), -std::log(nu));
    std::vector<std::vector<double>> pts;
    while (static_cast<int>(pts.size()) < count) {
        std::vector<double> p(space_dim + 1);
        double r2 = 0.0;
        for (auto &v : p) {
            v = nd(rng);
            r2 += v * v;
        }
        const double r = std::exp(ud(rng)) / std::sqrt(r2);
        for (auto &v : p) v *= r;
        pts.push_back(p);
    }
    return pts;
}

namespace {

std::vector<double> dilate(const AnisotropyConfig &cfg, const std::vector<double> &pt, double lambda)
{
    std::vector<double> q(pt);
    int a = 0;
    for (const auto &g : cfg.groups)
        for (int i = 0; i < g.dim; ++i, ++a) q[a] *= std::pow(lambda, 1.0 / (g.sigma * cfg.alpha));
    q.back() *= std::pow(lambda, 1.0 / (cfg.theta * cfg.alpha));
    return q;
}

cplx eval_point(const SymbolDescriptor &sym, const std::vector<double> &pt)
{
    std::vector<double> xi(pt.begin(), pt.end() - 1);
    return eval(sym, xi, pt.back());
}

} // namespace

double dilation_invariance_check(const SymbolDescriptor &sym, const std::vector<std::vector<double>> &points,
                                 std::vector<double> lambdas)
{
    if (lambdas.empty())
        for (int e = -8; e <= 8; ++e) lambdas.push_back(std::ldexp(1.0, e));
    double dev = 0.0;
    for (const auto &pt : points) {
        const cplx base = eval_point(sym, pt);
        for (double lam : lambdas) dev = std::max(dev, std::abs(eval_point(sym, dilate(sym.cfg, pt, lam)) - base));
    }
    return dev;
}

double default_delta(const AnisotropyConfig &cfg)
{
    double m = cfg.theta;
    for (const auto &g : cfg.groups) m = std::min(m, g.sigma / g.dim);
    return std::clamp(0.5 * m, 1e-6, 0.4);
}

namespace {

struct MultiIndex {
    std::vector<int> order;  // per coordinate (space..., time)
};

void enumerate_group(const std::vector<int> &coords, int budget, std::size_t pos, std::vector<int> &cur,
                     std::vector<std::vector<int>> &out)
{
    if (pos == coords.size()) {
        out.push_back(cur);
        return;
    }
    for (int o = 0; o <= budget; ++o) {
        cur[coords[pos]] = o;
        enumerate_group(coords, budget - o, pos + 1, cur, out);
    }
    cur[coords[pos]] = 0;
}

std::vector<MultiIndex> multi_indices(const AnisotropyConfig &cfg, const std::vector<int> &orders)
{
    const int D = cfg.space_dim() + 1;
    std::vector<std::vector<int>> acc{std::vector<int>(D, 0)};
    // time group first, then the space groups
    std::vector<std::pair<std::vector<int>, int>> groups;
    groups.push_back({{D - 1}, orders[0]});
    for (std::size_t k = 0; k < cfg.groups.size(); ++k) groups.push_back({cfg.axes_of_group(k), orders[k + 1]});
    for (const auto &[coords, budget] : groups) {
        std::vector<std::vector<int>> next;
        for (const auto &base : acc) {
            std::vector<int> cur(base);
            std::vector<std::vector<int>> opts;
            enumerate_group(coords, budget, 0, cur, opts);
            for (auto &o : opts) {
                for (int c : coords) cur[c] = o[c];
                std::vector<int> merged(base);
                for (int c : coords) merged[c] = o[c];
                next.push_back(merged);
            }
        }
        acc = std::move(next);
    }
    std::vector<MultiIndex> out;
    for (auto &a : acc) out.push_back({a});
    return out;
}

struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;  // for unit step
};

Stencil central_stencil(int order)
{
    Stencil s;
    if (order == 0) {
        s.offsets = {0};
        s.weights = {1.0};
        return s;
    }
    const int half = (order + 1) / 2;
    std::vector<double> x;
    for (int j = -half; j <= half; ++j) {
        s.offsets.push_back(j);
        x.push_back(j);
    }
    s.weights = fd_weights(0.0, x, order);
    return s;
}

double mixed_derivative_abs(const std::function<cplx(const std::vector<double> &)> &f, const std::vector<double> &pt,
                            const std::vector<int> &order)
{
    const int D = static_cast<int>(pt.size());
    std::vector<Stencil> st(D);
    std::vector<double> h(D);
    double scale = 1.0;
    for (int c = 0; c < D; ++c) {
        st[c] = central_stencil(order[c]);
        h[c] = 1e-4 * std::fabs(pt[c]);
        scale *= std::pow(h[c], -order[c]);
    }
    cplx acc = 0.0;
    std::vector<std::size_t> idx(D, 0);
    std::vector<double> q(D);
    while (true) {
        double w = 1.0;
        for (int c = 0; c < D; ++c) {
            q[c] = pt[c] + st[c].offsets[idx[c]] * h[c];
            w *= st[c].weights[idx[c]];
        }
        acc += w * f(q);
        int c = D - 1;
        while (c >= 0 && ++idx[c] == st[c].offsets.size()) idx[c--] = 0;
        if (c < 0) break;
    }
    return std::abs(acc) * scale;
}

double annulus_mu(const SymbolDescriptor &sym, const std::vector<MultiIndex> &mis, double nu, int nodes, double p,
                  double lambda)
{
    const int D = sym.cfg.space_dim() + 1;
    const double R = 1.0 / nu;
    // clustered midpoint nodes x = +-R v^2 keep samples off the coordinate planes
    std::vector<double> xs, ws;
    for (int i = 0; i < nodes; ++i) {
        const double v = (i + 0.5) / nodes;
        xs.push_back(R * v * v);
        ws.push_back(2.0 * R * v / nodes);
        xs.push_back(-R * v * v);
        ws.push_back(2.0 * R * v / nodes);
    }
    auto f = [&](const std::vector<double> &q) { return eval_point(sym, dilate(sym.cfg, q, lambda)); };
    std::vector<double> sums(mis.size(), 0.0);
    std::vector<std::size_t> idx(D, 0);
    std::vector<double> pt(D);
    const std::size_t K = xs.size();
    while (true) {
        double r2 = 0.0, w = 1.0;
        for (int c = 0; c < D; ++c) {
            pt[c] = xs[idx[c]];
            r2 += pt[c] * pt[c];
            w *= ws[idx[c]];
        }
        const double r = std::sqrt(r2);
        if (r >= nu && r <= R) {
            for (std::size_t a = 0; a < mis.size(); ++a) {
                const double d = mixed_derivative_abs(f, pt, mis[a].order);
                if (!(d <= 1e12)) {
                    std::ostringstream os;
                    os << "difference quotient " << d << " at |xi| = " << r;
                    throw Error(ErrorKind::SingularDerivative, os.str());
                }
                sums[a] += w * std::pow(d, p);
            }
        }
        int c = D - 1;
        while (c >= 0 && ++idx[c] == K) idx[c--] = 0;
        if (c < 0) break;
    }
    double mu = 0.0;
    for (double s : sums) mu += std::pow(s, 1.0 / p);
    return mu;
}

} // namespace

Condition410Report condition_410_check(const SymbolDescriptor &sym, const AnnulusSpec &spec)
{
    Condition410Report rep;
    rep.delta = spec.delta > 0 ? spec.delta : default_delta(sym.cfg);
    rep.p = spec.p > 0 ? spec.p : 1.0 / (1.0 - rep.delta);
    if (!(rep.p > 1.0 && rep.p <= 2.0)) throw Error(ErrorKind::InvalidArgument, "p must lie in (1, 2]");
    std::vector<int> orders = spec.orders;
    if (orders.empty()) {
        orders.push_back(1);
        for (const auto &g : sym.cfg.groups) orders.push_back(g.dim);
    }
    if (orders.size() != sym.cfg.groups.size() + 1) throw Error(ErrorKind::InvalidArgument, "one order per group plus time");
    const auto mis = multi_indices(sym.cfg, orders);
    for (double lam : spec.lambdas) rep.mu_per_lambda.push_back(annulus_mu(sym, mis, spec.nu, spec.nodes, rep.p, lam));
    rep.mu = *std::max_element(rep.mu_per_lambda.begin(), rep.mu_per_lambda.end());
    double refined = 0.0;
    for (double lam : spec.lambdas) refined = std::max(refined, annulus_mu(sym, mis, spec.nu, 2 * spec.nodes, rep.p, lam));
    rep.mu_refined = refined;
    rep.drift = std::fabs(rep.mu_refined - rep.mu) / std::max(rep.mu, 1e-300);
    rep.stable = std::isfinite(rep.mu) && rep.drift <= 0.05;
    return rep;
}

bool vanishing_condition_check(const SymbolDescriptor &sym, int samples)
{
    const int N = sym.cfg.space_dim();
    std::vector<double> xi(N, 0.0);
    for (int i = 0; i < samples; ++i) {
        const double mag = std::pow(10.0, -3.0 + 6.0 * i / std::max(samples - 1, 1));
        for (double s : {1.0, -1.0})
            if (!(std::abs(eval(sym, xi, s * mag)) < 1e-12)) return false;
    }
    return true;
}

double denominator_distance(const AnisotropyConfig &cfg, double nu, int rays)
{
    SymbolDescriptor den{SymbolVariant::denom, cfg, 0, {}};
    const int N = cfg.space_dim();
    const int r = static_cast<int>(cfg.groups.size());
    // |denominator| depends only on the group norms and xi0; sample rays in that reduced space
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    auto point = [&](const std::vector<double> &dir, double rho) {
        std::vector<double> xi(N, 0.0);
        for (int k = 0; k < r; ++k) {
            const auto axes = cfg.axes_of_group(k);
            const double v = rho * dir[k] / std::sqrt(double(axes.size()));
            for (int a : axes) xi[a] = v;
        }
        return std::make_pair(xi, rho * dir[r]);
    };
    auto absden = [&](const std::vector<double> &dir, double rho) {
        auto [xi, x0] = point(dir, rho);
        return std::abs(eval(den, xi, x0));
    };
    double best = std::numeric_limits<double>::infinity();
    for (int ray = 0; ray < rays; ++ray) {
        std::vector<double> dir(r + 1);
        if (r == 1) {
            const double phi = -0.5 * M_PI + M_PI * (ray + 0.5) / rays;
            dir = {std::cos(phi), std::sin(phi)};
        } else {
            double n2 = 0.0;
            for (int k = 0; k < r; ++k) {
                dir[k] = ud(rng);
                n2 += dir[k] * dir[k];
            }
            dir[r] = 2.0 * ud(rng) - 1.0;
            n2 += dir[r] * dir[r];
            for (auto &v : dir) v /= std::sqrt(n2);
        }
        // coarse log scan along the ray, then golden-section refinement
        const int K = 200;
        double lbest = std::numeric_limits<double>::infinity();
        int kbest = 0;
        auto rho_at = [&](double s) { return nu * std::pow(1.0 / (nu * nu), s); };
        for (int k = 0; k <= K; ++k) {
            const double v = absden(dir, rho_at(double(k) / K));
            if (v < lbest) {
                lbest = v;
                kbest = k;
            }
        }
        double a = std::max(0.0, (kbest - 1.0) / K), b = std::min(1.0, (kbest + 1.0) / K);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 80; ++it) {
            const double c = b - gr * (b - a), d = a + gr * (b - a);
            if (absden(dir, rho_at(c)) < absden(dir, rho_at(d))) b = d;
            else a = c;
        }
        lbest = std::min(lbest, absden(dir, rho_at(0.5 * (a + b))));
        best = std::min(best, lbest);
    }
    return best;
}

SupportReport support_check(const SymbolDescriptor &sym, const SpaceGrid &space, const TimeGrid &time,
                            const SupportOptions &opt)
{
    const std::size_t S = space.size();
    const int P = time.points();
    Field w(space, time);
    if (opt.causal_window) {
        // smooth bump in t supported in [a, a + width] times a Gaussian in x
        w = sample(
            [&](const double *x, double t) {
                const double s = (t - opt.bump_start) / opt.bump_width;
                if (s <= 0.0 || s >= 1.0) return 0.0;
                double r2 = 0.0;
                for (int a = 0; a < space.dims(); ++a) r2 += x[a] * x[a];
                return std::exp(-1.0 / (s * (1.0 - s))) * std::exp(-r2);
            },
            space, time);
    }
    SpectralField sp;
    sp.space = space;
    sp.time = time;
    sp.spacetime = true;
    if (opt.causal_window) {
        sp = fft_spacetime(w);
    } else {
        // constant modal data is a lattice delta at the space-time origin
        sp.data.assign(S * P, cplx(1.0, 0.0));
    }
    std::vector<int> idx(space.dims());
    std::vector<double> xi(space.dims());
    for (int k = 0; k < P; ++k) {
        const double x0 = sp.time_freq(k);
        for (std::size_t s = 0; s < S; ++s) {
            space.unravel(s, idx.data());
            bool origin = x0 == 0.0;
            for (int a = 0; a < space.dims(); ++a) {
                xi[a] = space.freq(a, idx[a]);
                origin = origin && xi[a] == 0.0;
            }
            const cplx m = origin && sym.variant != SymbolVariant::custom ? cplx(0.0) : eval(sym, xi, x0);
            cplx &v = sp.data[k * S + s];
            v *= m;
            if (opt.reverse_time) v = std::conj(v);
        }
    }
    double mi = 0.0;
    const Field u = ifft_spacetime(sp, &mi);
    SupportReport rep;
    double neg = 0.0, zero = 0.0, tot = 0.0;
    const double tol = 1e-9 * time.dt();
    for (int j = 0; j < P; ++j) {
        const double t = time.t(j);
        double e = 0.0;
        for (std::size_t s = 0; s < S; ++s) e += u.at(s, j) * u.at(s, j);
        tot += e;
        if (std::fabs(t) < tol) zero += e;
        else if (t < 0) neg += e;
    }
    if (tot == 0.0) return rep;
    rep.leakage = (neg + 0.5 * zero) / tot;
    rep.origin_share = zero / tot;
    rep.boundary_case = rep.origin_share > 0.25;
    return rep;
}

} // namespace fracheat
