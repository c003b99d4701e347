#include "fracheat/frac_time.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "fracheat/config.hpp"
#include "fracheat/error.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat {

TimeSeries::TimeSeries(const TimeGrid &g, std::vector<double> values, std::vector<double> tr)
    : grid(g), v(std::move(values)), traces(std::move(tr))
{
    if (static_cast<int>(v.size()) != grid.points()) throw Error(ErrorKind::ShapeMismatch, "series length");
}

std::vector<double> fd_weights(double z, const std::vector<double> &x, int order)
{
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) w[i] = c[i][order];
    return w;
}

double node_derivative(const std::vector<double> &v, double dt, int j, int k, int width)
{
    const int last = static_cast<int>(v.size()) - 1;
    if (width > last + 1) throw Error(ErrorKind::TooFewPoints, "stencil wider than series");
    int start = std::clamp(j - width / 2, 0, last + 1 - width);
    std::vector<double> x(width);
    for (int i = 0; i < width; ++i) x[i] = start + i;
    const auto w = fd_weights(static_cast<double>(j), x, k);
    double s = 0.0;
    for (int i = 0; i < width; ++i) s += w[i] * v[start + i];
    return s / std::pow(dt, k);
}

std::vector<double> discrete_derivative(const std::vector<double> &v, double dt)
{
    const int M = static_cast<int>(v.size()) - 1;
    if (M < 2) throw Error(ErrorKind::TooFewPoints, "need at least three samples");
    std::vector<double> d(M + 1);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
    for (int j = 1; j < M; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2.0 * dt);
    d[M] = (3.0 * v[M] - 4.0 * v[M - 1] + v[M - 2]) / (2.0 * dt);
    return d;
}

std::vector<double> l1_weights(double a, int M)
{
    std::vector<double> b(std::max(M, 1));
    for (int l = 0; l < static_cast<int>(b.size()); ++l) b[l] = std::pow(l + 1.0, 1.0 - a) - std::pow(double(l), 1.0 - a);
    return b;
}

namespace {

// L1 rule of order a in (0,1) applied from node j0 onwards.
std::vector<double> l1_apply(double a, const std::vector<double> &y, double dt, int j0 = 0)
{
    const int M = static_cast<int>(y.size()) - 1;
    const auto b = l1_weights(a, M);
    const double c = std::pow(dt, -a) / std::tgamma(2.0 - a);
    std::vector<double> out(M + 1, 0.0);
    std::vector<double> dy(M, 0.0);
    for (int k = j0; k < M; ++k) dy[k] = y[k + 1] - y[k];
    for (int j = j0 + 1; j <= M; ++j) {
        double s = 0.0;
        for (int k = j0; k < j; ++k) s += b[j - 1 - k] * dy[k];
        out[j] = c * s;
    }
    return out;
}

} // namespace

TimeSeries caputo(double theta, const TimeSeries &g)
{
    if (theta_is_integer(theta)) throw Error(ErrorKind::IntegralOrder, "integer order: use plain differencing");
    if (!(theta > 0)) throw Error(ErrorKind::InvalidArgument, "theta must be positive");
    const int n = ceil_order(theta);
    if (g.grid.M < n + 1) throw Error(ErrorKind::TooFewPoints, "grid too coarse for this order");
    std::vector<double> y = g.v;
    for (int level = 1; level <= n - 1; ++level) {
        y = discrete_derivative(y, g.grid.dt());
        if (static_cast<int>(g.traces.size()) > level) y[0] = g.traces[level];
    }
    return TimeSeries(g.grid, l1_apply(theta - (n - 1), y, g.grid.dt()));
}

TimeSeries riemann_liouville(double theta, const TimeSeries &g)
{
    const int n = ceil_order(theta);
    if (static_cast<int>(g.traces.size()) < n) {
        std::ostringstream os;
        os << "need traces g^(k)(0) for k < " << n;
        throw Error(ErrorKind::MissingTraces, os.str());
    }
    TimeSeries out = caputo(theta, g);
    for (int j = 0; j <= g.grid.M; ++j) {
        const double t = g.grid.t(j) - g.grid.start;
        double corr = 0.0;
        for (int k = 0; k < n; ++k) {
            if (g.traces[k] == 0.0) continue;
            if (t == 0.0) {
                if (k - theta < 0) corr += std::copysign(std::numeric_limits<double>::infinity(), g.traces[k]);
                continue;
            }
            corr += g.traces[k] * std::pow(t, k - theta) / std::tgamma(k + 1.0 - theta);
        }
        out.v[j] += corr;
    }
    return out;
}

TimeSeries frac_integral(double theta, const TimeSeries &h)
{
    if (!(theta > 0)) throw Error(ErrorKind::InvalidArgument, "theta must be positive");
    const int M = h.grid.M;
    const double dt = h.grid.dt();
    const double c = std::pow(dt, theta) / std::tgamma(theta + 2.0);
    std::vector<double> pw(M + 2);
    for (int l = 0; l <= M + 1; ++l) pw[l] = std::pow(double(l), theta + 1.0);
    std::vector<double> out(M + 1, 0.0);
    for (int j = 1; j <= M; ++j) {
        double s = (pw[j - 1] - (j - 1.0 - theta) * std::pow(double(j), theta)) * h.v[0];
        for (int k = 1; k < j; ++k) s += (pw[j - k + 1] - 2.0 * pw[j - k] + pw[j - k - 1]) * h.v[k];
        s += h.v[j];
        out[j] = c * s;
    }
    return TimeSeries(h.grid, out);
}

double marchaud_constant(double theta, int m)
{
    if (!(m > theta)) throw Error(ErrorKind::InvalidArgument, "difference order must exceed theta");
    static std::mutex mu;
    static std::map<std::pair<double, int>, double> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(theta, m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    struct P {
        double theta;
        int m;
    } prm{theta, m};
    gsl_function F;
    F.function = [](double x, void *vp) {
        auto *p = static_cast<P *>(vp);
        return std::pow(-std::expm1(-x), p->m) * std::pow(x, -1.0 - p->theta);
    };
    F.params = &prm;
    gsl_integration_workspace *w = gsl_integration_workspace_alloc(2000);
    double result = 0.0, err = 0.0;
    gsl_set_error_handler_off();
    // split at 1: algebraic singularity at the origin, power tail at infinity
    double r1 = 0.0, e1 = 0.0, r2 = 0.0, e2 = 0.0;
    gsl_integration_qags(&F, 0.0, 1.0, 0.0, 1e-13, 2000, w, &r1, &e1);
    gsl_integration_qagiu(&F, 1.0, 0.0, 1e-13, 2000, w, &r2, &e2);
    gsl_integration_workspace_free(w);
    result = r1 + r2;
    err = e1 + e2;
    (void)err;
    const double c = 1.0 / result;
    cache[key] = c;
    return c;
}

namespace {

// cubic Lagrange interpolation of the zero-extended series at fractional index p <= M
double interp_zero_ext(const std::vector<double> &v, double p)
{
    const int M = static_cast<int>(v.size()) - 1;
    if (p <= -1.0) return 0.0;
    int i0 = static_cast<int>(std::floor(p)) - 1;
    if (i0 + 3 > M) i0 = M - 3;
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int ia = i0 + a;
        const double va = ia < 0 ? 0.0 : v[ia];
        if (va == 0.0) continue;
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (p - (i0 + b)) / double(a - b);
        s += w * va;
    }
    return s;
}

} // namespace

TimeSeries marchaud(const MarchaudParams &p, const TimeSeries &g)
{
    const double theta = p.theta;
    const int m = p.m;
    if (!(m > theta)) throw Error(ErrorKind::InvalidArgument, "difference order must exceed theta");
    const int M = g.grid.M;
    const double dt = g.grid.dt();
    const int q_max = static_cast<int>(std::floor(theta));
    double scale = 0.0;
    for (double x : g.v) scale = std::max(scale, std::fabs(x));
    for (int k = 0; k <= q_max; ++k) {
        double tr;
        if (static_cast<int>(g.traces.size()) > k) tr = g.traces[k];
        else tr = node_derivative(g.v, dt, 0, k, k + 3) * std::pow(g.grid.stop - g.grid.start, k);
        if (std::fabs(tr) > 1e-8 * std::max(scale, 1e-300)) {
            std::ostringstream os;
            os << "trace of order " << k << " is " << tr;
            throw Error(ErrorKind::NonzeroTraces, os.str());
        }
    }
    const double C = marchaud_constant(theta, m);
    const int per = p.nodes_per_step > 0 ? p.nodes_per_step : m;
    const double h = dt / per;
    std::vector<double> binom(m + 1, 1.0);
    for (int i = 1; i <= m; ++i) binom[i] = binom[i - 1] * (m - i + 1) / i;

    std::vector<double> out(M + 1, 0.0);
    parallel_for(M, [&](std::size_t jj) {
        const int j = static_cast<int>(jj) + 1;
        const int nq = j * per;
        auto diff = [&](int q) {
            double s = g.v[j];
            for (int i = 1; i <= m; ++i) {
                const double pos = j - double(i) * q / per;
                const double val = (i * q) % per == 0 ? (pos < 0 ? 0.0 : g.v[static_cast<int>(std::lround(pos))])
                                                      : interp_zero_ext(g.v, pos);
                s += ((i % 2) ? -1.0 : 1.0) * binom[i] * val;
            }
            return s;
        };
        // first cell: leading behaviour of the m-th difference is tau^m
        double prev = diff(1);
        double acc = prev * std::pow(h, -theta) / (m - theta);
        for (int q = 1; q < nq; ++q) {
            const double next = diff(q + 1);
            const double a = q * h, b = (q + 1) * h;
            // exact integral of the linear interpolant against tau^{-1-theta}
            const double I0 = (std::pow(a, -theta) - std::pow(b, -theta)) / theta;
            const double I1 = (std::pow(b, 1.0 - theta) - std::pow(a, 1.0 - theta)) / (1.0 - theta);
            const double slope = (next - prev) / h;
            acc += (prev - slope * a) * I0 + slope * I1;
            prev = next;
        }
        // beyond tau = t only g(t) survives
        const double t = j * dt;
        acc += g.v[j] * std::pow(t, -theta) / theta;
        out[j] = C * acc;
    });
    return TimeSeries(g.grid, out);
}

TimeSeries caputo_shifted(double theta, const TimeSeries &g, double origin)
{
    if (!(theta > 0 && theta < 1)) throw Error(ErrorKind::RegimeUnsupported, "shifted Caputo needs theta in (0,1)");
    const double pos = (origin - g.grid.start) / g.grid.dt();
    const long j0 = std::lround(pos);
    if (j0 < 0 || j0 > g.grid.M || std::fabs(pos - j0) > 1e-9) {
        std::ostringstream os;
        os << "origin " << origin << " is not a node of the grid";
        throw Error(ErrorKind::OriginOutsideGrid, os.str());
    }
    return TimeSeries(g.grid, l1_apply(theta, g.v, g.grid.dt(), static_cast<int>(j0)));
}

TimeSeries taylor_extend(const TimeSeries &g, int q, double origin, double new_stop)
{
    const double dt = g.grid.dt();
    const double pos = (origin - g.grid.start) / dt;
    const long j0 = std::lround(pos);
    if (j0 < 0 || j0 > g.grid.M || std::fabs(pos - j0) > 1e-9)
        throw Error(ErrorKind::OriginOutsideGrid, "Taylor origin is not a grid node");
    if (q < 0 || j0 < q + 1) throw Error(ErrorKind::TooFewPoints, "not enough history for the Taylor order");
    std::vector<double> head(g.v.begin(), g.v.begin() + j0 + 1);
    std::vector<double> d(q + 1);
    for (int k = 0; k <= q; ++k) d[k] = node_derivative(head, dt, static_cast<int>(j0), k, k + 2 + (k > 0));
    d[0] = head.back();
    const int M2 = static_cast<int>(std::lround((new_stop - g.grid.start) / dt));
    TimeGrid grid{g.grid.start, g.grid.start + M2 * dt, M2};
    std::vector<double> v(M2 + 1);
    for (int j = 0; j <= M2; ++j) {
        if (j <= j0) {
            v[j] = g.v[j];
            continue;
        }
        const double s = (j - j0) * dt;
        double acc = 0.0, term = 1.0;
        for (int k = 0; k <= q; ++k) {
            acc += d[k] * term;
            term *= s / (k + 1);
        }
        v[j] = acc;
    }
    return TimeSeries(grid, v, g.traces);
}

double vanishing_at_zero_check(double theta, const TimeSeries &g) { return std::fabs(caputo(theta, g).v[1]); }

std::vector<TimeSeries> caputo_batch(double theta, const std::vector<TimeSeries> &gs)
{
    std::vector<TimeSeries> out(gs.size());
    parallel_for(gs.size(), [&](std::size_t i) { out[i] = caputo(theta, gs[i]); });
    return out;
}

} // namespace fracheat
