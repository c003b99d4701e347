#include "fracheat/holder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracheat/error.hpp"
#include "fracheat/frac_time.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat {

namespace {

std::vector<double> binomial_signs(int k)
{
    // coefficients of the forward difference: sum_i (-1)^{k-i} C(k,i) u(x + i h)
    std::vector<double> c(k + 1, 1.0);
    for (int i = 1; i <= k; ++i) c[i] = c[i - 1] * (k - i + 1) / i;
    for (int i = 0; i <= k; ++i)
        if ((k - i) % 2) c[i] = -c[i];
    return c;
}

// Move (p, j) by `off` lattice cells along the axis; false when time leaves the grid.
bool shift(const Field &u, int axis, std::size_t &p, int &j, long off)
{
    if (axis == kTimeAxis) {
        const long jj = j + off;
        if (jj < 0 || jj > u.time.M) return false;
        j = static_cast<int>(jj);
        return true;
    }
    const std::size_t st = u.space.stride(axis);
    const long n = u.space.n[axis];
    const long i = static_cast<long>((p / st) % n);
    const long ni = ((i + off) % n + n) % n;
    p = p + (ni - i) * st;
    return true;
}

double step_length(const Field &u, int axis, int s)
{
    return axis == kTimeAxis ? s * u.time.dt() : s * u.space.dx(axis);
}

int axis_extent(const Field &u, int axis) { return axis == kTimeAxis ? u.time.M : u.space.n[axis]; }

bool in_window(const Field &u, int j, const TimeWindow &w)
{
    const double t = u.time.t(j);
    const double tol = 1e-9 * std::max(u.time.dt(), 1e-300);
    return t >= w.lo - tol && t <= w.hi + tol;
}

std::vector<int> default_ladder(const Field &u, int axis, int k)
{
    std::vector<int> st;
    const int ext = axis_extent(u, axis);
    for (int s = 1; axis == kTimeAxis ? k * s <= ext : 2 * s <= ext; s *= 2) st.push_back(s);
    return st;
}

std::vector<int> selected_axes(const Field &u, const SeminormSpec &spec)
{
    if (spec.group < 0) return {spec.axis};
    std::vector<int> ax;
    for (int a = 0; a < u.space.dims(); ++a)
        if (u.space.group.empty() ? spec.group == 0 : u.space.group[a] == spec.group) ax.push_back(a);
    if (ax.empty()) throw Error(ErrorKind::IndexOutOfRange, "group has no axes");
    return ax;
}

// max over chunks of base points; max is order-free so the result is thread-independent
template <class F> double chunked_max(std::size_t count, F &&body)
{
    const std::size_t chunks = std::min<std::size_t>(count, 256);
    if (chunks == 0) return 0.0;
    std::vector<double> part(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
        double m = 0.0;
        for (std::size_t i = c * count / chunks; i < (c + 1) * count / chunks; ++i) m = std::max(m, body(i));
        part[c] = m;
    });
    return *std::max_element(part.begin(), part.end());
}

std::size_t auto_stride(std::size_t total, std::size_t stride)
{
    if (stride > 0) return stride;
    return std::max<std::size_t>(1, total / 4096);
}

} // namespace

double lattice_difference(const Field &u, int axis, std::size_t p, int j, int k, int s)
{
    const auto c = binomial_signs(k);
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) {
        std::size_t q = p;
        int jj = j;
        if (!shift(u, axis, q, jj, static_cast<long>(i) * s))
            throw Error(ErrorKind::StepExceedsGrid, "difference leaves the time grid");
        acc += c[i] * u.at(q, jj);
    }
    return acc;
}

double seminorm(const Field &u, const SeminormSpec &spec)
{
    if (!(spec.k > spec.l) || spec.l < 0) throw Error(ErrorKind::InvalidArgument, "need k > l >= 0");
    const auto axes = selected_axes(u, spec);
    std::vector<std::vector<int>> ladders;
    for (int a : axes) {
        if (spec.steps.empty()) {
            ladders.push_back(default_ladder(u, a, spec.k));
            continue;
        }
        const int ext = axis_extent(u, a);
        for (int s : spec.steps)
            if (s <= 0 || (a == kTimeAxis ? spec.k * s > ext : s >= ext)) {
                std::ostringstream os;
                os << "step " << s << " with order " << spec.k << " exceeds extent " << ext;
                throw Error(ErrorKind::StepExceedsGrid, os.str());
            }
        ladders.push_back(spec.steps);
    }
    const std::size_t S = u.slice_size();
    const std::size_t total = S * u.time.points();
    const std::size_t stride = auto_stride(total, spec.stride);
    const std::size_t count = (total + stride - 1) / stride;
    const auto c = binomial_signs(spec.k);
    return chunked_max(count, [&](std::size_t b) {
        const std::size_t q = b * stride;
        const int j = static_cast<int>(q / S);
        const std::size_t p = q % S;
        if (!in_window(u, j, spec.window)) return 0.0;
        double best = 0.0;
        for (std::size_t ai = 0; ai < axes.size(); ++ai) {
            const int a = axes[ai];
            for (int s : ladders[ai]) {
                if (a == kTimeAxis && (j + spec.k * s > u.time.M || !in_window(u, j + spec.k * s, spec.window)))
                    continue;
                double acc = 0.0;
                for (int i = 0; i <= spec.k; ++i) {
                    std::size_t pp = p;
                    int jj = j;
                    shift(u, a, pp, jj, static_cast<long>(i) * s);
                    acc += c[i] * u.at(pp, jj);
                }
                best = std::max(best, std::fabs(acc) / std::pow(step_length(u, a, s), spec.l));
            }
        }
        return best;
    });
}

HolderReport full_norm(const Field &u, const AnisotropyConfig &cfg, NormKind kind, bool fit_exponents)
{
    HolderReport r;
    r.kind = kind;
    r.sup_norm = u.sup();
    r.total = r.sup_norm;
    const double scale = kind == NormKind::solution ? 1.0 + cfg.alpha : cfg.alpha;
    for (std::size_t k = 0; k < cfg.groups.size(); ++k) {
        SeminormSpec sp;
        sp.group = static_cast<int>(k);
        sp.l = cfg.groups[k].sigma * scale;
        sp.k = static_cast<int>(std::floor(sp.l)) + 1;
        r.space_exponents.push_back(sp.l);
        r.space_seminorms.push_back(u.space.n[cfg.axes_of_group(k)[0]] > 1 ? seminorm(u, sp) : 0.0);
        r.total += r.space_seminorms.back();
    }
    r.time_exponent = cfg.theta * scale;
    if (u.time.M > 0) {
        SeminormSpec sp;
        sp.axis = kTimeAxis;
        sp.l = r.time_exponent;
        sp.k = static_cast<int>(std::floor(sp.l)) + 1;
        if (sp.k <= u.time.M) r.time_seminorm = seminorm(u, sp);
    }
    r.total += r.time_seminorm;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.fitted_time = nan;
    if (fit_exponents) {
        for (int a = 0; a < u.space.dims(); ++a) {
            const int g = cfg.group_of_axis(a);
            const int k = static_cast<int>(std::floor(r.space_exponents[g])) + 1;
            try {
                r.fitted_space.push_back(exponent_scan(u, a, k).exponent);
            } catch (const Error &) {
                r.fitted_space.push_back(nan);
            }
        }
        try {
            r.fitted_time = exponent_scan(u, kTimeAxis, static_cast<int>(std::floor(r.time_exponent)) + 1).exponent;
        } catch (const Error &) {
        }
    }
    return r;
}

ExponentFit exponent_scan(const Field &u, int axis, int k, TimeWindow window)
{
    if (axis == kTimeAxis && !std::isfinite(window.lo) && !std::isfinite(window.hi)) {
        window.lo = u.time.start;
        window.hi = u.time.start + 0.125 * (u.time.stop - u.time.start);
    }
    int first = 0, last = u.time.M;
    while (first <= u.time.M && !in_window(u, first, window)) ++first;
    while (last >= 0 && !in_window(u, last, window)) --last;
    if (first > last) throw Error(ErrorKind::InvalidArgument, "empty time window");
    std::vector<int> ladder;
    if (axis == kTimeAxis)
        for (int s = 1; 2 * k * s <= last - first; s *= 2) ladder.push_back(s);
    else
        for (int s = 1; 4 * s <= u.space.n[axis]; s *= 2) ladder.push_back(s);
    if (ladder.size() < 3) throw Error(ErrorKind::InvalidArgument, "ladder spans fewer than 3 dyadic levels");

    ExponentFit fit;
    std::vector<double> lx, ly;
    for (int s : ladder) {
        const std::size_t S = u.slice_size();
        const double sup = chunked_max(S * (last - first + 1), [&](std::size_t b) {
            const int j = first + static_cast<int>(b / S);
            const std::size_t p = b % S;
            if (axis == kTimeAxis && j + k * s > last) return 0.0;
            return std::fabs(lattice_difference(u, axis, p, j, k, s));
        });
        const double h = step_length(u, axis, s);
        fit.steps.push_back(h);
        fit.sups.push_back(sup);
        if (sup > 1e-13) {
            lx.push_back(std::log(h));
            ly.push_back(std::log(sup));
        }
    }
    if (lx.size() < 3) throw Error(ErrorKind::DegenerateFit, "differences below 1e-13 on the ladder");
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.exponent = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (my + fit.exponent * (lx[i] - mx));
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / n);
    fit.saturated = fit.exponent >= k - 0.1;
    return fit;
}

MixedReport mixed_difference_check(const Field &u, const MixedSpec &spec)
{
    if (std::fabs(spec.a / spec.l1 + spec.b / spec.l2 - 1.0) > 1e-12)
        throw Error(ErrorKind::SplitViolation, "a/l1 + b/l2 must equal 1");
    MixedReport r;
    SeminormSpec s1;
    s1.axis = spec.axis1;
    s1.l = spec.l1;
    s1.k = spec.order1;
    s1.stride = spec.stride;
    SeminormSpec s2 = s1;
    s2.axis = spec.axis2;
    s2.l = spec.l2;
    s2.k = spec.order2;
    r.S1 = seminorm(u, s1);
    r.S2 = seminorm(u, s2);
    const double coef = std::pow(spec.eps, spec.l1 - spec.a) * r.S1 + std::pow(spec.eps, -spec.a) * r.S2;
    const auto lad1 = default_ladder(u, spec.axis1, spec.order1);
    const auto lad2 = default_ladder(u, spec.axis2, spec.order2);
    const auto c1 = binomial_signs(spec.order1), c2 = binomial_signs(spec.order2);
    const std::size_t S = u.slice_size();
    const std::size_t total = S * u.time.points();
    const std::size_t stride = auto_stride(total, spec.stride);
    const std::size_t count = (total + stride - 1) / stride;
    r.ratio = chunked_max(count, [&](std::size_t b) {
        const std::size_t q = b * stride;
        const int j0 = static_cast<int>(q / S);
        const std::size_t p0 = q % S;
        double best = 0.0;
        for (int t1 : lad1)
            for (int t2 : lad2) {
                double acc = 0.0;
                bool ok = true;
                for (int i = 0; i <= spec.order1 && ok; ++i)
                    for (int i2 = 0; i2 <= spec.order2 && ok; ++i2) {
                        std::size_t p = p0;
                        int j = j0;
                        ok = shift(u, spec.axis1, p, j, static_cast<long>(i) * t1) &&
                             shift(u, spec.axis2, p, j, static_cast<long>(i2) * t2);
                        if (ok) acc += c1[i] * c2[i2] * u.at(p, j);
                    }
                if (!ok || acc == 0.0) continue;
                const double den = coef * std::pow(step_length(u, spec.axis1, t1), spec.a) *
                                   std::pow(step_length(u, spec.axis2, t2), spec.b);
                best = std::max(best, den > 0 ? std::fabs(acc) / den : std::numeric_limits<double>::infinity());
            }
        return best;
    });
    r.passed = r.ratio <= spec.budget;
    return r;
}

Field difference_quotient_field(const Field &u, int axis, int s, double a, int m)
{
    if (s <= 0 || (axis == kTimeAxis ? m * s > u.time.M : s >= u.space.n[axis]))
        throw Error(ErrorKind::StepExceedsGrid, "step exceeds the grid");
    TimeGrid tg = u.time;
    if (axis == kTimeAxis) {
        tg.M = u.time.M - m * s;
        tg.stop = u.time.t(tg.M);
    }
    Field out(u.space, tg);
    const double scale = std::pow(step_length(u, axis, s), -a);
    const std::size_t S = u.slice_size();
    parallel_for(tg.points(), [&](std::size_t j) {
        for (std::size_t p = 0; p < S; ++p)
            out.at(p, static_cast<int>(j)) = scale * lattice_difference(u, axis, p, static_cast<int>(j), m, s);
    });
    return out;
}

bool zero_trace_check(const Field &u, int q)
{
    const double sup = u.sup();
    if (sup == 0.0) return true;
    const int P = u.time.points();
    const double T = u.time.stop - u.time.start;
    const int width = std::min(q + 3, P);
    if (width <= q) throw Error(ErrorKind::TooFewPoints, "too few time samples for the trace order");
    const std::size_t S = u.slice_size();
    std::vector<double> v(P);
    for (std::size_t p = 0; p < S; ++p) {
        for (int j = 0; j < P; ++j) v[j] = u.at(p, j);
        for (int i = 0; i <= q; ++i) {
            const double d = i == 0 ? v[0] : node_derivative(v, u.time.dt(), 0, i, width);
            if (std::fabs(d) > 1e-8 * sup / std::pow(T, i)) return false;
        }
    }
    return true;
}

} // namespace fracheat
