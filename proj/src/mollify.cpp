#include "fracheat/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracheat/error.hpp"
#include "fracheat/frac_time.hpp"
#include "fracheat/holder.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat {

double smooth_step(double s)
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double bump_kernel(const double *x, int dims, double t)
{
    double r2 = t * t;
    for (int a = 0; a < dims; ++a) r2 += x[a] * x[a];
    const double q = 1.0 - 2.0 * r2;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

namespace {

int lattice_offset(int d, int n) { return d <= n / 2 ? d : d - n; }

} // namespace

Field mollify(const Field &f, const MollifierSpec &spec)
{
    const double dt = f.time.dt();
    if (!(spec.eps >= 2.0 * dt * (1.0 - 1e-12)))
        throw Error(ErrorKind::UnresolvableEpsilon, "eps must be at least two time steps");
    const int P = f.time.points();
    const std::size_t S = f.slice_size();
    const int D = f.space.dims();
    const double centre = spec.shift == Shift::minus ? spec.eps : spec.shift == Shift::plus ? -spec.eps : 0.0;

    std::vector<cplx> kern(S * P), buf(S * P);
    std::vector<int> idx(D);
    std::vector<double> y(D);
    double mass = 0.0;
    for (int j = 0; j < P; ++j) {
        const double tau = lattice_offset(j, P) * dt;
        for (std::size_t s = 0; s < S; ++s) {
            f.space.unravel(s, idx.data());
            for (int a = 0; a < D; ++a) y[a] = lattice_offset(idx[a], f.space.n[a]) * f.space.dx(a) / spec.eps;
            const double v = bump_kernel(y.data(), D, (tau - centre) / spec.eps);
            kern[j * S + s] = v;
            mass += v;
        }
    }
    if (mass == 0.0) throw Error(ErrorKind::UnresolvableEpsilon, "kernel misses every lattice point");
    for (auto &v : kern) v /= mass;
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = f.data[i];
    std::vector<int> dims{P};
    for (int a = 0; a < D; ++a) dims.push_back(f.space.n[a]);
    fft_batch(kern, dims, 1, -1);
    fft_batch(buf, dims, 1, -1);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= kern[i];
    fft_batch(buf, dims, 1, +1);
    Field out(f.space, f.time);
    const double norm = 1.0 / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out.data[i] = buf[i].real() * norm;
    return out;
}

Field cutoff(const Field &f, double radius_scale)
{
    Field out = f;
    const std::size_t S = f.slice_size();
    std::vector<int> idx(f.space.dims());
    for (std::size_t s = 0; s < S; ++s) {
        f.space.unravel(s, idx.data());
        double r2 = 0.0;
        for (int a = 0; a < f.space.dims(); ++a) r2 += std::pow(f.space.coord(a, idx[a]), 2);
        const double w = 1.0 - smooth_step(std::sqrt(r2) / radius_scale - 1.0);
        for (int j = 0; j < f.time.points(); ++j) out.at(s, j) *= w;
    }
    return out;
}

Field extend_time(const Field &f, const ExtendSpec &spec)
{
    const double dt = f.time.dt();
    const int kp = static_cast<int>(std::lround(spec.past / dt));
    const int kf = static_cast<int>(std::lround(spec.future / dt));
    const int M = f.time.M;
    const std::size_t S = f.slice_size();
    TimeGrid tg{f.time.start - kp * dt, f.time.stop + kf * dt, M + kp + kf};
    Field out(f.space, tg);
    for (int j = 0; j <= M; ++j)
        std::copy(f.slice(j), f.slice(j) + S, out.slice(j + kp));

    if (spec.mode == ExtendMode::zero_past) {
        if (spec.strict && kp > 0) {
            double edge = 0.0;
            for (std::size_t s = 0; s < S; ++s) edge = std::max(edge, std::fabs(f.at(s, 0)));
            if (edge > 1e-8 * std::max(f.sup(), 1e-300)) {
                std::ostringstream os;
                os << "zero extension across a trace of size " << edge;
                throw Error(ErrorKind::TraceMismatch, os.str());
            }
        }
        return out;  // new slices are already zero
    }
    if (spec.mode == ExtendMode::even_cutoff) {
        const double range = f.time.stop - f.time.start;
        const double wp = std::min(kp * dt, range), wf = std::min(kf * dt, range);
        for (int i = 1; i <= kp; ++i) {
            const double eta = 1.0 - smooth_step(i * dt / wp);
            for (std::size_t s = 0; s < S; ++s) out.at(s, kp - i) = i <= M ? eta * f.at(s, i) : 0.0;
        }
        for (int i = 1; i <= kf; ++i) {
            const double eta = 1.0 - smooth_step(i * dt / wf);
            for (std::size_t s = 0; s < S; ++s) out.at(s, kp + M + i) = i <= M ? eta * f.at(s, M - i) : 0.0;
        }
        return out;
    }
    // Taylor polynomial of order q at each end
    const int width = std::min(spec.q + 3, M + 1);
    if (width <= spec.q) throw Error(ErrorKind::TooFewPoints, "too few samples for the Taylor order");
    std::vector<double> v(M + 1), d0(spec.q + 1), d1(spec.q + 1);
    for (std::size_t s = 0; s < S; ++s) {
        for (int j = 0; j <= M; ++j) v[j] = f.at(s, j);
        for (int i = 0; i <= spec.q; ++i) {
            d0[i] = i == 0 ? v[0] : node_derivative(v, dt, 0, i, width);
            d1[i] = i == 0 ? v[M] : node_derivative(v, dt, M, i, width);
        }
        for (int i = 1; i <= kp; ++i) {
            double acc = 0.0, pw = 1.0;
            for (int r = 0; r <= spec.q; ++r, pw *= -i * dt / r) acc += d0[r] * pw;
            out.at(s, kp - i) = acc;
        }
        for (int i = 1; i <= kf; ++i) {
            double acc = 0.0, pw = 1.0;
            for (int r = 0; r <= spec.q; ++r, pw *= i * dt / r) acc += d1[r] * pw;
            out.at(s, kp + M + i) = acc;
        }
    }
    return out;
}

namespace {

// fourth-order cumulative integral from the first sample
void cumulative(std::vector<double> &v, double dt)
{
    const int M = static_cast<int>(v.size()) - 1;
    if (M < 3) throw Error(ErrorKind::TooFewPoints, "need at least four samples");
    std::vector<double> F(M + 1, 0.0);
    for (int j = 0; j < M; ++j) {
        double inc;
        if (j == 0) inc = 9 * v[0] + 19 * v[1] - 5 * v[2] + v[3];
        else if (j == M - 1) inc = 9 * v[M] + 19 * v[M - 1] - 5 * v[M - 2] + v[M - 3];
        else inc = -v[j - 1] + 13 * v[j] + 13 * v[j + 1] - v[j + 2];
        F[j + 1] = F[j] + inc * dt / 24.0;
    }
    v.swap(F);
}

} // namespace

Field antiderivative_lift(const Field &f, int n)
{
    const int P = f.time.points();
    const std::size_t S = f.slice_size();
    const double sup = f.sup();
    int last = 0;
    for (int j = 0; j < P; ++j)
        for (std::size_t s = 0; s < S; ++s)
            if (std::fabs(f.at(s, j)) > 1e-14 * sup) last = j;
    const double ts = f.time.t(last);
    Field out(f.space, f.time);
    parallel_for(S, [&](std::size_t s) {
        std::vector<double> v(P);
        for (int j = 0; j < P; ++j) v[j] = f.at(s, j);
        for (int r = 0; r < n; ++r) cumulative(v, f.time.dt());
        for (int j = 0; j < P; ++j) out.at(s, j) = v[j] * (1.0 - smooth_step(f.time.t(j) - ts));
    });
    return out;
}

BlowupFit jump_blowup_scan(const Field &f, double alpha, const std::vector<double> &eps_ladder)
{
    BlowupFit fit;
    std::vector<double> lx, ly;
    for (double e : eps_ladder) {
        const Field g = mollify(f, {e, Shift::none});
        SeminormSpec sp;
        sp.axis = kTimeAxis;
        sp.l = alpha;
        sp.k = 1;
        sp.stride = 1;
        const double s = seminorm(g, sp);
        fit.eps.push_back(e);
        fit.seminorms.push_back(s);
        if (s > 1e-13) {
            lx.push_back(std::log(e));
            ly.push_back(std::log(s));
        }
    }
    if (lx.size() < 2) throw Error(ErrorKind::DegenerateFit, "seminorms vanish on the eps ladder");
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
    fit.slope = sxy / sxx;
    return fit;
}

} // namespace fracheat
