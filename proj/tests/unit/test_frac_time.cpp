#include <doctest.h>

#include <functional>

#include "fracheat/error.hpp"
#include "fracheat/frac_time.hpp"
#include "helpers.hpp"

using namespace fracheat;

namespace {

TimeSeries series(const std::function<double(double)> &g, int M, double T = 1.0, std::vector<double> traces = {})
{
    TimeGrid grid{0.0, T, M};
    std::vector<double> v(M + 1);
    for (int j = 0; j <= M; ++j) v[j] = g(grid.t(j));
    return TimeSeries(grid, v, traces);
}

// max relative error on [T/4, T] against the power rule
double power_rule_error(double theta, double p, int M)
{
    const TimeSeries g = series([p](double t) { return std::pow(t, p); }, M, 1.0, {0.0, p == 1.0 ? 1.0 : 0.0});
    const TimeSeries d = caputo(theta, g);
    const bool vanishes = p == std::floor(p) && p < std::ceil(theta);
    double e = 0.0;
    for (int j = M / 4; j <= M; ++j) {
        const double t = g.grid.t(j);
        if (vanishes) {
            e = std::max(e, std::fabs(d.v[j]));
        } else {
            const double ex = std::tgamma(p + 1) / std::tgamma(p + 1 - theta) * std::pow(t, p - theta);
            e = std::max(e, std::fabs(d.v[j] - ex) / std::fabs(ex));
        }
    }
    return e;
}

// Caputo derivative from the defining integral, substituting u = (t-s)^{n-theta} to remove the kernel singularity
double caputo_quadrature(double theta, const std::function<double(double)> &dn, double t)
{
    const double a = std::ceil(theta) - theta;
    const double top = std::pow(t, a);
    const int N = 20000;
    const double h = top / N;
    double s = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * dn(t - std::pow(i * h, 1.0 / a));
    }
    return s * h / 3.0 / a / std::tgamma(a);
}

} // namespace

TEST_CASE("L1 weights")
{
    const auto b = l1_weights(0.5, 4);
    CHECK(b[0] == doctest::Approx(1.0));
    CHECK(b[1] == doctest::Approx(std::sqrt(2.0) - 1.0));
    for (std::size_t l = 1; l < b.size(); ++l) CHECK(b[l] < b[l - 1]);
}

TEST_CASE("finite-difference weights reproduce polynomials")
{
    const std::vector<double> x{0.0, 0.1, 0.3, 0.45};
    const auto w = fd_weights(0.2, x, 2);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * x[i] * x[i];
    CHECK(s == doctest::Approx(6.0 * 0.2));
}

TEST_CASE("power rule converges for every order class")
{
    for (double th : {0.3, 0.5, 1.4})
        for (double p : {th + 0.2, 1.0, 2.0}) {
            CAPTURE(th);
            CAPTURE(p);
            const double e1 = power_rule_error(th, p, 1024), e2 = power_rule_error(th, p, 2048);
            CHECK(e2 <= 1e-3);
            if (e2 > 1e-13) CHECK(std::log2(e1 / e2) >= 0.8);
        }
}

TEST_CASE("property: linearity")
{
    const TimeSeries g = series([](double t) { return std::sin(3 * t); }, 512, 1.0, {0.0, 3.0});
    const TimeSeries h = series([](double t) { return t * t * std::exp(t); }, 512, 1.0, {0.0, 0.0});
    for (double th : {0.4, 1.3}) {
        const double a = 2.5, b = -0.7;
        std::vector<double> v(513), tr{0.0, a * 3.0};
        for (int j = 0; j <= 512; ++j) v[j] = a * g.v[j] + b * h.v[j];
        const TimeSeries lhs = caputo(th, TimeSeries(g.grid, v, tr));
        const TimeSeries cg = caputo(th, g), ch = caputo(th, h);
        double err = 0.0, scale = 0.0;
        for (int j = 0; j <= 512; ++j) {
            err = std::max(err, std::fabs(lhs.v[j] - a * cg.v[j] - b * ch.v[j]));
            scale = std::max(scale, std::fabs(lhs.v[j]));
        }
        CHECK(err <= 1e-12 * scale);
    }
}

TEST_CASE("order above one agrees with the defining integral")
{
    const double th = 1.4;
    const TimeSeries g = series([](double t) { return std::sin(t); }, 4096, 1.0, {0.0, 1.0});
    const TimeSeries d = caputo(th, g);
    for (int j : {1024, 2048, 4096}) {
        const double ref = caputo_quadrature(th, [](double s) { return -std::sin(s); }, g.grid.t(j));
        CHECK(d.v[j] == doctest::Approx(ref).epsilon(2e-3));
    }
}

TEST_CASE("integer orders and short grids are rejected")
{
    CHECK_THROWS_AS(caputo(1.0, series([](double t) { return t; }, 16)), Error);
    CHECK_THROWS_AS(caputo(2.5, series([](double t) { return t; }, 2)), Error);
}

TEST_CASE("Riemann-Liouville adds the trace terms")
{
    const double th = 0.4;
    const TimeSeries g = series([](double t) { return 1.0 + t; }, 2048, 1.0, {1.0});
    const TimeSeries rl = riemann_liouville(th, g);
    for (int j : {512, 2048}) {
        const double t = g.grid.t(j);
        const double ex = std::pow(t, -th) / std::tgamma(1 - th) + std::pow(t, 1 - th) / std::tgamma(2 - th);
        CHECK(rl.v[j] == doctest::Approx(ex).epsilon(1e-3));
    }
    CHECK_THROWS_AS(riemann_liouville(th, series([](double t) { return t; }, 8)), Error);
}

TEST_CASE("fractional integral of powers")
{
    for (double th : {0.3, 1.5}) {
        const TimeSeries h = series([](double t) { return t; }, 1024);
        const TimeSeries I = frac_integral(th, h);
        const double ex = std::pow(1.0, 1 + th) / std::tgamma(2 + th);
        CHECK(I.v.back() == doctest::Approx(ex).epsilon(1e-10));
    }
}

TEST_CASE("Caputo inverts the fractional integral")
{
    const double th = 0.6;
    const TimeSeries h = series([](double t) { return std::cos(t) * t; }, 2048);
    const TimeSeries I = frac_integral(th, h);
    const TimeSeries back = caputo(th, I);
    for (int j = 512; j <= 2048; j += 512) CHECK(back.v[j] == doctest::Approx(h.v[j]).epsilon(2e-3));
}

TEST_CASE("Marchaud agrees with Caputo on zero-trace data")
{
    const TimeSeries g = series([](double t) { return t * t * std::exp(-t); }, 4096, 4.0);
    const TimeSeries c = caputo(0.5, g);
    double scale = 0.0;
    for (double v : c.v) scale = std::max(scale, std::fabs(v));
    for (int m : {1, 2}) {
        const TimeSeries mm = marchaud(MarchaudParams{0.5, m, 0}, g);
        CHECK(testing::max_abs_diff(mm.v, c.v) <= 1e-3 * scale);
    }
    CHECK(marchaud_constant(0.5, 1) == doctest::Approx(0.5 / std::tgamma(0.5)).epsilon(1e-10));
    CHECK_THROWS_AS(marchaud_constant(1.5, 1), Error);
}

TEST_CASE("shifted origin and Taylor extension")
{
    const TimeSeries g = series([](double t) { return std::max(t - 0.5, 0.0); }, 2048);
    const TimeSeries s = caputo_shifted(0.5, g, 0.5);
    const double ex = std::pow(0.5, 0.5) / std::tgamma(1.5);
    CHECK(s.v.back() == doctest::Approx(ex).epsilon(1e-3));
    CHECK_THROWS_AS(caputo_shifted(0.5, g, 0.50013), Error);

    const TimeSeries p = series([](double t) { return 1 + 2 * t + t * t; }, 256);
    const TimeSeries e = taylor_extend(p, 2, 1.0, 2.0);
    CHECK(e.grid.M == 512);
    CHECK(e.v.back() == doctest::Approx(9.0).epsilon(1e-6));
}

TEST_CASE("first-node Caputo value vanishes under refinement for smooth zero-trace data")
{
    double prev = 1e300;
    for (int M : {256, 1024, 4096}) {
        const double v = vanishing_at_zero_check(0.5, series([](double t) { return t * t; }, M));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("batch matches single evaluation")
{
    std::vector<TimeSeries> gs;
    for (int k = 1; k <= 5; ++k) gs.push_back(series([k](double t) { return std::sin(k * t) * t; }, 128));
    const auto out = caputo_batch(0.7, gs);
    for (std::size_t i = 0; i < gs.size(); ++i) CHECK(testing::max_abs_diff(out[i].v, caputo(0.7, gs[i]).v) == 0.0);
}
