#include <doctest.h>

#include <random>

#include "fracheat/error.hpp"
#include "fracheat/holder.hpp"
#include "helpers.hpp"

using namespace fracheat;

namespace {

Field in_time(const std::function<double(double)> &g, int M, double T = 1.0)
{
    return sample([&](const double *, double t) { return g(t); }, testing::line(4, 2 * M_PI), TimeGrid{0, T, M});
}

SeminormSpec time_spec(double l, int k = 1)
{
    SeminormSpec s;
    s.l = l;
    s.k = k;
    return s;
}

} // namespace

TEST_CASE("power of t has unit Hölder constant at its own exponent")
{
    // |t^b - s^b| <= |t - s|^b with equality at s = 0
    for (double b : {0.3, 0.7}) CHECK(seminorm(in_time([b](double t) { return std::pow(t, b); }, 1000), time_spec(b)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant field has zero seminorms")
{
    const Field c = in_time([](double) { return 3.0; }, 64);
    CHECK(seminorm(c, time_spec(0.5)) == 0.0);
    SeminormSpec s = time_spec(0.5);
    s.axis = 0;
    CHECK(seminorm(c, s) == 0.0);
}

TEST_CASE("exponent scan recovers powers of t")
{
    CHECK(exponent_scan(in_time([](double t) { return std::pow(t, 0.3); }, 1000), kTimeAxis, 1).exponent == doctest::Approx(0.3).epsilon(0.05 / 0.3));
    CHECK(exponent_scan(in_time([](double t) { return std::pow(t, 0.7); }, 1000), kTimeAxis, 1).exponent == doctest::Approx(0.7).epsilon(0.05 / 0.7));
    CHECK(exponent_scan(in_time([](double t) { return std::pow(t, 1.3); }, 1000), kTimeAxis, 2).exponent == doctest::Approx(1.3).epsilon(0.05 / 1.3));
    const ExponentFit smooth = exponent_scan(in_time([](double t) { return std::cos(t); }, 1000), kTimeAxis, 2);
    CHECK(smooth.saturated);
    CHECK_THROWS_AS(exponent_scan(in_time([](double) { return 1.0; }, 1000), kTimeAxis, 1), Error);
}

TEST_CASE("property: seminorm is subadditive and absolutely homogeneous")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1);
    const SpaceGrid g = testing::line(16, 2.0);
    const TimeGrid t{0, 1, 64};
    for (int trial = 0; trial < 10; ++trial) {
        Field a(g, t), b(g, t), c(g, t);
        for (double &v : a.data) v = u(rng);
        for (double &v : b.data) v = u(rng);
        const double x = u(rng) * 3, y = u(rng) * 3;
        for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = x * a.data[i] + y * b.data[i];
        for (int axis : {kTimeAxis, 0}) {
            SeminormSpec s = time_spec(0.4, 2);
            s.axis = axis;
            const double sa = seminorm(a, s), sb = seminorm(b, s), sc = seminorm(c, s);
            CHECK(sc <= std::fabs(x) * sa + std::fabs(y) * sb + 1e-12 * sc);
            Field d = a;
            for (double &v : d.data) v *= x;
            CHECK(seminorm(d, s) == doctest::Approx(std::fabs(x) * sa).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: enlarging the step set never lowers the seminorm")
{
    const Field f = in_time([](double t) { return std::sin(7 * t) + std::sqrt(t); }, 512);
    SeminormSpec s = time_spec(0.6);
    double prev = 0.0;
    for (std::vector<int> steps : {std::vector<int>{4}, {4, 8}, {1, 4, 8}, {1, 2, 4, 8, 16}}) {
        s.steps = steps;
        const double v = seminorm(f, s);
        CHECK(v >= prev);
        prev = v;
    }
    s.steps = {1024};
    CHECK_THROWS_AS(seminorm(f, s), Error);
}

TEST_CASE("probing above the true exponent blows up under refinement")
{
    // sqrt(t): exponent 0.5 is finite, 0.7 grows like h^{-0.2}
    const auto g = [](double t) { return std::sqrt(t); };
    const double lo1 = seminorm(in_time(g, 256), time_spec(0.3)), lo2 = seminorm(in_time(g, 1024), time_spec(0.3));
    const double hi1 = seminorm(in_time(g, 256), time_spec(0.7)), hi2 = seminorm(in_time(g, 1024), time_spec(0.7));
    CHECK(lo2 == doctest::Approx(lo1).epsilon(1e-12));
    CHECK(hi2 / hi1 >= 0.9 * std::pow(4.0, 0.2));
}

TEST_CASE("space differences wrap periodically")
{
    const SpaceGrid g = testing::line(8, 8.0);
    const Field f = sample([](const double *x, double) { return x[0]; }, g, TimeGrid{0, 1, 2});
    CHECK(lattice_difference(f, 0, 7, 0, 1, 1) == doctest::Approx(-7.0));
    CHECK(lattice_difference(f, 0, 2, 0, 1, 1) == doctest::Approx(1.0));
}

TEST_CASE("full norm composition")
{
    const AnisotropyConfig cfg = testing::one_group(0.5, 0.5, 1.0);
    const Field u = sample([](const double *x, double t) { return std::cos(x[0]) * std::pow(t, 1.5); }, testing::line(32, 2 * M_PI), TimeGrid{0, 1, 256});
    const HolderReport h = full_norm(u, cfg);
    CHECK(h.space_exponents[0] == doctest::Approx(1.5));
    CHECK(h.time_exponent == doctest::Approx(0.75));
    CHECK(h.total == doctest::Approx(h.sup_norm + h.space_seminorms[0] + h.time_seminorm));
    CHECK(h.sup_norm >= 0);
    CHECK(h.space_seminorms[0] > 0);
    CHECK(h.time_seminorm > 0);
    const HolderReport d = full_norm(u, cfg, NormKind::data);
    CHECK(d.space_exponents[0] == doctest::Approx(0.5));
    CHECK(d.time_exponent == doctest::Approx(0.25));
}

TEST_CASE("mixed differences")
{
    MixedSpec ms;
    ms.l1 = ms.l2 = 0.9;
    ms.a = ms.b = 0.45;
    double prev = -1;
    for (int M : {64, 128}) {
        const Field sep = sample([](const double *x, double t) { return std::pow(t, 0.9) * std::pow(std::fabs(x[0]), 0.9); },
                                 testing::line(64, 2.0), TimeGrid{0, 1, M});
        const MixedReport r = mixed_difference_check(sep, ms);
        CHECK(std::isfinite(r.ratio));
        CHECK(r.passed);
        if (prev > 0) CHECK(r.ratio == doctest::Approx(prev).epsilon(0.2));
        prev = r.ratio;
    }
    ms.a = 0.5;
    CHECK_THROWS_AS(mixed_difference_check(sample([](const double *, double) { return 0.0; }, testing::line(8, 1.0), TimeGrid{0, 1, 8}), ms), Error);
}

TEST_CASE("difference quotient fields and zero traces")
{
    const Field f = in_time([](double t) { return t * t; }, 64);
    const Field q = difference_quotient_field(f, kTimeAxis, 2, 1.0, 1);
    CHECK(q.time.M == 62);
    CHECK(q.at(0, 0) == doctest::Approx((std::pow(2.0 / 64, 2)) / (2.0 / 64)));
    CHECK(zero_trace_check(f, 1));
    CHECK_FALSE(zero_trace_check(in_time([](double t) { return t; }, 64), 1));
    CHECK(zero_trace_check(in_time([](double t) { return t; }, 64), 0));
}
