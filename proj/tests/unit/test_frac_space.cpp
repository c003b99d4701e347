#include <doctest.h>

#include "fracheat/error.hpp"
#include "fracheat/frac_space.hpp"
#include "helpers.hpp"

using namespace fracheat;

namespace {

const TimeGrid kOneSlice{0.0, 0.0, 0};

SpaceGrid box(int dim, int n, double L)
{
    SpaceGrid g;
    for (int a = 0; a < dim; ++a) {
        g.n.push_back(n);
        g.L.push_back(L);
        g.group.push_back(0);
    }
    return g;
}

Field gaussian(const SpaceGrid &g)
{
    return sample(
        [&](const double *x, double) {
            double r = 0;
            for (int a = 0; a < g.dims(); ++a) r += (x[a] - 0.3) * (x[a] - 0.3);
            return std::exp(-r / 0.8);
        },
        g, kOneSlice);
}

Field plane_wave(const SpaceGrid &g, std::vector<int> k)
{
    return sample(
        [&](const double *x, double) {
            double ph = 0;
            for (int a = 0; a < g.dims(); ++a) ph += 2 * M_PI * k[a] * x[a] / g.L[a];
            return std::cos(ph);
        },
        g, kOneSlice);
}

// integral over the line of (1 - cos h) |h|^{-1-s}, continued to s in (1, 2)
double one_minus_cos_moment(double s) { return 2.0 * std::tgamma(1 - s) * std::cos(M_PI * s / 2) / s; }

HypersingularParams params_for(double sigma)
{
    HypersingularParams p;
    p.sigma = sigma;
    p.m = static_cast<int>(std::floor(sigma)) + 1;
    return p;
}

} // namespace

TEST_CASE("spectral operator is exact on lattice plane waves")
{
    for (double s : {0.5, 1.0, 1.5}) {
        const SpaceGrid g = box(2, 32, 2 * M_PI);
        const Field w = plane_wave(g, {3, -2});
        const Field d = frac_laplacian_spectral(w, 0, s);
        const double lam = std::pow(13.0, s / 2);
        for (std::size_t i = 0; i < w.data.size(); ++i) REQUIRE(std::fabs(d.data[i] - lam * w.data[i]) < 1e-12);
    }
}

TEST_CASE("semigroup in the order")
{
    const SpaceGrid g = box(1, 128, 12.0);
    const Field u = gaussian(g);
    const Field ab = frac_laplacian_spectral(frac_laplacian_spectral(u, 0, 0.7), 0, 0.6);
    const Field c = frac_laplacian_spectral(u, 0, 1.3);
    CHECK(testing::max_abs_diff(ab.data, c.data) <= 1e-10 * c.sup());
}

// The radial rule drops |q| < 1e-8, a relative O(1e-8^{m - sigma}) piece that calibration absorbs.
TEST_CASE("calibrated constants match the closed forms in one dimension")
{
    // forward first difference
    CHECK(calibrate_constant(1, 0.5, 1) == doctest::Approx(-1.0 / one_minus_cos_moment(0.5)).epsilon(1e-3));
    // centred second difference at sigma = 1
    CHECK(calibrate_constant(1, 1.0, 2, true) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-3));
    // forward second difference: symbol (e^{ih} - 1)^2 integrates to K |xi|^s (2 - 2^s)
    const double s = 1.5;
    CHECK(calibrate_constant(1, s, 2) == doctest::Approx(1.0 / (one_minus_cos_moment(s) * (2 - std::pow(2.0, s)))).epsilon(1e-3));
}

TEST_CASE("hypersingular backend agrees with the spectral backend")
{
    for (int dim : {1, 2})
        for (double s : {0.5, 1.5}) {
            CAPTURE(dim);
            CAPTURE(s);
            const SpaceGrid g = box(dim, dim == 1 ? 128 : 48, 12.0);
            HypersingularParams p = params_for(s);
            const Field u = gaussian(g);
            CHECK(testing::rel_sup(frac_laplacian_hypersingular(u, p), frac_laplacian_spectral(u, 0, s)) <= 1e-3);
            p.periodic_input = true;
            const Field w = plane_wave(g, std::vector<int>(dim, 3));
            CHECK(testing::rel_sup(frac_laplacian_hypersingular(w, p), frac_laplacian_spectral(w, 0, s)) <= 1e-3);
        }
}

TEST_CASE("integer sigma uses centred differences")
{
    const SpaceGrid g = box(1, 128, 12.0);
    HypersingularParams p;
    p.sigma = 1.0;
    p.m = 2;
    p.centered = true;
    const Field u = gaussian(g);
    CHECK(testing::rel_sup(frac_laplacian_hypersingular(u, p), frac_laplacian_spectral(u, 0, 1.0)) <= 1e-3);
}

TEST_CASE("hypersingular quadrature tightens under radial refinement")
{
    const SpaceGrid g = box(2, 32, 12.0);
    const Field u = gaussian(g);
    const Field ref = frac_laplacian_spectral(u, 0, 0.5);
    HypersingularParams p = params_for(0.5);
    p.angular_nodes = 256;
    const double coarse = testing::rel_sup(frac_laplacian_hypersingular(u, p), ref);
    p.angular_nodes = 4096;
    const double fine = testing::rel_sup(frac_laplacian_hypersingular(u, p), ref);
    CHECK(fine <= coarse);
}

TEST_CASE("compactly supported data must stay away from the box edge")
{
    const SpaceGrid g = box(1, 64, 4.0);
    const Field wide = sample([](const double *x, double) { return std::exp(-x[0] * x[0]); }, g, kOneSlice);
    CHECK_THROWS_AS(frac_laplacian_hypersingular(wide, params_for(0.5)), Error);
}

TEST_CASE("operators act group by group")
{
    SpaceGrid g;
    g.n = {32, 32};
    g.L = {2 * M_PI, 2 * M_PI};
    g.group = {0, 1};
    const Field w = sample([](const double *x, double) { return std::cos(2 * x[0]) * std::cos(3 * x[1]); }, g, kOneSlice);
    OperatorSpec op;
    op.terms = {{0, 1.5}, {1, 0.5}};
    const Field d = apply_operator(w, op);
    const double lam = std::pow(2.0, 1.5) + std::pow(3.0, 0.5);
    for (std::size_t i = 0; i < w.data.size(); ++i) REQUIRE(std::fabs(d.data[i] - lam * w.data[i]) < 1e-12);

    AnisotropyConfig cfg;
    cfg.theta = 0.8;
    cfg.alpha = 0.3;
    cfg.groups = {{1, 1.5}, {1, 0.5}};
    cfg.box = {2 * M_PI, 2 * M_PI};
    const OperatorSpec lift = lift_operator(cfg);
    CHECK(lift.terms[0].power == doctest::Approx(1.5 / 0.8));
    CHECK(space_operator(cfg).terms[1].power == doctest::Approx(0.5));
}

TEST_CASE("property: linearity of the operators")
{
    const SpaceGrid g = box(1, 128, 12.0);
    const Field u = gaussian(g);
    const Field v = sample([](const double *x, double) { return std::exp(-x[0] * x[0]) * x[0]; }, g, kOneSlice);
    Field w(g, kOneSlice);
    for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] = 2.0 * u.data[i] - 3.0 * v.data[i];
    for (Backend b : {Backend::spectral, Backend::hypersingular}) {
        OperatorSpec op{{{0, 0.5}}, b};
        const Field du = apply_operator(u, op), dv = apply_operator(v, op), dw = apply_operator(w, op);
        double err = 0;
        for (std::size_t i = 0; i < w.data.size(); ++i) err = std::max(err, std::fabs(dw.data[i] - 2 * du.data[i] + 3 * dv.data[i]));
        CHECK(err <= 1e-12 * dw.sup());
    }
}

TEST_CASE("fractional Laplacian of a Gaussian decays like |x|^{-N-sigma}")
{
    for (double s : {0.5, 1.5}) {
        const SpaceGrid g = box(1, 16384, 2048.0);
        const Field u = sample([](const double *x, double) { return std::exp(-x[0] * x[0] / 2); }, g, kOneSlice);
        const DecayFit fit = schwartz_decay_check(u, s);
        CHECK(fit.slope == doctest::Approx(-1 - s).epsilon(0.05 / (1 + s)));
    }
}
