#include <doctest.h>

#include <cstdio>
#include <random>

#include "fracheat/error.hpp"
#include "fracheat/fields.hpp"
#include "fracheat/parallel.hpp"
#include "helpers.hpp"

using namespace fracheat;

static Field random_field(const SpaceGrid &s, const TimeGrid &t, unsigned seed)
{
    Field f(s, t);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double &v : f.data) v = u(rng);
    return f;
}

TEST_CASE("grid checks")
{
    CHECK_THROWS_AS(check_grids(testing::line(6 + 1, 1.0), TimeGrid{0, 1, 4}), Error);
    CHECK_THROWS_AS(check_grids(testing::line(2, 1.0), TimeGrid{0, 1, 4}), Error);
    CHECK_THROWS_AS(check_grids(testing::line(8, 1.0), TimeGrid{0, 1, 1}), Error);
    CHECK_NOTHROW(check_grids(testing::line(8, 1.0), TimeGrid{0, 1, 2}));
    const Field f = sample([](const double *x, double t) { return x[0] + t; }, testing::line(8, 2.0), TimeGrid{0, 1, 4});
    CHECK(f.data.size() == 8 * 5);
    CHECK(f.at(0, 0) == doctest::Approx(-1.0));
    CHECK(f.at(3, 4) == doctest::Approx(-1.0 + 0.75 + 1.0));
    CHECK_THROWS_AS(sample([](const double *, double t) { return 1.0 / (t - 0.5); }, testing::line(8, 2.0),
                           TimeGrid{0, 1, 4}),
                    Error);
}

TEST_CASE("space transform round trip and Parseval")
{
    SpaceGrid g;
    g.n = {16, 12};
    g.L = {3.0, 5.0};
    g.group = {0, 1};
    const Field f = random_field(g, TimeGrid{0, 1, 3}, 11);
    const SpectralField s = fft_space(f);
    const Field back = ifft_space(s);
    CHECK(testing::max_abs_diff(back.data, f.data) <= 1e-12 * f.sup());

    double e_x = 0.0, e_k = 0.0;
    for (std::size_t i = 0; i < f.slice_size(); ++i) e_x += f.at(i, 0) * f.at(i, 0) * g.cell_volume();
    for (std::size_t i = 0; i < f.slice_size(); ++i) e_k += std::norm(s.data[i]);
    CHECK(e_k == doctest::Approx(e_x).epsilon(1e-10));
}

TEST_CASE("space transform of a plane wave picks one mode")
{
    const SpaceGrid g = testing::line(32, 2.0 * M_PI);
    const Field f = sample([](const double *x, double) { return std::cos(3.0 * x[0]); }, g, TimeGrid{0, 1, 2});
    const SpectralField s = fft_space(f);
    int hits = 0;
    for (int i = 0; i < 32; ++i)
        if (std::abs(s.data[i]) > 1e-9) {
            ++hits;
            CHECK(std::fabs(std::fabs(g.freq(0, i)) - 3.0) < 1e-12);
        }
    CHECK(hits == 2);
}

TEST_CASE("translation multiplies modes by the exact phase")
{
    const SpaceGrid g = testing::line(64, 4.0);
    const TimeGrid t{0, 1, 2};
    const Field f = random_field(g, t, 3);
    Field shifted(g, t);
    const int k = 5;
    for (int j = 0; j <= t.M; ++j)
        for (int i = 0; i < 64; ++i) shifted.at(i, j) = f.at((i - k + 64) % 64, j);
    const SpectralField a = fft_space(f), b = fft_space(shifted);
    const double h = k * g.dx(0);
    double err = 0.0;
    for (int i = 0; i < 64; ++i) err = std::max(err, std::abs(b.data[i] - a.data[i] * std::exp(cplx(0, -g.freq(0, i) * h))));
    CHECK(err < 1e-12);
}

TEST_CASE("space-time transform round trip")
{
    const SpaceGrid g = testing::line(16, 3.0);
    const TimeGrid t{-1.0, 1.0 - 2.0 / 32, 31};
    Field f = random_field(g, t, 5);
    // the transform refuses data that reaches the time-window edges
    for (int j = 0; j <= t.M; ++j)
        for (int i = 0; i < 16; ++i) f.at(i, j) *= std::exp(-1.0 / std::max(1e-300, 1.0 - t.t(j) * t.t(j) * 1.1));
    const Field back = ifft_spacetime(fft_spacetime(f));
    CHECK(testing::max_abs_diff(back.data, f.data) <= 1e-12 * f.sup());
}

TEST_CASE("transforms do not depend on the thread count")
{
    SpaceGrid g;
    g.n = {32, 32};
    g.L = {1.0, 1.0};
    g.group = {0, 0};
    const Field f = random_field(g, TimeGrid{0, 1, 16}, 9);
    set_threads(1);
    const SpectralField a = fft_space(f);
    set_threads(4);
    const SpectralField b = fft_space(f);
    set_threads(0);
    for (std::size_t i = 0; i < a.data.size(); ++i) REQUIRE(a.data[i] == b.data[i]);
}

TEST_CASE("CSV round trip keeps values and metadata")
{
    SpaceGrid g;
    g.n = {4, 6};
    g.L = {1.0, 2.0};
    g.group = {0, 1};
    const Field f = random_field(g, TimeGrid{0, 0.5, 3}, 1);
    const std::string path = "fields_roundtrip.csv";
    write_csv(f, path, {{"config.hash", "abc"}});
    const Field r = read_csv(path);
    CHECK(r.space == f.space);
    CHECK(r.time == f.time);
    CHECK(testing::max_abs_diff(r.data, f.data) == 0.0);
    std::FILE *fp = std::fopen(path.c_str(), "r");
    char line[256];
    bool hash = false;
    while (std::fgets(line, sizeof line, fp) && line[0] == '#')
        if (std::string(line).find("config.hash") != std::string::npos) hash = true;
    std::fclose(fp);
    std::remove(path.c_str());
    CHECK(hash);
}
