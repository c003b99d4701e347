#include <doctest.h>

#include "fracheat/config.hpp"
#include "fracheat/error.hpp"
#include "helpers.hpp"

using namespace fracheat;

static ErrorKind kind_of(const AnisotropyConfig &c)
{
    try {
        validate(c);
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("validate accepted the config");
    return ErrorKind::InvalidArgument;
}

TEST_CASE("trace counts follow the integer/fractional split")
{
    CHECK(trace_count(0.5) == 1);
    CHECK(trace_count(1.4) == 2);
    CHECK(trace_count(2.3) == 3);
    CHECK(trace_count(1.0) == 1);
    CHECK(trace_count(3.0) == 3);
    CHECK(ceil_order(0.5) == 1);
    CHECK(ceil_order(3.0) == 3);
    CHECK(frac_part(2.3) == doctest::Approx(0.3));
}

TEST_CASE("validate rejects integral exponents and 4k+2 orders")
{
    CHECK(kind_of(testing::one_group(2.0, 0.3, 1.5)) == ErrorKind::ForbiddenIntegerOrder);
    CHECK(kind_of(testing::one_group(6.0, 0.3, 1.5)) == ErrorKind::ForbiddenIntegerOrder);
    CHECK(kind_of(testing::one_group(0.5, 0.5, 2.0)) == ErrorKind::IntegralExponent);   // sigma*alpha = 1
    CHECK(kind_of(testing::one_group(0.5, 1.0, 1.5)) == ErrorKind::IntegralExponent);   // theta+theta*alpha = 1
    CHECK(kind_of(testing::one_group(0.5, 0.3, 2.0 / 1.3)) == ErrorKind::IntegralExponent);
    CHECK(kind_of(testing::one_group(-0.5, 0.3, 1.5)) == ErrorKind::ValidationFailed);
    auto c = testing::one_group(0.5, 0.3, 1.5);
    c.box = {1.0, 2.0};
    CHECK(kind_of(c) == ErrorKind::DimensionMismatch);
}

TEST_CASE("regime flags")
{
    auto f = validate(testing::one_group(0.5, 0.5, 1.0));
    CHECK(f.frac_small);
    CHECK_FALSE(f.frac_large);
    CHECK(f.needs_compat);
    CHECK_FALSE(f.needs_higher_compat);

    f = validate(testing::one_group(0.5, 2.5, 1.0));
    CHECK(f.frac_large);
    CHECK(f.needs_higher_compat);
    CHECK(f.n_alpha_band == 2);

    f = validate(testing::one_group(3.0, 0.3, 1.5));
    CHECK(f.theta_integer);
    CHECK_FALSE(f.needs_compat);
}

TEST_CASE("property: flags are exclusive and consistent over a parameter sweep")
{
    for (double th : {0.3, 0.55, 0.8, 1.3, 1.7, 2.4, 2.9})
        for (double a : {0.07, 0.23, 0.41, 0.66})
            for (double s : {0.45, 1.1, 1.7}) {
                auto c = testing::one_group(th, a, s);
                RegimeFlags f;
                try {
                    f = validate(c);
                } catch (const Error &e) {
                    CHECK(e.kind() == ErrorKind::IntegralExponent);
                    continue;
                }
                CHECK(f.frac_small != f.frac_large);
                if (f.needs_higher_compat) CHECK(f.needs_compat);
                const RegimeFlags g = validate(c);
                CHECK(g.frac_small == f.frac_small);
                CHECK(g.needs_higher_compat == f.needs_higher_compat);

                const auto d = derive_exponents(c);
                CHECK(d.trace_orders[0][0] == doctest::Approx(s * (1 + a)));
                for (std::size_t i = 0; i + 1 < d.trace_orders.size(); ++i) {
                    CHECK(d.trace_orders[i][0] - d.trace_orders[i + 1][0] == doctest::Approx(s / th));
                }
            }
}

TEST_CASE("trace space index range")
{
    const auto c = testing::one_group(1.4, 0.3, 1.5);
    CHECK(trace_space(c, 1)[0] == doctest::Approx(1.5 * 1.3 - 1.5 / 1.4));
    CHECK_THROWS_AS(trace_space(c, 2), Error);
}
