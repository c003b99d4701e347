#include "fracheat/config.hpp"

#include <cmath>
#include <sstream>

#include "fracheat/error.hpp"

namespace fracheat {

int AnisotropyConfig::space_dim() const
{
    int n = 0;
    for (const auto &g : groups) n += g.dim;
    return n;
}

int AnisotropyConfig::group_of_axis(int axis) const
{
    int start = 0;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        if (axis < start + groups[k].dim) return static_cast<int>(k);
        start += groups[k].dim;
    }
    throw Error(ErrorKind::IndexOutOfRange, "axis beyond configured groups");
}

std::vector<int> AnisotropyConfig::axes_of_group(int k) const
{
    if (k < 0 || k >= static_cast<int>(groups.size()))
        throw Error(ErrorKind::IndexOutOfRange, "group index");
    int start = 0;
    for (int j = 0; j < k; ++j) start += groups[j].dim;
    std::vector<int> axes;
    for (int a = 0; a < groups[k].dim; ++a) axes.push_back(start + a);
    return axes;
}

bool near_integer(double x, double tol) { return std::fabs(x - std::round(x)) < tol; }

bool theta_is_integer(double theta) { return near_integer(theta); }

int max_trace_index(double theta)
{
    if (theta_is_integer(theta)) return static_cast<int>(std::lround(theta)) - 1;
    return static_cast<int>(std::floor(theta));
}

int trace_count(double theta) { return max_trace_index(theta) + 1; }

int ceil_order(double theta)
{
    if (theta_is_integer(theta)) return static_cast<int>(std::lround(theta));
    return static_cast<int>(std::floor(theta)) + 1;
}

double frac_part(double theta)
{
    if (theta_is_integer(theta)) return 0.0;
    return theta - std::floor(theta);
}

namespace {

void require_fractional(double x, const char *what)
{
    if (near_integer(x)) {
        std::ostringstream os;
        os << what << " = " << x << " is within " << kIntegerTolerance << " of an integer";
        throw Error(ErrorKind::IntegralExponent, os.str());
    }
}

} // namespace

RegimeFlags validate(const AnisotropyConfig &cfg)
{
    if (!(cfg.theta > 0) || !(cfg.alpha > 0) || !(cfg.T > 0))
        throw Error(ErrorKind::ValidationFailed, "theta, alpha and T must be positive");
    if (cfg.groups.empty()) throw Error(ErrorKind::DimensionMismatch, "no space groups");
    for (const auto &g : cfg.groups) {
        if (g.dim <= 0) throw Error(ErrorKind::DimensionMismatch, "group dimension must be positive");
        if (!(g.sigma > 0)) throw Error(ErrorKind::ValidationFailed, "sigma must be positive");
    }
    if (static_cast<int>(cfg.box.size()) != cfg.space_dim()) {
        std::ostringstream os;
        os << "box has " << cfg.box.size() << " axes, groups sum to " << cfg.space_dim();
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    for (double L : cfg.box)
        if (!(L > 0)) throw Error(ErrorKind::ValidationFailed, "box lengths must be positive");

    const bool integer_theta = theta_is_integer(cfg.theta);
    if (integer_theta) {
        long n = std::lround(cfg.theta);
        if (n % 4 == 2) {
            std::ostringstream os;
            os << "theta = " << n << " has the form 4k+2";
            throw Error(ErrorKind::ForbiddenIntegerOrder, os.str());
        }
    }

    const double ta = cfg.theta * cfg.alpha;
    require_fractional(ta, "theta*alpha");
    require_fractional(cfg.theta + ta, "theta+theta*alpha");
    for (const auto &g : cfg.groups) {
        require_fractional(g.sigma * cfg.alpha, "sigma*alpha");
        require_fractional(g.sigma + g.sigma * cfg.alpha, "sigma+sigma*alpha");
    }

    RegimeFlags f;
    f.theta_integer = integer_theta;
    const double s = frac_part(cfg.theta) + ta;
    f.frac_small = !integer_theta && s < 1.0;
    f.frac_large = !integer_theta && s > 1.0;
    f.n_alpha_band = static_cast<int>(std::floor(ta)) + 1;
    f.needs_compat = !integer_theta;
    f.needs_higher_compat = f.needs_compat && ta > 1.0;
    return f;
}

std::vector<double> trace_space(const AnisotropyConfig &cfg, int i)
{
    if (i < 0 || i > max_trace_index(cfg.theta)) {
        std::ostringstream os;
        os << "trace index " << i << " outside 0.." << max_trace_index(cfg.theta);
        throw Error(ErrorKind::IndexOutOfRange, os.str());
    }
    std::vector<double> out;
    for (const auto &g : cfg.groups)
        out.push_back(g.sigma * (1.0 + cfg.alpha) - i * g.sigma / cfg.theta);
    return out;
}

DerivedExponents derive_exponents(const AnisotropyConfig &cfg)
{
    DerivedExponents d;
    d.time_order = cfg.theta + cfg.theta * cfg.alpha;
    d.rhs_time_order = cfg.theta * cfg.alpha;
    for (const auto &g : cfg.groups) {
        d.space_orders.push_back(g.sigma * (1.0 + cfg.alpha));
        d.rhs_space_orders.push_back(g.sigma * cfg.alpha);
        d.lift_space_orders.push_back(g.sigma / cfg.theta);
    }
    for (int i = 0; i <= max_trace_index(cfg.theta); ++i) d.trace_orders.push_back(trace_space(cfg, i));
    return d;
}

} // namespace fracheat
