#include "fracheat/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracheat/expr.hpp"
#include "fracheat/frac_space.hpp"
#include "fracheat/frac_time.hpp"
#include "fracheat/holder.hpp"
#include "fracheat/mollify.hpp"
#include "fracheat/multiplier.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat {

using nlohmann::json;

namespace {

constexpr const char *kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> as_vector(const json &v, std::size_t n)
{
    if (v.is_array()) return v.get<std::vector<double>>();
    return std::vector<double>(n, v.get<double>());
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

json holder_json(const HolderReport &h)
{
    json j;
    j["kind"] = h.kind == NormKind::solution ? "solution" : "data";
    j["sup_norm"] = h.sup_norm;
    j["space_exponents"] = h.space_exponents;
    j["space_seminorms"] = h.space_seminorms;
    j["time_exponent"] = h.time_exponent;
    j["time_seminorm"] = h.time_seminorm;
    j["total"] = h.total;
    if (!h.fitted_space.empty()) {
        json fs = json::array();
        for (double v : h.fitted_space) fs.push_back(std::isfinite(v) ? json(v) : json(nullptr));
        j["fitted_space"] = fs;
        j["fitted_time"] = std::isfinite(h.fitted_time) ? json(h.fitted_time) : json(nullptr);
    }
    return j;
}

json compat_json(const CompatReport &c)
{
    return {{"required", c.required},       {"pass", c.pass},
            {"defect_sup", c.defect_sup},   {"scale", c.scale},
            {"higher_required", c.higher_required}, {"higher_defects", c.higher_defects}};
}

struct Session {
    std::string out = "out";
    std::string command;
    std::vector<std::string> argv;
    json config = json::object();
    unsigned seed = 7;
    std::vector<std::string> artifacts;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    std::string path(const std::string &name)
    {
        std::filesystem::create_directories(out);
        const std::string p = (std::filesystem::path(out) / name).string();
        artifacts.push_back(p);
        return p;
    }

    std::map<std::string, std::string> meta(const std::string &quantity) const
    {
        return {{"config.hash", config_hash(config)}, {"command", command}, {"quantity", quantity}};
    }

    void write_json(const std::string &name, const json &j)
    {
        std::ofstream os(path(name));
        os << j.dump(2) << "\n";
    }

    void manifest()
    {
        std::filesystem::create_directories(out);
        json m;
        m["command"] = command;
        m["argv"] = argv;
        m["config"] = config;
        m["config_hash"] = config_hash(config);
        m["seed"] = seed;
        m["version"] = kVersion;
        m["threads"] = threads();
        m["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m["artifacts"] = artifacts;
        std::ofstream os((std::filesystem::path(out) / "manifest.json").string());
        os << m.dump(2) << "\n";
    }
};

json read_config_file(const std::string &path)
{
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read config " + path);
    try {
        return json::parse(is);
    } catch (const json::exception &e) {
        throw UsageError(std::string("config parse error: ") + e.what());
    }
}

double relative_error(const Field &u, const Expr &exact)
{
    const Field ex = sample(exact, u.space, u.time);
    double err = 0.0;
    for (std::size_t i = 0; i < u.data.size(); ++i) err = std::max(err, std::fabs(u.data[i] - ex.data[i]));
    const double s = ex.sup();
    return s > 0 ? err / s : err;
}

Field restrict_to(const Field &fine, const Field &coarse)
{
    // coarse nodes are a subset of fine nodes when both grids are dyadic refinements
    Field out(coarse.space, coarse.time);
    const int rt = fine.time.M / coarse.time.M;
    std::vector<int> rs(coarse.space.dims());
    for (int a = 0; a < coarse.space.dims(); ++a) rs[a] = fine.space.n[a] / coarse.space.n[a];
    std::vector<int> idx(coarse.space.dims());
    for (int j = 0; j <= coarse.time.M; ++j)
        for (std::size_t s = 0; s < coarse.slice_size(); ++s) {
            coarse.space.unravel(s, idx.data());
            std::size_t fs = 0;
            for (int a = 0; a < coarse.space.dims(); ++a) fs += idx[a] * rs[a] * fine.space.stride(a);
            out.at(s, j) = fine.at(fs, j * rt);
        }
    return out;
}

SymbolDescriptor symbol_for(const AnisotropyConfig &cfg, SymbolVariant v, int index = 0)
{
    SymbolDescriptor d;
    d.variant = v;
    d.cfg = cfg;
    d.index = index;
    return d;
}

} // namespace

json preset_config(const std::string &name)
{
    const double L = 2.0 * M_PI;
    if (name == "example_8_1")
        return {{"theta", 0.5}, {"alpha", 0.5}, {"groups", {{{"dim", 1}, {"sigma", 1.0}}}}, {"box", {L}},
                {"nx", {64}},   {"T", 1.0},     {"nt", 2048},
                {"f", {{"preset", "example_8_1"}}}, {"backend", "mode_stepping"}, {"strict", true}};
    if (name == "remark_r00")
        return {{"theta", 0.5}, {"alpha", 2.5}, {"groups", {{{"dim", 1}, {"sigma", 1.0}}}}, {"box", {L}},
                {"nx", {64}},   {"T", 1.0},     {"nt", 2048},
                {"f", {{"preset", "remark_r00"}}}, {"backend", "mode_stepping"}, {"strict", false}};
    if (name == "plane_wave")
        return {{"theta", 0.5}, {"alpha", 0.5}, {"groups", {{{"dim", 1}, {"sigma", 1.5}}}}, {"box", {L}},
                {"nx", {32}},   {"T", 1.0},     {"nt", 512},
                {"f", {{"preset", "plane_wave"}}}, {"backend", "mode_stepping"}, {"strict", true}};
    if (name == "gaussian_bump")
        return {{"theta", 0.6}, {"alpha", 0.4}, {"groups", {{{"dim", 1}, {"sigma", 1.3}}}}, {"box", {16.0}},
                {"nx", {64}},   {"T", 1.0},     {"nt", 256},
                {"f", {{"preset", "gaussian_bump"}}}, {"backend", "mode_stepping"}, {"strict", true}};
    throw UsageError("unknown preset '" + name + "'");
}

json resolve_config(const json &raw)
{
    if (!raw.is_object()) throw UsageError("config must be an object");
    json cfg = raw.contains("preset") ? preset_config(raw.at("preset").get<std::string>()) : json::object();
    for (auto it = raw.begin(); it != raw.end(); ++it)
        if (it.key() != "preset") cfg[it.key()] = it.value();
    return cfg;
}

std::string config_hash(const json &cfg)
{
    // FNV-1a over the canonical dump
    const std::string s = cfg.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ProblemSpec build_problem(const json &raw)
{
    ProblemSpec ps;
    json c;
    try {
        c = resolve_config(raw);
        for (const char *key : {"theta", "alpha", "groups", "box", "nx", "T", "nt", "f"})
            if (!c.contains(key)) throw UsageError(std::string("missing key '") + key + "'");
        AnisotropyConfig &cfg = ps.problem.cfg;
        cfg.theta = c.at("theta").get<double>();
        cfg.alpha = c.at("alpha").get<double>();
        for (const auto &g : c.at("groups")) cfg.groups.push_back({g.at("dim").get<int>(), g.at("sigma").get<double>()});
        int N = 0;
        for (const auto &g : cfg.groups) N += g.dim;
        cfg.box = as_vector(c.at("box"), N);
        cfg.T = c.at("T").get<double>();
        const auto nx = as_vector(c.at("nx"), N);
        std::vector<int> pts;
        for (double v : nx) pts.push_back(static_cast<int>(v));
        validate(cfg);
        const SpaceGrid sg = make_space_grid(cfg, pts);
        const TimeGrid tg{0.0, cfg.T, c.at("nt").get<int>()};
        check_grids(sg, tg);

        const json &f = c.at("f");
        std::string preset;
        if (f.is_string()) ps.f_text = f.get<std::string>();
        else if (f.contains("expression")) ps.f_text = f.at("expression").get<std::string>();
        else if (f.contains("preset")) preset = f.at("preset").get<std::string>();
        else throw UsageError("f needs an expression or a preset");
        if (preset == "example_8_1" || preset == "remark_r00") {
            ps.f_text = "t";
            const double C = 1.0 / std::tgamma(2.0 + cfg.theta);
            const double e = 1.0 + cfg.theta;
            ps.exact = [C, e](const double *, double t) { return C * std::pow(t, e); };
            ps.exact_text = fmt(C) + "*t^" + fmt(e);
        } else if (preset == "plane_wave") {
            ps.f_text = "cos(x1)*t";
        } else if (preset == "gaussian_bump") {
            ps.f_text = "t*exp(-r^2)";
        } else if (!preset.empty()) {
            throw UsageError("unknown f preset '" + preset + "'");
        }
        if (c.contains("exact")) {
            ps.exact_text = c.at("exact").get<std::string>();
            ps.exact = parse_expression(ps.exact_text, N);
        }
        ps.problem.f = sample(parse_expression(ps.f_text, N), sg, tg);
        if (c.contains("traces")) {
            const TimeGrid t0{0.0, 0.0, 0};
            for (const auto &tr : c.at("traces")) {
                const std::string txt = tr.is_string() ? tr.get<std::string>() : tr.at("expression").get<std::string>();
                ps.trace_texts.push_back(txt);
                ps.problem.traces.push_back(sample(parse_expression(txt, N), sg, t0));
            }
        }
        const std::string be = c.value("backend", std::string("mode_stepping"));
        if (be == "mode_stepping") ps.problem.backend = SolverBackend::mode_stepping;
        else if (be == "spacetime_fourier") ps.problem.backend = SolverBackend::spacetime_fourier;
        else throw UsageError("unknown backend '" + be + "'");
        ps.problem.strict = c.value("strict", true);
        ps.problem.tol = c.value("tol", 1e-6);
        ps.seed = c.value("seed", 7u);
    } catch (const json::exception &e) {
        throw UsageError(std::string("config error: ") + e.what());
    }
    ps.snapshot = c;
    return ps;
}

int exit_code_for(const Error &e)
{
    switch (e.kind()) {
    case ErrorKind::ValidationFailed:
    case ErrorKind::IntegralExponent:
    case ErrorKind::ForbiddenIntegerOrder:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::InvalidArgument:
    case ErrorKind::MissingTraces:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::NonFinite:
        return 2;
    case ErrorKind::CompatibilityFailed:
    case ErrorKind::RegimeUnsupported:
    case ErrorKind::TraceMismatch:
    case ErrorKind::NonzeroTraces:
    case ErrorKind::LiftUnavailable:
    case ErrorKind::UnresolvableEpsilon:
    case ErrorKind::StepExceedsGrid:
    case ErrorKind::SplitViolation:
    case ErrorKind::TooFewPoints:
    case ErrorKind::OriginOutsideGrid:
    case ErrorKind::IntegralOrder:
        return 3;
    default:
        return 4;
    }
}

namespace {

struct Globals {
    int threads = 0;
    double tol = -1;
    bool strict = false, lax = false;
    std::string out = "out";
};

ProblemSpec load(Session &ss, const std::string &config, const std::string &preset, const Globals &g)
{
    json raw;
    if (!config.empty()) raw = read_config_file(config);
    else if (!preset.empty()) raw = {{"preset", preset}};
    else throw UsageError("give a config file or --preset");
    ProblemSpec ps = build_problem(raw);
    if (g.strict) ps.problem.strict = true;
    if (g.lax) ps.problem.strict = false;
    if (g.tol > 0) ps.problem.tol = g.tol;
    ps.snapshot["strict"] = ps.problem.strict;
    ps.snapshot["tol"] = ps.problem.tol;
    ss.config = ps.snapshot;
    ss.seed = ps.seed;
    return ps;
}

int cmd_solve(Session &ss, const ProblemSpec &ps)
{
    const Solution sol = solve(ps.problem);
    const auto meta = ss.meta("u");
    write_csv(sol.u, ss.path("u.csv"), meta);
    write_csv(sol.residual, ss.path("residual.csv"), ss.meta("residual"));
    json rep;
    rep["backend"] = sol.diag.backend == SolverBackend::mode_stepping ? "mode_stepping" : "spacetime_fourier";
    rep["compatibility"] = compat_json(sol.diag.compat);
    rep["holder"] = holder_json(sol.holder);
    rep["residual_sup"] = sol.diag.residual_sup;
    rep["residual_rel"] = sol.diag.residual_rel;
    rep["outside_proven_regime"] = sol.diag.outside_proven_regime;
    rep["notes"] = sol.diag.notes;
    if (sol.diag.backend == SolverBackend::spacetime_fourier) {
        rep["leakage"] = sol.diag.leakage;
        rep["cross_backend_rel"] = sol.diag.cross_backend_rel;
    }
    std::cout << "residual_rel: " << sol.diag.residual_rel << "\n";
    if (ps.exact) {
        const double e = relative_error(sol.u, ps.exact);
        rep["rel_err"] = e;
        rep["exact"] = ps.exact_text;
        std::cout << "rel_err: " << e << "\n";
    }
    try {
        const auto fit = exponent_scan(sol.u, kTimeAxis, 2);
        rep["time_exponent_near_0"] = fit.exponent;
        std::cout << "time_exponent_near_0: " << fit.exponent << "\n";
    } catch (const Error &) {
    }
    ss.write_json("report.json", rep);
    return 0;
}

int cmd_check(Session &ss, const ProblemSpec &ps)
{
    const RegimeFlags fl = validate(ps.problem.cfg);
    const CompatReport cr = check_compatibility(ps.problem);
    json rep;
    rep["valid"] = true;
    rep["flags"] = {{"frac_small", fl.frac_small},         {"frac_large", fl.frac_large},
                    {"theta_integer", fl.theta_integer},   {"n_alpha_band", fl.n_alpha_band},
                    {"needs_compat", fl.needs_compat},     {"needs_higher_compat", fl.needs_higher_compat}};
    rep["compatibility"] = compat_json(cr);
    ss.write_json("check.json", rep);
    std::cout << rep.dump(2) << "\n";
    return !cr.pass && ps.problem.strict ? 3 : 0;
}

int cmd_lift(Session &ss, const ProblemSpec &ps)
{
    if (ps.problem.traces.empty()) throw UsageError("config has no traces to lift");
    const LiftResult lr = lift_initial_data(ps.problem.cfg, ps.problem.traces, ps.problem.f.time);
    write_csv(lr.w, ss.path("lift.csv"), ss.meta("lift"));
    for (std::size_t j = 0; j < lr.psi.size(); ++j)
        write_csv(lr.psi[j], ss.path("psi" + std::to_string(j) + ".csv"), ss.meta("psi" + std::to_string(j)));
    json rep{{"path", lr.path}, {"trace_errors", lr.trace_errors}};
    ss.write_json("lift.json", rep);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_convergence(Session &ss, const ProblemSpec &base, const json &raw_cfg, int levels, bool refine_x)
{
    if (levels < 2) throw UsageError("need at least two levels");
    std::vector<Solution> sols;
    std::vector<double> dts, dxs;
    for (int l = 0; l < levels; ++l) {
        json c = raw_cfg;
        c["nt"] = base.problem.f.time.M << l;
        if (refine_x) {
            json nx = json::array();
            for (int n : base.problem.f.space.n) nx.push_back(n << l);
            c["nx"] = nx;
        }
        ProblemSpec ps = build_problem(c);
        ps.problem.strict = base.problem.strict;
        ps.problem.tol = base.problem.tol;
        sols.push_back(solve(ps.problem, {false, false}));
        dts.push_back(ps.problem.f.time.dt());
        dxs.push_back(ps.problem.f.space.dx(0));
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "# config.hash: " << config_hash(ss.config) << "\n# reference: " << (base.exact ? "exact" : "finest level")
        << "\n# units: dt=time dx=length error=1 order=1\nlevel,dt,dx,error,order\n";
    std::vector<double> errs;
    const int last = base.exact ? levels : levels - 1;
    for (int l = 0; l < last; ++l) {
        double e;
        if (base.exact) {
            e = relative_error(sols[l].u, base.exact);
        } else {
            const Field ref = restrict_to(sols.back().u, sols[l].u);
            double m = 0.0;
            for (std::size_t i = 0; i < ref.data.size(); ++i) m = std::max(m, std::fabs(ref.data[i] - sols[l].u.data[i]));
            e = m / std::max(ref.sup(), 1e-300);
        }
        errs.push_back(e);
        csv << l << "," << dts[l] << "," << dxs[l] << "," << e << ",";
        if (l > 0 && errs[l] > 0 && errs[l - 1] > 0) csv << std::log2(errs[l - 1] / errs[l]);
        csv << "\n";
    }
    std::ofstream(ss.path("convergence.csv")) << csv.str();
    std::cout << csv.str();
    return 0;
}

int cmd_seminorm(Session &ss, const std::string &field_path, const std::string &axis, double l, int k, int group,
                 const std::string &config, const std::string &kind)
{
    const Field u = read_csv(field_path);
    json rep;
    if (!config.empty()) {
        const ProblemSpec ps = build_problem(read_config_file(config));
        ss.config = ps.snapshot;
        const HolderReport h = full_norm(u, ps.problem.cfg, kind == "data" ? NormKind::data : NormKind::solution, true);
        rep = holder_json(h);
    } else {
        SeminormSpec sp;
        sp.l = l;
        sp.k = k > 0 ? k : static_cast<int>(std::floor(l)) + 1;
        sp.group = group;
        if (axis == "t") sp.axis = kTimeAxis;
        else if (axis.size() > 1 && axis[0] == 'x') sp.axis = std::stoi(axis.substr(1)) - 1;
        else throw UsageError("axis must be t or x<i>");
        rep["axis"] = axis;
        rep["l"] = sp.l;
        rep["k"] = sp.k;
        rep["seminorm"] = seminorm(u, sp);
    }
    ss.write_json("seminorm.json", rep);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_multiplier(Session &ss, const ProblemSpec &ps, const std::vector<std::string> &checks, int nodes)
{
    const AnisotropyConfig &cfg = ps.problem.cfg;
    auto want = [&](const char *name) {
        return checks.empty() || std::find(checks.begin(), checks.end(), name) != checks.end();
    };
    json rep;
    const int N = cfg.space_dim();
    const auto pts = annulus_samples(N, 0.25, 256, ps.seed);
    if (want("partition")) {
        double dev = 0.0;
        for (const auto &p : pts) {
            std::vector<double> xi(p.begin(), p.end() - 1);
            cplx s = eval(symbol_for(cfg, SymbolVariant::m0), xi, p.back());
            for (std::size_t k = 0; k < cfg.groups.size(); ++k)
                s += eval(symbol_for(cfg, SymbolVariant::mi, static_cast<int>(k)), xi, p.back());
            dev = std::max(dev, std::abs(s - 1.0));
        }
        rep["partition_deviation"] = dev;
    }
    if (want("dilation")) {
        double dev = dilation_invariance_check(symbol_for(cfg, SymbolVariant::m0), pts);
        for (std::size_t k = 0; k < cfg.groups.size(); ++k)
            dev = std::max(dev, dilation_invariance_check(symbol_for(cfg, SymbolVariant::mi, static_cast<int>(k)), pts));
        rep["dilation_deviation"] = dev;
    }
    if (want("condition410")) {
        AnnulusSpec as;
        as.nodes = nodes;
        const auto r = condition_410_check(symbol_for(cfg, SymbolVariant::m0), as);
        rep["condition410"] = {{"delta", r.delta}, {"p", r.p},         {"mu", r.mu},
                               {"mu_refined", r.mu_refined}, {"drift", r.drift}, {"stable", r.stable}};
    }
    if (want("vanishing")) {
        json v = json::array();
        for (std::size_t k = 0; k < cfg.groups.size(); ++k)
            v.push_back(vanishing_condition_check(symbol_for(cfg, SymbolVariant::mi, static_cast<int>(k))));
        rep["vanishing_mi"] = v;
        rep["vanishing_m0"] = vanishing_condition_check(symbol_for(cfg, SymbolVariant::m0));
    }
    if (want("denominator")) {
        json d = json::object();
        for (int n : {1, 2, 3, 4}) {
            AnisotropyConfig c = cfg;
            c.theta = n;
            d[std::to_string(n)] = denominator_distance(c);
        }
        rep["denominator_distance"] = d;
    }
    if (want("support")) {
        SpaceGrid sg;
        sg.n = std::vector<int>(N, 32);
        sg.L = std::vector<double>(N, 16.0);
        for (int a = 0; a < N; ++a) sg.group.push_back(cfg.group_of_axis(a));
        const TimeGrid tg{-16.0, 16.0 - 1.0 / 64, 2047};
        const int n = ceil_order(cfg.theta) + 2;
        rep["support_leakage_G" + std::to_string(n)] = support_check(symbol_for(cfg, SymbolVariant::Gn, n), sg, tg).leakage;
    }
    ss.write_json("multiplier.json", rep);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_mollify_demo(Session &ss, double alpha, std::vector<double> eps, int nt, bool smooth)
{
    if (eps.empty()) eps = {0.01, 0.02, 0.04, 0.08, 0.16};
    SpaceGrid sg;
    sg.n = {32};
    sg.L = {8.0};
    sg.group = {0};
    const TimeGrid tg{-1.0, 1.0, nt};
    const Field f = sample(
        [&](const double *x, double t) { return (smooth ? std::cos(t) : (t >= 0 ? 1.0 : 0.0)) * std::exp(-x[0] * x[0]); },
        sg, tg);
    ss.config = {{"alpha", alpha}, {"eps", eps}, {"nt", nt}, {"smooth", smooth}};
    const BlowupFit fit = jump_blowup_scan(f, alpha, eps);
    std::ostringstream csv;
    csv.precision(17);
    csv << "# config.hash: " << config_hash(ss.config) << "\n# grid: x1 n=32 L=8; t start=-1 stop=1 M=" << nt
        << "\n# units: eps=time seminorm=1\n# slope: " << fit.slope << "\neps,seminorm\n";
    for (std::size_t i = 0; i < fit.eps.size(); ++i) csv << fit.eps[i] << "," << fit.seminorms[i] << "\n";
    std::ofstream(ss.path("blowup.csv")) << csv.str();
    std::cout << csv.str();
    return 0;
}

int cmd_fract(Session &ss, const std::string &op, double theta, const std::string &expr, double T, int nt,
              const std::vector<double> &traces, int m)
{
    const Expr g = parse_expression(expr, 0);
    const TimeGrid grid{0.0, T, nt};
    std::vector<double> v(nt + 1);
    for (int j = 0; j <= nt; ++j) v[j] = g(nullptr, grid.t(j));
    const TimeSeries in(grid, v, traces);
    TimeSeries out;
    if (op == "caputo") out = caputo(theta, in);
    else if (op == "rl") out = riemann_liouville(theta, in);
    else if (op == "integral") out = frac_integral(theta, in);
    else if (op == "marchaud") out = marchaud(MarchaudParams{theta, m, 0}, in);
    else throw UsageError("unknown operator '" + op + "'");
    ss.config = {{"op", op}, {"theta", theta}, {"expression", expr}, {"T", T}, {"nt", nt}, {"traces", traces}, {"m", m}};
    std::ostringstream csv;
    csv.precision(17);
    csv << "# config.hash: " << config_hash(ss.config) << "\n# grid: t start=0 stop=" << T << " M=" << nt
        << "\n# units: t=time g=1 value=time^-theta\nt,g,value\n";
    for (int j = 0; j <= nt; ++j) csv << grid.t(j) << "," << v[j] << "," << out.v[j] << "\n";
    std::ofstream(ss.path("fract.csv")) << csv.str();
    return 0;
}

} // namespace

int run_cli(int argc, char **argv)
{
    CLI::App app{"Cauchy problems for fractional-in-time, fractional-in-space heat equations"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    app.add_option("--tol", g.tol, "compatibility tolerance");
    app.add_flag("--strict", g.strict, "compatibility failure is an error");
    app.add_flag("--lax", g.lax, "compatibility failure is a warning");
    app.add_option("--out", g.out, "output directory");

    std::string config, preset, field, axis = "t", kind = "solution", refine = "both";
    double l = 0.5, alpha = 0.5;
    int k = 0, group = -1, levels = 3, nodes = 64, nt = 2048;
    bool smooth = false;
    std::vector<std::string> checks;
    std::vector<double> eps;

    auto add_cfg = [&](CLI::App *s) {
        s->add_option("config", config, "problem config (JSON)");
        s->add_option("--preset", preset, "example_8_1, remark_r00, plane_wave or gaussian_bump");
    };
    auto *solve_c = app.add_subcommand("solve", "solve a Cauchy problem");
    add_cfg(solve_c);
    auto *check_c = app.add_subcommand("check", "validate a config and test compatibility");
    add_cfg(check_c);
    auto *lift_c = app.add_subcommand("lift", "build a function with the configured traces");
    add_cfg(lift_c);
    auto *conv_c = app.add_subcommand("convergence", "error against step size over a refinement ladder");
    add_cfg(conv_c);
    conv_c->add_option("--levels", levels, "number of refinement levels");
    conv_c->add_option("--refine", refine, "t or both");
    auto *mult_c = app.add_subcommand("multiplier", "multiplier checks for the solution symbols");
    add_cfg(mult_c);
    mult_c->add_option("--checks", checks, "partition dilation condition410 vanishing denominator support");
    mult_c->add_option("--nodes", nodes, "annulus quadrature nodes per half axis");
    auto *semi_c = app.add_subcommand("seminorm", "Hölder seminorms of a field CSV");
    semi_c->add_option("field", field, "field CSV")->required();
    semi_c->add_option("--axis", axis, "t or x<i>");
    semi_c->add_option("--l", l, "exponent");
    semi_c->add_option("--k", k, "difference order (default floor(l)+1)");
    semi_c->add_option("--group", group, "space group instead of a single axis");
    semi_c->add_option("--config", config, "config for the full norm");
    semi_c->add_option("--kind", kind, "solution or data");
    auto *moll_c = app.add_subcommand("mollify-demo", "blowup of mollified jumps in the time seminorm");
    moll_c->add_option("--alpha", alpha, "Hölder exponent in t");
    moll_c->add_option("--eps", eps, "mollifier radii");
    moll_c->add_option("--nt", nt, "time steps on [-1, 1]");
    moll_c->add_flag("--smooth", smooth, "smooth input instead of a jump");

    std::string op = "caputo", expr;
    double T = 1.0;
    int m = 1;
    std::vector<double> traces;
    auto *fract_c = app.add_subcommand("fract", "tabulate a fractional time operator of g(t)");
    fract_c->add_option("expression", expr, "g(t)")->required();
    fract_c->add_option("--op", op, "caputo, rl, integral or marchaud");
    fract_c->add_option("--theta", alpha, "order")->required();
    fract_c->add_option("--T", T, "horizon");
    fract_c->add_option("--nt", nt, "time steps");
    fract_c->add_option("--traces", traces, "g(0), g'(0), ...");
    fract_c->add_option("--m", m, "Marchaud difference order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (g.strict && g.lax) {
        std::cerr << "error: --strict and --lax are exclusive\n";
        return 2;
    }
    if (g.threads > 0) set_threads(g.threads);

    Session ss;
    ss.out = g.out;
    for (int i = 0; i < argc; ++i) ss.argv.push_back(argv[i]);
    try {
        int rc = 0;
        if (solve_c->parsed()) {
            ss.command = "solve";
            rc = cmd_solve(ss, load(ss, config, preset, g));
        } else if (check_c->parsed()) {
            ss.command = "check";
            rc = cmd_check(ss, load(ss, config, preset, g));
        } else if (lift_c->parsed()) {
            ss.command = "lift";
            rc = cmd_lift(ss, load(ss, config, preset, g));
        } else if (conv_c->parsed()) {
            ss.command = "convergence";
            const ProblemSpec ps = load(ss, config, preset, g);
            rc = cmd_convergence(ss, ps, ps.snapshot, levels, refine == "both");
        } else if (mult_c->parsed()) {
            ss.command = "multiplier";
            rc = cmd_multiplier(ss, load(ss, config, preset, g), checks, nodes);
        } else if (semi_c->parsed()) {
            ss.command = "seminorm";
            rc = cmd_seminorm(ss, field, axis, l, k, group, config, kind);
        } else if (moll_c->parsed()) {
            ss.command = "mollify-demo";
            rc = cmd_mollify_demo(ss, alpha, eps, nt, smooth);
        } else if (fract_c->parsed()) {
            ss.command = "fract";
            rc = cmd_fract(ss, op, alpha, expr, T, nt, traces, m);
        }
        ss.manifest();
        return rc;
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace fracheat
