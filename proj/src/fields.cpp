#include "fracheat/fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "fracheat/error.hpp"

namespace fracheat {

std::size_t SpaceGrid::size() const
{
    std::size_t s = 1;
    for (int k : n) s *= static_cast<std::size_t>(k);
    return s;
}

double SpaceGrid::freq(int axis, int i) const
{
    const int k = i < n[axis] / 2 ? i : i - n[axis];
    return 2.0 * M_PI * k / L[axis];
}

double SpaceGrid::cell_volume() const
{
    double v = 1.0;
    for (int a = 0; a < dims(); ++a) v *= dx(a);
    return v;
}

std::size_t SpaceGrid::stride(int axis) const
{
    std::size_t s = 1;
    for (int a = dims() - 1; a > axis; --a) s *= n[a];
    return s;
}

void SpaceGrid::unravel(std::size_t flat, int *idx) const
{
    for (int a = dims() - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n[a]);
        flat /= n[a];
    }
}

SpaceGrid make_space_grid(const AnisotropyConfig &cfg, const std::vector<int> &points)
{
    if (static_cast<int>(points.size()) != cfg.space_dim() || cfg.box.size() != points.size())
        throw Error(ErrorKind::ShapeMismatch, "point counts do not match the space dimension");
    SpaceGrid g;
    g.n = points;
    g.L = cfg.box;
    for (int a = 0; a < cfg.space_dim(); ++a) g.group.push_back(cfg.group_of_axis(a));
    check_grids(g, TimeGrid{0.0, cfg.T, 2});
    return g;
}

void check_grids(const SpaceGrid &s, const TimeGrid &t)
{
    if (s.n.size() != s.L.size()) throw Error(ErrorKind::ShapeMismatch, "axis count mismatch");
    for (int k : s.n)
        if (k < 4 || k % 2) throw Error(ErrorKind::ShapeMismatch, "point counts must be even and >= 4");
    if (t.M < 2) throw Error(ErrorKind::ShapeMismatch, "time grid needs M >= 2");
}

Field::Field(const SpaceGrid &s, const TimeGrid &t) : space(s), time(t), data(s.size() * t.points(), 0.0) {}

double Field::sup() const
{
    double m = 0.0;
    for (double v : data) m = std::max(m, std::fabs(v));
    return m;
}

Field spatial_field(const SpaceGrid &s)
{
    Field f;
    f.space = s;
    f.time = TimeGrid{0.0, 0.0, 0};
    f.data.assign(s.size(), 0.0);
    return f;
}

double SpectralField::time_freq(int k) const
{
    const int P = time.points();
    const int kk = k < (P + 1) / 2 ? k : k - P;
    return 2.0 * M_PI * kk / (P * time.dt());
}

namespace {

std::mutex g_plan_mu;

void check_same_space(const SpaceGrid &a)
{
    if (a.n.empty()) throw Error(ErrorKind::ShapeMismatch, "empty space grid");
}

// (-1)^k per axis: phase of the centred-box origin x_0 = -L/2
std::vector<double> origin_phase(const SpaceGrid &g)
{
    std::vector<double> ph(g.size());
    std::vector<int> idx(g.dims());
    for (std::size_t s = 0; s < ph.size(); ++s) {
        g.unravel(s, idx.data());
        int parity = 0;
        for (int a = 0; a < g.dims(); ++a) {
            const int k = idx[a] < g.n[a] / 2 ? idx[a] : idx[a] - g.n[a];
            parity += k;
        }
        ph[s] = (parity % 2 == 0) ? 1.0 : -1.0;
    }
    return ph;
}

} // namespace

void fft_batch(std::vector<cplx> &buf, const std::vector<int> &dims, int howmany, int sign)
{
    int dist = 1;
    for (int d : dims) dist *= d;
    if (static_cast<std::size_t>(dist) * howmany != buf.size())
        throw Error(ErrorKind::ShapeMismatch, "fft buffer size");
    // fftw_malloc keeps the alignment, and hence the chosen codelets, identical across runs
    auto *p = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * buf.size()));
    if (!p) throw Error(ErrorKind::InvalidArgument, "fft allocation failed");
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lk(g_plan_mu);
        plan = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, p, nullptr, 1, dist, p,
                                  nullptr, 1, dist, sign, FFTW_ESTIMATE);
    }
    std::memcpy(p, buf.data(), sizeof(fftw_complex) * buf.size());
    fftw_execute(plan);
    std::memcpy(static_cast<void *>(buf.data()), p, sizeof(fftw_complex) * buf.size());
    std::lock_guard<std::mutex> lk(g_plan_mu);
    fftw_destroy_plan(plan);
    fftw_free(p);
}

SpectralField fft_space(const Field &f)
{
    check_same_space(f.space);
    const std::size_t S = f.space.size();
    const int P = f.time.points();
    if (f.data.size() != S * P) throw Error(ErrorKind::ShapeMismatch, "field size");
    SpectralField out;
    out.space = f.space;
    out.time = f.time;
    out.data.assign(f.data.begin(), f.data.end());
    fft_batch(out.data, f.space.n, P, FFTW_FORWARD);
    const double scale = std::sqrt(f.space.cell_volume() / S);
    const auto ph = origin_phase(f.space);
    for (int j = 0; j < P; ++j)
        for (std::size_t s = 0; s < S; ++s) out.data[j * S + s] *= scale * ph[s];
    return out;
}

Field ifft_space(const SpectralField &sp, double *max_imag)
{
    if (sp.spacetime) throw Error(ErrorKind::ShapeMismatch, "space-time spectrum passed to ifft_space");
    const std::size_t S = sp.space.size();
    const int P = sp.time.points();
    if (sp.data.size() != S * P) throw Error(ErrorKind::ShapeMismatch, "spectrum size");
    std::vector<cplx> buf(sp.data);
    const auto ph = origin_phase(sp.space);
    for (int j = 0; j < P; ++j)
        for (std::size_t s = 0; s < S; ++s) buf[j * S + s] *= ph[s];
    fft_batch(buf, sp.space.n, P, FFTW_BACKWARD);
    const double scale = 1.0 / std::sqrt(sp.space.cell_volume() * S);
    Field out;
    out.space = sp.space;
    out.time = sp.time;
    out.data.resize(buf.size());
    double mi = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        out.data[i] = buf[i].real() * scale;
        mi = std::max(mi, std::fabs(buf[i].imag() * scale));
    }
    if (max_imag) *max_imag = mi;
    return out;
}

SpectralField fft_spacetime(const Field &f)
{
    const std::size_t S = f.space.size();
    const int P = f.time.points();
    if (f.data.size() != S * P) throw Error(ErrorKind::ShapeMismatch, "field size");
    const double sup = f.sup();
    double edge = 0.0;
    for (std::size_t s = 0; s < S; ++s)
        edge = std::max({edge, std::fabs(f.at(s, 0)), std::fabs(f.at(s, P - 1))});
    if (sup > 0 && edge > 1e-8 * sup) {
        std::ostringstream os;
        os << "time-window edge samples reach " << edge / sup << " of sup";
        throw Error(ErrorKind::SupportLeakage, os.str());
    }
    SpectralField out;
    out.space = f.space;
    out.time = f.time;
    out.spacetime = true;
    out.data.assign(f.data.begin(), f.data.end());
    std::vector<int> dims{P};
    dims.insert(dims.end(), f.space.n.begin(), f.space.n.end());
    fft_batch(out.data, dims, 1, FFTW_FORWARD);
    const double scale = std::sqrt(f.space.cell_volume() * f.time.dt() / (S * P));
    const auto ph = origin_phase(f.space);
    for (int k = 0; k < P; ++k) {
        const cplx tph = std::exp(cplx(0.0, -out.time_freq(k) * f.time.start));
        for (std::size_t s = 0; s < S; ++s) out.data[k * S + s] *= scale * ph[s] * tph;
    }
    return out;
}

Field ifft_spacetime(const SpectralField &sp, double *max_imag)
{
    if (!sp.spacetime) throw Error(ErrorKind::ShapeMismatch, "space spectrum passed to ifft_spacetime");
    const std::size_t S = sp.space.size();
    const int P = sp.time.points();
    std::vector<cplx> buf(sp.data);
    const auto ph = origin_phase(sp.space);
    for (int k = 0; k < P; ++k) {
        const cplx tph = std::exp(cplx(0.0, sp.time_freq(k) * sp.time.start));
        for (std::size_t s = 0; s < S; ++s) buf[k * S + s] *= ph[s] * tph;
    }
    std::vector<int> dims{P};
    dims.insert(dims.end(), sp.space.n.begin(), sp.space.n.end());
    fft_batch(buf, dims, 1, FFTW_BACKWARD);
    const double scale = 1.0 / std::sqrt(sp.space.cell_volume() * sp.time.dt() * S * P);
    Field out;
    out.space = sp.space;
    out.time = sp.time;
    out.data.resize(buf.size());
    double mi = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        out.data[i] = buf[i].real() * scale;
        mi = std::max(mi, std::fabs(buf[i].imag() * scale));
    }
    if (max_imag) *max_imag = mi;
    return out;
}

Field sample(const Expr &e, const SpaceGrid &s, const TimeGrid &t)
{
    Field f(s, t);
    std::vector<int> idx(s.dims());
    std::vector<double> x(s.dims());
    for (int j = 0; j < t.points(); ++j) {
        const double tj = t.t(j);
        for (std::size_t p = 0; p < s.size(); ++p) {
            s.unravel(p, idx.data());
            for (int a = 0; a < s.dims(); ++a) x[a] = s.coord(a, idx[a]);
            const double v = e(x.data(), tj);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "expression is not finite at t=" << tj;
                throw Error(ErrorKind::NonFinite, os.str());
            }
            f.at(p, j) = v;
        }
    }
    return f;
}

void write_csv(const Field &f, const std::string &path, const std::map<std::string, std::string> &meta,
               const std::string &value_unit)
{
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
    os << std::setprecision(17);
    os << "# grid.dims: " << f.space.dims() << "\n";
    for (int a = 0; a < f.space.dims(); ++a)
        os << "# grid.axis" << a << ": n=" << f.space.n[a] << " L=" << f.space.L[a] << "\n";
    os << "# time: start=" << f.time.start << " stop=" << f.time.stop << " M=" << f.time.M << "\n";
    for (const auto &[k, v] : meta) os << "# " << k << ": " << v << "\n";
    os << "# units:";
    for (int a = 0; a < f.space.dims(); ++a) os << " x" << a + 1 << "=length";
    os << " t=time value=" << value_unit << "\n";
    for (int a = 0; a < f.space.dims(); ++a) os << "x" << a + 1 << ",";
    os << "t,value\n";
    std::vector<int> idx(f.space.dims());
    for (int j = 0; j < f.time.points(); ++j) {
        for (std::size_t s = 0; s < f.space.size(); ++s) {
            f.space.unravel(s, idx.data());
            for (int a = 0; a < f.space.dims(); ++a) os << f.space.coord(a, idx[a]) << ",";
            os << f.time.t(j) << "," << f.at(s, j) << "\n";
        }
    }
}

Field read_csv(const std::string &path)
{
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
    SpaceGrid sg;
    TimeGrid tg;
    int dims = -1;
    bool have_time = false;
    std::string line;
    std::vector<double> values;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.rfind("# ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            std::string key;
            ls >> key;
            if (key == "grid.dims:") {
                ls >> dims;
            } else if (key.rfind("grid.axis", 0) == 0) {
                std::string a, b;
                ls >> a >> b;
                sg.n.push_back(std::stoi(a.substr(2)));
                sg.L.push_back(std::stod(b.substr(2)));
                sg.group.push_back(0);
            } else if (key == "time:") {
                std::string a, b, c;
                ls >> a >> b >> c;
                tg.start = std::stod(a.substr(6));
                tg.stop = std::stod(b.substr(5));
                tg.M = std::stoi(c.substr(2));
                have_time = true;
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto pos = line.rfind(',');
        values.push_back(std::stod(line.substr(pos + 1)));
    }
    if (dims < 1 || static_cast<int>(sg.n.size()) != dims || !have_time)
        throw Error(ErrorKind::ShapeMismatch, "missing grid metadata in " + path);
    Field f(sg, tg);
    if (values.size() != f.data.size()) throw Error(ErrorKind::ShapeMismatch, "row count mismatch in " + path);
    f.data = std::move(values);
    return f;
}

} // namespace fracheat
