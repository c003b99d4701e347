#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fracheat/config.hpp"

namespace fracheat {

using cplx = std::complex<double>;

// Periodic box centred at the origin: x_i = -L/2 + i*L/n on each axis.
struct SpaceGrid {
    std::vector<int> n;
    std::vector<double> L;
    std::vector<int> group;  // axis -> group index

    int dims() const { return static_cast<int>(n.size()); }
    std::size_t size() const;
    double dx(int axis) const { return L[axis] / n[axis]; }
    double coord(int axis, int i) const { return -0.5 * L[axis] + i * dx(axis); }
    // angular frequency of FFT-ordered index i on the given axis
    double freq(int axis, int i) const;
    double cell_volume() const;
    std::size_t stride(int axis) const;
    void unravel(std::size_t flat, int *idx) const;
    bool operator==(const SpaceGrid &o) const { return n == o.n && L == o.L; }
};

struct TimeGrid {
    double start = 0.0;
    double stop = 1.0;
    int M = 2;

    double dt() const { return (stop - start) / M; }
    double t(int j) const { return M == 0 ? start : start + j * dt(); }
    int points() const { return M + 1; }
    bool operator==(const TimeGrid &o) const { return start == o.start && stop == o.stop && M == o.M; }
};

SpaceGrid make_space_grid(const AnisotropyConfig &cfg, const std::vector<int> &points);
void check_grids(const SpaceGrid &s, const TimeGrid &t);

// Real samples stored time-slice by time-slice: data[j * S + s].
struct Field {
    SpaceGrid space;
    TimeGrid time;
    std::vector<double> data;

    Field() = default;
    Field(const SpaceGrid &s, const TimeGrid &t);

    std::size_t slice_size() const { return space.size(); }
    double &at(std::size_t s, int j) { return data[j * slice_size() + s]; }
    double at(std::size_t s, int j) const { return data[j * slice_size() + s]; }
    double *slice(int j) { return data.data() + j * slice_size(); }
    const double *slice(int j) const { return data.data() + j * slice_size(); }
    double sup() const;
};

// A spatial field (traces, initial data): a Field with a single time sample.
Field spatial_field(const SpaceGrid &s);

struct SpectralField {
    SpaceGrid space;
    TimeGrid time;
    bool spacetime = false;
    // space-only: data[j*S + s] per time slice; space-time: data[k*S + s], k FFT-ordered time frequency
    std::vector<cplx> data;

    double time_freq(int k) const;
};

SpectralField fft_space(const Field &f);
// max_imag, when given, receives the largest discarded imaginary part
Field ifft_space(const SpectralField &s, double *max_imag = nullptr);
SpectralField fft_spacetime(const Field &f);
Field ifft_spacetime(const SpectralField &s, double *max_imag = nullptr);
// in-place unnormalised complex transform over a contiguous batch
void fft_batch(std::vector<cplx> &buf, const std::vector<int> &dims, int howmany, int sign);

using Expr = std::function<double(const double *x, double t)>;
Field sample(const Expr &e, const SpaceGrid &s, const TimeGrid &t);

void write_csv(const Field &f, const std::string &path, const std::map<std::string, std::string> &meta,
               const std::string &value_unit = "1");
Field read_csv(const std::string &path);

} // namespace fracheat
