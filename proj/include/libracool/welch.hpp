#ifndef LIBRACOOL_WELCH_HPP
#define LIBRACOOL_WELCH_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "libracool/constants.hpp"

// Welch power spectral density estimator: Hann window, 50% overlap,
// one-sided, normalized so that the integral over frequency (in Hz) equals
// the variance of the input.

namespace libracool::welch {

struct Psd {
    std::vector<double> freq_hz; // bin centers, 0 .. 1/(2 dt)
    std::vector<double> psd;     // units^2 / Hz, one-sided
    int segments = 0;            // number of averaged windows
};

inline Psd estimate(const std::vector<double>& x, double dt, int segment_length) {
    if (dt <= 0.0) throw std::invalid_argument("welch: dt must be > 0");
    if (segment_length < 8 || static_cast<std::size_t>(segment_length) > x.size())
        throw std::invalid_argument("welch: segment length out of range");

    const int L = segment_length;
    std::vector<double> window(L);
    double power_sum = 0.0;
    for (int i = 0; i < L; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(two_pi * i / L));
        power_sum += window[i] * window[i];
    }
    const double norm = dt / power_sum; // 1 / (fs * sum w^2)

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

    const int nbins = L / 2 + 1;
    Psd out;
    out.freq_hz.resize(nbins);
    for (int k = 0; k < nbins; ++k) out.freq_hz[k] = k / (L * dt);
    out.psd.assign(nbins, 0.0);

    const int step = L / 2;
    std::vector<double> seg(L);
    std::vector<std::complex<double>> spec;
    for (std::size_t start = 0; start + L <= x.size(); start += step) {
        for (int i = 0; i < L; ++i) seg[i] = x[start + i] * window[i];
        fft.fwd(spec, seg);
        for (int k = 0; k < nbins; ++k) {
            double p = std::norm(spec[k]) * norm;
            if (k != 0 && !(L % 2 == 0 && k == nbins - 1)) p *= 2.0; // one-sided fold
            out.psd[k] += p;
        }
        ++out.segments;
    }
    if (out.segments == 0) throw std::invalid_argument("welch: input shorter than one segment");
    for (auto& p : out.psd) p /= out.segments;
    return out;
}

// Accumulate segment averages across several records of equal grid.
inline Psd average(const std::vector<Psd>& parts) {
    if (parts.empty()) throw std::invalid_argument("welch: nothing to average");
    Psd out = parts.front();
    for (auto& p : out.psd) p *= out.segments;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].psd.size() != out.psd.size())
            throw std::invalid_argument("welch: mismatched grids");
        for (std::size_t k = 0; k < out.psd.size(); ++k)
            out.psd[k] += parts[i].psd[k] * parts[i].segments;
        out.segments += parts[i].segments;
    }
    for (auto& p : out.psd) p /= out.segments;
    return out;
}

// Linear interpolation of the estimate at an arbitrary frequency.
inline double value_at(const Psd& s, double f_hz) {
    if (s.freq_hz.size() < 2 || f_hz < s.freq_hz.front() || f_hz > s.freq_hz.back())
        throw std::invalid_argument("welch: frequency outside the estimated band");
    const double df = s.freq_hz[1] - s.freq_hz[0];
    const auto k = static_cast<std::size_t>((f_hz - s.freq_hz.front()) / df);
    if (k + 1 >= s.freq_hz.size()) return s.psd.back();
    const double t = (f_hz - s.freq_hz[k]) / df;
    return (1.0 - t) * s.psd[k] + t * s.psd[k + 1];
}

} // namespace libracool::welch

#endif
