#ifndef LIBRACOOL_THERMOMETRY_HPP
#define LIBRACOOL_THERMOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "libracool/constants.hpp"
#include "libracool/fit.hpp"

// Sideband thermometry: Lorentzian sideband synthesis and fitting, asymmetry
// inversion, detector-response correction and the detection calibration
// factor. Spectra are kept in arbitrary detector units; only ratios and the
// scalar calibration constant carry physical meaning.

namespace libracool::thermometry {

struct NonphysicalAsymmetry : std::domain_error {
    using std::domain_error::domain_error;
};
struct CorrectionUndefined : std::domain_error {
    using std::domain_error::domain_error;
};
struct AmbiguousWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitNotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Spectrum {
    std::vector<double> freq; // Hz, strictly increasing
    std::vector<double> psd;  // arbitrary units per Hz, >= 0
    double noise_floor = 0.0;

    void validate() const {
        if (freq.size() != psd.size() || freq.size() < 2)
            throw std::invalid_argument("spectrum: freq/psd must align, length >= 2");
        for (std::size_t i = 1; i < freq.size(); ++i)
            if (!(freq[i] > freq[i - 1]))
                throw std::invalid_argument("spectrum: freq must be strictly increasing");
        for (double p : psd)
            if (!(p >= 0.0)) throw std::invalid_argument("spectrum: psd must be >= 0");
    }
};

struct LorentzianFit {
    double center = 0.0; // Hz
    double fwhm = 0.0;   // Hz
    double area = 0.0;   // units * Hz
    double offset = 0.0; // units
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero(); // (center, fwhm, area, offset)

    double sigma(int i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
};

struct DetectorResponse {
    double c_ratio = 1.0; // c_- / c_+

    void validate() const {
        if (!(c_ratio > 0.0)) throw std::invalid_argument("detector.c_ratio: must be > 0");
    }
};

// n from the measured sideband area ratio, a_aS/a_S = n/(n+1).
inline double occupation_from_asymmetry(double a_antistokes, double a_stokes) {
    if (!(a_antistokes >= 0.0) || !(a_stokes > 0.0) || a_antistokes >= a_stokes)
        throw NonphysicalAsymmetry("sideband asymmetry requires 0 <= a_aS < a_S");
    const double a = a_antistokes / a_stokes;
    return a / (1.0 - a);
}

// True occupation from the inferred one for a detector whose frequency
// response distorts the measured asymmetry by c_-/c_+:
//   n = n_inf / ((c_-/c_+)(n_inf + 1) - n_inf).
inline double correct_detector_response(double n_inf, const DetectorResponse& resp) {
    resp.validate();
    if (!(n_inf >= 0.0)) throw std::invalid_argument("n_inf must be >= 0");
    const double den = resp.c_ratio * (n_inf + 1.0) - n_inf;
    if (den <= 0.0)
        throw CorrectionUndefined("detector correction undefined: response ratio implies a "
                                  "diverging occupation");
    return n_inf / den;
}

inline double lorentzian(double f, double center, double fwhm, double area, double offset) {
    const double hw = fwhm / 2.0;
    return offset + area * hw / pi / ((f - center) * (f - center) + hw * hw);
}

// Two-sideband parametric spectrum: Stokes line at -Omega with area
// c_-(n+1), anti-Stokes line at +Omega with area c_+ n (c_+ = 1 by
// normalization), common width gamma_opt, flat noise floor. Frequencies in
// Hz on a grid spanning +-(Omega + 10 gamma_opt).
inline Spectrum synthesize_sidebands(double n, double gamma_opt, double omega_alpha,
                                     double noise_floor, const DetectorResponse& resp = {}) {
    if (!(n >= 0.0)) throw std::invalid_argument("n must be >= 0");
    if (!(gamma_opt > 0.0) || !(omega_alpha > 0.0))
        throw std::invalid_argument("gamma_opt and omega_alpha must be > 0");
    if (!(noise_floor >= 0.0)) throw std::invalid_argument("noise_floor must be >= 0");
    resp.validate();

    const double f0 = hz_from_rad_per_s(omega_alpha);
    const double fwhm = hz_from_rad_per_s(gamma_opt);
    const double span = f0 + 10.0 * fwhm;
    const double step = fwhm / 12.0;
    const auto npts = static_cast<std::size_t>(std::ceil(2.0 * span / step)) + 1;

    const double a_stokes = resp.c_ratio * (n + 1.0);
    const double a_antistokes = n;

    Spectrum s;
    s.noise_floor = noise_floor;
    s.freq.resize(npts);
    s.psd.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const double f = -span + 2.0 * span * static_cast<double>(i) / (npts - 1);
        s.freq[i] = f;
        s.psd[i] = noise_floor + lorentzian(f, -f0, fwhm, a_stokes, 0.0) +
                   lorentzian(f, +f0, fwhm, a_antistokes, 0.0);
    }
    return s;
}

namespace detail {

struct WindowView {
    std::vector<double> f, p;
};

inline WindowView slice(const Spectrum& s, std::pair<double, double> window) {
    WindowView v;
    for (std::size_t i = 0; i < s.freq.size(); ++i) {
        if (s.freq[i] >= window.first && s.freq[i] <= window.second) {
            v.f.push_back(s.freq[i]);
            v.p.push_back(s.psd[i]);
        }
    }
    return v;
}

} // namespace detail

// Nonlinear Lorentzian fit inside a frequency window. The initializer uses
// the grid argmax, a second-moment width estimate and the trapezoidal area
// above the window floor. A window holding two comparable peaks is reported
// as ambiguous, never silently averaged.
inline LorentzianFit fit_lorentzian(const Spectrum& spec, std::pair<double, double> window) {
    spec.validate();
    const auto v = detail::slice(spec, window);
    const auto npts = v.f.size();
    if (npts < 20) throw std::invalid_argument("fit window must contain at least 20 grid points");

    const double pmax = *std::max_element(v.p.begin(), v.p.end());
    const double pmin = *std::min_element(v.p.begin(), v.p.end());
    if (!(pmax > pmin) || pmax - pmin < 1e-12 * std::max(pmax, 1e-300))
        throw DegenerateWindow("flat window: nothing to fit");

    // Initial guesses: peak position from the argmax, width from the
    // half-maximum crossings (falling back to a second-moment estimate on
    // shoulderless data), area from the trapezoidal integral above the floor.
    const auto imax = static_cast<std::size_t>(
        std::distance(v.p.begin(), std::max_element(v.p.begin(), v.p.end())));
    const double c0 = v.f[imax];
    const double half = pmin + 0.5 * (pmax - pmin);
    const double grid_step = (v.f.back() - v.f.front()) / (npts - 1);
    double left = v.f.front(), right = v.f.back();
    for (std::size_t i = imax; i-- > 0;)
        if (v.p[i] < half) {
            left = v.f[i];
            break;
        }
    for (std::size_t i = imax + 1; i < npts; ++i)
        if (v.p[i] < half) {
            right = v.f[i];
            break;
        }
    double w0 = right - left;
    if (!(w0 > 0.0) || w0 >= v.f.back() - v.f.front()) {
        double wsum = 0.0, msum = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            const double w = std::max(0.0, v.p[i] - pmin);
            wsum += w;
            msum += w * (v.f[i] - c0) * (v.f[i] - c0);
        }
        w0 = 2.0 * std::sqrt(msum / std::max(wsum, 1e-300));
    }
    w0 = std::clamp(w0, 2.0 * grid_step, v.f.back() - v.f.front());
    double a0 = 0.0;
    for (std::size_t i = 1; i < npts; ++i)
        a0 += 0.5 * (v.p[i] + v.p[i - 1] - 2.0 * pmin) * (v.f[i] - v.f[i - 1]);
    a0 = std::max(a0, pmax * w0);

    // Ambiguity scan: two maxima above half height count as distinct peaks
    // when the valley between them drops below 80% of the smaller one.
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < npts; ++i)
        if (v.p[i] > half && v.p[i] >= v.p[i - 1] && v.p[i] > v.p[i + 1]) cand.push_back(i);
    for (std::size_t k = 1; k < cand.size(); ++k) {
        double valley = v.p[cand[k - 1]];
        for (std::size_t i = cand[k - 1]; i <= cand[k]; ++i) valley = std::min(valley, v.p[i]);
        const double smaller = std::min(v.p[cand[k - 1]], v.p[cand[k]]);
        if (valley - pmin < 0.8 * (smaller - pmin))
            throw AmbiguousWindow("window holds two comparable peaks; shrink the window");
    }

    // Fit in normalized coordinates so every parameter is O(1); frequency
    // scales can exceed peak amplitudes by many orders of magnitude.
    const double W = 0.5 * (v.f.back() - v.f.front());
    const double pscale = pmax - pmin;
    const double yscale = pscale / npts; // residual scale for conditioning only
    // Width and area enter through |.| and a square, keeping the line
    // physical for every parameter vector the optimizer visits.
    const auto residuals = [&](const Eigen::VectorXd& q) {
        const double c = c0 + q[0] * W;
        const double w = std::abs(q[1]) * w0;
        const double a = q[2] * q[2] * a0;
        const double o = q[3] * pscale;
        Eigen::VectorXd r(npts);
        for (std::size_t i = 0; i < npts; ++i)
            r[i] = (lorentzian(v.f[i], c, w, a, o) - v.p[i]) / yscale;
        return r;
    };
    Eigen::VectorXd q0(4);
    q0 << 0.0, 1.0, 1.0, pmin / pscale;
    const auto res = fit::fit_least_squares(residuals, q0);
    if (res.status == fit::FitStatus::degenerate)
        throw DegenerateWindow("fit degenerate: a parameter is unconstrained by the window");
    if (res.status != fit::FitStatus::converged)
        throw FitNotConverged("lorentzian fit did not converge");

    LorentzianFit out;
    out.center = c0 + res.parameters[0] * W;
    out.fwhm = std::abs(res.parameters[1]) * w0;
    out.area = res.parameters[2] * res.parameters[2] * a0;
    out.offset = res.parameters[3] * pscale;
    // The residual scaling cancels out of the covariance; only the local
    // parameter scales survive (the area maps through d(a)/dq = 2 q a0).
    const double scale[4] = {W, w0, 2.0 * std::abs(res.parameters[2]) * a0, pscale};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out.covariance(i, j) = res.covariance(i, j) * scale[i] * scale[j];
    if (!(out.fwhm > 0.0))
        throw FitNotConverged("lorentzian fit converged to a nonphysical line");
    return out;
}

// Calibration constant relating 2n+1 to the fitted spectrum area.
inline double calibration_factor(double n_ref, double homodyne_area) {
    if (!(n_ref >= 0.0)) throw std::invalid_argument("n_ref must be >= 0");
    if (!(homodyne_area > 0.0)) throw std::invalid_argument("area must be > 0");
    return (2.0 * n_ref + 1.0) / homodyne_area;
}

// --- I/O -----------------------------------------------------------------

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "freq_Hz,psd_arb\n";
    os.precision(9);
    for (std::size_t i = 0; i < s.freq.size(); ++i) os << s.freq[i] << ',' << s.psd[i] << '\n';
}

inline Spectrum read_spectrum_csv(std::istream& is) {
    Spectrum s;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("spectrum csv: empty stream");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("spectrum csv: expected two comma-separated columns");
        s.freq.push_back(std::stod(line.substr(0, comma)));
        s.psd.push_back(std::stod(line.substr(comma + 1)));
    }
    s.validate();
    return s;
}

inline nlohmann::json fit_to_json(const LorentzianFit& f) {
    return nlohmann::json{{"center_Hz", f.center},
                          {"fwhm_Hz", f.fwhm},
                          {"area_arb_Hz", f.area},
                          {"offset_arb", f.offset},
                          {"center_sigma_Hz", f.sigma(0)},
                          {"fwhm_sigma_Hz", f.sigma(1)},
                          {"area_sigma_arb_Hz", f.sigma(2)},
                          {"offset_sigma_arb", f.sigma(3)}};
}

} // namespace libracool::thermometry

#endif
