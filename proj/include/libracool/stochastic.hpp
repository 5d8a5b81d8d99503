#ifndef LIBRACOOL_STOCHASTIC_HPP
#define LIBRACOOL_STOCHASTIC_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "libracool/constants.hpp"
#include "libracool/rates.hpp"
#include "libracool/welch.hpp"

// Monte Carlo oracle for the classical phase-noise channel: white-noise
// phase trajectories, the driven cavity amplitude under that noise, and the
// stochastic mechanical drive whose fluctuation spectrum at the libration
// frequency is the phase-noise heating rate.
//
// Trajectories are independent jobs; per-trajectory seeds derive from a
// master seed by the splitmix64 rule below, and identical seeds give
// bit-identical trajectories.

namespace libracool::stochastic {

using cd = std::complex<double>;

struct NoiseTrajectory {
    double dt = 0.0;
    std::vector<double> phi; // cumulative phase, phi[0] = 0
    std::uint64_t seed = 0;
};

struct CavityTrajectory {
    double dt = 0.0;
    std::vector<cd> alpha;
};

struct DriveRecord {
    double dt = 0.0;
    std::vector<double> xi; // rad/s
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Documented seed splitting: stream k of a master seed.
inline std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

// Cumulative phase with i.i.d. Gaussian increments of variance psd_S * dt.
inline NoiseTrajectory phase_trajectory(double psd_S, double dt, std::size_t n_steps,
                                        std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("phase_trajectory: dt must be > 0");
    if (!(psd_S >= 0.0)) throw std::invalid_argument("phase_trajectory: psd_S must be >= 0");
    if (n_steps < 1) throw std::invalid_argument("phase_trajectory: need at least one step");

    NoiseTrajectory out;
    out.dt = dt;
    out.seed = seed;
    out.phi.resize(n_steps);
    out.phi[0] = 0.0;
    if (psd_S == 0.0) {
        std::fill(out.phi.begin(), out.phi.end(), 0.0);
        return out;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> inc(0.0, std::sqrt(psd_S * dt));
    for (std::size_t k = 1; k < n_steps; ++k) out.phi[k] = out.phi[k - 1] + inc(rng);
    return out;
}

// Exact-exponential integrator for
//   alpha' = -(i Delta + kappa/2) alpha + i Lambda e^{-i phi(t)}
// with the phase held at phi_k across each step. The homogeneous part is
// integrated exactly, so stiffness from Delta >> kappa costs nothing.
inline CavityTrajectory cavity_sde(const rates::OperatingPoint& op,
                                   const NoiseTrajectory& noise, cd alpha0 = cd(0.0, 0.0)) {
    op.validate();
    const double dt = noise.dt;
    double dt_cap = 0.1 / op.kappa;
    if (op.detuning != 0.0) dt_cap = std::min(dt_cap, 0.05 * two_pi / std::abs(op.detuning));
    if (dt > dt_cap)
        throw std::invalid_argument("cavity_sde: step too coarse for this detuning/linewidth");

    const cd pole(op.kappa / 2.0, op.detuning);
    const cd decay = std::exp(-pole * dt);
    const cd drive_coef = cd(0.0, op.drive_Lambda) * (1.0 - decay) / pole;

    CavityTrajectory out;
    out.dt = dt;
    out.alpha.resize(noise.phi.size());
    cd a = alpha0;
    for (std::size_t k = 0; k < noise.phi.size(); ++k) {
        out.alpha[k] = a;
        a = decay * a + drive_coef * std::exp(cd(0.0, -noise.phi[k]));
    }
    return out;
}

// xi(t) = 2 G Re[e^{i phi(t)} alpha_c(t)]
inline DriveRecord drive_record(const rates::OperatingPoint& op, const NoiseTrajectory& noise,
                                const CavityTrajectory& cav) {
    if (noise.phi.size() != cav.alpha.size() ||
        std::abs(noise.dt - cav.dt) > 1e-12 * noise.dt)
        throw std::invalid_argument("drive_record: noise and cavity grids do not match");
    DriveRecord out;
    out.dt = noise.dt;
    out.xi.resize(noise.phi.size());
    for (std::size_t k = 0; k < noise.phi.size(); ++k)
        out.xi[k] = 2.0 * op.coupling_G *
                    (std::exp(cd(0.0, noise.phi[k])) * cav.alpha[k]).real();
    return out;
}

struct HeatingEstimate {
    double gamma_phi = 0.0;    // rad/s
    double std_error = 0.0;    // rad/s, across-record scatter
    double psd_at_omega = 0.0; // one-sided, (rad/s)^2 / Hz
    int segments = 0;
};

// Heating rate from the fluctuation spectrum of the drive: the one-sided
// PSD of the mean-subtracted xi at Omega_alpha, divided by two. The factor
// relates a one-sided Hz-normalized PSD to the two-sided angular spectrum
// S(Omega) that heats an oscillator driven by xi * x at d<n>/dt = S(Omega);
// it is pinned by the analytically solvable drives in the test suite.
inline HeatingEstimate heating_rate_from_drive(const std::vector<DriveRecord>& records,
                                               double omega_alpha) {
    if (!(omega_alpha > 0.0))
        throw std::invalid_argument("heating_rate_from_drive: omega_alpha must be > 0");
    if (records.size() < 100)
        throw std::invalid_argument("heating_rate_from_drive: need at least 100 records");

    const double dt = records.front().dt;
    const double period = two_pi / omega_alpha;
    const double f_omega = omega_alpha / two_pi;

    // Segments: at least 16 oscillation periods, as long as the records
    // allow (up to a quarter record) so the bin width resolves the
    // cavity-shaped spectrum under the peak.
    const auto min_len = static_cast<std::size_t>(std::ceil(16.0 * period / dt));
    std::size_t nseg = 1;
    while (nseg * 2 <= records.front().xi.size() / 4) nseg *= 2;
    nseg = std::min<std::size_t>(nseg, 65536);
    if (nseg < min_len)
        throw std::invalid_argument(
            "heating_rate_from_drive: records shorter than 50 oscillation periods");

    std::vector<welch::Psd> parts;
    std::vector<double> per_record;
    parts.reserve(records.size());
    for (const auto& rec : records) {
        if (std::abs(rec.dt - dt) > 1e-12 * dt)
            throw std::invalid_argument("heating_rate_from_drive: mixed time steps");
        if (rec.xi.size() * dt < 50.0 * period)
            throw std::invalid_argument(
                "heating_rate_from_drive: records shorter than 50 oscillation periods");
        std::vector<double> x = rec.xi;
        double mean = 0.0;
        for (double v : x) mean += v / x.size();
        for (double& v : x) v -= mean;
        parts.push_back(welch::estimate(x, dt, static_cast<int>(nseg)));
        per_record.push_back(welch::value_at(parts.back(), f_omega));
    }

    const auto pooled = welch::average(parts);
    HeatingEstimate out;
    out.psd_at_omega = welch::value_at(pooled, f_omega);
    out.gamma_phi = 0.5 * out.psd_at_omega;
    out.segments = pooled.segments;

    double mean = 0.0, var = 0.0;
    for (double v : per_record) mean += v / per_record.size();
    for (double v : per_record) var += (v - mean) * (v - mean) / (per_record.size() - 1);
    out.std_error = 0.5 * std::sqrt(var / per_record.size());

    if (out.std_error > 0.2 * std::abs(out.gamma_phi))
        throw std::runtime_error("heating_rate_from_drive: insufficient statistics "
                                 "(relative standard error above 20%)");
    return out;
}

// --- ensemble drivers -------------------------------------------------------

struct EnsembleOptions {
    std::size_t n_records = 200;
    std::size_t samples_per_record = 32768;
    double dt = 0.0; // 0: use the cavity_sde cap
    std::uint64_t master_seed = 1;
};

inline double default_step(const rates::OperatingPoint& op) {
    double dt = 0.1 / op.kappa;
    if (op.detuning != 0.0) dt = std::min(dt, 0.05 * two_pi / std::abs(op.detuning));
    return 0.8 * dt;
}

inline std::size_t transient_samples(const rates::OperatingPoint& op, double dt) {
    return static_cast<std::size_t>(std::ceil(10.0 / (op.kappa * dt)));
}

// Deterministic fixed point of the noise-free cavity; starting there keeps
// the ring-up out of the spectra.
inline cd deterministic_amplitude(const rates::OperatingPoint& op) {
    return cd(0.0, op.drive_Lambda) / cd(op.kappa / 2.0, op.detuning);
}

// Independent drive records, started at the deterministic amplitude and
// with a further 10/kappa of noise thermalization discarded.
inline std::vector<DriveRecord> simulate_drive_ensemble(const rates::OperatingPoint& op,
                                                        const EnsembleOptions& opts) {
    const double dt = opts.dt > 0.0 ? opts.dt : default_step(op);
    const std::size_t skip = transient_samples(op, dt);
    const std::size_t total = skip + opts.samples_per_record;

    std::vector<DriveRecord> out;
    out.reserve(opts.n_records);
    for (std::size_t r = 0; r < opts.n_records; ++r) {
        const auto noise = phase_trajectory(op.psd_S, dt, total,
                                            trajectory_seed(opts.master_seed, r));
        const auto cav = cavity_sde(op, noise, deterministic_amplitude(op));
        auto rec = drive_record(op, noise, cav);
        rec.xi.erase(rec.xi.begin(), rec.xi.begin() + static_cast<long>(skip));
        out.push_back(std::move(rec));
    }
    return out;
}

struct CavityMoment {
    double mean_abs2 = 0.0;
    double std_error = 0.0;
    std::size_t n_records = 0;
};

// Ensemble <|alpha_c|^2> from one well-thermalized sample per trajectory.
inline CavityMoment cavity_occupation_mc(const rates::OperatingPoint& op,
                                         std::size_t n_records, std::uint64_t master_seed,
                                         double dt = 0.0) {
    if (n_records < 2) throw std::invalid_argument("cavity_occupation_mc: need >= 2 records");
    const double step = dt > 0.0 ? dt : default_step(op);
    const std::size_t skip = transient_samples(op, step);
    const std::size_t total = skip + 2048;

    std::vector<double> samples;
    samples.reserve(n_records);
    for (std::size_t r = 0; r < n_records; ++r) {
        const auto noise =
            phase_trajectory(op.psd_S, step, total, trajectory_seed(master_seed, r));
        const auto cav = cavity_sde(op, noise, deterministic_amplitude(op));
        samples.push_back(std::norm(cav.alpha.back()));
    }
    CavityMoment out;
    out.n_records = samples.size();
    for (double v : samples) out.mean_abs2 += v / samples.size();
    double var = 0.0;
    for (double v : samples)
        var += (v - out.mean_abs2) * (v - out.mean_abs2) / (samples.size() - 1);
    out.std_error = std::sqrt(var / samples.size());
    return out;
}

// Debug dump: t, phi, Re alpha, Im alpha, xi.
inline void dump_trajectory_csv(std::ostream& os, const NoiseTrajectory& noise,
                                const CavityTrajectory& cav, const DriveRecord& drive) {
    if (noise.phi.size() != cav.alpha.size() || noise.phi.size() != drive.xi.size())
        throw std::invalid_argument("dump_trajectory_csv: grids do not match");
    os << "t_s,phi_rad,alpha_re_dimensionless,alpha_im_dimensionless,xi_rad_per_s\n";
    os.precision(9);
    for (std::size_t k = 0; k < noise.phi.size(); ++k) {
        os << k * noise.dt << ',' << noise.phi[k] << ',' << cav.alpha[k].real() << ','
           << cav.alpha[k].imag() << ',' << drive.xi[k] << '\n';
    }
}

} // namespace libracool::stochastic

#endif
