#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "libracool/stochastic.hpp"

using namespace libracool;
using namespace libracool::stochastic;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

rates::OperatingPoint particle2_point(double S, double ncav = 6.8e6) {
    rates::OperatingPoint op;
    op.omega_alpha = rad_per_s_from_hz(1.1e6);
    op.kappa = rad_per_s_from_hz(330e3);
    op.detuning = op.omega_alpha;
    op.coupling_G = rad_per_s_from_hz(31.5e3);
    op.recoil_Gamma_BA = rad_per_s_from_hz(0.5e3);
    op.psd_S = S;
    const double hk = op.kappa / 2.0;
    op.drive_Lambda = std::sqrt(ncav * (op.detuning * op.detuning + hk * hk));
    return op;
}

// <|alpha|^2> at finite white phase noise; e^{-i phi} has an exactly
// exponential correlation, so the Lorentzian just widens by S:
//   <|alpha|^2> = Lambda^2 (kappa + S) / (kappa [Delta^2 + ((kappa+S)/2)^2])
double alpha_sq_exact(const rates::OperatingPoint& op) {
    const double w = (op.kappa + op.psd_S) / 2.0;
    return op.drive_Lambda * op.drive_Lambda * (op.kappa + op.psd_S) /
           (op.kappa * (op.detuning * op.detuning + w * w));
}

} // namespace

TEST_CASE("phase trajectories") {
    SECTION("zero PSD gives the zero phase") {
        const auto tr = phase_trajectory(0.0, 1e-8, 1000, 42);
        for (double p : tr.phi) CHECK(p == 0.0);
    }

    SECTION("seeds are reproducible and distinct") {
        const auto a = phase_trajectory(1.0, 1e-8, 4096, 7);
        const auto b = phase_trajectory(1.0, 1e-8, 4096, 7);
        const auto c = phase_trajectory(1.0, 1e-8, 4096, 8);
        CHECK(a.phi == b.phi); // bit-identical
        CHECK(a.phi != c.phi);
        CHECK(a.phi[0] == 0.0);
    }

    SECTION("increment statistics: mean and variance within 3 sigma") {
        const double S = 2.5, dt = 1e-7;
        const std::size_t n = 1'000'000;
        const auto tr = phase_trajectory(S, dt, n, 123);
        double mean = 0.0, var = 0.0;
        for (std::size_t k = 1; k < n; ++k) mean += (tr.phi[k] - tr.phi[k - 1]);
        mean /= double(n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            const double d = tr.phi[k] - tr.phi[k - 1] - mean;
            var += d * d;
        }
        var /= double(n - 2);

        const double target = S * dt;
        CHECK(std::abs(mean) <= 3.0 * std::sqrt(target / double(n - 1))); // <<phidot>> = 0
        const double sigma_var = target * std::sqrt(2.0 / double(n - 1));
        CHECK(std::abs(var - target) <= 3.0 * sigma_var);
    }

    SECTION("the phi-dot series is white: flat PSD at the delta-correlation level") {
        const double S = 0.8, dt = 1e-7;
        const std::size_t n = 1 << 20;
        const auto tr = phase_trajectory(S, dt, n, 321);
        std::vector<double> rate(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) rate[k] = (tr.phi[k + 1] - tr.phi[k]) / dt;
        const auto psd = welch::estimate(rate, dt, 4096);

        // one-sided PSD of a white series with two-sided angular level S is 2S
        double mean = 0.0;
        int count = 0;
        for (std::size_t k = 0; k < psd.freq_hz.size(); ++k) {
            if (psd.freq_hz[k] >= 0.01 / dt && psd.freq_hz[k] <= 0.4 / dt) {
                mean += psd.psd[k];
                ++count;
            }
        }
        mean /= count;
        // segment count ~ 500: the band average carries sub-percent error
        CHECK_THAT(mean, WithinRel(2.0 * S, 0.02));
    }
}

TEST_CASE("cavity SDE") {
    SECTION("noise-free drive lands exactly on the fixed point") {
        auto op = particle2_point(0.0);
        const double dt = default_step(op);
        const auto noise = phase_trajectory(0.0, dt, 4000, 1);
        const auto cav = cavity_sde(op, noise);
        const cd expected = cd(0.0, op.drive_Lambda) / cd(op.kappa / 2.0, op.detuning);
        CHECK(std::abs(cav.alpha.back() - expected) <= 1e-12 * std::abs(expected));
        CHECK_THAT(std::norm(cav.alpha.back()),
                   WithinRel(rates::cavity_occupation(op), 1e-10));
    }

    SECTION("an undriven cavity decays from any start") {
        auto op = particle2_point(0.0);
        op.drive_Lambda = 0.0;
        const double dt = default_step(op);
        const std::size_t n = 3000;
        const auto noise = phase_trajectory(0.0, dt, n, 1);
        const auto cav = cavity_sde(op, noise, cd(5.0, 3.0));
        CHECK(std::abs(cav.alpha[0] - cd(5.0, 3.0)) == 0.0);
        const double bound =
            std::abs(cd(5.0, 3.0)) * std::exp(-op.kappa / 2.0 * (n - 1) * dt);
        CHECK(std::abs(cav.alpha.back()) <= bound * (1.0 + 1e-9));
    }

    SECTION("weak noise: ensemble <|alpha|^2> matches the weak-noise limit within 3 SE") {
        auto op = particle2_point(0.0);
        op.psd_S = op.kappa / 100.0;
        const auto mc = cavity_occupation_mc(op, 200, 99);
        const double target = rates::cavity_occupation(op);
        CHECK(std::abs(mc.mean_abs2 - target) <= 3.0 * mc.std_error);
        // and the exact finite-S expression within the same band
        CHECK(std::abs(mc.mean_abs2 - alpha_sq_exact(op)) <= 3.0 * mc.std_error);
    }

    SECTION("halving the step moves the ensemble mean by less than the errors") {
        auto op = particle2_point(0.0);
        op.psd_S = op.kappa / 100.0;
        const double dt = default_step(op);
        const auto a = cavity_occupation_mc(op, 200, 5, dt);
        const auto b = cavity_occupation_mc(op, 200, 5, dt / 2.0);
        CHECK(std::abs(a.mean_abs2 - b.mean_abs2) <=
              3.0 * std::hypot(a.std_error, b.std_error));
    }

    SECTION("a too-coarse step is rejected") {
        auto op = particle2_point(0.0);
        const auto noise = phase_trajectory(0.0, 1.0 / op.kappa, 100, 1);
        CHECK_THROWS_AS(cavity_sde(op, noise), std::invalid_argument);
    }
}

TEST_CASE("stochastic drive records") {
    auto op = particle2_point(0.0);
    const double dt = default_step(op);

    SECTION("no coupling, no drive") {
        auto op0 = op;
        op0.coupling_G = 0.0;
        const auto noise = phase_trajectory(0.0, dt, 500, 1);
        const auto rec = drive_record(op0, noise, cavity_sde(op0, noise));
        for (double v : rec.xi) CHECK(v == 0.0);
    }

    SECTION("deterministic limit: constant drive at the displaced value") {
        const auto noise = phase_trajectory(0.0, dt, 5000, 1);
        const auto rec = drive_record(op, noise, cavity_sde(op, noise));
        const double expected =
            2.0 * op.coupling_G *
            (cd(0.0, op.drive_Lambda) / cd(op.kappa / 2.0, op.detuning)).real();
        CHECK_THAT(rec.xi.back(), WithinRel(expected, 1e-10));
    }

    SECTION("long-window mean reproduces the noise-averaged displacement") {
        auto opn = op;
        opn.psd_S = op.kappa / 50.0;
        EnsembleOptions opts;
        opts.n_records = 150;
        opts.samples_per_record = 8192;
        opts.master_seed = 31;
        const auto records = simulate_drive_ensemble(opn, opts);

        double mean = 0.0;
        std::vector<double> per_rec;
        for (const auto& r : records) {
            double m = 0.0;
            for (double v : r.xi) m += v / r.xi.size();
            per_rec.push_back(m);
            mean += m / records.size();
        }
        double var = 0.0;
        for (double m : per_rec)
            var += (m - mean) * (m - mean) / (per_rec.size() - 1);
        const double se = std::sqrt(var / per_rec.size());

        // <e^{i phi} alpha> = i Lambda / (i Delta + (kappa + S)/2)
        const double expected =
            2.0 * opn.coupling_G *
            (cd(0.0, opn.drive_Lambda) /
             cd((opn.kappa + opn.psd_S) / 2.0, opn.detuning))
                .real();
        CHECK(std::abs(mean - expected) <= 3.0 * se);
    }

    SECTION("grid mismatch is rejected") {
        const auto noise = phase_trajectory(0.0, dt, 500, 1);
        auto cav = cavity_sde(op, noise);
        cav.alpha.pop_back();
        CHECK_THROWS_AS(drive_record(op, noise, cav), std::invalid_argument);
    }
}

TEST_CASE("PSD-to-heating-rate convention, pinned by a solvable drive") {
    // Ornstein-Uhlenbeck drive: S_two_sided(omega) = 2 var tau / (1 + omega^2 tau^2).
    const double dt = 4e-8, tau = 2e-6, sigma = 3.0;
    const double omega = rad_per_s_from_hz(1.1e6);
    const double a = std::exp(-dt / tau);
    const double inc = sigma * std::sqrt(1.0 - a * a);

    std::vector<DriveRecord> records;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int r = 0; r < 120; ++r) {
        DriveRecord rec;
        rec.dt = dt;
        rec.xi.resize(16384);
        double x = sigma * g(rng);
        for (auto& v : rec.xi) {
            v = x;
            x = a * x + inc * g(rng);
        }
        records.push_back(std::move(rec));
    }
    const auto est = heating_rate_from_drive(records, omega);
    const double expected = 2.0 * sigma * sigma * tau / (1.0 + omega * omega * tau * tau);
    CHECK(std::abs(est.gamma_phi - expected) <=
          std::max(3.0 * est.std_error, 0.03 * expected));
}

TEST_CASE("heating rate from the simulated drive") {
    SECTION("no phase noise, no heating") {
        auto op = particle2_point(0.0);
        EnsembleOptions opts;
        opts.n_records = 100;
        opts.samples_per_record = 8192;
        const auto records = simulate_drive_ensemble(op, opts);
        const auto est = heating_rate_from_drive(records, op.omega_alpha);
        // the drive is constant; anything left is float rounding of the mean
        CHECK(est.gamma_phi < 1e-6);
    }

    SECTION("matches the closed-form rate at S = kappa/50 within 3 combined sigma") {
        auto op = particle2_point(0.0);
        op.psd_S = op.kappa / 50.0;
        EnsembleOptions opts;
        opts.n_records = 120;
        opts.samples_per_record = 16384;
        opts.dt = 4e-8;
        opts.master_seed = 11;
        const auto records = simulate_drive_ensemble(op, opts);
        const auto est = heating_rate_from_drive(records, op.omega_alpha);

        const double formula = rates::phase_noise_heating(op);
        // combined error: Monte Carlo + O(S/kappa) weak-noise truncation
        const double sigma =
            std::hypot(est.std_error, formula * op.psd_S / op.kappa);
        INFO("mc " << est.gamma_phi << " formula " << formula << " sigma " << sigma);
        CHECK(std::abs(est.gamma_phi - formula) <= 3.0 * sigma);
    }

    SECTION("linear in S over a decade: log-log slope 1.0 +- 0.1") {
        auto op = particle2_point(0.0);
        std::vector<double> logS, logG;
        for (double f : {500.0, 280.0, 158.0, 89.0, 50.0}) {
            op.psd_S = op.kappa / f;
            EnsembleOptions opts;
            opts.n_records = 100;
            opts.samples_per_record = 16384;
            opts.dt = 4e-8;
            opts.master_seed = 77;
            const auto est =
                heating_rate_from_drive(simulate_drive_ensemble(op, opts), op.omega_alpha);
            logS.push_back(std::log(op.psd_S));
            logG.push_back(std::log(est.gamma_phi));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const auto n = double(logS.size());
        for (std::size_t i = 0; i < logS.size(); ++i) {
            sx += logS[i];
            sy += logG[i];
            sxx += logS[i] * logS[i];
            sxy += logS[i] * logG[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK_THAT(slope, WithinAbs(1.0, 0.1));
    }

    SECTION("statistics guards") {
        auto op = particle2_point(0.0);
        op.psd_S = op.kappa / 50.0;
        EnsembleOptions opts;
        opts.n_records = 10; // too few
        opts.samples_per_record = 8192;
        const auto few = simulate_drive_ensemble(op, opts);
        CHECK_THROWS_AS(heating_rate_from_drive(few, op.omega_alpha), std::invalid_argument);

        // too short for 50 oscillation periods
        opts.n_records = 100;
        opts.samples_per_record = 512;
        const auto shorts = simulate_drive_ensemble(op, opts);
        CHECK_THROWS_AS(heating_rate_from_drive(shorts, op.omega_alpha),
                        std::invalid_argument);
    }
}

TEST_CASE("ensembles are reproducible from the master seed") {
    auto op = particle2_point(0.0);
    op.psd_S = op.kappa / 100.0;
    EnsembleOptions opts;
    opts.n_records = 3;
    opts.samples_per_record = 1024;
    opts.master_seed = 555;
    const auto a = simulate_drive_ensemble(op, opts);
    const auto b = simulate_drive_ensemble(op, opts);
    for (std::size_t r = 0; r < a.size(); ++r) CHECK(a[r].xi == b[r].xi);
    CHECK(trajectory_seed(555, 0) != trajectory_seed(555, 1));
}

TEST_CASE("trajectory CSV dump lines up") {
    auto op = particle2_point(0.0);
    op.psd_S = op.kappa / 100.0;
    const double dt = default_step(op);
    const auto noise = phase_trajectory(op.psd_S, dt, 64, 9);
    const auto cav = cavity_sde(op, noise);
    const auto rec = drive_record(op, noise, cav);
    std::ostringstream os;
    dump_trajectory_csv(os, noise, cav, rec);
    const auto text = os.str();
    CHECK(text.starts_with("t_s,phi_rad,"));
    CHECK(std::count(text.begin(), text.end(), '\n') == 65); // header + 64 samples
}
