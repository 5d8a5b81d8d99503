// Acceptance suite: every release criterion in one binary, one PASS/FAIL
// line per criterion, nonzero exit when anything fails. Tolerances are
// fixed here, not tuned at run time.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "libracool/analysis.hpp"
#include "libracool/lindblad.hpp"
#include "libracool/params.hpp"
#include "libracool/presets.hpp"
#include "libracool/rates.hpp"
#include "libracool/stochastic.hpp"
#include "libracool/thermometry.hpp"

using namespace libracool;

namespace {

int failures = 0;

class Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("[%2d] %s  %s (%s)\n", index, pass ? "PASS" : "FAIL", name, detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    va_list args;
    va_start(args, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// printed table values carry their own rounding; allow 5% or half of the
// last printed digit, whichever is larger
bool near_printed(double value, double printed, double last_digit, double& worst) {
    const double tol = std::max(0.05 * printed, 0.5 * last_digit);
    worst = std::max(worst, std::abs(value - printed) / printed);
    return std::abs(value - printed) <= tol;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

// ---- criteria ---------------------------------------------------------------

void criterion_1_parameter_tables() {
    Timer t;
    bool ok = true;
    double worst = 0.0;

    const auto d1 = params::derive(presets::load_preset("particle1"));
    ok &= near_printed(d1.field_E0, 2.8e7, 0.1e7, worst);
    ok &= near_printed(d1.zp_field_Ec, 24.3, 0.1, worst);
    ok &= near_printed(hz_from_rad_per_s(d1.omega_alpha), 1.1e6, 0.1e6, worst);
    ok &= near_printed(d1.alpha_zpf, 14e-6, 1e-6, worst);
    ok &= near_printed(hz_from_rad_per_s(d1.coupling_G), 35e3, 1e3, worst);
    ok &= near_printed(hz_from_rad_per_s(d1.recoil_Gamma_BA), 1.0e3, 0.1e3, worst);

    const auto d2 = params::derive(presets::load_preset("particle2"));
    ok &= near_printed(d2.field_E0, 2.8e7, 0.1e7, worst);
    ok &= near_printed(d2.zp_field_Ec, 24.3, 0.1, worst);
    ok &= near_printed(hz_from_rad_per_s(d2.omega_alpha), 1.1e6, 0.1e6, worst);
    ok &= near_printed(d2.alpha_zpf, 24e-6, 1e-6, worst);
    ok &= near_printed(hz_from_rad_per_s(d2.coupling_G), 19e3, 1e3, worst);
    ok &= near_printed(hz_from_rad_per_s(d2.recoil_Gamma_BA), 0.3e3, 0.1e3, worst);

    const double dt = t.seconds();
    ok &= dt < 1.0;
    report(1, "parameter-table reproduction, both presets", ok,
           fmt("worst deviation %.2f%% vs printed (5%% / half-digit bound); %.3f s < 1 s",
               100.0 * worst, dt));
}

void criterion_2_headline_occupation() {
    Timer t;
    rates::OperatingPoint op;
    op.omega_alpha = rad_per_s_from_hz(1.1e6);
    op.kappa = rad_per_s_from_hz(330e3);
    op.detuning = op.omega_alpha;
    op.coupling_G = rad_per_s_from_hz(31.5e3);
    op.recoil_Gamma_BA = rad_per_s_from_hz(0.5e3);
    const auto rs = rates::steady_state_occupation(op);
    const double dt = t.seconds();
    const bool ok = std::abs(rs.n0 - 0.042) <= 0.005 && dt < 1.0;
    report(2, "headline backaction-limited occupation 0.042(5)", ok,
           fmt("n0 = %.5f; %.3f s < 1 s", rs.n0, dt));
}

void criterion_3_inertia_and_gas() {
    const double I = params::moment_of_inertia_from_rotation(52e3, 300.0);
    const bool ok_I = std::abs(I - 3.9e-32) / 3.9e-32 <= 0.03;

    const double G = rates::gas_heating_rate(rad_per_s_from_hz(6.6e-6), 300.0,
                                             rad_per_s_from_hz(1.08e6));
    const double G_hz = hz_from_rad_per_s(G);
    const bool ok_G = std::abs(G_hz - 40.0) / 40.0 <= 0.05;

    report(3, "moment of inertia and gas heating rate", ok_I && ok_G,
           fmt("I = %.3e kg m^2 (%.1f%% of 3.9e-32); Gamma_gas/2pi = %.1f Hz (%.1f%% of 40)",
               I, 100.0 * std::abs(I - 3.9e-32) / 3.9e-32, G_hz,
               100.0 * std::abs(G_hz - 40.0) / 40.0));
}

void criterion_4_detector_correction() {
    const double n = thermometry::correct_detector_response(0.5, {0.97});
    const double factor = n / 0.5;
    const bool ok = std::abs(factor - 1.04) / 1.04 <= 0.01;
    report(4, "detector-response correction factor 1.04", ok,
           fmt("factor = %.4f (%.2f%% from 1.04, bound 1%%)", factor,
               100.0 * std::abs(factor - 1.04) / 1.04));
}

void criterion_5_reduced_lindblad() {
    Timer t;
    bool ok = true;
    double worst = 0.0;
    for (double Gamma : {0.02, 0.1, 0.4}) {
        for (double Ap : {0.01, 0.05, 0.15}) {
            for (double Am : {1.0, 2.0, 4.0}) {
                const double expected = (Gamma + Ap) / (Am - Ap);
                const double r = expected / (expected + 1.0);
                const int n_lib = std::max(
                    12, static_cast<int>(std::ceil(-10.0 / std::log10(r))) + 4);
                const auto L = lindblad::build_reduced(Ap, Am, Gamma, 3.0, {n_lib, 1});
                const double n =
                    lindblad::steady_state(L).expectation(L.lib_number());
                // converged cutoff: four more levels do not move the answer
                const auto L2 =
                    lindblad::build_reduced(Ap, Am, Gamma, 3.0, {n_lib + 4, 1});
                const double n2 =
                    lindblad::steady_state(L2).expectation(L2.lib_number());
                const double gap = std::abs(n - expected) / expected;
                worst = std::max(worst, gap);
                ok &= gap <= 1e-6;
                ok &= std::abs(n2 - n) <= 1e-6 * n;
            }
        }
    }
    const double dt = t.seconds();
    ok &= dt < 10.0;
    report(5, "reduced master equation vs detailed balance, 3x3x3 grid", ok,
           fmt("worst relative gap %.2e <= 1e-6; %.2f s < 10 s", worst, dt));
}

void criterion_6_two_mode_lindblad() {
    Timer t;
    bool ok = true;
    std::string detail;
    double prev_gap = 1e300;
    for (double gk : {0.03, 0.01}) {
        rates::OperatingPoint op;
        op.omega_alpha = rad_per_s_from_hz(1.1e6);
        op.kappa = rad_per_s_from_hz(330e3);
        op.detuning = op.omega_alpha;
        op.coupling_G = gk * op.kappa;
        const auto rs0 = rates::steady_state_occupation(op);
        op.recoil_Gamma_BA = 0.3 * rs0.A_minus;
        const auto rs = rates::steady_state_occupation(op);

        const auto L = lindblad::build_two_mode(op, {16, 4});
        const double n = lindblad::steady_state(L).expectation(L.lib_number());
        const double gap = std::abs(n - rs.n0) / rs.n0; // backaction term only, S = 0
        ok &= gap <= 4.0 * gk;
        ok &= gap < prev_gap; // discrepancy shrinks with G/kappa
        prev_gap = gap;
        detail += fmt("G/kappa=%.2f gap %.4f <= %.2f; ", gk, gap, 4.0 * gk);
    }
    const double dt = t.seconds();
    ok &= dt < 60.0;
    report(6, "two-mode master equation vs closed-form occupation", ok,
           detail + fmt("%.1f s < 60 s", dt));
}

rates::OperatingPoint particle2_antinode(double S) {
    rates::OperatingPoint op;
    op.omega_alpha = rad_per_s_from_hz(1.1e6);
    op.kappa = rad_per_s_from_hz(330e3);
    op.detuning = op.omega_alpha;
    op.coupling_G = rad_per_s_from_hz(31.5e3);
    op.recoil_Gamma_BA = rad_per_s_from_hz(0.5e3);
    op.psd_S = S;
    const double hk = op.kappa / 2.0;
    op.drive_Lambda = std::sqrt(6.8e6 * (op.detuning * op.detuning + hk * hk));
    return op;
}

void criterion_7_cavity_mc() {
    Timer t;
    auto op = particle2_antinode(0.0);
    op.psd_S = op.kappa / 100.0;
    const auto mc = stochastic::cavity_occupation_mc(op, 200, 20260811);
    const double target = rates::cavity_occupation(op);
    const double dt = t.seconds();
    const bool ok = std::abs(mc.mean_abs2 - target) <= 3.0 * mc.std_error && dt < 60.0;
    report(7, "Monte Carlo <|alpha|^2> vs weak-noise formula at S = kappa/100", ok,
           fmt("mc %.4e vs %.4e, |diff|/SE = %.2f <= 3; %.1f s < 60 s", mc.mean_abs2,
               target, std::abs(mc.mean_abs2 - target) / mc.std_error, dt));
}

void criterion_8_drive_psd() {
    Timer t;
    auto op = particle2_antinode(0.0);
    op.psd_S = op.kappa / 50.0;

    stochastic::EnsembleOptions opts;
    opts.n_records = 200;
    opts.samples_per_record = 32768;
    opts.dt = 4e-8;
    opts.master_seed = 4242;
    const auto est = stochastic::heating_rate_from_drive(
        stochastic::simulate_drive_ensemble(op, opts), op.omega_alpha);
    const double formula = rates::phase_noise_heating(op);
    const double sigma = std::hypot(est.std_error, formula * op.psd_S / op.kappa);
    bool ok = std::abs(est.gamma_phi - formula) <= 3.0 * sigma;
    std::string detail = fmt("Gamma_phi mc %.4e vs %.4e (%.2f combined sigma); ",
                             est.gamma_phi, formula,
                             std::abs(est.gamma_phi - formula) / sigma);

    // one decade in S: log-log slope 1.0 +- 0.1
    std::vector<double> ls, lg;
    for (double f : {500.0, 280.0, 158.0, 89.0, 50.0}) {
        op.psd_S = op.kappa / f;
        stochastic::EnsembleOptions so;
        so.n_records = 120;
        so.samples_per_record = 16384;
        so.dt = 4e-8;
        so.master_seed = 515;
        const auto e = stochastic::heating_rate_from_drive(
            stochastic::simulate_drive_ensemble(op, so), op.omega_alpha);
        ls.push_back(std::log(op.psd_S));
        lg.push_back(std::log(e.gamma_phi));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        sx += ls[i];
        sy += lg[i];
        sxx += ls[i] * ls[i];
        sxy += ls[i] * lg[i];
    }
    const double n = double(ls.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ok &= std::abs(slope - 1.0) <= 0.1;
    const double dt = t.seconds();
    ok &= dt < 300.0;
    report(8, "drive-spectrum heating rate vs closed form and linearity in S", ok,
           detail + fmt("log-log slope %.3f in 1.0 +- 0.1; %.1f s < 300 s", slope, dt));
}

void criterion_9_thermometry_roundtrip() {
    const double omega = rad_per_s_from_hz(1.1e6);
    const double gamma = rad_per_s_from_hz(27e3);
    const double f0 = hz_from_rad_per_s(omega);
    const double fwhm = hz_from_rad_per_s(gamma);
    bool ok = true;
    double worst = 0.0;

    auto invert = [&](const thermometry::Spectrum& s, double* sigma_n = nullptr) {
        const double w = 8.0 * fwhm;
        const auto S = thermometry::fit_lorentzian(s, {-f0 - w, -f0 + w});
        const auto A = thermometry::fit_lorentzian(s, {f0 - w, f0 + w});
        const double a = A.area / S.area;
        const double n = a / (1.0 - a);
        if (sigma_n) {
            const double rel =
                std::hypot(A.sigma(2) / A.area, S.sigma(2) / S.area);
            *sigma_n = a * rel / ((1.0 - a) * (1.0 - a));
        }
        return n;
    };

    for (double n : {0.04, 0.5, 1.0, 5.0}) {
        const auto s = thermometry::synthesize_sidebands(n, gamma, omega, 0.002);
        const double rec = invert(s);
        worst = std::max(worst, std::abs(rec - n) / n);
        ok &= std::abs(rec - n) / n <= 0.02;
    }

    // 1% noise, 100 seeds: 3 sigma coverage on the recovered occupation
    int covered = 0;
    const double n_true = 0.5;
    const double height = n_true / (pi * fwhm / 2.0);
    for (int seed = 0; seed < 100; ++seed) {
        auto s = thermometry::synthesize_sidebands(n_true, gamma, omega, 0.2 * height);
        std::mt19937 rng(9000 + seed);
        std::normal_distribution<double> noise(0.0, 0.01 * height);
        for (auto& p : s.psd) p = std::max(0.0, p + noise(rng));
        double sigma_n = 0.0;
        const double rec = invert(s, &sigma_n);
        if (std::abs(rec - n_true) <= 3.0 * sigma_n) ++covered;
    }
    ok &= covered >= 97;
    report(9, "thermometry synth -> fit -> invert round trip", ok,
           fmt("worst noise-free error %.2f%% <= 2%%; 3-sigma coverage %d/100 >= 97",
               100.0 * worst, covered));
}

void criterion_10_scan_structure() {
    analysis::OperatingModel m;
    m.omega_alpha = rad_per_s_from_hz(1.1e6);
    m.kappa = rad_per_s_from_hz(330e3);
    m.detuning = m.omega_alpha;
    m.coupling_G0 = rad_per_s_from_hz(31.5e3);
    m.recoil_Gamma_BA = rad_per_s_from_hz(0.5e3);
    m.ncav0 = 6.8e6;
    m.ncav_reference_detuning = m.omega_alpha;
    m.psd_S_open = 1.010647491;
    m.position_ky = pi / 2.0;

    // detuning scan with S = 0: a minimum exactly at Delta = Omega
    auto clean = m;
    clean.psd_S_open = 0.0;
    const auto grid =
        linspace(rad_per_s_from_hz(0.4e6), rad_per_s_from_hz(1.8e6), 701); // on-grid Omega
    const auto dscan = analysis::detuning_scan(clean, grid);
    std::size_t imin = 0;
    for (std::size_t i = 0; i < dscan.values.size(); ++i)
        if (dscan.rate_sets[i].n_ss < dscan.rate_sets[imin].n_ss) imin = i;
    const bool ok_detuning =
        std::abs(dscan.values[imin] - hz_from_rad_per_s(m.omega_alpha)) <
        0.5 * (dscan.values[1] - dscan.values[0]);

    // position scan: interior minimum open loop, monotone at 20 dB
    const auto ky = linspace(0.02 * pi, 0.5 * pi, 49);
    const auto open_loop = analysis::position_scan(m, ky, 0.0);
    std::size_t pmin = 0;
    for (std::size_t i = 0; i < ky.size(); ++i)
        if (open_loop.rate_sets[i].n_ss < open_loop.rate_sets[pmin].n_ss) pmin = i;
    const bool ok_interior = pmin > 0 && pmin < ky.size() - 1;

    const auto suppressed = analysis::position_scan(m, ky, 1.0);
    bool ok_monotone = true;
    for (std::size_t i = 1; i < ky.size(); ++i)
        ok_monotone &= suppressed.rate_sets[i].n_ss < suppressed.rate_sets[i - 1].n_ss;

    // gain scan: monotone non-increasing
    const auto gscan = analysis::gain_scan(m, linspace(0.0, 1.5, 31));
    bool ok_gain = true;
    for (std::size_t i = 1; i < gscan.values.size(); ++i)
        ok_gain &= gscan.rate_sets[i].n_ss <= gscan.rate_sets[i - 1].n_ss + 1e-15;

    report(10, "scan structure: detuning minimum, position shapes, gain monotonicity",
           ok_detuning && ok_interior && ok_monotone && ok_gain,
           fmt("S=0 min at %.4g Hz; open-loop interior min at ky = %.2f pi; 20 dB "
               "monotone %s; gain monotone %s",
               dscan.values[imin], ky[pmin] / pi, ok_monotone ? "yes" : "no",
               ok_gain ? "yes" : "no"));
}

void criterion_11_fit_coverage() {
    analysis::CouplingFitConditions cf;
    cf.kappa = rad_per_s_from_hz(330e3);
    cf.omega_alpha = rad_per_s_from_hz(1.1e6);
    cf.detuning = cf.omega_alpha;
    const double G0 = rad_per_s_from_hz(47e3);
    const double hk = cf.kappa / 2.0;

    int cov_coupling = 0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        std::mt19937 rng(100 + seed);
        std::normal_distribution<double> g(0.0, 0.02);
        std::vector<std::pair<double, double>> data;
        std::vector<double> sig;
        for (double ky : linspace(0.05 * pi, 0.5 * pi, 8)) {
            const double s = std::sin(ky);
            const double gamma = G0 * G0 * s * s * cf.kappa / (hk * hk);
            data.emplace_back(ky, gamma * (1.0 + g(rng)));
            sig.push_back(0.02 * gamma);
        }
        const auto rep = analysis::extract_coupling(data, cf, sig);
        if (rep.status == fit::FitStatus::converged &&
            std::abs(rep.parameters[0] - G0) <= 2.0 * rep.uncertainties[0])
            ++cov_coupling;
    }

    analysis::HeatingFitConditions hf;
    hf.kappa = cf.kappa;
    hf.omega_alpha = cf.omega_alpha;
    hf.detuning = cf.detuning;
    hf.coupling_G0 = rad_per_s_from_hz(31.5e3);
    hf.psd_S = 1.010647491;
    analysis::OperatingModel m;
    m.omega_alpha = hf.omega_alpha;
    m.kappa = hf.kappa;
    m.detuning = hf.detuning;
    m.coupling_G0 = hf.coupling_G0;
    m.recoil_Gamma_BA = rad_per_s_from_hz(0.5e3);
    m.ncav0 = 6.8e6;
    m.ncav_reference_detuning = hf.detuning;
    m.psd_S_open = hf.psd_S;

    int cov_gamma = 0, cov_n0 = 0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        std::mt19937 rng(7000 + seed);
        std::normal_distribution<double> g(0.0, 0.05);
        std::vector<std::pair<double, double>> data;
        std::vector<double> sig;
        for (double ky : linspace(0.05 * pi, 0.5 * pi, 9)) {
            const auto rs =
                rates::steady_state_occupation(m.at(ky, hf.detuning, hf.psd_S));
            data.emplace_back(ky, rs.n_ss * (1.0 + g(rng)));
            sig.push_back(0.05 * rs.n_ss);
        }
        const auto rep = analysis::extract_heating(data, hf, sig);
        if (rep.status != fit::FitStatus::converged) continue;
        if (std::abs(rep.parameters[0] - m.recoil_Gamma_BA) <= 2.0 * rep.uncertainties[0])
            ++cov_gamma;
        if (std::abs(rep.parameters[1] - m.ncav0) <= 2.0 * rep.uncertainties[1]) ++cov_n0;
    }

    const bool ok = cov_coupling >= 90 && cov_gamma >= 90 && cov_n0 >= 90;
    report(11, "extraction-fit 2-sigma coverage on synthetic truth", ok,
           fmt("coupling %d/100, Gamma_BA %d/100, ncav0 %d/100, all >= 90", cov_coupling,
               cov_gamma, cov_n0));
}

void criterion_12_resolved_sideband_limit() {
    bool ok = true;
    double prev = 0.0;
    std::string detail;
    for (double r : {0.3, 0.1, 0.03}) {
        rates::OperatingPoint op;
        op.omega_alpha = 1.0;
        op.kappa = r;
        op.detuning = 1.0;
        op.coupling_G = 1e-3;
        op.psd_S = 1e-4;
        op.drive_Lambda = 1.0;
        const auto rs = rates::steady_state_occupation(op);
        const double ratio = rs.n_phi / (rs.ncav * op.psd_S / op.kappa);
        ok &= ratio > prev;
        prev = ratio;
        detail += fmt("kappa/Omega=%.2f: %.5f; ", r, ratio);
    }
    ok &= std::abs(prev - 1.0) <= 0.03;
    report(12, "resolved-sideband limit n_phi -> ncav S / kappa", ok,
           detail + "monotone, final within 3% of 1");
}

} // namespace

int main() {
    std::printf("libracool acceptance suite\n");
    const struct {
        int index;
        const char* name;
        void (*run)();
    } criteria[] = {
        {1, "parameter tables", criterion_1_parameter_tables},
        {2, "headline occupation", criterion_2_headline_occupation},
        {3, "inertia and gas heating", criterion_3_inertia_and_gas},
        {4, "detector correction", criterion_4_detector_correction},
        {5, "reduced lindblad", criterion_5_reduced_lindblad},
        {6, "two-mode lindblad", criterion_6_two_mode_lindblad},
        {7, "cavity Monte Carlo", criterion_7_cavity_mc},
        {8, "drive-spectrum heating", criterion_8_drive_psd},
        {9, "thermometry round trip", criterion_9_thermometry_roundtrip},
        {10, "scan structure", criterion_10_scan_structure},
        {11, "fit coverage", criterion_11_fit_coverage},
        {12, "resolved-sideband limit", criterion_12_resolved_sideband_limit},
    };
    for (const auto& c : criteria) {
        try {
            c.run();
        } catch (const std::exception& e) {
            report(c.index, c.name, false, std::string("exception: ") + e.what());
        }
    }
    if (failures == 0)
        std::printf("all 12 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
