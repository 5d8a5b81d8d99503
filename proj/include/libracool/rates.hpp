#ifndef LIBRACOOL_RATES_HPP
#define LIBRACOOL_RATES_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "libracool/constants.hpp"

// Closed-form sideband rates, heating rates and steady-state occupations of
// the adiabatically eliminated libration mode. Pure functions over value
// types; scan points can be evaluated in parallel without synchronization.

namespace libracool::rates {

struct OperatingPoint {
    double omega_alpha = 0.0;     // rad/s
    double kappa = 0.0;           // rad/s
    double detuning = 0.0;        // rad/s
    double coupling_G = 0.0;      // rad/s
    double recoil_Gamma_BA = 0.0; // rad/s
    double psd_S = 0.0;           // rad^2/s
    double drive_Lambda = 0.0;    // rad/s

    void validate() const {
        auto bad = [](const char* f) { throw std::invalid_argument(std::string(f)); };
        if (!(std::isfinite(omega_alpha) && omega_alpha > 0.0))
            bad("operating_point.omega_alpha: must be > 0");
        if (!(std::isfinite(kappa) && kappa > 0.0)) bad("operating_point.kappa: must be > 0");
        if (!std::isfinite(detuning)) bad("operating_point.detuning: must be finite");
        if (!(std::isfinite(coupling_G) && coupling_G >= 0.0))
            bad("operating_point.coupling_G: must be >= 0");
        if (!(std::isfinite(recoil_Gamma_BA) && recoil_Gamma_BA >= 0.0))
            bad("operating_point.recoil_Gamma_BA: must be >= 0");
        if (!(std::isfinite(psd_S) && psd_S >= 0.0)) bad("operating_point.psd_S: must be >= 0");
        if (!(std::isfinite(drive_Lambda) && drive_Lambda >= 0.0))
            bad("operating_point.drive_Lambda: must be >= 0");
    }
};

enum class OccupationStatus {
    ok,            // cooling regime, finite steady state
    divergent,     // A- <= A+: no finite occupation at this detuning
    zero_coupling, // G = 0: no cavity cooling at all
};

struct RateSet {
    double A_plus = 0.0;           // rad/s, heating sideband rate
    double A_minus = 0.0;          // rad/s, cooling sideband rate
    double gamma_cool = 0.0;       // rad/s, signed: A+ - A-
    double Gamma_phi = 0.0;        // rad/s, phase-noise heating rate
    double Gamma_BA = 0.0;         // rad/s, copied from the operating point
    double ncav = 0.0;             // steady-state cavity photon number
    double n0 = 0.0;               // occupation without phase noise
    double n_phi = 0.0;            // phase-noise contribution
    double n_ss = 0.0;             // n0 + n_phi
    double n_exact = 0.0;          // (Gamma_BA + Gamma_phi + A+) / (A- - A+)
    OccupationStatus status = OccupationStatus::ok;
    bool weak_noise_warning = false; // psd_S > kappa/10
};

// A± = G^2 kappa / [(Omega ± Delta)^2 + (kappa/2)^2]
inline std::pair<double, double> sideband_rates(const OperatingPoint& op) {
    op.validate();
    const double g2k = op.coupling_G * op.coupling_G * op.kappa;
    const double hk2 = (op.kappa / 2.0) * (op.kappa / 2.0);
    const double sum = op.omega_alpha + op.detuning;
    const double dif = op.omega_alpha - op.detuning;
    return {g2k / (sum * sum + hk2), g2k / (dif * dif + hk2)};
}

// Signed total cooling rate, gamma = A+ - A- (negative means net cooling).
inline double cooling_rate(const OperatingPoint& op) {
    const auto [ap, am] = sideband_rates(op);
    return ap - am;
}

// The resolved-sideband approximation gamma ~ -A-.
inline double cooling_rate_approx(const OperatingPoint& op) {
    return -sideband_rates(op).second;
}

// ncav = Lambda^2 / (Delta^2 + (kappa/2)^2), weak-noise steady cavity field.
inline double cavity_occupation(const OperatingPoint& op) {
    op.validate();
    const double hk = op.kappa / 2.0;
    return op.drive_Lambda * op.drive_Lambda / (op.detuning * op.detuning + hk * hk);
}

inline bool weak_noise_ok(const OperatingPoint& op) { return op.psd_S <= op.kappa / 10.0; }

namespace detail {
// Shared numerator/denominator pieces of the phase-noise expressions.
inline double phase_noise_shape(double omega, double kappa, double delta) {
    const double hk2 = (kappa / 2.0) * (kappa / 2.0);
    const double a = hk2 - delta * delta;
    return a * a + omega * omega * hk2;
}
} // namespace detail

// Weak-noise phase heating rate. Valid for psd_S << kappa; callers should
// consult weak_noise_ok() before trusting the result outside that regime.
inline double phase_noise_heating(const OperatingPoint& op) {
    op.validate();
    const double ncav = cavity_occupation(op);
    const double hk2 = (op.kappa / 2.0) * (op.kappa / 2.0);
    const double sum = op.detuning + op.omega_alpha;
    const double dif = op.detuning - op.omega_alpha;
    const double num = detail::phase_noise_shape(op.omega_alpha, op.kappa, op.detuning);
    const double den = (op.detuning * op.detuning + hk2) * (sum * sum + hk2) * (dif * dif + hk2);
    return 4.0 * op.coupling_G * op.coupling_G * ncav * op.psd_S * num / den;
}

// Steady-state occupation, both in the fit form n0 + n_phi and as the exact
// detailed balance n_exact. Divergent or uncoupled points are reported with
// a typed status and +infinity, never an exception, so scan tables can
// contain heating regions.
inline RateSet steady_state_occupation(const OperatingPoint& op) {
    op.validate();
    constexpr double inf = std::numeric_limits<double>::infinity();

    RateSet r;
    const auto [ap, am] = sideband_rates(op);
    r.A_plus = ap;
    r.A_minus = am;
    r.gamma_cool = ap - am;
    r.Gamma_phi = phase_noise_heating(op);
    r.Gamma_BA = op.recoil_Gamma_BA;
    r.ncav = cavity_occupation(op);
    r.weak_noise_warning = !weak_noise_ok(op);

    const double hk2 = (op.kappa / 2.0) * (op.kappa / 2.0);
    const double sum = op.detuning + op.omega_alpha;
    const double dif = op.detuning - op.omega_alpha;
    // n_phi = Gamma_phi / A-; the G^2 factors cancel, so it stays finite at G=0.
    r.n_phi = 4.0 * r.ncav * op.psd_S *
              detail::phase_noise_shape(op.omega_alpha, op.kappa, op.detuning) /
              ((op.detuning * op.detuning + hk2) * (sum * sum + hk2) * op.kappa);

    if (op.coupling_G == 0.0) {
        r.status = OccupationStatus::zero_coupling;
        r.n0 = inf;
        r.n_ss = inf;
        r.n_exact = inf;
        return r;
    }

    r.n0 = op.recoil_Gamma_BA * (dif * dif + hk2) / (op.coupling_G * op.coupling_G * op.kappa);
    r.n_ss = r.n0 + r.n_phi;
    if (am > ap) {
        r.status = OccupationStatus::ok;
        r.n_exact = (op.recoil_Gamma_BA + r.Gamma_phi + ap) / (am - ap);
    } else {
        r.status = OccupationStatus::divergent;
        r.n_ss = inf;
        r.n_exact = inf;
    }
    return r;
}

// Gas heating rate, Gamma_gas = gamma_alpha kB T / (hbar Omega_alpha).
inline double gas_heating_rate(double gamma_alpha, double temperature, double omega_alpha) {
    if (!(gamma_alpha > 0.0 && temperature > 0.0 && omega_alpha > 0.0))
        throw std::invalid_argument("gas_heating_rate: inputs must be > 0");
    return gamma_alpha * PhysicalConstants::kB * temperature /
           (PhysicalConstants::hbar * omega_alpha);
}

} // namespace libracool::rates

#endif
