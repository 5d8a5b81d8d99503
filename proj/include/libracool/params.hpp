#ifndef LIBRACOOL_PARAMS_HPP
#define LIBRACOOL_PARAMS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "libracool/constants.hpp"

// Physical inputs of the cooling model and every derived quantity of the
// parameter table. Pure value types; safe to share read-only across threads.

namespace libracool::params {

namespace detail {
inline void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw std::invalid_argument(field + ": " + what);
}
inline void require_finite(double v, const std::string& field) {
    require(std::isfinite(v), field, "must be finite");
}
inline void require_positive(double v, const std::string& field) {
    require_finite(v, field);
    require(v > 0.0, field, "must be > 0 (got " + std::to_string(v) + ")");
}
inline void require_nonnegative(double v, const std::string& field) {
    require_finite(v, field);
    require(v >= 0.0, field, "must be >= 0 (got " + std::to_string(v) + ")");
}
} // namespace detail

struct TweezerParams {
    double power = 0.0;      // W
    double waist = 0.0;      // m
    double wavelength = 0.0; // m

    double omega_tw() const { return two_pi * PhysicalConstants::c / wavelength; } // rad/s

    void validate() const {
        detail::require_positive(power, "tweezer.power");
        detail::require_positive(waist, "tweezer.waist");
        detail::require_positive(wavelength, "tweezer.wavelength");
    }
};

struct CavityParams {
    double waist = 0.0;           // m
    double length = 0.0;          // m
    double linewidth_kappa = 0.0; // rad/s
    double detuning_delta = 0.0;  // rad/s
    double phase_phi = 0.0;       // rad, k*y_eq: 0 = node, pi/2 = antinode
    double drive_epsilon = 0.0;   // dimensionless residual-scattering parameter

    void validate() const {
        detail::require_positive(waist, "cavity.waist");
        detail::require_positive(length, "cavity.length");
        detail::require_positive(linewidth_kappa, "cavity.linewidth_kappa");
        detail::require_finite(detuning_delta, "cavity.detuning_delta");
        detail::require_finite(phase_phi, "cavity.phase_phi");
        detail::require(phase_phi >= 0.0 && phase_phi <= pi / 2.0, "cavity.phase_phi",
                        "must lie in [0, pi/2]");
        detail::require_nonnegative(drive_epsilon, "cavity.drive_epsilon");
    }
};

struct ParticleParams {
    double moment_of_inertia = 0.0; // kg m^2
    double delta_alpha = 0.0;       // C m^2 / V, alpha_Y - alpha_X
    double alpha_Y = 0.0;           // C m^2 / V
    double pressure = 0.0;          // mbar
    double temperature = 0.0;       // K

    void validate() const {
        detail::require_positive(moment_of_inertia, "particle.moment_of_inertia");
        detail::require_positive(delta_alpha, "particle.delta_alpha");
        detail::require_positive(alpha_Y, "particle.alpha_Y");
        detail::require(delta_alpha <= alpha_Y, "particle.delta_alpha",
                        "must not exceed alpha_Y");
        detail::require_nonnegative(pressure, "particle.pressure");
        detail::require_positive(temperature, "particle.temperature");
    }
};

struct PhaseNoiseParams {
    double psd_S = 0.0; // rad^2/s, white-noise intensity of phi-dot

    void validate() const { detail::require_nonnegative(psd_S, "phase_noise.psd_S"); }
};

struct ExperimentParams {
    std::string name;
    TweezerParams tweezer;
    CavityParams cavity;
    ParticleParams particle;
    PhaseNoiseParams phase_noise;

    void validate() const {
        tweezer.validate();
        cavity.validate();
        particle.validate();
        phase_noise.validate();
    }
};

struct DerivedQuantities {
    double field_E0 = 0.0;        // V/m, tweezer field amplitude
    double zp_field_Ec = 0.0;     // V/m, zero-point cavity field amplitude
    double mode_volume_Vc = 0.0;  // m^3
    double omega_alpha = 0.0;     // rad/s, libration frequency
    double alpha_zpf = 0.0;       // rad, zero-point angular displacement
    double coupling_G = 0.0;      // rad/s, stored as magnitude
    double recoil_Gamma_BA = 0.0; // rad/s, photon recoil heating rate
    double drive_Lambda = 0.0;    // rad/s, cavity driving rate
    double ncav_ss = 0.0;         // steady-state cavity photon number
};

// Full derivation chain from the raw experiment parameters. The coupling is
// stored as a magnitude: every downstream expression uses G^2, so the sign
// convention is unobservable. The zero-point field uses omega_tw for the
// cavity frequency (the detuning correction is ~1e-9 relative).
inline DerivedQuantities derive(const ExperimentParams& p) {
    p.validate();
    using K = PhysicalConstants;

    DerivedQuantities d;
    d.field_E0 = std::sqrt(4.0 * p.tweezer.power /
                           (pi * K::eps0 * K::c * p.tweezer.waist * p.tweezer.waist));
    d.mode_volume_Vc = pi * (p.cavity.waist / 2.0) * (p.cavity.waist / 2.0) * p.cavity.length;
    const double omega_tw = p.tweezer.omega_tw();
    d.zp_field_Ec = std::sqrt(K::hbar * omega_tw / (2.0 * K::eps0 * d.mode_volume_Vc));

    const double stiffness = p.particle.delta_alpha * d.field_E0 * d.field_E0;
    if (stiffness <= 0.0)
        throw std::invalid_argument("particle.delta_alpha: zero trap stiffness (degenerate input)");
    d.omega_alpha = std::sqrt(stiffness / (2.0 * p.particle.moment_of_inertia));
    d.alpha_zpf = std::sqrt(K::hbar / (2.0 * p.particle.moment_of_inertia * d.omega_alpha));

    const double sin_phi = std::sin(p.cavity.phase_phi);
    d.coupling_G = p.particle.delta_alpha * d.alpha_zpf * d.field_E0 * d.zp_field_Ec * sin_phi /
                   (2.0 * K::hbar);
    d.recoil_Gamma_BA = p.particle.delta_alpha * p.particle.delta_alpha * d.field_E0 * d.field_E0 *
                        d.alpha_zpf * d.alpha_zpf * omega_tw * omega_tw * omega_tw /
                        (12.0 * pi * K::hbar * K::c * K::c * K::c * K::eps0);
    d.drive_Lambda = p.particle.alpha_Y * d.field_E0 * d.zp_field_Ec * p.cavity.drive_epsilon *
                     sin_phi / (2.0 * K::hbar);
    const double half_kappa = p.cavity.linewidth_kappa / 2.0;
    d.ncav_ss = d.drive_Lambda * d.drive_Lambda /
                (p.cavity.detuning_delta * p.cavity.detuning_delta + half_kappa * half_kappa);
    return d;
}

// Moment of inertia from the thermal spread of the rotation rate,
// sigma_rot = sqrt(kB T / I) / (2 pi).
inline double moment_of_inertia_from_rotation(double sigma_rot_hz, double temperature) {
    detail::require_positive(sigma_rot_hz, "sigma_rot");
    detail::require_positive(temperature, "temperature");
    const double w = two_pi * sigma_rot_hz;
    return PhysicalConstants::kB * temperature / (w * w);
}

// Purity of a thermal state with mean occupation n.
inline double purity(double n) {
    detail::require_finite(n, "n");
    detail::require(n >= 0.0, "n", "must be >= 0");
    return 1.0 / (2.0 * n + 1.0);
}

// --- JSON parameter files ----------------------------------------------
//
// Frequencies appear in files as "*_over_2pi_Hz"; the phase-noise PSD must
// carry a unit tag, either "rad2_per_s" or "Hz2_per_Hz".

namespace detail {
inline double get_field(const nlohmann::json& j, const std::string& obj, const std::string& key) {
    if (!j.contains(key))
        throw std::invalid_argument(obj + "." + key + ": missing field");
    if (!j.at(key).is_number())
        throw std::invalid_argument(obj + "." + key + ": expected a number");
    return j.at(key).get<double>();
}
} // namespace detail

inline ExperimentParams params_from_json(const nlohmann::json& j) {
    ExperimentParams p;
    p.name = j.value("name", std::string{});
    if (!j.contains("tweezer") || !j.contains("cavity") || !j.contains("particle") ||
        !j.contains("phase_noise"))
        throw std::invalid_argument(
            "params: requires tweezer, cavity, particle and phase_noise objects");

    const auto& t = j.at("tweezer");
    p.tweezer.power = detail::get_field(t, "tweezer", "power_W");
    p.tweezer.waist = detail::get_field(t, "tweezer", "waist_m");
    p.tweezer.wavelength = detail::get_field(t, "tweezer", "wavelength_m");

    const auto& c = j.at("cavity");
    p.cavity.waist = detail::get_field(c, "cavity", "waist_m");
    p.cavity.length = detail::get_field(c, "cavity", "length_m");
    p.cavity.linewidth_kappa =
        rad_per_s_from_hz(detail::get_field(c, "cavity", "linewidth_kappa_over_2pi_Hz"));
    p.cavity.detuning_delta =
        rad_per_s_from_hz(detail::get_field(c, "cavity", "detuning_delta_over_2pi_Hz"));
    p.cavity.phase_phi = detail::get_field(c, "cavity", "phase_phi_rad");
    p.cavity.drive_epsilon = detail::get_field(c, "cavity", "drive_epsilon");

    const auto& q = j.at("particle");
    p.particle.moment_of_inertia = detail::get_field(q, "particle", "moment_of_inertia_kg_m2");
    p.particle.delta_alpha = detail::get_field(q, "particle", "delta_alpha_C_m2_per_V");
    p.particle.alpha_Y = detail::get_field(q, "particle", "alpha_Y_C_m2_per_V");
    p.particle.pressure = detail::get_field(q, "particle", "pressure_mbar");
    p.particle.temperature = detail::get_field(q, "particle", "temperature_K");

    const auto& n = j.at("phase_noise");
    const double value = detail::get_field(n, "phase_noise", "psd");
    if (!n.contains("unit") || !n.at("unit").is_string())
        throw std::invalid_argument("phase_noise.unit: missing unit tag "
                                    "(\"rad2_per_s\" or \"Hz2_per_Hz\")");
    const std::string unit = n.at("unit").get<std::string>();
    if (unit == "rad2_per_s")
        p.phase_noise.psd_S = value;
    else if (unit == "Hz2_per_Hz")
        p.phase_noise.psd_S = psd_rad2_per_s_from_hz2_per_hz(value);
    else
        throw std::invalid_argument("phase_noise.unit: unknown tag \"" + unit +
                                    "\" (expected \"rad2_per_s\" or \"Hz2_per_Hz\")");

    p.validate();
    return p;
}

inline nlohmann::json params_to_json(const ExperimentParams& p) {
    nlohmann::json j;
    j["name"] = p.name;
    j["tweezer"] = {{"power_W", p.tweezer.power},
                    {"waist_m", p.tweezer.waist},
                    {"wavelength_m", p.tweezer.wavelength}};
    j["cavity"] = {{"waist_m", p.cavity.waist},
                   {"length_m", p.cavity.length},
                   {"linewidth_kappa_over_2pi_Hz", hz_from_rad_per_s(p.cavity.linewidth_kappa)},
                   {"detuning_delta_over_2pi_Hz", hz_from_rad_per_s(p.cavity.detuning_delta)},
                   {"phase_phi_rad", p.cavity.phase_phi},
                   {"drive_epsilon", p.cavity.drive_epsilon}};
    j["particle"] = {{"moment_of_inertia_kg_m2", p.particle.moment_of_inertia},
                     {"delta_alpha_C_m2_per_V", p.particle.delta_alpha},
                     {"alpha_Y_C_m2_per_V", p.particle.alpha_Y},
                     {"pressure_mbar", p.particle.pressure},
                     {"temperature_K", p.particle.temperature}};
    j["phase_noise"] = {{"psd", p.phase_noise.psd_S}, {"unit", "rad2_per_s"}};
    return j;
}

inline nlohmann::json derived_to_json(const DerivedQuantities& d) {
    return nlohmann::json{{"field_E0_V_per_m", d.field_E0},
                          {"zp_field_Ec_V_per_m", d.zp_field_Ec},
                          {"mode_volume_Vc_m3", d.mode_volume_Vc},
                          {"omega_alpha_over_2pi_Hz", hz_from_rad_per_s(d.omega_alpha)},
                          {"alpha_zpf_rad", d.alpha_zpf},
                          {"coupling_G_over_2pi_Hz", hz_from_rad_per_s(d.coupling_G)},
                          {"recoil_Gamma_BA_over_2pi_Hz", hz_from_rad_per_s(d.recoil_Gamma_BA)},
                          {"drive_Lambda_over_2pi_Hz", hz_from_rad_per_s(d.drive_Lambda)},
                          {"ncav_ss", d.ncav_ss}};
}

} // namespace libracool::params

#endif
