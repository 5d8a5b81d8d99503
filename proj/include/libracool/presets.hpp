#ifndef LIBRACOOL_PRESETS_HPP
#define LIBRACOOL_PRESETS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "libracool/params.hpp"

// Bundled parameter presets. The JSON text is embedded verbatim so the CLI
// works from any directory; the copies under presets/ are the same bytes and
// are checksummed in the test suite to keep the two in sync. User-supplied
// parameter files merge over a preset (object keys replace recursively).

namespace libracool::presets {

inline constexpr std::string_view particle1_json = R"preset({
  "name": "particle1",
  "notes": [
    "Silica nanosphere cluster, first particle of the measurement campaign.",
    "Tweezer power is only known to be approximately 1.2 W; the nominal value is recorded.",
    "alpha_Y and drive_epsilon are not directly measured; they are chosen so that the derived antinode photon number reproduces the fitted ncav0 at the reference detuning of 1.1 MHz.",
    "The phase-noise PSD is the directly measured open-loop value, sqrt(S)/(2pi) = 0.16 Hz/sqrt(Hz), stored as S = 0.16^2 Hz^2/Hz.",
    "The fitted block holds scan-fit results; theory counterparts follow from derive()."
  ],
  "tweezer": {
    "power_W": 1.2,
    "waist_m": 0.85e-6,
    "wavelength_m": 1550e-9
  },
  "cavity": {
    "waist_m": 48e-6,
    "length_m": 6.4e-3,
    "linewidth_kappa_over_2pi_Hz": 330e3,
    "detuning_delta_over_2pi_Hz": 1.1e6,
    "phase_phi_rad": 1.5707963267948966,
    "drive_epsilon": 0.20568854390804817
  },
  "particle": {
    "moment_of_inertia_kg_m2": 3.9e-32,
    "delta_alpha_C_m2_per_V": 4.7e-33,
    "alpha_Y_C_m2_per_V": 1.4e-32,
    "pressure_mbar": 5e-9,
    "temperature_K": 300.0
  },
  "phase_noise": {
    "psd": 0.0256,
    "unit": "Hz2_per_Hz"
  },
  "fitted": {
    "coupling_G0_over_2pi_Hz": 46.9e3,
    "recoil_Gamma_BA_over_2pi_Hz": 0.7e3,
    "ncav0": 1.9e6,
    "ncav_reference_detuning_over_2pi_Hz": 1.1e6
  }
}
)preset";

inline constexpr std::string_view particle2_json = R"preset({
  "name": "particle2",
  "notes": [
    "Second particle, used for all measurements with active phase-noise cancellation.",
    "Same optics as particle1; smaller moment of inertia and polarizability anisotropy.",
    "alpha_Y and drive_epsilon are chosen so that the derived antinode photon number reproduces the fitted ncav0 at the reference detuning of 1.1 MHz.",
    "The phase-noise PSD is the measured open-loop value; closed-loop suppression is modeled by the noise-eater transfer functions, not stored here."
  ],
  "tweezer": {
    "power_W": 1.2,
    "waist_m": 0.85e-6,
    "wavelength_m": 1550e-9
  },
  "cavity": {
    "waist_m": 48e-6,
    "length_m": 6.4e-3,
    "linewidth_kappa_over_2pi_Hz": 330e3,
    "detuning_delta_over_2pi_Hz": 1.1e6,
    "phase_phi_rad": 1.5707963267948966,
    "drive_epsilon": 0.5447732764150287
  },
  "particle": {
    "moment_of_inertia_kg_m2": 1.3e-32,
    "delta_alpha_C_m2_per_V": 1.5e-33,
    "alpha_Y_C_m2_per_V": 1.0e-32,
    "pressure_mbar": 5e-9,
    "temperature_K": 300.0
  },
  "phase_noise": {
    "psd": 0.0256,
    "unit": "Hz2_per_Hz"
  },
  "fitted": {
    "coupling_G0_over_2pi_Hz": 31.5e3,
    "recoil_Gamma_BA_over_2pi_Hz": 0.5e3,
    "ncav0": 6.8e6,
    "ncav_reference_detuning_over_2pi_Hz": 1.1e6
  }
}
)preset";

// FNV-1a, 64 bit. Used only as an integrity check on the bundled data files.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline constexpr std::uint64_t particle1_checksum = 0xd9ec894fba80b634ull;
inline constexpr std::uint64_t particle2_checksum = 0x3f6d1de41a52c98bull;

inline std::vector<std::string> preset_names() { return {"particle1", "particle2"}; }

inline std::string_view preset_text(const std::string& name) {
    if (name == "particle1") return particle1_json;
    if (name == "particle2") return particle2_json;
    throw std::invalid_argument("unknown preset \"" + name +
                                "\" (available: particle1, particle2)");
}

inline nlohmann::json preset_json(const std::string& name) {
    const auto text = preset_text(name);
    const auto expect = name == "particle1" ? particle1_checksum : particle2_checksum;
    if (fnv1a64(text) != expect)
        throw std::runtime_error("preset \"" + name + "\" failed its integrity check");
    return nlohmann::json::parse(text);
}

// Recursive merge: values from `over` win; objects merge key by key.
inline void merge_over(nlohmann::json& base, const nlohmann::json& over) {
    if (!over.is_object() || !base.is_object()) {
        base = over;
        return;
    }
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (base.contains(it.key()))
            merge_over(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

inline params::ExperimentParams load_preset(const std::string& name) {
    return params::params_from_json(preset_json(name));
}

} // namespace libracool::presets

#endif
