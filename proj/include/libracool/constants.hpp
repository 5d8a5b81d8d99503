#ifndef LIBRACOOL_CONSTANTS_HPP
#define LIBRACOOL_CONSTANTS_HPP

namespace libracool {

// CODATA 2018. Fixed at compile time, not user-settable.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;  // J s
    static constexpr double c = 299792458.0;         // m / s
    static constexpr double eps0 = 8.8541878128e-12; // F / m
    static constexpr double kB = 1.380649e-23;       // J / K
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// All frequencies and rates are stored internally in rad/s; file and table
// I/O uses Hz with explicit "/2pi" naming.
inline constexpr double rad_per_s_from_hz(double f) { return two_pi * f; }
inline constexpr double hz_from_rad_per_s(double w) { return w / two_pi; }

// Phase-noise PSD of phi-dot: S[rad^2/s] = (2 pi)^2 * S[Hz^2/Hz].
inline constexpr double psd_rad2_per_s_from_hz2_per_hz(double s) {
    return two_pi * two_pi * s;
}
inline constexpr double psd_hz2_per_hz_from_rad2_per_s(double s) {
    return s / (two_pi * two_pi);
}

} // namespace libracool

#endif
