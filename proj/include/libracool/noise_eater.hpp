#ifndef LIBRACOOL_NOISE_EATER_HPP
#define LIBRACOOL_NOISE_EATER_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "libracool/constants.hpp"

// Phase-noise cancellation loop: imbalanced-interferometer detector,
// bandpass I/Q controller and phase modulator. The closed loop suppresses
// the phase-noise PSD by |1 + M R H|^-2.

namespace libracool::noise_eater {

using cplx = std::complex<double>;

struct FeedbackParams {
    double tau = 0.0;      // s, interferometer path-imbalance delay
    double gain_g = 0.0;   // dimensionless cancellation gain
    double gamma_IQ = 0.0; // rad/s, controller linewidth
    double omega_IQ = 0.0; // rad/s, controller center frequency
    double tau_IQ = 0.0;   // s, delay compensation
    std::function<cplx(double)> modulator_M = [](double) { return cplx{1.0, 0.0}; };

    void validate() const {
        if (!(tau > 0.0)) throw std::invalid_argument("feedback.tau: must be > 0");
        if (!(gain_g >= 0.0)) throw std::invalid_argument("feedback.gain_g: must be >= 0");
        if (!(gamma_IQ > 0.0)) throw std::invalid_argument("feedback.gamma_IQ: must be > 0");
        if (!(omega_IQ > 0.0)) throw std::invalid_argument("feedback.omega_IQ: must be > 0");
        if (!modulator_M) throw std::invalid_argument("feedback.modulator_M: must be callable");
    }
};

// R(Omega) = 1 - e^{-i tau Omega}; DC-blind, |R| maximal at tau Omega = pi.
inline cplx interferometer_response(double tau, double omega) {
    return 1.0 - std::exp(cplx{0.0, -tau * omega});
}

// H(Omega) = g e^{-i Omega tau_IQ} gamma Omega / (Omega_IQ^2 - Omega^2 + i gamma Omega)
inline cplx controller_response(const FeedbackParams& fb, double omega) {
    fb.validate();
    const cplx den{fb.omega_IQ * fb.omega_IQ - omega * omega, fb.gamma_IQ * omega};
    return fb.gain_g * std::exp(cplx{0.0, -omega * fb.tau_IQ}) * (fb.gamma_IQ * omega) / den;
}

inline cplx loop_gain(const FeedbackParams& fb, double omega) {
    return fb.modulator_M(omega) * interferometer_response(fb.tau, omega) *
           controller_response(fb, omega);
}

// S^fb(Omega) = S(Omega) / |1 + M R H|^2
inline double closed_loop_psd(const FeedbackParams& fb, double s_open, double omega) {
    if (!(s_open >= 0.0)) throw std::invalid_argument("s_open must be >= 0");
    const double denom = std::norm(1.0 + loop_gain(fb, omega));
    return s_open / denom;
}

inline double effective_psd_at_libration(const FeedbackParams& fb, double s_open,
                                         double omega_alpha) {
    return closed_loop_psd(fb, s_open, omega_alpha);
}

inline double suppression_db(const FeedbackParams& fb, double omega) {
    return 10.0 * std::log10(std::norm(1.0 + loop_gain(fb, omega)));
}

// Path delay of the fiber interferometer: group index 1.468, 80 m of fiber.
inline double default_fiber_delay(double fiber_length_m = 80.0, double group_index = 1.468) {
    return group_index * fiber_length_m / PhysicalConstants::c;
}

// Loop defaults used by the scans: a real constant modulator with
// |M R(Omega_IQ)| = 9, so unit gain gives 20 dB suppression at the center
// frequency, and tau_IQ chosen to zero the total loop phase there.
inline FeedbackParams calibrated_feedback(double omega_IQ, double gain,
                                          double tau = default_fiber_delay(),
                                          double gamma_IQ = rad_per_s_from_hz(4e3)) {
    FeedbackParams fb;
    fb.tau = tau;
    fb.gain_g = gain;
    fb.gamma_IQ = gamma_IQ;
    fb.omega_IQ = omega_IQ;

    const cplx R = interferometer_response(tau, omega_IQ);
    if (std::abs(R) < 1e-12)
        throw std::invalid_argument("calibrated_feedback: interferometer is blind at omega_IQ");
    const double m = 9.0 / std::abs(R);
    fb.modulator_M = [m](double) { return cplx{m, 0.0}; };

    // Total loop phase at omega_IQ: arg(M R) - pi/2 - omega tau_IQ = 0 (mod 2 pi).
    double phase = std::arg(R) - pi / 2.0;
    while (phase < 0.0) phase += two_pi;
    fb.tau_IQ = phase / omega_IQ;
    return fb;
}

} // namespace libracool::noise_eater

#endif
