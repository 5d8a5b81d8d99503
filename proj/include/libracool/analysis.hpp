#ifndef LIBRACOOL_ANALYSIS_HPP
#define LIBRACOOL_ANALYSIS_HPP

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "libracool/constants.hpp"
#include "libracool/csv.hpp"
#include "libracool/fit.hpp"
#include "libracool/noise_eater.hpp"
#include "libracool/params.hpp"
#include "libracool/rates.hpp"

// Scans over detuning, particle position and cancellation gain, and the
// parameter-extraction fits run against them. Scan points are independent;
// fits are single-threaded per dataset.

namespace libracool::analysis {

// One operating configuration, parametrized by the antinode coupling and
// photon number so that the position dependence G ~ sin(ky),
// ncav ~ sin^2(ky) is built in. The photon number refers to the reference
// detuning; other detunings scale it through the cavity Lorentzian.
struct OperatingModel {
    double omega_alpha = 0.0;             // rad/s
    double kappa = 0.0;                   // rad/s
    double detuning = 0.0;                // rad/s, operating detuning
    double coupling_G0 = 0.0;             // rad/s at the antinode
    double recoil_Gamma_BA = 0.0;         // rad/s
    double ncav0 = 0.0;                   // photons at antinode, reference detuning
    double ncav_reference_detuning = 0.0; // rad/s
    double psd_S_open = 0.0;              // rad^2/s
    double position_ky = pi / 2.0;        // rad, operating position

    void validate() const {
        if (!(omega_alpha > 0.0) || !(kappa > 0.0))
            throw std::invalid_argument("operating model: omega_alpha and kappa must be > 0");
        if (!(coupling_G0 >= 0.0) || !(recoil_Gamma_BA >= 0.0) || !(ncav0 >= 0.0) ||
            !(psd_S_open >= 0.0))
            throw std::invalid_argument("operating model: rates must be >= 0");
        if (!(position_ky >= 0.0 && position_ky <= pi / 2.0))
            throw std::invalid_argument("operating model: ky must lie in [0, pi/2]");
    }

    double lambda0() const {
        const double hk = kappa / 2.0;
        return std::sqrt(ncav0 *
                         (ncav_reference_detuning * ncav_reference_detuning + hk * hk));
    }

    rates::OperatingPoint at(double ky, double delta, double s_eff) const {
        rates::OperatingPoint op;
        op.omega_alpha = omega_alpha;
        op.kappa = kappa;
        op.detuning = delta;
        op.coupling_G = coupling_G0 * std::sin(ky);
        op.recoil_Gamma_BA = recoil_Gamma_BA;
        op.psd_S = s_eff;
        op.drive_Lambda = lambda0() * std::sin(ky);
        return op;
    }

    noise_eater::FeedbackParams feedback(double gain) const {
        return noise_eater::calibrated_feedback(omega_alpha, gain);
    }

    double effective_psd(double gain) const {
        if (gain == 0.0) return psd_S_open;
        return noise_eater::effective_psd_at_libration(feedback(gain), psd_S_open,
                                                       omega_alpha);
    }
};

// Theory route: every model parameter from the experiment parameters alone.
inline OperatingModel model_from_experiment(const params::ExperimentParams& p) {
    auto antinode = p;
    antinode.cavity.phase_phi = pi / 2.0;
    const auto d = params::derive(antinode);
    OperatingModel m;
    m.omega_alpha = d.omega_alpha;
    m.kappa = p.cavity.linewidth_kappa;
    m.detuning = p.cavity.detuning_delta;
    m.coupling_G0 = d.coupling_G;
    m.recoil_Gamma_BA = d.recoil_Gamma_BA;
    m.ncav0 = d.ncav_ss;
    m.ncav_reference_detuning = p.cavity.detuning_delta;
    m.psd_S_open = p.phase_noise.psd_S;
    m.position_ky = p.cavity.phase_phi;
    return m;
}

struct ScanResult {
    std::string variable_name; // unit-tagged column name of the scan variable
    std::vector<double> values;
    std::vector<rates::RateSet> rate_sets;
    std::vector<double> psd_S_eff; // rad^2/s actually applied per point
    OperatingModel model;          // snapshot
};

// Occupation against cavity detuning at the model's operating position.
inline ScanResult detuning_scan(const OperatingModel& model,
                                const std::vector<double>& delta_grid) {
    model.validate();
    if (delta_grid.empty()) throw std::invalid_argument("detuning_scan: empty grid");
    for (double d : delta_grid)
        if (!(d > 0.0) || d > 3.0 * model.omega_alpha)
            throw std::invalid_argument("detuning_scan: grid must lie in (0, 3 omega_alpha]");

    ScanResult out;
    out.variable_name = "detuning_over_2pi_Hz";
    out.model = model;
    const double s_eff = model.psd_S_open;
    for (double d : delta_grid) {
        out.values.push_back(hz_from_rad_per_s(d));
        out.rate_sets.push_back(
            rates::steady_state_occupation(model.at(model.position_ky, d, s_eff)));
        out.psd_S_eff.push_back(s_eff);
    }
    return out;
}

// Occupation against particle position at fixed detuning, with the phase
// noise suppressed by the cancellation loop at the given gain. Rows at the
// node come out with zero-coupling status and stay in the table.
inline ScanResult position_scan(const OperatingModel& model, const std::vector<double>& ky_grid,
                                double gain_g) {
    model.validate();
    if (ky_grid.empty()) throw std::invalid_argument("position_scan: empty grid");
    for (double ky : ky_grid)
        if (!(ky >= 0.0) || ky > pi / 2.0)
            throw std::invalid_argument("position_scan: ky must lie in [0, pi/2]");

    const double s_eff = model.effective_psd(gain_g);
    ScanResult out;
    out.variable_name = "position_ky_rad";
    out.model = model;
    for (double ky : ky_grid) {
        out.values.push_back(ky);
        out.rate_sets.push_back(
            rates::steady_state_occupation(model.at(ky, model.detuning, s_eff)));
        out.psd_S_eff.push_back(s_eff);
    }
    return out;
}

// Occupation against cancellation gain at the model's position and detuning.
inline ScanResult gain_scan(const OperatingModel& model, const std::vector<double>& g_grid) {
    model.validate();
    if (g_grid.empty()) throw std::invalid_argument("gain_scan: empty grid");
    ScanResult out;
    out.variable_name = "gain_g_dimensionless";
    out.model = model;
    for (double g : g_grid) {
        if (!(g >= 0.0)) throw std::invalid_argument("gain_scan: gain must be >= 0");
        const double s_eff = model.effective_psd(g);
        out.values.push_back(g);
        out.rate_sets.push_back(rates::steady_state_occupation(
            model.at(model.position_ky, model.detuning, s_eff)));
        out.psd_S_eff.push_back(s_eff);
    }
    return out;
}

inline const char* status_name(rates::OccupationStatus s) {
    switch (s) {
        case rates::OccupationStatus::ok: return "ok";
        case rates::OccupationStatus::divergent: return "divergent";
        default: return "zero_coupling";
    }
}

inline void scan_to_csv(std::ostream& os, const ScanResult& scan) {
    os << scan.variable_name
       << ",A_plus_over_2pi_Hz,A_minus_over_2pi_Hz,gamma_cool_over_2pi_Hz,"
          "Gamma_phi_over_2pi_Hz,ncav_dimensionless,n0_dimensionless,"
          "n_phi_dimensionless,n_ss_dimensionless,n_exact_dimensionless,"
          "psd_S_eff_rad2_per_s,status_enum\n";
    for (std::size_t i = 0; i < scan.values.size(); ++i) {
        const auto& r = scan.rate_sets[i];
        os << csv::format_number(scan.values[i]) << ','
           << csv::format_number(hz_from_rad_per_s(r.A_plus)) << ','
           << csv::format_number(hz_from_rad_per_s(r.A_minus)) << ','
           << csv::format_number(hz_from_rad_per_s(r.gamma_cool)) << ','
           << csv::format_number(hz_from_rad_per_s(r.Gamma_phi)) << ','
           << csv::format_number(r.ncav) << ',' << csv::format_number(r.n0) << ','
           << csv::format_number(r.n_phi) << ',' << csv::format_number(r.n_ss) << ','
           << csv::format_number(r.n_exact) << ','
           << csv::format_number(scan.psd_S_eff[i]) << ',' << status_name(r.status)
           << '\n';
    }
}

// --- parameter extraction ---------------------------------------------------

struct FitReport {
    std::string model_name;
    std::vector<std::string> parameter_names;
    std::vector<double> parameters;
    std::vector<double> uncertainties; // 1 sigma
    double residual_norm = 0.0;
    fit::FitStatus status = fit::FitStatus::max_iter;
};

inline nlohmann::json fit_report_to_json(const FitReport& r) {
    nlohmann::json j;
    j["model"] = r.model_name;
    j["status"] = r.status == fit::FitStatus::converged ? "converged"
                  : r.status == fit::FitStatus::degenerate ? "degenerate"
                                                           : "max-iter";
    j["residual_norm"] = r.residual_norm;
    for (std::size_t i = 0; i < r.parameters.size(); ++i) {
        j["parameters"][r.parameter_names[i]] = {{"value", r.parameters[i]},
                                                 {"sigma", r.uncertainties[i]}};
    }
    return j;
}

struct CouplingFitConditions {
    double kappa = 0.0;       // rad/s
    double detuning = 0.0;    // rad/s
    double omega_alpha = 0.0; // rad/s
};

namespace detail {
inline std::vector<double> fit_weights(std::size_t m, const std::vector<double>& sigma,
                                       const char* who) {
    if (sigma.empty()) return std::vector<double>(m, 1.0);
    if (sigma.size() != m)
        throw std::invalid_argument(std::string(who) + ": sigma length does not match data");
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(sigma[i] > 0.0))
            throw std::invalid_argument(std::string(who) + ": sigmas must be > 0");
        w[i] = 1.0 / sigma[i];
    }
    return w;
}
} // namespace detail

// One-parameter fit of the optical linewidth against position,
// gamma_opt(ky) = G0^2 sin^2(ky) kappa / ((omega - delta)^2 + (kappa/2)^2).
// Per-point sigmas, when supplied, weight the fit and its covariance.
inline FitReport extract_coupling(const std::vector<std::pair<double, double>>& ky_gamma,
                                  const CouplingFitConditions& fixed,
                                  const std::vector<double>& sigma = {}) {
    if (ky_gamma.size() < 4)
        throw std::invalid_argument("extract_coupling: need at least 4 points");
    const auto w = detail::fit_weights(ky_gamma.size(), sigma, "extract_coupling");
    const double hk = fixed.kappa / 2.0;
    const double dif = fixed.omega_alpha - fixed.detuning;
    const double denom = dif * dif + hk * hk;

    const auto residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(ky_gamma.size());
        for (std::size_t i = 0; i < ky_gamma.size(); ++i) {
            const double s = std::sin(ky_gamma[i].first);
            r[i] = (p[0] * p[0] * s * s * fixed.kappa / denom - ky_gamma[i].second) * w[i];
        }
        return r;
    };

    double g0 = 0.0;
    for (const auto& [ky, gam] : ky_gamma) {
        const double s = std::sin(ky);
        if (s > 0.2 && gam > 0.0)
            g0 = std::max(g0, std::sqrt(gam * denom / (fixed.kappa * s * s)));
    }
    Eigen::VectorXd p0(1);
    p0 << (g0 > 0.0 ? g0 : 1.0);
    fit::FitOptions opt;
    opt.scale_covariance = sigma.empty();
    const auto res = fit::fit_least_squares(residuals, p0, opt);

    FitReport out;
    out.model_name = "coupling_from_cooling_rate";
    out.parameter_names = {"coupling_G0_rad_per_s"};
    out.parameters = {std::abs(res.parameters[0])};
    out.uncertainties = {res.uncertainties[0]};
    out.residual_norm = res.residual_norm;
    out.status = res.status;
    return out;
}

struct HeatingFitConditions {
    double coupling_G0 = 0.0; // rad/s at the antinode
    double kappa = 0.0;       // rad/s
    double detuning = 0.0;    // rad/s
    double omega_alpha = 0.0; // rad/s
    double psd_S = 0.0;       // rad^2/s
};

// Two-parameter fit of the occupation against position with
// Gamma_BA and the antinode photon number free. With S = 0 the photon
// number drops out of the model and the fit reports itself degenerate.
// Per-point sigmas, when supplied, weight the fit and its covariance.
inline FitReport extract_heating(const std::vector<std::pair<double, double>>& ky_n,
                                 const HeatingFitConditions& fixed,
                                 const std::vector<double>& sigma = {}) {
    if (ky_n.size() < 5) throw std::invalid_argument("extract_heating: need at least 5 points");
    const auto w = detail::fit_weights(ky_n.size(), sigma, "extract_heating");
    double ky_min = pi, ky_max = 0.0;
    for (const auto& [ky, n] : ky_n) {
        ky_min = std::min(ky_min, ky);
        ky_max = std::max(ky_max, ky);
    }
    if (ky_max - ky_min < pi / 4.0)
        throw std::invalid_argument("extract_heating: points must span node to antinode");

    const double hk2 = (fixed.kappa / 2.0) * (fixed.kappa / 2.0);
    const double dif = fixed.detuning - fixed.omega_alpha;
    const double sum = fixed.detuning + fixed.omega_alpha;
    const double a_shape = (dif * dif + hk2) / (fixed.coupling_G0 * fixed.coupling_G0 *
                                                fixed.kappa); // n0 = Gamma_BA a / sin^2
    const double b_num = (hk2 - fixed.detuning * fixed.detuning) *
                             (hk2 - fixed.detuning * fixed.detuning) +
                         fixed.omega_alpha * fixed.omega_alpha * hk2;
    const double b_shape = 4.0 * fixed.psd_S * b_num /
                           ((fixed.detuning * fixed.detuning + hk2) * (sum * sum + hk2) *
                            fixed.kappa); // n_phi = N0 b sin^2

    const auto residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(ky_n.size());
        for (std::size_t i = 0; i < ky_n.size(); ++i) {
            const double s2 = std::sin(ky_n[i].first) * std::sin(ky_n[i].first);
            r[i] = (p[0] * a_shape / s2 + p[1] * b_shape * s2 - ky_n[i].second) * w[i];
        }
        return r;
    };

    Eigen::VectorXd p0(2);
    p0 << ky_n.front().second / (a_shape / std::pow(std::sin(ky_min), 2)), 1e6;
    fit::FitOptions opt;
    opt.scale_covariance = sigma.empty();
    const auto res = fit::fit_least_squares(residuals, p0, opt);

    FitReport out;
    out.model_name = "heating_from_position_scan";
    out.parameter_names = {"recoil_Gamma_BA_rad_per_s", "ncav0_dimensionless"};
    out.parameters = {res.parameters[0], res.parameters[1]};
    out.uncertainties = {res.uncertainties[0], res.uncertainties[1]};
    out.residual_norm = res.residual_norm;
    out.status = res.status;
    return out;
}

struct GasDampingFit {
    double slope = 0.0;       // rad/s per mbar
    double slope_sigma = 0.0; // rad/s per mbar
    double residual_norm = 0.0;
    fit::FitStatus status = fit::FitStatus::converged;

    double gamma_at(double pressure_mbar) const { return slope * pressure_mbar; }
};

// Zero-intercept linear regression of damping rate against pressure.
inline GasDampingFit gas_damping_fit(const std::vector<double>& pressure_mbar,
                                     const std::vector<double>& gamma) {
    if (pressure_mbar.size() != gamma.size() || pressure_mbar.size() < 3)
        throw std::invalid_argument("gas_damping_fit: need >= 3 aligned points");
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        sxx += pressure_mbar[i] * pressure_mbar[i];
        sxy += pressure_mbar[i] * gamma[i];
    }
    GasDampingFit out;
    if (sxx <= 0.0) {
        out.status = fit::FitStatus::degenerate;
        return out;
    }
    out.slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        const double r = gamma[i] - out.slope * pressure_mbar[i];
        ssr += r * r;
    }
    out.residual_norm = std::sqrt(ssr);
    out.slope_sigma = std::sqrt(ssr / (double(gamma.size()) - 1.0) / sxx);
    return out;
}

// --- user data tables --------------------------------------------------------
//
// Fit inputs can come from CSV files with these columns (header required):
//   cooling-rate data: position_ky_rad,gamma_opt_over_2pi_Hz
//   occupation data:   position_ky_rad,n_ss_dimensionless[,sigma_dimensionless]

struct OccupationTable {
    std::vector<std::pair<double, double>> points;
    std::vector<double> sigma; // empty when the file has two columns
};

namespace detail {
inline std::vector<std::vector<double>> read_numeric_csv(std::istream& is,
                                                         const std::string& header_expect,
                                                         std::size_t min_cols,
                                                         std::size_t max_cols) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("csv: empty stream");
    if (line.rfind(header_expect, 0) != 0)
        throw std::invalid_argument("csv: expected header starting with \"" + header_expect +
                                    "\", got \"" + line + "\"");
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < min_cols || row.size() > max_cols)
            throw std::invalid_argument("csv: wrong column count in row \"" + line + "\"");
        rows.push_back(std::move(row));
    }
    return rows;
}
} // namespace detail

inline std::vector<std::pair<double, double>> read_cooling_rate_csv(std::istream& is) {
    const auto rows =
        detail::read_numeric_csv(is, "position_ky_rad,gamma_opt_over_2pi_Hz", 2, 2);
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rows) out.emplace_back(r[0], rad_per_s_from_hz(r[1]));
    return out;
}

inline OccupationTable read_occupation_csv(std::istream& is) {
    const auto rows =
        detail::read_numeric_csv(is, "position_ky_rad,n_ss_dimensionless", 2, 3);
    OccupationTable out;
    bool any_sigma = false;
    for (const auto& r : rows) {
        out.points.emplace_back(r[0], r[1]);
        if (r.size() == 3) any_sigma = true;
    }
    if (any_sigma) {
        for (const auto& r : rows) {
            if (r.size() != 3)
                throw std::invalid_argument("csv: sigma column must be present on every row");
            out.sigma.push_back(r[2]);
        }
    }
    return out;
}

// Rate-equation transient, dn/dt = -gamma_opt n + Gamma_total.
inline std::vector<double> transient_occupation(double n0, double gamma_opt,
                                                double Gamma_total,
                                                const std::vector<double>& t_grid) {
    if (!(n0 >= 0.0) || !(gamma_opt >= 0.0) || !(Gamma_total >= 0.0))
        throw std::invalid_argument("transient_occupation: inputs must be >= 0");
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t >= 0.0)) throw std::invalid_argument("transient_occupation: times must be >= 0");
        if (gamma_opt == 0.0) {
            out.push_back(n0 + Gamma_total * t); // pure linear heating
        } else {
            const double e = std::exp(-gamma_opt * t);
            out.push_back(n0 * e + Gamma_total / gamma_opt * (-std::expm1(-gamma_opt * t)));
        }
    }
    return out;
}

inline double transient_initial_slope(double n0, double gamma_opt, double Gamma_total) {
    return Gamma_total - gamma_opt * n0;
}

} // namespace libracool::analysis

#endif
