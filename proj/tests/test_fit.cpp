#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "libracool/fit.hpp"
#include "libracool/welch.hpp"

using namespace libracool;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("least squares recovers exact model parameters from noise-free data") {
    // y = a exp(-b x) + c
    const double a = 2.5, b = 0.7, c = 0.3;
    std::vector<double> xs, ys;
    for (int i = 0; i < 40; ++i) {
        xs.push_back(0.1 * i);
        ys.push_back(a * std::exp(-b * xs.back()) + c);
    }
    const auto residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            r[i] = p[0] * std::exp(-p[1] * xs[i]) + p[2] - ys[i];
        return r;
    };
    Eigen::VectorXd p0(3);
    p0 << 1.0, 1.0, 0.0;
    const auto res = fit::fit_least_squares(residuals, p0);
    REQUIRE(res.status == fit::FitStatus::converged);
    CHECK_THAT(res.parameters[0], WithinRel(a, 1e-8));
    CHECK_THAT(res.parameters[1], WithinRel(b, 1e-8));
    CHECK_THAT(res.parameters[2], WithinAbs(c, 1e-8));
    CHECK(res.residual_norm < 1e-8);
}

TEST_CASE("reported uncertainties track the known noise level of a linear model") {
    // y = a x + b with sigma = 0.05; analytic covariance is known.
    std::mt19937 rng(7);
    std::normal_distribution<double> noise(0.0, 0.05);
    const int m = 200;
    std::vector<double> xs(m), ys(m);
    double mean_sigma_a = 0.0;
    std::vector<double> a_hat;
    for (int rep = 0; rep < 60; ++rep) {
        for (int i = 0; i < m; ++i) {
            xs[i] = i / double(m);
            ys[i] = 1.8 * xs[i] - 0.4 + noise(rng);
        }
        const auto residuals = [&](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(m);
            for (int i = 0; i < m; ++i) r[i] = p[0] * xs[i] + p[1] - ys[i];
            return r;
        };
        Eigen::VectorXd p0(2);
        p0 << 0.0, 0.0;
        const auto res = fit::fit_least_squares(residuals, p0);
        REQUIRE(res.status == fit::FitStatus::converged);
        a_hat.push_back(res.parameters[0]);
        mean_sigma_a += res.uncertainties[0] / 60.0;
    }
    double spread = 0.0, mean = 0.0;
    for (double v : a_hat) mean += v / a_hat.size();
    for (double v : a_hat) spread += (v - mean) * (v - mean) / (a_hat.size() - 1);
    spread = std::sqrt(spread);
    CHECK(mean_sigma_a / spread > 0.5);
    CHECK(mean_sigma_a / spread < 2.0);
}

TEST_CASE("an unconstrained parameter is reported as degenerate") {
    const auto residuals = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(10);
        for (int i = 0; i < 10; ++i) r[i] = p[0] * i - 1.0; // p[1] never used
        return r;
    };
    Eigen::VectorXd p0(2);
    p0 << 1.0, 1.0;
    const auto res = fit::fit_least_squares(residuals, p0);
    CHECK(res.status == fit::FitStatus::degenerate);
}

TEST_CASE("underdetermined systems are rejected") {
    const auto residuals = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
    Eigen::VectorXd p0(3);
    p0 << 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(fit::fit_least_squares(residuals, p0), std::invalid_argument);
}

TEST_CASE("welch estimator: white noise level and variance normalization") {
    std::mt19937 rng(99);
    const double sigma = 1.7, dt = 1e-3;
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> x(1 << 17);
    for (auto& v : x) v = g(rng);

    const auto psd = welch::estimate(x, dt, 1024);

    // One-sided white level: S = 2 sigma^2 dt.
    const double level = 2.0 * sigma * sigma * dt;
    CHECK_THAT(welch::value_at(psd, 0.25 / dt), WithinRel(level, 0.1));

    // Integral over frequency returns the variance.
    double integral = 0.0;
    for (std::size_t k = 1; k < psd.freq_hz.size(); ++k)
        integral += 0.5 * (psd.psd[k] + psd.psd[k - 1]) * (psd.freq_hz[k] - psd.freq_hz[k - 1]);
    CHECK_THAT(integral, WithinRel(sigma * sigma, 0.05));
}

TEST_CASE("welch estimator: sinusoid power lands in the right bin with area A^2/2") {
    const double dt = 1e-4, A = 0.8, f0 = 1250.0;
    std::vector<double> x(1 << 16);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = A * std::cos(two_pi * f0 * i * dt);
    const auto psd = welch::estimate(x, dt, 4096);

    const auto it = std::max_element(psd.psd.begin(), psd.psd.end());
    const auto kmax = std::distance(psd.psd.begin(), it);
    CHECK_THAT(psd.freq_hz[kmax], WithinAbs(f0, 2.0 / (4096 * dt)));

    double area = 0.0;
    const double df = psd.freq_hz[1] - psd.freq_hz[0];
    for (std::size_t k = 0; k < psd.psd.size(); ++k) {
        if (std::abs(psd.freq_hz[k] - f0) < 20.0 * df) area += psd.psd[k] * df;
    }
    CHECK_THAT(area, WithinRel(A * A / 2.0, 0.02));
}

TEST_CASE("welch averaging across records pools segment counts") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<welch::Psd> parts;
    for (int rec = 0; rec < 4; ++rec) {
        std::vector<double> x(4096);
        for (auto& v : x) v = g(rng);
        parts.push_back(welch::estimate(x, 1e-3, 512));
    }
    const auto avg = welch::average(parts);
    CHECK(avg.segments == 4 * parts.front().segments);
    CHECK(avg.psd.size() == parts.front().psd.size());
}
