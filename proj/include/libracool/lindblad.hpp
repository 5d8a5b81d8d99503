#ifndef LIBRACOOL_LINDBLAD_HPP
#define LIBRACOOL_LINDBLAD_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "libracool/constants.hpp"
#include "libracool/fock.hpp"
#include "libracool/rates.hpp"

// Brute-force master-equation oracle on truncated Fock spaces: the coupled
// libration-cavity equation, the adiabatically reduced libration-only
// equation, steady states, time evolution and emission spectra via the
// quantum regression rule. Every closed-form rate expression in `rates` is
// checked against this module.
//
// The cavity decay enters as kappa D_c, i.e. field amplitude decay kappa/2.
// This is the convention that makes the A± Lorentzians, the classical
// cavity equation of motion and the n_cav expression mutually consistent.
//
// Instances are independent; construction and solves are single-threaded
// per instance but safe to run concurrently on separate instances.

namespace libracool::lindblad {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd>;

struct NonUniqueSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FockSpace {
    int n_lib = 14; // libration levels 0..n_lib-1
    int n_cav = 1;  // cavity levels; 1 means libration only
    int max_dim = 256;

    int dim() const { return n_lib * n_cav; }

    void validate() const {
        if (n_lib < 2) throw std::invalid_argument("fock_space.n_lib: must be >= 2");
        if (n_cav < 1) throw std::invalid_argument("fock_space.n_cav: must be >= 1");
        if (dim() > max_dim)
            throw std::invalid_argument("fock_space: dimension " + std::to_string(dim()) +
                                        " exceeds the configured maximum " +
                                        std::to_string(max_dim));
    }
};

struct DensityMatrix {
    Eigen::MatrixXcd rho;

    int dim() const { return static_cast<int>(rho.rows()); }

    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10,
                  double eig_floor = -1e-8) const {
        if (rho.rows() != rho.cols() || rho.rows() < 1)
            throw std::invalid_argument("density matrix must be square");
        const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
            throw std::invalid_argument("density matrix is not Hermitian");
        if (std::abs(rho.trace() - cd(1.0, 0.0)) > trace_tol)
            throw std::invalid_argument("density matrix trace differs from 1");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                           Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < eig_floor)
            throw std::invalid_argument("density matrix has a significantly negative eigenvalue");
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                           Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    double expectation(const SpMat& op) const {
        return (op * rho).eval().trace().real();
    }

    static DensityMatrix vacuum(int n) {
        DensityMatrix d;
        d.rho = Eigen::MatrixXcd::Zero(n, n);
        d.rho(0, 0) = 1.0;
        return d;
    }

    static DensityMatrix fock_state(int n, int level) {
        if (level < 0 || level >= n) throw std::invalid_argument("fock level out of range");
        DensityMatrix d;
        d.rho = Eigen::MatrixXcd::Zero(n, n);
        d.rho(level, level) = 1.0;
        return d;
    }
};

struct LiouvillianTerms {
    bool hamiltonian = false;
    bool cavity_decay = false;
    bool recoil_dephasing = false;
    bool thermal_up = false;
    bool thermal_down = false;
};

struct Liouvillian {
    FockSpace space;
    SpMat mat; // dim^2 x dim^2, rad/s
    LiouvillianTerms terms;

    int dim() const { return space.dim(); }

    // Largest absolute row sum; a Gershgorin bound on the spectral radius.
    double scale() const {
        Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(mat.rows());
        for (int k = 0; k < mat.outerSize(); ++k)
            for (SpMat::InnerIterator it(mat, k); it; ++it)
                rowsum[it.row()] += std::abs(it.value());
        return rowsum.size() ? rowsum.maxCoeff() : 0.0;
    }

    // Trace preservation: vec(I)^H L must vanish.
    double trace_defect() const {
        const Eigen::VectorXcd t = fock::identity_vec(dim());
        const Eigen::VectorXcd row = mat.adjoint() * t;
        return row.cwiseAbs().maxCoeff();
    }

    // Libration ladder operator embedded in the full space.
    SpMat lib_destroy() const {
        return fock::kron(fock::destroy(space.n_lib), fock::identity_op(space.n_cav));
    }
    SpMat lib_number() const {
        return fock::kron(fock::number_op(space.n_lib), fock::identity_op(space.n_cav));
    }
    SpMat cav_number() const {
        return fock::kron(fock::identity_op(space.n_lib), fock::number_op(space.n_cav));
    }
};

namespace detail {
inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": must be finite");
}
} // namespace detail

// Coupled libration-cavity generator in the displaced frame:
//   H/hbar = Omega b'b + xi x + Delta c'c + G x (c + c'),   x = b + b'
//   L = -i[H,.] + kappa D_c - (Gamma_BA/2) [x,[x,.]]
// xi is the static residual of the stochastic drive, normally 0; the noise
// average of the drive enters the reduced equation through Gamma_phi instead.
inline Liouvillian build_two_mode(const rates::OperatingPoint& op, FockSpace space,
                                  double xi_drive = 0.0) {
    op.validate();
    space.validate();
    if (space.n_cav < 2)
        throw std::invalid_argument("build_two_mode: needs n_cav >= 2 cavity levels");
    detail::require_finite(xi_drive, "xi_drive");

    const SpMat b = fock::kron(fock::destroy(space.n_lib), fock::identity_op(space.n_cav));
    const SpMat c = fock::kron(fock::identity_op(space.n_lib), fock::destroy(space.n_cav));
    const SpMat x = SpMat(b + SpMat(b.adjoint()));
    const SpMat xc = SpMat(c + SpMat(c.adjoint()));

    SpMat H = SpMat(op.omega_alpha * SpMat(SpMat(b.adjoint()) * b)) +
              SpMat(xi_drive * x) +
              SpMat(op.detuning * SpMat(SpMat(c.adjoint()) * c)) +
              SpMat(op.coupling_G * SpMat(x * xc));

    Liouvillian L;
    L.space = space;
    L.mat = fock::commutator_superop(H);
    L.mat = SpMat(L.mat + SpMat(op.kappa * fock::dissipator(c)));
    L.mat = SpMat(L.mat - SpMat(0.5 * op.recoil_Gamma_BA * fock::double_commutator(x)));
    L.terms.hamiltonian = true;
    L.terms.cavity_decay = true;
    L.terms.recoil_dephasing = op.recoil_Gamma_BA > 0.0;
    return L;
}

// Reduced libration-only generator:
//   L = -i[Omega b'b, .] - (Gamma/2)[x,[x,.]] + A+ D_{b'} + A- D_b
inline Liouvillian build_reduced(double A_plus, double A_minus, double Gamma_dephase,
                                 double omega_alpha, FockSpace space) {
    space.validate();
    if (space.n_cav != 1)
        throw std::invalid_argument("build_reduced: the reduced equation has no cavity mode "
                                    "(n_cav must be 1)");
    if (!(A_plus >= 0.0) || !(A_minus >= 0.0) || !(Gamma_dephase >= 0.0))
        throw std::invalid_argument("build_reduced: rates must be >= 0");
    detail::require_finite(omega_alpha, "omega_alpha");

    const SpMat b = fock::destroy(space.n_lib);
    const SpMat bd = fock::create(space.n_lib);
    const SpMat x = SpMat(b + bd);

    Liouvillian L;
    L.space = space;
    L.mat = fock::commutator_superop(SpMat(omega_alpha * fock::number_op(space.n_lib)));
    L.mat = SpMat(L.mat - SpMat(0.5 * Gamma_dephase * fock::double_commutator(x)));
    L.mat = SpMat(L.mat + SpMat(A_plus * fock::dissipator(bd)));
    L.mat = SpMat(L.mat + SpMat(A_minus * fock::dissipator(b)));
    L.terms.hamiltonian = true;
    L.terms.recoil_dephasing = Gamma_dephase > 0.0;
    L.terms.thermal_up = A_plus > 0.0;
    L.terms.thermal_down = A_minus > 0.0;
    return L;
}

inline Liouvillian build_reduced(const rates::RateSet& rs, double omega_alpha, FockSpace space) {
    return build_reduced(rs.A_plus, rs.A_minus, rs.Gamma_BA + rs.Gamma_phi, omega_alpha, space);
}

// --- steady state ---------------------------------------------------------

namespace detail {

struct NullSolve {
    Eigen::VectorXcd v;
    bool ok = false;
    bool singular = false; // null space dimension > 1
    double residual = 0.0; // ||L v||_inf / (scale * ||v||_inf)
};

// Solve L x = 0 with one row of the (prescaled) generator replaced by the
// linear constraint <c, x> = 1. For a one-dimensional null space this
// recovers the null vector exactly; the residual is evaluated against the
// full, unmodified generator.
inline NullSolve row_replaced_solve(const SpMat& Ls, int which_row,
                                    const Eigen::VectorXcd& constraint) {
    NullSolve out;
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(Ls.nonZeros() + constraint.size());
    for (int k = 0; k < Ls.outerSize(); ++k)
        for (SpMat::InnerIterator it(Ls, k); it; ++it)
            if (it.row() != which_row) trip.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < constraint.size(); ++i)
        if (constraint[i] != cd(0.0, 0.0))
            trip.emplace_back(which_row, i, std::conj(constraint[i]));
    SpMat A(Ls.rows(), Ls.cols());
    A.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseLU<SpMat> lu(A);
    if (lu.info() != Eigen::Success) return out;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(Ls.rows());
    rhs[which_row] = 1.0;
    out.v = lu.solve(rhs);
    if (!out.v.allFinite()) return out;
    const double vmax = out.v.cwiseAbs().maxCoeff();
    out.residual = (Ls * out.v).cwiseAbs().maxCoeff() / std::max(vmax, 1e-300);
    out.ok = true;
    return out;
}

// Least-squares solve of [L; t^H] x = [0; 1] through the normal equations
// (L^H L + t t^H) x = t, prescaled so the Cholesky pivots are O(1).
inline NullSolve nullspace_solve(const SpMat& mat, double scale, int n) {
    NullSolve out;
    const double s = scale > 0.0 ? scale : 1.0;
    const SpMat Ls = SpMat(mat / s);

    SpMat M = SpMat(SpMat(Ls.adjoint()) * Ls);
    // add t t^H, t = vec(I)
    {
        std::vector<Eigen::Triplet<cd>> trip;
        trip.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                trip.emplace_back(i * (n + 1), j * (n + 1), cd(1.0, 0.0));
        SpMat T(M.rows(), M.cols());
        T.setFromTriplets(trip.begin(), trip.end());
        M = SpMat(M + T);
    }

    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt(M);
    if (ldlt.info() != Eigen::Success) return out;

    const Eigen::VectorXd d = ldlt.vectorD().real();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (d.cwiseAbs().minCoeff() <= 1e-13 * dmax) {
        out.singular = true;
        return out;
    }

    out.v = ldlt.solve(fock::identity_vec(n));
    const double vmax = out.v.cwiseAbs().maxCoeff();
    out.residual = (Ls * out.v).cwiseAbs().maxCoeff() / std::max(vmax, 1e-300);
    out.ok = out.v.allFinite();
    return out;
}

} // namespace detail

inline std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0,
                                         const std::vector<double>& t_grid);

// Null-space solve with the trace condition appended as an extra row.
// A null space of dimension > 1 is reported, never guessed at. When the
// factorization is inconclusive the generator is relaxed from two different
// initial states: matching limits give the steady state, distinct limits
// prove the null space is degenerate.
inline DensityMatrix steady_state(const Liouvillian& L) {
    const int n = L.dim();
    const double scale = L.scale();
    if (scale == 0.0) throw NonUniqueSteadyState("zero generator: every state is steady");

    const SpMat Ls = SpMat(L.mat / scale);
    auto normalize = [n](const Eigen::VectorXcd& v) {
        Eigen::MatrixXcd m = fock::unvec(v, n);
        m = 0.5 * (m + m.adjoint()).eval();
        const double tr = m.trace().real();
        if (!(std::abs(tr) > 1e-300))
            throw std::runtime_error("steady state has zero trace");
        m /= tr;
        return m;
    };

    // Fast path: two row-replaced LU solves with different constraints.
    // Matching states confirm a one-dimensional null space.
    const auto s1 = detail::row_replaced_solve(Ls, 0, fock::identity_vec(n));
    if (s1.ok && s1.residual <= 1e-10) {
        Eigen::VectorXcd c2 = Eigen::VectorXcd::Zero(n * n);
        for (int i = 0; i < n; ++i) c2[i * (n + 1)] = cd(1.0 + i, 0.0);
        const auto s2 = detail::row_replaced_solve(Ls, int(Ls.rows()) - 1, c2);
        if (s2.ok && s2.residual <= 1e-10) {
            const Eigen::MatrixXcd r1 = normalize(s1.v);
            const Eigen::MatrixXcd r2 = normalize(s2.v);
            if ((r1 - r2).cwiseAbs().maxCoeff() > 1e-8)
                throw NonUniqueSteadyState("steady-state null space has dimension > 1");
            DensityMatrix rho;
            rho.rho = r1;
            return rho;
        }
    }

    auto sol = detail::nullspace_solve(L.mat, scale, n);
    if (sol.singular)
        throw NonUniqueSteadyState("steady-state null space has dimension > 1");

    if (!sol.ok || sol.residual > 1e-10) {
        auto relax = [&](DensityMatrix rho) -> DensityMatrix {
            double horizon = 10.0 * n / scale;
            for (int round = 0; round < 16; ++round) {
                rho = evolve(L, rho, {horizon}).back();
                const double defect =
                    (L.mat * fock::vec(rho.rho)).cwiseAbs().maxCoeff() / scale;
                if (defect < 1e-10) return rho;
                horizon *= 2.0;
            }
            throw std::runtime_error(
                "steady-state solve did not reach the requested residual");
        };
        DensityMatrix mixed;
        mixed.rho = Eigen::MatrixXcd::Identity(n, n) / double(n);
        const DensityMatrix a = relax(DensityMatrix::vacuum(n));
        const DensityMatrix b = relax(mixed);
        if ((a.rho - b.rho).cwiseAbs().maxCoeff() > 1e-6)
            throw NonUniqueSteadyState("steady-state null space has dimension > 1");
        return a;
    }

    DensityMatrix rho;
    rho.rho = fock::unvec(sol.v, n);
    rho.rho = 0.5 * (rho.rho + rho.rho.adjoint()).eval();
    const double tr = rho.rho.trace().real();
    if (!(std::abs(tr) > 1e-300)) throw std::runtime_error("steady state has zero trace");
    rho.rho /= tr;
    return rho;
}

// Fourth-order fixed-step propagation to each grid time. The step obeys
// dt <= (20 * scale)^-1 with scale the Gershgorin bound of L; the trace is
// monitored and must stay within 1e-8 of unity across the grid.
inline std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0,
                                         const std::vector<double>& t_grid) {
    if (t_grid.empty()) return {};
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("evolve: t_grid must be increasing");
    if (t_grid.front() < 0.0) throw std::invalid_argument("evolve: times must be >= 0");

    const double scale = L.scale();
    const double dt_max = scale > 0.0 ? 1.0 / (20.0 * scale) : t_grid.back();
    if (dt_max < 1e-18 * std::max(t_grid.back(), 1.0))
        throw std::runtime_error("evolve: step size underflow");

    Eigen::VectorXcd v = fock::vec(rho0.rho);
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());

    double t = 0.0;
    for (double target : t_grid) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / dt_max));
            const double dt = span / static_cast<double>(steps);
            for (long k = 0; k < steps; ++k) {
                const Eigen::VectorXcd k1 = L.mat * v;
                const Eigen::VectorXcd k2 = L.mat * (v + 0.5 * dt * k1).eval();
                const Eigen::VectorXcd k3 = L.mat * (v + 0.5 * dt * k2).eval();
                const Eigen::VectorXcd k4 = L.mat * (v + dt * k3).eval();
                v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t = target;
        }
        DensityMatrix d;
        d.rho = fock::unvec(v, L.dim());
        const double drift = std::abs(d.rho.trace() - cd(1.0, 0.0));
        if (drift > 1e-8)
            throw std::runtime_error("evolve: trace drift " + std::to_string(drift) +
                                     " exceeds 1e-8");
        out.push_back(std::move(d));
    }
    return out;
}

// --- emission spectra ------------------------------------------------------

enum class Sideband { stokes, antistokes };

struct SpectrumResult {
    std::vector<double> omega; // rad/s
    std::vector<double> value; // normalized so full-line areas give n, n+1
};

// Quantum regression rule:
//   S_aS(w) = (1/pi) Re Int_0^inf <b'(t) b(0)> e^{iwt} dt
//   S_S(w)  = (1/pi) Re Int_0^inf <b(t) b'(0)> e^{iwt} dt
// evaluated by resolvent solves (L + iw)^-1 per grid point.
inline SpectrumResult emission_spectrum(const Liouvillian& L, Sideband which,
                                        const std::vector<double>& omega_grid) {
    const DensityMatrix rho = steady_state(L);
    const int n = L.dim();
    const SpMat b = L.lib_destroy();
    const SpMat bd = SpMat(b.adjoint());

    const Eigen::MatrixXcd seed =
        which == Sideband::antistokes ? (Eigen::MatrixXcd)(b * rho.rho) : (Eigen::MatrixXcd)(bd * rho.rho);
    const Eigen::VectorXcd v0 = fock::vec(seed);
    const SpMat& obs = which == Sideband::antistokes ? bd : b;

    SpectrumResult out;
    out.omega = omega_grid;
    out.value.resize(omega_grid.size());

    SpMat ident(L.mat.rows(), L.mat.cols());
    ident.setIdentity();

    // The resolvent pattern is the same for every omega: analyze once,
    // refactorize per grid point.
    Eigen::SparseLU<SpMat> lu;
    bool analyzed = false;
    for (std::size_t k = 0; k < omega_grid.size(); ++k) {
        const SpMat A = SpMat(L.mat + SpMat(cd(0.0, omega_grid[k]) * ident));
        if (!analyzed) {
            lu.analyzePattern(A);
            analyzed = true;
        }
        lu.factorize(A);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("emission_spectrum: resolvent factorization failed");
        const Eigen::VectorXcd x = lu.solve(-v0);
        const Eigen::MatrixXcd X = fock::unvec(x, n);
        out.value[k] = (obs * X).eval().trace().real() / pi;
    }
    return out;
}

// --- cutoff escalation ------------------------------------------------------

struct SteadySolve {
    DensityMatrix rho;
    double n_lib = 0.0;
    double n_cav = 0.0;
    bool converged = false;
    FockSpace space;
};

// Escalate the libration cutoff in steps of 4 until growing it changes
// <b'b> by less than `rel_tol`; results are flagged unconverged when the
// dimension cap is reached first (as happens for any heating-dominated
// generator with no normalizable steady state).
template <typename BuildFn>
inline SteadySolve solve_steady_escalating(BuildFn&& build, FockSpace start,
                                           double rel_tol = 1e-4) {
    SteadySolve out;
    double prev = -1.0;
    FockSpace space = start;
    while (space.dim() <= space.max_dim) {
        const Liouvillian L = build(space);
        out.rho = steady_state(L);
        out.n_lib = out.rho.expectation(L.lib_number());
        out.n_cav = space.n_cav > 1 ? out.rho.expectation(L.cav_number()) : 0.0;
        out.space = space;
        if (prev >= 0.0 && std::abs(out.n_lib - prev) <= rel_tol * std::max(prev, 1e-12)) {
            out.converged = true;
            return out;
        }
        prev = out.n_lib;
        space.n_lib += 4;
    }
    out.converged = false;
    return out;
}

inline SteadySolve solve_reduced_steady(double A_plus, double A_minus, double Gamma_dephase,
                                        double omega_alpha, FockSpace start = {},
                                        double rel_tol = 1e-4) {
    return solve_steady_escalating(
        [&](FockSpace s) {
            return build_reduced(A_plus, A_minus, Gamma_dephase, omega_alpha, s);
        },
        start, rel_tol);
}

inline SteadySolve solve_two_mode_steady(const rates::OperatingPoint& op,
                                         FockSpace start = {14, 4},
                                         double rel_tol = 1e-4) {
    return solve_steady_escalating(
        [&](FockSpace s) { return build_two_mode(op, s); }, start, rel_tol);
}

} // namespace libracool::lindblad

#endif
