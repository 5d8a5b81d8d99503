#ifndef LIBRACOOL_FOCK_HPP
#define LIBRACOOL_FOCK_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

// Truncated bosonic ladder operators and the superoperator algebra used to
// assemble Liouvillians. Vectorization is column-major: vec(A X B) =
// (B^T (x) A) vec(X).

namespace libracool::fock {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd>;

inline SpMat identity_op(int n) {
    SpMat m(n, n);
    m.setIdentity();
    return m;
}

inline SpMat destroy(int n) {
    if (n < 1) throw std::invalid_argument("fock: dimension must be >= 1");
    SpMat m(n, n);
    std::vector<Eigen::Triplet<cd>> t;
    t.reserve(n - 1);
    for (int k = 1; k < n; ++k) t.emplace_back(k - 1, k, std::sqrt(double(k)));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

inline SpMat create(int n) { return SpMat(destroy(n).adjoint()); }

inline SpMat number_op(int n) {
    SpMat m(n, n);
    std::vector<Eigen::Triplet<cd>> t;
    t.reserve(n);
    for (int k = 1; k < n; ++k) t.emplace_back(k, k, double(k));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

inline SpMat kron(const SpMat& a, const SpMat& b) {
    SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<cd>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SpMat::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SpMat::InnerIterator ib(b, kb); ib; ++ib) {
                    t.emplace_back(ia.row() * b.rows() + ib.row(),
                                   ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
                }
            }
        }
    }
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

// Left and right multiplication as superoperators.
inline SpMat spre(const SpMat& a) { return kron(identity_op(int(a.rows())), a); }
inline SpMat spost(const SpMat& a) { return kron(SpMat(a.transpose()), identity_op(int(a.rows()))); }

// -i [H, .]
inline SpMat commutator_superop(const SpMat& h) {
    return SpMat(cd(0.0, -1.0) * (spre(h) - spost(h)));
}

// D_a[rho] = a rho a^+ - 1/2 {a^+ a, rho}
inline SpMat dissipator(const SpMat& a) {
    const SpMat ad = SpMat(a.adjoint());
    const SpMat ada = SpMat(ad * a);
    return SpMat(spre(a) * spost(ad) - 0.5 * (spre(ada) + spost(ada)));
}

// [x, [x, rho]] = x^2 rho - 2 x rho x + rho x^2 (x Hermitian)
inline SpMat double_commutator(const SpMat& x) {
    const SpMat x2 = SpMat(x * x);
    return SpMat(spre(x2) + spost(x2) - 2.0 * (spre(x) * spost(x)));
}

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

inline Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int n) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

inline Eigen::VectorXcd identity_vec(int n) {
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    return vec(id);
}

} // namespace libracool::fock

#endif
