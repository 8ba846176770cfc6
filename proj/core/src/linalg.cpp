#include "nhent/linalg.hpp"

#include "nhent/errors.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cmath>
#include <numbers>

namespace nhent::linalg {

namespace {

void check_info(lapack_int info, const char* routine) {
    if (info != 0)
        throw Error(std::string(routine) + " failed, info = " + std::to_string(info));
}

} // namespace

Eig eig_general(const CMatrix& a, bool want_right, bool want_left) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eig out;
    out.values.resize(n);
    if (n == 0) return out;
    CMatrix work = a;
    CMatrix vr(want_right ? n : 1, want_right ? n : 1);
    CMatrix vl(want_left ? n : 1, want_left ? n : 1);
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, want_left ? 'V' : 'N', want_right ? 'V' : 'N', n,
                                    work.data(), n, out.values.data(), vl.data(), want_left ? n : 1,
                                    vr.data(), want_right ? n : 1);
    check_info(info, "zgeev");
    if (want_right) out.right = std::move(vr);
    if (want_left) out.left = std::move(vl);
    return out;
}

CVector eigvals_general(const CMatrix& a) { return eig_general(a, false, false).values; }

HermitianEig eig_hermitian(const CMatrix& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    HermitianEig out;
    out.values.resize(n);
    out.vectors = a;
    if (n == 0) return out;
    lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n, out.values.data());
    check_info(info, "zheevd");
    return out;
}

Inverse invert(const CMatrix& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Inverse out;
    out.inverse = a;
    if (n == 0) {
        out.rcond = 1.0;
        return out;
    }
    const double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
    std::vector<lapack_int> ipiv(n);
    lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, out.inverse.data(), n, ipiv.data());
    if (info > 0) {
        out.rcond = 0.0;
        return out;
    }
    check_info(info, "zgetrf");
    double rcond = 0.0;
    info = LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, out.inverse.data(), n, anorm, &rcond);
    check_info(info, "zgecon");
    out.rcond = rcond;
    info = LAPACKE_zgetri(LAPACK_COL_MAJOR, n, out.inverse.data(), n, ipiv.data());
    check_info(info, "zgetri");
    return out;
}

bool is_hermitian(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool near_branch_cut(cplx z, double cut_angle) {
    if (z.real() >= 0.0 || z == cplx(0.0)) return false;
    return std::numbers::pi - std::abs(std::arg(z)) <= cut_angle;
}

cplx branch_log(cplx z, double cut_angle) {
    if (near_branch_cut(z, cut_angle)) return {std::log(std::abs(z)), 0.0};
    return std::log(z);
}

} // namespace nhent::linalg
