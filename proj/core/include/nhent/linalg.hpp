#pragma once

#include "nhent/types.hpp"

namespace nhent::linalg {

struct Eig {
    CVector values;
    CMatrix right; // columns; empty when not requested
    CMatrix left;  // columns u with u^dag A = lambda u^dag; empty when not requested
};

// zgeev. Vectors are returned with LAPACK's normalization (unit 2-norm, largest component real).
Eig eig_general(const CMatrix& a, bool want_right = true, bool want_left = false);
CVector eigvals_general(const CMatrix& a);

struct HermitianEig {
    RVector values; // ascending
    CMatrix vectors;
};
HermitianEig eig_hermitian(const CMatrix& a);

struct Inverse {
    CMatrix inverse;
    double rcond = 0.0; // reciprocal 1-norm condition estimate from zgecon
};
// LU inverse; rcond = 0 signals an exactly singular pivot.
Inverse invert(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double tol);

// Principal-branch log, except within `cut_angle` radians of the negative real axis where
// the mean of the two branch limits (ln|z|) is returned.
cplx branch_log(cplx z, double cut_angle);
bool near_branch_cut(cplx z, double cut_angle);

} // namespace nhent::linalg
