#pragma once

#include "nhent/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nhent {

struct EigOptions {
    double defect_threshold = 1e12;
    double hermitian_tol = 1e-14;
    bool use_gauge = true;
};

// Right/left eigenvectors are held in a diagonal similarity gauge K_g = D^{-1} K D. The physical
// vectors are |R> = D |R_g>, |L> = D^{-1} |L_g>; products |R><L| transform by the same D.
// For most kernels D is the identity.
struct BiorthogonalSystem {
    CVector eigenvalues;
    CMatrix right_g; // unit-norm columns
    CMatrix left_g;  // <L_a|R_b> = delta_ab
    RVector gauge;   // diagonal of D
    double condition_estimate = 1.0;
    bool hermitian = false;
    bool momentum_basis = false;

    int dim() const { return static_cast<int>(eigenvalues.size()); }
    bool gauged() const;
    // Physical vectors, right columns normalized to unit norm.
    CMatrix right_vectors() const;
    CMatrix left_vectors() const;
};

// Least-squares diagonal gauge making |K_ij| d_j / d_i symmetric on bidirectional bonds.
RVector symmetrizing_gauge(const CMatrix& K);

BiorthogonalSystem biorthogonal_eig(const KernelMatrix& K, const EigOptions& opt = {});
BiorthogonalSystem biorthogonal_eig(const CMatrix& K, const EigOptions& opt = {});

enum class Policy { real_part, imag_part, modulus };
std::string to_string(Policy p);
Policy policy_from_string(const std::string& s);

struct GroundStateSelection {
    std::vector<int> occupied; // sorted ascending
    Policy policy = Policy::real_part;
    Rational filling;
    std::optional<Warning> degeneracy;
};

GroundStateSelection select_occupied(const CVector& eigenvalues, Rational filling, Policy policy = Policy::real_part,
                                     double degeneracy_tol = 1e-12);
GroundStateSelection select_occupied(const BiorthogonalSystem& sys, Rational filling,
                                     Policy policy = Policy::real_part, double degeneracy_tol = 1e-12);

double petermann_factor(const BiorthogonalSystem& sys, int m, int n);
double petermann_factor(const CVector& rm, const CVector& rn);

} // namespace nhent
