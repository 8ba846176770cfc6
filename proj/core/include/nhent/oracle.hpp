#pragma once

#include "nhent/ent.hpp"
#include "nhent/spectra.hpp"
#include "nhent/types.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace nhent::oracle {

constexpr int kMaxModes = 14;

// Bit q of a basis index is the occupation of Fock mode q; Jordan-Wigner strings run over modes < q.
struct FockOperator {
    int n_modes = 0;
    Eigen::SparseMatrix<cplx> matrix;
    std::vector<int> mode_order; // mode_order[q] = kernel site placed at Fock mode q

    long dim() const { return 1L << n_modes; }
};

// mode_order defaults to the identity. Use a_first_order to put a partition's sites first.
FockOperator fock_hamiltonian(const KernelMatrix& K, std::vector<int> mode_order = {});
std::vector<int> a_first_order(int n_sites, const std::vector<int>& a_sites);

struct ManybodyGround {
    CVector right; // length 2^N
    CVector left;  // <G_L|G_R> = 1 and ||G_L|| = ||G_R||
    cplx energy;
    int n_modes = 0;
};

ManybodyGround manybody_biortho_ground(const FockOperator& H, int n_particles, Policy policy = Policy::real_part,
                                       double degeneracy_tol = 1e-9);

CMatrix density_matrix(const ManybodyGround& g);
// keep must be {0, ..., N_A - 1} in Fock mode order; anything else raises OrderingError.
CMatrix partial_trace(const CMatrix& rho, int n_modes, const std::vector<int>& keep);
CMatrix partial_trace_pure(const ManybodyGround& g, int n_keep);
// C_ij = <G_L| c_j^dag c_i |G_R> in Fock mode order.
CMatrix fock_correlation(const ManybodyGround& g);

struct OracleReport {
    std::vector<cplx> spectrum;
    cplx entropy_vn;
    cplx entropy_modified; // -sum lambda ln|lambda|; imaginary part is the realness residual
    double condition = 1.0;
};

// Residuals between the correlation-matrix pipeline and the many-body oracle for one kernel and partition.
struct CrossCheck {
    double entropy = 0.0;     // |S_corr - S_vn|
    double modified = 0.0;    // |S_mod,corr - S_mod,oracle|
    double spectrum = 0.0;    // rho_A eigenvalues vs products of (eps, 1 - eps)
    double correlation = 0.0; // Fock-space <c^dag_j c_i> vs corr module, physical frame
    double purity = 0.0;      // max |rho^2 - rho|
};

CrossCheck cross_check(const KernelMatrix& K, const std::vector<int>& a_sites, Rational filling = {1, 2},
                       Policy policy = Policy::real_part, const EntOptions& opt = {});

OracleReport oracle_report(const CMatrix& rho_a, double cut_angle = 1e-5, double defect_threshold = 1e12);

} // namespace nhent::oracle
