#pragma once

#include "nhent/corr.hpp"
#include "nhent/ent.hpp"
#include "nhent/types.hpp"

#include <optional>
#include <vector>

namespace nhent {

struct GaussianState {
    CMatrix orbitals; // N x M, occupied orbitals as columns
    double time = 0.0;
};

GaussianState domain_wall_state(int n_sites, int n_particles);
// One particle on each listed site.
GaussianState product_state(int n_sites, const std::vector<int>& sites);
// Ground state of the Hermitian part (K + K^dag)/2 at the given filling.
GaussianState hermitian_ground_state(const KernelMatrix& K, Rational filling);

enum class PropagatorPath { eigen, pade };

struct Propagator {
    CMatrix U;
    PropagatorPath path = PropagatorPath::eigen;
    double condition = 1.0;
};

struct PropagatorOptions {
    double eigen_condition_limit = 1e8;
    std::optional<PropagatorPath> force;
};

// exp(-i K t).
Propagator kernel_exponential(const CMatrix& K, double t, const PropagatorOptions& opt = {});
Propagator kernel_exponential(const KernelMatrix& K, double t, const PropagatorOptions& opt = {});

struct DynamicsOptions {
    EntOptions ent;
    PropagatorOptions propagator;
    double max_growth = 1e6; // orbital condition bound between re-orthonormalizations
    double collapse_tol = 1e-13;
};

struct DynamicsPoint {
    double time = 0.0;
    CorrelationMatrix correlation;
    EntanglementReport report;
    double trace_residual = 0.0;  // |Tr C - M|
    double purity_residual = 0.0; // trace norm of C^2 - C
    int substeps = 0;
};

std::vector<DynamicsPoint> evolve_no_jump(const KernelMatrix& K_eff, const GaussianState& psi0,
                                          const std::vector<double>& t_grid, const Partition& part,
                                          const DynamicsOptions& opt = {});

// Exact unitary evolution of a Hermitian kernel without normalization steps (test reference).
std::vector<EntanglementReport> evolve_unitary_reference(const KernelMatrix& K, const GaussianState& psi0,
                                                         const std::vector<double>& t_grid, const Partition& part,
                                                         const EntOptions& opt = {});

} // namespace nhent
