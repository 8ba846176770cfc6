#pragma once

#include "nhent/corr.hpp"
#include "nhent/types.hpp"

#include <map>
#include <vector>

namespace nhent {

struct EntOptions {
    double clamp_tol = 1e-12;  // eps this close to 0 or 1 contributes exactly 0
    double midgap_tol = 0.05;  // |Re eps - 1/2| below this marks a mid-gap mode
    double cut_angle = 1e-5;   // see linalg::branch_log
    std::vector<int> renyi_orders{2};
};

struct EntanglementSpectrum {
    std::vector<cplx> eps;
    std::vector<cplx> xi;        // one per unflagged eps, same order
    std::vector<int> xi_source;  // eps index of each xi
    std::vector<int> flagged;    // eps indices clamped to 0 or 1
};

EntanglementSpectrum entanglement_spectrum(const CorrelationMatrix& C, const EntOptions& opt = {});
EntanglementSpectrum entanglement_spectrum(const CMatrix& C, bool hermitian, const EntOptions& opt = {});

cplx vn_entropy(const std::vector<cplx>& eps, const EntOptions& opt = {});
cplx renyi_entropy(const std::vector<cplx>& eps, int n, const EntOptions& opt = {});
// Complex sum before the realness check; modified_entropy throws ConsistencyError when |Im| > 1e-6.
cplx modified_entropy_raw(const std::vector<cplx>& eps, const EntOptions& opt = {});
double modified_entropy(const std::vector<cplx>& eps, const EntOptions& opt = {});

// h^E from the eigendecomposition of C, in the same frame as C.entries.
CMatrix entanglement_hamiltonian(const CorrelationMatrix& C, const EntOptions& opt = {});
CMatrix entanglement_hamiltonian(const CMatrix& C, const EntOptions& opt = {});

struct EntanglementReport {
    Partition partition;
    std::vector<cplx> correlation_eigenvalues;
    std::vector<cplx> single_particle_spectrum;
    cplx entropy_vn;
    std::map<int, cplx> entropy_renyi;
    double entropy_modified = 0.0;
    double modified_residual = 0.0;
    std::vector<int> midgap_modes;
    double realness_residual = 0.0;
    int branch_cut_modes = 0;
    std::vector<Warning> warnings;
};

EntanglementReport analyze(const CorrelationMatrix& C, const EntOptions& opt = {});

cplx mutual_information(const EntanglementReport& a, const EntanglementReport& b, const EntanglementReport& ab);

} // namespace nhent
