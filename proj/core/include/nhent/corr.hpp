#pragma once

#include "nhent/spectra.hpp"
#include "nhent/types.hpp"

#include <string>
#include <vector>

namespace nhent {

enum class Space { position, momentum };
std::string to_string(Space s);
Space space_from_string(const std::string& s);

struct Partition {
    Space space = Space::position;
    std::vector<int> indices; // sorted, unique

    static Partition range(int begin, int end, Space space = Space::position);
    static Partition of(std::vector<int> indices, Space space = Space::position);
    // Throws PartitionError unless indices are nonempty, in [0, n), and not the whole system.
    void validate(int n, bool allow_full = false) const;
    std::vector<int> complement(int n) const;
    int size() const { return static_cast<int>(indices.size()); }
};

// Entries are in the gauge frame of the source system; physical() = D_A C D_A^{-1}.
struct CorrelationMatrix {
    Partition partition;
    CMatrix entries;
    RVector gauge;
    bool hermitian_source = false;

    CMatrix physical() const;
};

CorrelationMatrix correlation_matrix(const BiorthogonalSystem& sys, const GroundStateSelection& sel,
                                     const Partition& part);
// Full-system C (physical frame).
CMatrix full_correlation(const BiorthogonalSystem& sys, const GroundStateSelection& sel);

// Conjugation by the unitary DFT over cells (sublattice index kept). Labels become (m, s).
KernelMatrix momentum_transform(const KernelMatrix& K);
CMatrix dft_matrix(int n_cells, int n_sub, Boundary bc);

CMatrix projector_P(const BiorthogonalSystem& sys, const GroundStateSelection& sel);

struct DualityReport {
    std::vector<cplx> spectrum_rpr;
    std::vector<cplx> spectrum_prp;
    int nonzero_rpr = 0;
    int nonzero_prp = 0;
    double max_mismatch = 0.0;
    bool real_spectrum_input = false;
};

DualityReport check_duality(const BiorthogonalSystem& sys, const GroundStateSelection& sel, const Partition& part,
                            double nonzero_tol = 1e-6);

// Multiset distance after sorting by (Re, Im) and greedy nearest pairing, in both directions.
double multiset_mismatch(std::vector<cplx> a, std::vector<cplx> b);
void sort_re_im(std::vector<cplx>& v);

} // namespace nhent
