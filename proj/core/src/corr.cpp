#include "nhent/corr.hpp"

#include "nhent/errors.hpp"
#include "nhent/linalg.hpp"
#include "nhent/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nhent {

std::string to_string(Space s) { return s == Space::position ? "position" : "momentum"; }

Space space_from_string(const std::string& s) {
    if (s == "position") return Space::position;
    if (s == "momentum") return Space::momentum;
    throw ConfigError("unknown partition space '" + s + "'");
}

Partition Partition::range(int begin, int end, Space space) {
    Partition p;
    p.space = space;
    for (int i = begin; i < end; ++i) p.indices.push_back(i);
    return p;
}

Partition Partition::of(std::vector<int> indices, Space space) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return Partition{space, std::move(indices)};
}

void Partition::validate(int n, bool allow_full) const {
    if (indices.empty()) throw PartitionError("partition is empty");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= n)
            throw PartitionError("partition index " + std::to_string(indices[i]) + " outside [0, " +
                                 std::to_string(n) + ")");
        if (i > 0 && indices[i] <= indices[i - 1]) throw PartitionError("partition indices must be sorted and unique");
    }
    if (!allow_full && static_cast<int>(indices.size()) == n)
        throw PartitionError("partition covers the whole system");
}

std::vector<int> Partition::complement(int n) const {
    std::vector<int> out;
    std::size_t j = 0;
    for (int i = 0; i < n; ++i) {
        if (j < indices.size() && indices[j] == i) {
            ++j;
            continue;
        }
        out.push_back(i);
    }
    return out;
}

CMatrix CorrelationMatrix::physical() const {
    if (gauge.size() == 0 || (gauge.array() == 1.0).all()) return entries;
    return gauge.asDiagonal() * entries * gauge.cwiseInverse().asDiagonal();
}

CorrelationMatrix correlation_matrix(const BiorthogonalSystem& sys, const GroundStateSelection& sel,
                                     const Partition& part) {
    if (part.space == Space::momentum && !sys.momentum_basis)
        throw UnsupportedError("momentum partition needs a system diagonalized in the momentum basis");
    part.validate(sys.dim(), true);
    const int na = part.size(), no = static_cast<int>(sel.occupied.size());
    CMatrix r(na, no), l(na, no);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < no; ++b) {
            r(a, b) = sys.right_g(part.indices[a], sel.occupied[b]);
            l(a, b) = sys.left_g(part.indices[a], sel.occupied[b]);
        }
    CorrelationMatrix c;
    c.partition = part;
    c.entries = r * l.adjoint();
    c.gauge.resize(na);
    for (int a = 0; a < na; ++a) c.gauge[a] = sys.gauge[part.indices[a]];
    c.hermitian_source = sys.hermitian;
    return c;
}

CMatrix full_correlation(const BiorthogonalSystem& sys, const GroundStateSelection& sel) {
    return projector_P(sys, sel);
}

CMatrix dft_matrix(int n_cells, int n_sub, Boundary bc) {
    const auto ks = momentum_grid(n_cells, bc);
    const int n = n_cells * n_sub;
    CMatrix f = CMatrix::Zero(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_cells));
    for (int m = 0; m < n_cells; ++m)
        for (int c = 0; c < n_cells; ++c) {
            const cplx ph = std::exp(cplx(0.0, -ks[m] * c)) * norm;
            for (int s = 0; s < n_sub; ++s) f(m * n_sub + s, c * n_sub + s) = ph;
        }
    return f;
}

KernelMatrix momentum_transform(const KernelMatrix& K) {
    if (K.bc == Boundary::open) throw UnsupportedError("momentum_transform requires periodic boundary conditions");
    const int nc = K.cells(), ns = K.sublattices();
    if (nc * ns != K.dim()) throw UnsupportedError("momentum_transform requires a cell-regular kernel");
    // Sites are assumed ordered cell-major, as produced by every chain builder.
    for (int i = 0; i < K.dim(); ++i)
        if (K.labels[i].cell != i / ns || K.labels[i].sub != i % ns)
            throw UnsupportedError("momentum_transform requires cell-major site ordering");
    const CMatrix f = dft_matrix(nc, ns, K.bc);
    KernelMatrix out;
    out.entries = f * K.entries * f.adjoint();
    out.bc = K.bc;
    out.labels = K.labels;
    out.momentum_basis = true;
    return out;
}

CMatrix projector_P(const BiorthogonalSystem& sys, const GroundStateSelection& sel) {
    const int n = sys.dim(), no = static_cast<int>(sel.occupied.size());
    CMatrix r(n, no), l(n, no);
    for (int b = 0; b < no; ++b) {
        r.col(b) = sys.right_g.col(sel.occupied[b]);
        l.col(b) = sys.left_g.col(sel.occupied[b]);
    }
    CMatrix p = r * l.adjoint();
    if (sys.gauged()) p = sys.gauge.asDiagonal() * p * sys.gauge.cwiseInverse().asDiagonal();
    return p;
}

void sort_re_im(std::vector<cplx>& v) {
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

namespace {

double one_way(const std::vector<cplx>& from, const std::vector<cplx>& to) {
    std::vector<bool> used(to.size(), false);
    double worst = 0.0;
    for (const auto& z : from) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = to.size();
        for (std::size_t j = 0; j < to.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(z - to[j]);
            if (d < best) {
                best = d;
                bi = j;
            }
        }
        if (bi == to.size()) return std::numeric_limits<double>::infinity();
        used[bi] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double multiset_mismatch(std::vector<cplx> a, std::vector<cplx> b) {
    sort_re_im(a);
    sort_re_im(b);
    return std::max(one_way(a, b), one_way(b, a));
}

DualityReport check_duality(const BiorthogonalSystem& sys, const GroundStateSelection& sel, const Partition& part,
                            double nonzero_tol) {
    part.validate(sys.dim());
    DualityReport rep;
    rep.real_spectrum_input = sys.eigenvalues.imag().cwiseAbs().maxCoeff() < 1e-9;

    // R P R restricted to A is C_A; P R P is formed on the full space (gauge frame, same spectrum).
    const CorrelationMatrix ca = correlation_matrix(sys, sel, part);
    const CVector e_rpr = linalg::eigvals_general(ca.entries);

    const int n = sys.dim(), no = static_cast<int>(sel.occupied.size());
    CMatrix r(n, no), l(n, no);
    for (int b = 0; b < no; ++b) {
        r.col(b) = sys.right_g.col(sel.occupied[b]);
        l.col(b) = sys.left_g.col(sel.occupied[b]);
    }
    const CMatrix p = r * l.adjoint();
    CMatrix rp = CMatrix::Zero(n, n);
    for (int i : part.indices) rp.row(i) = p.row(i);
    const CVector e_prp = linalg::eigvals_general(p * rp);

    std::vector<cplx> all_rpr(e_rpr.data(), e_rpr.data() + e_rpr.size());
    std::vector<cplx> all_prp(e_prp.data(), e_prp.data() + e_prp.size());
    for (const auto& z : all_rpr)
        if (std::abs(z) > nonzero_tol) rep.spectrum_rpr.push_back(z);
    for (const auto& z : all_prp)
        if (std::abs(z) > nonzero_tol) rep.spectrum_prp.push_back(z);
    sort_re_im(rep.spectrum_rpr);
    sort_re_im(rep.spectrum_prp);
    rep.nonzero_rpr = static_cast<int>(rep.spectrum_rpr.size());
    rep.nonzero_prp = static_cast<int>(rep.spectrum_prp.size());
    // Nontrivial eigenvalues of each product are matched against the full spectrum of the other,
    // so values straddling the cutoff do not register as spurious mismatches.
    sort_re_im(all_rpr);
    sort_re_im(all_prp);
    rep.max_mismatch = std::max(one_way(rep.spectrum_rpr, all_prp), one_way(rep.spectrum_prp, all_rpr));
    return rep;
}

} // namespace nhent
