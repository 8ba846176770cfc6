#include "nhent/ent.hpp"

#include "nhent/errors.hpp"
#include "nhent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nhent {

namespace {

bool clamped(cplx e, double tol) { return std::abs(e) < tol || std::abs(1.0 - e) < tol; }

cplx xlogx(cplx x, double cut) { return x * linalg::branch_log(x, cut); }

} // namespace

EntanglementSpectrum entanglement_spectrum(const CMatrix& C, bool hermitian, const EntOptions& opt) {
    EntanglementSpectrum out;
    if (hermitian && linalg::is_hermitian(C, 1e-12)) {
        const auto he = linalg::eig_hermitian(0.5 * (C + C.adjoint()));
        for (int i = 0; i < he.values.size(); ++i) out.eps.emplace_back(he.values[i], 0.0);
    } else {
        const CVector ev = linalg::eigvals_general(C);
        out.eps.assign(ev.data(), ev.data() + ev.size());
        sort_re_im(out.eps);
    }
    for (int i = 0; i < static_cast<int>(out.eps.size()); ++i) {
        const cplx e = out.eps[i];
        if (clamped(e, opt.clamp_tol)) {
            out.flagged.push_back(i);
            continue;
        }
        out.xi.push_back(std::log(1.0 / e - 1.0));
        out.xi_source.push_back(i);
    }
    return out;
}

EntanglementSpectrum entanglement_spectrum(const CorrelationMatrix& C, const EntOptions& opt) {
    return entanglement_spectrum(C.entries, C.hermitian_source, opt);
}

cplx vn_entropy(const std::vector<cplx>& eps, const EntOptions& opt) {
    cplx s = 0.0;
    for (const auto& e : eps) {
        if (clamped(e, opt.clamp_tol)) continue;
        s -= xlogx(e, opt.cut_angle) + xlogx(1.0 - e, opt.cut_angle);
    }
    return s;
}

cplx renyi_entropy(const std::vector<cplx>& eps, int n, const EntOptions& opt) {
    if (n < 2) throw ConfigError("renyi_entropy: order must be >= 2");
    cplx s = 0.0;
    for (const auto& e : eps) {
        if (clamped(e, opt.clamp_tol)) continue;
        const cplx f = std::pow(e, n) + std::pow(1.0 - e, n);
        if (std::abs(f) < 1e-14) {
            std::ostringstream msg;
            msg << "renyi_entropy: eps^n + (1-eps)^n vanishes for eps = " << e;
            throw BranchError(msg.str());
        }
        s += linalg::branch_log(f, opt.cut_angle);
    }
    return s / (1.0 - n);
}

cplx modified_entropy_raw(const std::vector<cplx>& eps, const EntOptions& opt) {
    cplx s = 0.0;
    for (const auto& e : eps) {
        if (clamped(e, opt.clamp_tol)) continue;
        s -= e * std::log(std::abs(e)) + (1.0 - e) * std::log(std::abs(1.0 - e));
    }
    return s;
}

double modified_entropy(const std::vector<cplx>& eps, const EntOptions& opt) {
    const cplx s = modified_entropy_raw(eps, opt);
    if (std::abs(s.imag()) > 1e-6) {
        std::ostringstream msg;
        msg << "modified_entropy: imaginary residual " << s.imag() << " (spectrum not conjugate-closed)";
        throw ConsistencyError(msg.str());
    }
    return s.real();
}

CMatrix entanglement_hamiltonian(const CMatrix& C, const EntOptions& opt) {
    const int n = static_cast<int>(C.rows());
    const auto eg = linalg::eig_general(C, true, false);
    std::vector<int> excluded;
    for (int i = 0; i < n; ++i)
        if (clamped(eg.values[i], opt.clamp_tol)) excluded.push_back(i);
    if (!excluded.empty())
        throw PartialSpectrumError("entanglement_hamiltonian: " + std::to_string(excluded.size()) +
                                       " eigenvalues clamped to 0 or 1",
                                   excluded);
    const auto inv = linalg::invert(eg.right);
    if (inv.rcond < 1e-14) throw DefectiveError("entanglement_hamiltonian: C is not diagonalizable", 1.0 / inv.rcond, {});
    CVector xi(n);
    for (int i = 0; i < n; ++i) xi[i] = std::log(1.0 / eg.values[i] - 1.0);
    return eg.right * xi.asDiagonal() * inv.inverse;
}

CMatrix entanglement_hamiltonian(const CorrelationMatrix& C, const EntOptions& opt) {
    return entanglement_hamiltonian(C.entries, opt);
}

EntanglementReport analyze(const CorrelationMatrix& C, const EntOptions& opt) {
    EntanglementReport r;
    r.partition = C.partition;
    auto spec = entanglement_spectrum(C, opt);
    r.correlation_eigenvalues = spec.eps;
    r.single_particle_spectrum = spec.xi;
    r.entropy_vn = vn_entropy(spec.eps, opt);
    r.realness_residual = std::abs(r.entropy_vn.imag());
    for (int n : opt.renyi_orders) {
        try {
            r.entropy_renyi[n] = renyi_entropy(spec.eps, n, opt);
        } catch (const BranchError& e) {
            r.entropy_renyi[n] = cplx(std::nan(""), std::nan(""));
            r.warnings.push_back({"BranchError", e.what()});
        }
    }
    const cplx sm = modified_entropy_raw(spec.eps, opt);
    r.entropy_modified = sm.real();
    r.modified_residual = std::abs(sm.imag());
    if (r.modified_residual > 1e-6)
        r.warnings.push_back({"ConsistencyError", "modified entropy has imaginary residual " +
                                                      std::to_string(r.modified_residual)});
    for (int i = 0; i < static_cast<int>(spec.eps.size()); ++i) {
        const cplx e = spec.eps[i];
        if (std::abs(e.real() - 0.5) < opt.midgap_tol) r.midgap_modes.push_back(i);
        if (!clamped(e, opt.clamp_tol) &&
            (linalg::near_branch_cut(e, opt.cut_angle) || linalg::near_branch_cut(1.0 - e, opt.cut_angle)))
            ++r.branch_cut_modes;
    }
    return r;
}

cplx mutual_information(const EntanglementReport& a, const EntanglementReport& b, const EntanglementReport& ab) {
    const auto& ia = a.partition.indices;
    const auto& ib = b.partition.indices;
    if (a.partition.space != b.partition.space || a.partition.space != ab.partition.space)
        throw PartitionError("mutual_information: partitions live in different spaces");
    std::vector<int> inter, uni;
    std::set_intersection(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(inter));
    if (!inter.empty()) throw PartitionError("mutual_information: A and B overlap");
    std::set_union(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(uni));
    if (uni != ab.partition.indices) throw PartitionError("mutual_information: AB is not the union of A and B");
    return a.entropy_vn + b.entropy_vn - ab.entropy_vn;
}

} // namespace nhent
