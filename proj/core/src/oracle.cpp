#include "nhent/oracle.hpp"

#include "nhent/corr.hpp"
#include "nhent/errors.hpp"
#include "nhent/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <limits>
#include <tuple>

namespace nhent::oracle {

namespace {

int parity_below(unsigned long s, int q) { return std::popcount(s & ((1UL << q) - 1UL)) & 1; }

} // namespace

std::vector<int> a_first_order(int n_sites, const std::vector<int>& a_sites) {
    std::vector<int> order(a_sites.begin(), a_sites.end());
    std::vector<char> in_a(n_sites, 0);
    for (int s : a_sites) {
        if (s < 0 || s >= n_sites) throw PartitionError("a_first_order: site out of range");
        in_a[s] = 1;
    }
    for (int s = 0; s < n_sites; ++s)
        if (!in_a[s]) order.push_back(s);
    return order;
}

FockOperator fock_hamiltonian(const KernelMatrix& K, std::vector<int> mode_order) {
    const int n = K.dim();
    if (n > kMaxModes) throw SizeError("fock_hamiltonian: N = " + std::to_string(n) + " exceeds " +
                                       std::to_string(kMaxModes));
    if (mode_order.empty()) {
        mode_order.resize(n);
        std::iota(mode_order.begin(), mode_order.end(), 0);
    }
    std::vector<int> check = mode_order;
    std::sort(check.begin(), check.end());
    for (int i = 0; i < n; ++i)
        if (static_cast<int>(check.size()) != n || check[i] != i)
            throw OrderingError("fock_hamiltonian: mode_order is not a permutation");

    FockOperator op;
    op.n_modes = n;
    op.mode_order = mode_order;
    const unsigned long dim = 1UL << n;
    std::vector<Eigen::Triplet<cplx>> trip;
    for (unsigned long s = 0; s < dim; ++s) {
        for (int q = 0; q < n; ++q) {
            if (!(s >> q & 1UL)) continue;
            const unsigned long s1 = s ^ (1UL << q);
            const int sign_q = parity_below(s, q);
            for (int p = 0; p < n; ++p) {
                const cplx h = K.entries(mode_order[p], mode_order[q]);
                if (h == cplx(0.0)) continue;
                if (s1 >> p & 1UL) continue;
                const unsigned long s2 = s1 | (1UL << p);
                const int sign = sign_q ^ parity_below(s1, p);
                trip.emplace_back(static_cast<int>(s2), static_cast<int>(s), sign ? -h : h);
            }
        }
    }
    op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    return op;
}

ManybodyGround manybody_biortho_ground(const FockOperator& H, int n_particles, Policy policy, double degeneracy_tol) {
    const int n = H.n_modes;
    if (n_particles < 0 || n_particles > n) throw ConfigError("manybody_biortho_ground: bad particle number");
    std::vector<int> basis;
    for (unsigned long s = 0; s < (1UL << n); ++s)
        if (std::popcount(s) == n_particles) basis.push_back(static_cast<int>(s));
    const int m = static_cast<int>(basis.size());
    std::vector<int> pos(1UL << n, -1);
    for (int i = 0; i < m; ++i) pos[basis[i]] = i;
    CMatrix block = CMatrix::Zero(m, m);
    for (int k = 0; k < H.matrix.outerSize(); ++k)
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(H.matrix, k); it; ++it) {
            const int r = pos[it.row()], c = pos[it.col()];
            if (r < 0 && c < 0) continue;
            if (r < 0 || c < 0) {
                if (it.value() != cplx(0.0))
                    throw ConfigError("manybody_biortho_ground: operator does not conserve particle number");
                continue;
            }
            block(r, c) += it.value();
        }

    const auto eg = linalg::eig_general(block, true, true);
    auto key = [&](int i) {
        const cplx z = eg.values[i];
        switch (policy) {
        case Policy::real_part: return std::make_tuple(z.real(), z.imag());
        case Policy::imag_part: return std::make_tuple(z.imag(), z.real());
        case Policy::modulus: return std::make_tuple(std::abs(z), z.real());
        }
        return std::make_tuple(0.0, 0.0);
    };
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
    for (int lo = 0; lo < m;) {
        int hi = lo + 1;
        while (hi < m && std::get<0>(key(order[hi])) - std::get<0>(key(order[hi - 1])) <=
                             1e-12 * std::max(1.0, std::abs(std::get<0>(key(order[hi])))))
            ++hi;
        std::stable_sort(order.begin() + lo, order.begin() + hi,
                         [&](int a, int b) { return std::get<1>(key(a)) < std::get<1>(key(b)); });
        lo = hi;
    }
    const int g = order[0];
    // Same (primary, secondary) tie-break as select_occupied; decline only when the full keys coincide.
    if (m > 1) {
        const auto k0 = key(order[0]), k1 = key(order[1]);
        const double scale = std::max(1.0, std::abs(eg.values[g]));
        if (std::abs(std::get<0>(k1) - std::get<0>(k0)) <= degeneracy_tol * scale &&
            std::abs(std::get<1>(k1) - std::get<1>(k0)) <= degeneracy_tol * scale)
            throw DegeneracyError("manybody_biortho_ground: many-body ground state is degenerate under " +
                                  to_string(policy));
    }
    CVector r = eg.right.col(g);
    CVector l = eg.left.col(g);
    const cplx ov = l.dot(r); // l^dag r
    if (std::abs(ov) < 1e-14) throw DefectiveError("manybody_biortho_ground: left/right overlap vanishes", 0.0, {});
    l /= std::conj(ov);
    // Balance so that ||G_L|| = ||G_R|| with <G_L|G_R> = 1 preserved.
    const double scale = std::sqrt(l.norm() / r.norm());
    r *= scale;
    l /= scale;

    ManybodyGround out;
    out.n_modes = n;
    out.energy = eg.values[g];
    out.right = CVector::Zero(1L << n);
    out.left = CVector::Zero(1L << n);
    for (int i = 0; i < m; ++i) {
        out.right[basis[i]] = r[i];
        out.left[basis[i]] = l[i];
    }
    return out;
}

CMatrix density_matrix(const ManybodyGround& g) { return g.right * g.left.adjoint(); }

CMatrix partial_trace(const CMatrix& rho, int n_modes, const std::vector<int>& keep) {
    const int na = static_cast<int>(keep.size());
    for (int i = 0; i < na; ++i)
        if (keep[i] != i) throw OrderingError("partial_trace: kept modes must be the leading block 0..N_A-1");
    if (rho.rows() != (1L << n_modes)) throw SizeError("partial_trace: rho dimension differs from 2^N");
    const long da = 1L << na, db = 1L << (n_modes - na);
    CMatrix out = CMatrix::Zero(da, da);
    for (long b = 0; b < db; ++b) out += rho.block(b * da, b * da, da, da);
    return out;
}

CMatrix partial_trace_pure(const ManybodyGround& g, int n_keep) {
    const long da = 1L << n_keep, db = 1L << (g.n_modes - n_keep);
    const Eigen::Map<const CMatrix> psi_r(g.right.data(), da, db);
    const Eigen::Map<const CMatrix> psi_l(g.left.data(), da, db);
    return psi_r * psi_l.adjoint();
}

CMatrix fock_correlation(const ManybodyGround& g) {
    const int n = g.n_modes;
    CMatrix c = CMatrix::Zero(n, n);
    const unsigned long dim = 1UL << n;
    for (unsigned long s = 0; s < dim; ++s) {
        const cplx amp = g.right[static_cast<long>(s)];
        if (amp == cplx(0.0)) continue;
        for (int i = 0; i < n; ++i) {
            if (!(s >> i & 1UL)) continue;
            const unsigned long s1 = s ^ (1UL << i);
            const int si = parity_below(s, i);
            for (int j = 0; j < n; ++j) {
                if (s1 >> j & 1UL) continue;
                const unsigned long s2 = s1 | (1UL << j);
                const int sign = si ^ parity_below(s1, j);
                const cplx v = std::conj(g.left[static_cast<long>(s2)]) * amp;
                c(i, j) += sign ? -v : v;
            }
        }
    }
    return c;
}

OracleReport oracle_report(const CMatrix& rho_a, double cut_angle, double defect_threshold) {
    OracleReport rep;
    const auto eg = linalg::eig_general(rho_a, true, false);
    CMatrix r = eg.right;
    for (int a = 0; a < r.cols(); ++a) r.col(a) /= r.col(a).norm();
    const auto inv = linalg::invert(r);
    rep.condition = inv.rcond > 0 ? 1.0 / inv.rcond : std::numeric_limits<double>::infinity();
    if (!(rep.condition <= defect_threshold))
        throw DefectiveError("oracle_report: rho_A is defective", rep.condition, {});
    rep.spectrum.assign(eg.values.data(), eg.values.data() + eg.values.size());
    rep.entropy_vn = 0.0;
    rep.entropy_modified = 0.0;
    for (const auto& lam : rep.spectrum) {
        if (std::abs(lam) == 0.0) continue;
        rep.entropy_vn -= lam * linalg::branch_log(lam, cut_angle);
        rep.entropy_modified -= lam * std::log(std::abs(lam));
    }
    return rep;
}

CrossCheck cross_check(const KernelMatrix& K, const std::vector<int>& a_sites, Rational filling, Policy policy,
                       const EntOptions& opt) {
    const int n = K.dim();
    const int na = static_cast<int>(a_sites.size());
    const auto order = a_first_order(n, a_sites);
    const auto sys = biorthogonal_eig(K);
    const auto sel = select_occupied(sys, filling, policy);
    const auto spec = entanglement_spectrum(correlation_matrix(sys, sel, Partition::of(a_sites)), opt);

    const auto g = manybody_biortho_ground(fock_hamiltonian(K, order), static_cast<int>(sel.occupied.size()), policy);
    const CMatrix rho = density_matrix(g);
    const auto rep = oracle_report(partial_trace_pure(g, na), opt.cut_angle);

    std::vector<cplx> products{1.0};
    for (const auto& e : spec.eps) {
        std::vector<cplx> next;
        next.reserve(2 * products.size());
        for (const auto& p : products) {
            next.push_back(p * e);
            next.push_back(p * (1.0 - e));
        }
        products = std::move(next);
    }

    const CMatrix cf = fock_correlation(g);
    const CMatrix cp = correlation_matrix(sys, sel, Partition::range(0, n)).physical();
    double corr = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) corr = std::max(corr, std::abs(cf(p, q) - cp(order[p], order[q])));

    CrossCheck out;
    out.entropy = std::abs(vn_entropy(spec.eps, opt) - rep.entropy_vn);
    out.modified = std::abs(modified_entropy_raw(spec.eps, opt) - rep.entropy_modified);
    out.spectrum = multiset_mismatch(products, rep.spectrum);
    out.correlation = corr;
    out.purity = (rho * rho - rho).cwiseAbs().maxCoeff();
    return out;
}

} // namespace nhent::oracle
