#include "nhent/spectra.hpp"

#include "nhent/errors.hpp"
#include "nhent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

namespace nhent {

namespace {

// Gauge is skipped unless it spreads site weights by more than a decade.
constexpr double kGaugeMinRange = 2.302585092994046;

std::vector<cplx> defect_cluster(const CVector& ev) {
    const int n = static_cast<int>(ev.size());
    int bi = 0, bj = n > 1 ? 1 : 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(ev[i] - ev[j]);
            if (d < best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    std::vector<cplx> out;
    if (n == 0) return out;
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    const double radius = std::max(2.0 * best, 1e-8 * scale);
    for (int i = 0; i < n; ++i)
        if (i == bi || i == bj || std::abs(ev[i] - ev[bi]) <= radius) out.push_back(ev[i]);
    return out;
}

} // namespace

bool BiorthogonalSystem::gauged() const {
    return gauge.size() > 0 && (gauge.array() != 1.0).any();
}

CMatrix BiorthogonalSystem::right_vectors() const {
    if (!gauged()) return right_g;
    CMatrix r = gauge.asDiagonal() * right_g;
    for (int a = 0; a < r.cols(); ++a) r.col(a) /= r.col(a).norm();
    return r;
}

CMatrix BiorthogonalSystem::left_vectors() const {
    if (!gauged()) return left_g;
    const CMatrix r = gauge.asDiagonal() * right_g;
    CMatrix l = gauge.cwiseInverse().asDiagonal() * left_g;
    for (int a = 0; a < l.cols(); ++a) l.col(a) *= r.col(a).norm();
    return l;
}

RVector symmetrizing_gauge(const CMatrix& K) {
    const int n = static_cast<int>(K.rows());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    RVector rhs = RVector::Zero(n);
    bool any = false;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double fij = std::abs(K(i, j)), fji = std::abs(K(j, i));
            if (fij <= 0.0 || fji <= 0.0) continue;
            const double r = 0.5 * (std::log(fji) - std::log(fij)); // target x_j - x_i
            lap(i, i) += 1.0;
            lap(j, j) += 1.0;
            lap(i, j) -= 1.0;
            lap(j, i) -= 1.0;
            rhs[j] += r;
            rhs[i] -= r;
            if (r != 0.0) any = true;
        }
    if (!any) return RVector::Ones(n);
    lap.array() += 1.0 / n;
    lap.diagonal().array() += 1e-10;
    RVector x = lap.ldlt().solve(rhs);
    if (x.maxCoeff() - x.minCoeff() < kGaugeMinRange) return RVector::Ones(n);
    x.array() -= x.mean();
    return x.array().exp();
}

BiorthogonalSystem biorthogonal_eig(const KernelMatrix& K, const EigOptions& opt) {
    BiorthogonalSystem sys = biorthogonal_eig(K.entries, opt);
    sys.momentum_basis = K.momentum_basis;
    return sys;
}

BiorthogonalSystem biorthogonal_eig(const CMatrix& K, const EigOptions& opt) {
    if (!K.allFinite()) throw Error("biorthogonal_eig: kernel has non-finite entries");
    const int n = static_cast<int>(K.rows());
    BiorthogonalSystem sys;
    sys.gauge = RVector::Ones(n);

    if (linalg::is_hermitian(K, opt.hermitian_tol)) {
        const CMatrix sym = 0.5 * (K + K.adjoint());
        auto he = linalg::eig_hermitian(sym);
        sys.eigenvalues = he.values.cast<cplx>();
        sys.right_g = he.vectors;
        sys.left_g = he.vectors;
        sys.hermitian = true;
        sys.condition_estimate = 1.0;
        return sys;
    }

    CMatrix work = K;
    if (opt.use_gauge) {
        sys.gauge = symmetrizing_gauge(K);
        if (sys.gauged())
            work = sys.gauge.cwiseInverse().asDiagonal() * K * sys.gauge.asDiagonal();
    }
    auto eg = linalg::eig_general(work, true, false);
    for (int a = 0; a < n; ++a) eg.right.col(a) /= eg.right.col(a).norm();
    auto inv = linalg::invert(eg.right);
    const double cond = inv.rcond > 0 ? 1.0 / inv.rcond : std::numeric_limits<double>::infinity();
    if (!(cond <= opt.defect_threshold)) {
        auto cluster = defect_cluster(eg.values);
        std::ostringstream msg;
        msg << "biorthogonal_eig: eigenvector condition " << cond << " exceeds " << opt.defect_threshold
            << " (clustered eigenvalues:";
        for (const auto& z : cluster) msg << ' ' << z;
        msg << ')';
        throw DefectiveError(msg.str(), cond, cluster);
    }
    sys.eigenvalues = eg.values;
    sys.right_g = std::move(eg.right);
    sys.left_g = inv.inverse.adjoint();
    sys.condition_estimate = std::max(1.0, cond);
    return sys;
}

std::string to_string(Policy p) {
    switch (p) {
    case Policy::real_part: return "real_part";
    case Policy::imag_part: return "imag_part";
    case Policy::modulus: return "modulus";
    }
    return "?";
}

Policy policy_from_string(const std::string& s) {
    if (s == "real_part") return Policy::real_part;
    if (s == "imag_part") return Policy::imag_part;
    if (s == "modulus") return Policy::modulus;
    throw ConfigError("unknown occupation policy '" + s + "'");
}

GroundStateSelection select_occupied(const CVector& ev, Rational filling, Policy policy, double degeneracy_tol) {
    if (filling.num <= 0 || filling.num > filling.den)
        throw ConfigError("filling must satisfy 0 < filling <= 1");
    const long n = static_cast<long>(ev.size());
    const long n_occ = (2 * filling.num * n + filling.den) / (2 * filling.den);

    auto key = [&](int i) {
        const cplx z = ev[i];
        switch (policy) {
        case Policy::real_part: return std::make_tuple(z.real(), z.imag(), 0.0);
        case Policy::imag_part: return std::make_tuple(z.imag(), z.real(), 0.0);
        case Policy::modulus: return std::make_tuple(std::abs(z), z.real(), z.imag());
        }
        return std::make_tuple(0.0, 0.0, 0.0);
    };
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto ka = key(a), kb = key(b);
        if (ka != kb) return ka < kb;
        return a < b;
    });
    // Primary keys equal up to rounding form one cluster, ordered by the remaining keys.
    for (long lo = 0; lo < n;) {
        long hi = lo + 1;
        while (hi < n && std::get<0>(key(order[hi])) - std::get<0>(key(order[hi - 1])) <=
                             degeneracy_tol * std::max(1.0, std::abs(std::get<0>(key(order[hi])))))
            ++hi;
        std::stable_sort(order.begin() + lo, order.begin() + hi, [&](int a, int b) {
            const auto ka = key(a), kb = key(b);
            if (std::get<1>(ka) != std::get<1>(kb)) return std::get<1>(ka) < std::get<1>(kb);
            if (std::get<2>(ka) != std::get<2>(kb)) return std::get<2>(ka) < std::get<2>(kb);
            return a < b;
        });
        lo = hi;
    }

    GroundStateSelection sel;
    sel.policy = policy;
    sel.filling = filling;
    sel.occupied.assign(order.begin(), order.begin() + n_occ);
    std::sort(sel.occupied.begin(), sel.occupied.end());
    if (n_occ > 0 && n_occ < n) {
        const double last = std::get<0>(key(order[n_occ - 1]));
        const double next = std::get<0>(key(order[n_occ]));
        if (std::abs(next - last) <= degeneracy_tol * std::max(1.0, std::abs(last))) {
            std::ostringstream msg;
            msg << "occupation key tie at the Fermi boundary under " << to_string(policy) << ": "
                << ev[order[n_occ - 1]] << " vs " << ev[order[n_occ]];
            sel.degeneracy = Warning{"DegeneracyWarning", msg.str()};
        }
    }
    return sel;
}

GroundStateSelection select_occupied(const BiorthogonalSystem& sys, Rational filling, Policy policy,
                                     double degeneracy_tol) {
    return select_occupied(sys.eigenvalues, filling, policy, degeneracy_tol);
}

double petermann_factor(const CVector& rm, const CVector& rn) {
    const double num = std::norm(rm.dot(rn));
    return num / (rm.squaredNorm() * rn.squaredNorm());
}

double petermann_factor(const BiorthogonalSystem& sys, int m, int n) {
    if (m == n) throw ConfigError("petermann_factor requires m != n");
    const CMatrix r = sys.right_vectors();
    return petermann_factor(r.col(m), r.col(n));
}

} // namespace nhent
