#include "nhent/dynamics.hpp"

#include "nhent/errors.hpp"
#include "nhent/linalg.hpp"
#include "nhent/spectra.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace nhent {

namespace {

CorrelationMatrix restrict_hermitian(const CMatrix& c, const Partition& part) {
    CorrelationMatrix out;
    out.partition = part;
    const int na = part.size();
    out.entries.resize(na, na);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < na; ++b) out.entries(a, b) = c(part.indices[a], part.indices[b]);
    out.gauge = RVector::Ones(na);
    out.hermitian_source = true;
    return out;
}

CMatrix orthonormalize(const CMatrix& m, double collapse_tol, double time) {
    Eigen::HouseholderQR<CMatrix> qr(m);
    const CMatrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    const Eigen::VectorXd d = r.diagonal().cwiseAbs();
    if (d.size() > 0 && !(d.minCoeff() > collapse_tol * d.maxCoeff()))
        throw CollapseError("evolve_no_jump: orbital matrix lost rank at t = " + std::to_string(time), time);
    return qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
}

} // namespace

GaussianState domain_wall_state(int n_sites, int n_particles) {
    if (n_particles < 0 || n_particles > n_sites) throw ConfigError("domain_wall_state: bad particle number");
    GaussianState s;
    s.orbitals = CMatrix::Zero(n_sites, n_particles);
    for (int j = 0; j < n_particles; ++j) s.orbitals(j, j) = 1.0;
    return s;
}

GaussianState product_state(int n_sites, const std::vector<int>& sites) {
    GaussianState s;
    s.orbitals = CMatrix::Zero(n_sites, static_cast<Eigen::Index>(sites.size()));
    for (std::size_t j = 0; j < sites.size(); ++j) {
        if (sites[j] < 0 || sites[j] >= n_sites) throw ConfigError("product_state: site out of range");
        if (s.orbitals.row(sites[j]).cwiseAbs().sum() > 0.0)
            throw ConfigError("product_state: site listed twice");
        s.orbitals(sites[j], static_cast<Eigen::Index>(j)) = 1.0;
    }
    return s;
}

GaussianState hermitian_ground_state(const KernelMatrix& K, Rational filling) {
    const CMatrix h = 0.5 * (K.entries + K.entries.adjoint());
    const auto he = linalg::eig_hermitian(h);
    const auto sel = select_occupied(he.values.cast<cplx>(), filling, Policy::real_part);
    GaussianState s;
    s.orbitals.resize(K.dim(), static_cast<Eigen::Index>(sel.occupied.size()));
    for (std::size_t b = 0; b < sel.occupied.size(); ++b) s.orbitals.col(b) = he.vectors.col(sel.occupied[b]);
    return s;
}

Propagator kernel_exponential(const CMatrix& K, double t, const PropagatorOptions& opt) {
    Propagator p;
    const int n = static_cast<int>(K.rows());
    if (t == 0.0) {
        p.U = CMatrix::Identity(n, n);
        return p;
    }
    if (opt.force != PropagatorPath::pade) {
        try {
            EigOptions eo;
            eo.defect_threshold = opt.eigen_condition_limit;
            const auto sys = biorthogonal_eig(K, eo);
            // The physical-frame eigenvectors carry the gauge range on top of the gauged condition.
            const double cond = sys.condition_estimate *
                                (sys.gauged() ? sys.gauge.maxCoeff() / sys.gauge.minCoeff() : 1.0);
            if (!(cond <= opt.eigen_condition_limit))
                throw DefectiveError("kernel_exponential: physical eigenvectors too ill-conditioned", cond, {});
            CVector phase(n);
            for (int a = 0; a < n; ++a) phase[a] = std::exp(cplx(0.0, -t) * sys.eigenvalues[a]);
            CMatrix u = sys.right_g * phase.asDiagonal() * sys.left_g.adjoint();
            if (sys.gauged()) u = sys.gauge.asDiagonal() * u * sys.gauge.cwiseInverse().asDiagonal();
            p.U = std::move(u);
            p.path = PropagatorPath::eigen;
            p.condition = cond;
            return p;
        } catch (const DefectiveError& e) {
            if (opt.force == PropagatorPath::eigen) throw;
            p.condition = e.condition();
        }
    }
    const CMatrix a = cplx(0.0, -t) * K;
    p.U = a.exp();
    p.path = PropagatorPath::pade;
    return p;
}

Propagator kernel_exponential(const KernelMatrix& K, double t, const PropagatorOptions& opt) {
    return kernel_exponential(K.entries, t, opt);
}

std::vector<DynamicsPoint> evolve_no_jump(const KernelMatrix& K_eff, const GaussianState& psi0,
                                          const std::vector<double>& t_grid, const Partition& part,
                                          const DynamicsOptions& opt) {
    const int n = K_eff.dim();
    if (psi0.orbitals.rows() != n) throw SizeError("evolve_no_jump: orbital rows differ from kernel dimension");
    part.validate(n);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < psi0.time || (i > 0 && t_grid[i] <= t_grid[i - 1]))
            throw ConfigError("evolve_no_jump: time grid must increase from the initial time");
    }
    const CVector ev = linalg::eigvals_general(K_eff.entries);
    const double spread = ev.imag().maxCoeff() - ev.imag().minCoeff();
    const double dt_max = spread > 0 ? std::log(opt.max_growth) / spread : std::numeric_limits<double>::infinity();

    std::map<double, CMatrix> cache;
    auto step_op = [&](double h) -> const CMatrix& {
        auto it = cache.find(h);
        if (it == cache.end()) it = cache.emplace(h, kernel_exponential(K_eff, h, opt.propagator).U).first;
        return it->second;
    };

    const int m = static_cast<int>(psi0.orbitals.cols());
    CMatrix orb = orthonormalize(psi0.orbitals, opt.collapse_tol, psi0.time);
    double now = psi0.time;
    std::vector<DynamicsPoint> out;
    for (double target : t_grid) {
        DynamicsPoint pt;
        const double span = target - now;
        if (span > 0) {
            const int nsub = std::max(1, static_cast<int>(std::ceil(span / dt_max)));
            const double h = span / nsub;
            const CMatrix& u = step_op(h);
            for (int s = 0; s < nsub; ++s) {
                orb = orthonormalize(u * orb, opt.collapse_tol, now + (s + 1) * h);
            }
            pt.substeps = nsub;
        }
        now = target;
        const CMatrix c = orb * orb.adjoint();
        pt.time = target;
        pt.trace_residual = std::abs(c.trace() - cplx(m));
        pt.purity_residual = Eigen::BDCSVD<CMatrix>(c * c - c).singularValues().sum();
        pt.correlation = restrict_hermitian(c, part);
        pt.report = analyze(pt.correlation, opt.ent);
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<EntanglementReport> evolve_unitary_reference(const KernelMatrix& K, const GaussianState& psi0,
                                                         const std::vector<double>& t_grid, const Partition& part,
                                                         const EntOptions& opt) {
    if (!linalg::is_hermitian(K.entries, 1e-12)) throw UnsupportedError("unitary reference needs a Hermitian kernel");
    const auto he = linalg::eig_hermitian(0.5 * (K.entries + K.entries.adjoint()));
    const CMatrix overlap = psi0.orbitals.adjoint() * psi0.orbitals;
    const CMatrix gram_inv = overlap.inverse();
    std::vector<EntanglementReport> out;
    for (double t : t_grid) {
        CVector ph(he.values.size());
        for (int a = 0; a < ph.size(); ++a) ph[a] = std::exp(cplx(0.0, -(t - psi0.time) * he.values[a]));
        const CMatrix m = he.vectors * ph.asDiagonal() * he.vectors.adjoint() * psi0.orbitals;
        const CMatrix c = m * gram_inv * m.adjoint();
        out.push_back(analyze(restrict_hermitian(c, part), opt));
    }
    return out;
}

} // namespace nhent
