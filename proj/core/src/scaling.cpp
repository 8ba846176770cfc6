#include "nhent/scaling.hpp"

#include "nhent/corr.hpp"
#include "nhent/errors.hpp"
#include "nhent/linalg.hpp"
#include "nhent/model_zoo.hpp"
#include "nhent/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace nhent {

std::string to_string(Geometry g) { return g == Geometry::chord ? "chord" : "open_log"; }

Geometry geometry_from_string(const std::string& s) {
    if (s == "chord") return Geometry::chord;
    if (s == "open_log") return Geometry::open_log;
    throw ConfigError("unknown fit geometry '" + s + "'");
}

void ScalingSeries::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].la < 1) throw ConfigError("series: L_A must be >= 1");
        if (geometry == Geometry::chord && points[i].la >= total_length)
            throw ConfigError("series: L_A must be below the total length");
        if (i > 0 && points[i].la <= points[i - 1].la) throw ConfigError("series: L_A must increase strictly");
    }
}

namespace {

struct Line {
    double slope, intercept, rms;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        a(i, 0) = x[i];
        a(i, 1) = 1.0;
        b[i] = y[i];
    }
    const Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
    const double rms = std::sqrt((a * sol - b).squaredNorm() / n);
    return {sol[0], sol[1], rms};
}

double abscissa(const ScalingSeries& s, int la) {
    if (s.geometry == Geometry::chord) return std::log(std::sin(std::numbers::pi * la / s.total_length));
    return std::log(static_cast<double>(la));
}

// Cost-minimizing assignment of `row` entries to predicted values (exhaustive for few bands).
std::vector<int> match_bands(const std::vector<cplx>& pred, const std::vector<cplx>& row) {
    const int nb = static_cast<int>(row.size());
    std::vector<int> perm(nb);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    if (nb <= 6) {
        double best_cost = std::numeric_limits<double>::infinity();
        do {
            double cost = 0.0;
            for (int b = 0; b < nb; ++b) cost += std::abs(row[perm[b]] - pred[b]);
            if (cost < best_cost) {
                best_cost = cost;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    std::vector<bool> used(nb, false);
    for (int b = 0; b < nb; ++b) {
        int bi = -1;
        for (int j = 0; j < nb; ++j)
            if (!used[j] && (bi < 0 || std::abs(row[j] - pred[b]) < std::abs(row[bi] - pred[b]))) bi = j;
        used[bi] = true;
        best[b] = bi;
    }
    return best;
}

std::vector<cplx> extrapolate(const BandStructure& bs, int m) {
    std::vector<cplx> pred = bs.energies[m];
    if (m >= 1)
        for (std::size_t b = 0; b < pred.size(); ++b) pred[b] = 2.0 * bs.energies[m][b] - bs.energies[m - 1][b];
    return pred;
}

// wrap[b]: band index at the first momentum that continues band b past the last momentum.
std::vector<int> wrap_permutation(const BandStructure& bs) {
    const int nk = static_cast<int>(bs.k.size());
    return match_bands(extrapolate(bs, nk - 1), bs.energies[0]);
}

} // namespace

FitResult fit_central_charge(const ScalingSeries& series, const FitOptions& opt) {
    series.validate();
    int hi = opt.la_max;
    if (hi < 0) hi = series.total_length > 0 ? series.total_length - 4 : std::numeric_limits<int>::max();
    FitResult fr;
    fr.window = {opt.la_min, hi};
    std::vector<double> x, y;
    std::vector<int> used;
    for (const auto& p : series.points) {
        if (p.la < opt.la_min || p.la > hi) continue;
        if (!(std::abs(p.s.imag()) <= opt.imag_tol) || !std::isfinite(p.s.real())) {
            fr.rejected.push_back(p.la);
            continue;
        }
        x.push_back(abscissa(series, p.la));
        y.push_back(p.s.real());
        used.push_back(p.la);
    }
    if (static_cast<int>(x.size()) < opt.min_points)
        throw InsufficientDataError("fit_central_charge: " + std::to_string(x.size()) +
                                    " usable points in window [" + std::to_string(opt.la_min) + ", " +
                                    std::to_string(hi) + "], need " + std::to_string(opt.min_points));
    const Line line = least_squares(x, y);
    fr.c = 3.0 * line.slope;
    fr.intercept = line.intercept;
    fr.rms_residual = line.rms;
    fr.points_used = static_cast<int>(x.size());
    if (static_cast<int>(x.size()) >= opt.min_points + 2) {
        std::vector<double> xs(x.begin() + 1, x.end() - 1), ys(y.begin() + 1, y.end() - 1);
        fr.shrink_delta = std::abs(3.0 * least_squares(xs, ys).slope - fr.c);
        fr.robust = fr.shrink_delta < 0.05;
    }
    return fr;
}

ScalingSeries entropy_series(const BiorthogonalSystem& sys, const GroundStateSelection& sel, int sites_per_cell,
                             int total_cells, const std::vector<int>& la_cells, Geometry geometry,
                             const EntOptions& opt, int workers) {
    ScalingSeries series;
    series.total_length = total_cells;
    series.geometry = geometry;
    series.points.resize(la_cells.size());
    parallel_for(static_cast<int>(la_cells.size()), workers, [&](int i) {
        const int la = la_cells[i];
        const auto c = correlation_matrix(sys, sel, Partition::range(0, la * sites_per_cell));
        const auto spec = entanglement_spectrum(c, opt);
        series.points[i] = {la, vn_entropy(spec.eps, opt)};
    });
    return series;
}

BandStructure band_structure(const KernelMatrix& K) {
    const auto ks = momentum_grid(K.cells(), K.bc);
    BandStructure bs;
    bs.k = ks;
    const int nb = K.sublattices();
    for (std::size_t m = 0; m < ks.size(); ++m) {
        const CVector ev = linalg::eigvals_general(bloch_reduce(K, ks[m]));
        std::vector<cplx> e(ev.data(), ev.data() + ev.size());
        if (m == 0) {
            sort_re_im(e);
            bs.energies.push_back(e);
            continue;
        }
        // Continue each band along its linear extrapolation from the two previous momenta.
        const auto best = match_bands(extrapolate(bs, static_cast<int>(m) - 1), e);
        std::vector<cplx> row(nb);
        for (int b = 0; b < nb; ++b) row[b] = e[best[b]];
        bs.energies.push_back(row);
    }
    return bs;
}

int count_fermi_points(const BandStructure& bands, Rational filling) {
    const int nk = static_cast<int>(bands.k.size());
    if (nk == 0) throw UnsupportedError("count_fermi_points: empty band structure");
    const int nb = static_cast<int>(bands.energies.front().size());
    CVector flat(nk * nb);
    for (int m = 0; m < nk; ++m)
        for (int b = 0; b < nb; ++b) flat[m * nb + b] = bands.energies[m][b];
    const auto sel = select_occupied(flat, filling, Policy::real_part);
    std::vector<char> occ(nk * nb, 0);
    for (int i : sel.occupied) occ[i] = 1;
    int nf = 0;
    for (int b = 0; b < nb; ++b)
        for (int m = 0; m + 1 < nk; ++m)
            if (occ[m * nb + b] != occ[(m + 1) * nb + b]) ++nf;
    // Bands may reconnect to a different band across the zone edge; follow them there too.
    const auto wrap = wrap_permutation(bands);
    for (int b = 0; b < nb; ++b)
        if (occ[(nk - 1) * nb + b] != occ[wrap[b]]) ++nf;
    return nf;
}

int count_fermi_points(const KernelMatrix& K, Rational filling) {
    if (K.bc == Boundary::open || K.momentum_basis)
        throw UnsupportedError("count_fermi_points requires a translation-invariant real-space chain");
    return count_fermi_points(band_structure(K), filling);
}

LifshitzResult lifshitz_scan(const std::function<int(double)>& nf_of_gamma, double lo, double hi, double step,
                             double tol) {
    LifshitzResult res;
    int nf_lo = nf_of_gamma(lo);
    double g = lo;
    while (g < hi) {
        const double next = std::min(hi, g + step);
        const int nf_next = nf_of_gamma(next);
        if (nf_next != nf_lo) {
            double a = g, b = next;
            while (b - a > tol) {
                const double mid = 0.5 * (a + b);
                if (nf_of_gamma(mid) == nf_lo) a = mid;
                else b = mid;
            }
            res.found = true;
            res.bracket_lo = a;
            res.bracket_hi = b;
            res.gamma_c = 0.5 * (a + b);
            res.nf_below = nf_lo;
            res.nf_above = nf_of_gamma(b);
            return res;
        }
        g = next;
    }
    res.nf_below = res.nf_above = nf_lo;
    return res;
}

} // namespace nhent
