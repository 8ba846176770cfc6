// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for context.

#include <nhent/corr.hpp>
#include <nhent/dynamics.hpp>
#include <nhent/ent.hpp>
#include <nhent/errors.hpp>
#include <nhent/model_zoo.hpp>
#include <nhent/oracle.hpp>
#include <nhent/scaling.hpp>
#include <nhent/spectra.hpp>

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace nhent;

namespace {

// Pinned tolerances.
constexpr double kCalibrationTol = 0.05;
constexpr double kCalibrationSeconds = 30.0;
constexpr double kSshTarget = -2.0;
constexpr double kSshTol = 0.2;
constexpr double kSshSeconds = 300.0;
constexpr double kMidgapImagTol = 1e-8;
constexpr double kMidgapPairTol = 1e-8;
constexpr double kAlphaTol = 1e-6;
constexpr double kFermiTol = 0.1;
constexpr double kFermiJumpMin = 0.5;
constexpr double kFermiJumpRatio = 5.0;
constexpr double kEbTol = 0.3;
constexpr double kOracleEntropyTol = 1e-8;
constexpr double kOracleSpectrumTol = 1e-9;
constexpr double kOraclePurityTol = 1e-10;
constexpr double kOracleSeconds = 120.0;
constexpr int kOracleKernels = 24;
constexpr double kOracleKappa = 0.05;
constexpr double kDualityTol = 1e-9;
constexpr double kQuasiDrop = 0.5;
constexpr double kUnitaryTol = 1e-8;
constexpr double kPurityTol = 1e-9;
constexpr double kRealnessTol = 1e-9;
constexpr double kHermitianLimitTol = 1e-10;
constexpr double kModifiedOracleTol = 1e-8;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void info(int id, const std::string& msg) { std::printf("INFO %d %s\n", id, msg.c_str()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> stepped(int lo, int hi, int step) {
    std::vector<int> v;
    for (int x = lo; x <= hi; x += step) v.push_back(x);
    return v;
}

EntanglementReport report_for(const KernelMatrix& K, const Partition& part, Rational filling = {1, 2}) {
    const auto sys = biorthogonal_eig(K);
    return analyze(correlation_matrix(sys, select_occupied(sys, filling), part));
}

// 1
Outcome calibration() {
    const auto t0 = std::chrono::steady_clock::now();
    const int L = 128;
    const auto sys = biorthogonal_eig(build_hatano_nelson(L, 1.0, 0.0, Boundary::periodic));
    const auto sel = select_occupied(sys, Rational{1, 2});
    const auto series = entropy_series(sys, sel, 1, L, stepped(8, 120, 4), Geometry::chord);
    const auto fr = fit_central_charge(series, FitOptions{8, 120});
    const double dt = seconds_since(t0);
    return {std::abs(fr.c - 1.0) <= kCalibrationTol && dt < kCalibrationSeconds,
            fmt("c=%.4f (target 1 +- %.2f) runtime %.2fs", fr.c, kCalibrationTol, dt)};
}

// 2
Outcome nh_ssh_negative_c() {
    const auto t0 = std::chrono::steady_clock::now();
    const double omega = 1.5, upsilon = 1.0, u = 0.5 - 1e-8;
    bool ok = true;
    std::ostringstream os;
    os << fmt("omega=%.1f upsilon=%.1f u=0.5-1e-8;", omega, upsilon);
    for (int n : {64, 128, 256}) {
        const auto sys = biorthogonal_eig(build_nh_ssh_real(n, omega, upsilon, u, Boundary::periodic));
        const auto sel = select_occupied(sys, Rational{1, 2});
        const int stride = std::max(2, n / 32);
        const auto la = stepped(stride, n - stride, stride);
        const auto fr = fit_central_charge(entropy_series(sys, sel, 2, n, la, Geometry::chord),
                                           FitOptions{stride, n - stride});
        ok = ok && std::abs(fr.c - kSshTarget) <= kSshTol;
        os << fmt(" L=%d c=%.4f slope=%.4f", n, fr.c, fr.c / 3.0);
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < kSshSeconds;
    os << fmt(" runtime %.1fs", dt);
    return {ok, os.str()};
}

// 3
Outcome midgap_pair() {
    const int cells = 50;
    const auto K = build_nh_ssh_real(cells, 0.5, 1.5, 0.5, Boundary::open);
    const auto sys = biorthogonal_eig(K);
    const auto sel = select_occupied(sys, Rational{1, 2});
    const auto rep = analyze(correlation_matrix(sys, sel, Partition::range(26, 76)));
    const auto single = analyze(correlation_matrix(sys, sel, Partition::range(0, 50)));
    info(3, fmt("single cut A=[0,50): %zu mid-gap eigenvalue(s)", single.midgap_modes.size()));

    const auto& m = rep.midgap_modes;
    if (m.size() != 2) return {false, fmt("%zu mid-gap eigenvalues, expected 2", m.size())};
    const cplx e1 = rep.correlation_eigenvalues[m[0]], e2 = rep.correlation_eigenvalues[m[1]];
    const double pair = std::max(std::abs(e2 - std::conj(e1)), std::abs(e1 + e2 - 1.0));
    const double im = std::abs(rep.entropy_vn.imag());
    return {pair < kMidgapPairTol && im < kMidgapImagTol,
            fmt("A=[26,76) eps=%.6f%+.6fi, %.6f%+.6fi pair residual %.1e |Im S|=%.1e", e1.real(), e1.imag(),
                e2.real(), e2.imag(), pair, im)};
}

// 4
Outcome alpha_independence() {
    const int L = 100;
    const auto part = Partition::range(0, L / 2);
    const cplx s0 = report_for(build_hatano_nelson(L, 1.0, 0.0, Boundary::open), part).entropy_vn;
    double worst = 0.0;
    for (double a : {0.25, 0.5, 1.0})
        worst = std::max(worst, std::abs(report_for(build_hatano_nelson(L, 1.0, a, Boundary::open), part).entropy_vn - s0));
    return {worst < kAlphaTol, fmt("S(0)=%.10f max|S(alpha)-S(0)|=%.2e", s0.real(), worst)};
}

// 5
Outcome fermi_points() {
    const int L = 256, n = 2;
    const Rational half{1, 2};
    auto kernel = [&](double g) { return build_guo_chain(L, n, 1.0, g, Boundary::antiperiodic); };
    const auto lif = lifshitz_scan([&](double g) { return count_fermi_points(kernel(g), half); }, 0.5, 6.0, 0.5, 1e-4);
    if (!lif.found) return {false, "no Lifshitz transition in [0.5, 6]"};

    auto half_entropy = [&](double g) { return report_for(kernel(g), Partition::range(0, L / 2)).entropy_vn.real(); };
    bool ok = true;
    std::ostringstream os;
    os << fmt("gamma_c=%.4f;", lif.gamma_c);
    for (double g : {lif.gamma_c - 1.0, lif.gamma_c + 1.0}) {
        const auto K = kernel(g);
        const int nf = count_fermi_points(K, half);
        const auto sys = biorthogonal_eig(K);
        const auto sel = select_occupied(sys, half);
        const auto fr = fit_central_charge(
            entropy_series(sys, sel, n, L / n, stepped(4, L / n - 4, 4), Geometry::chord), FitOptions{4, L / n - 4});
        ok = ok && std::abs(fr.c - nf / 2.0) <= kFermiTol;
        os << fmt(" gamma=%.3f N_f=%d c=%.4f", g, nf, fr.c);
    }
    // Finite L rounds the step over |gamma - gamma_c| ~ 0.05: the rise across a +-0.1 bracket must dominate
    // the drift over the preceding unit interval.
    const double far = half_entropy(lif.gamma_c - 1.1), below = half_entropy(lif.gamma_c - 0.1);
    const double above = half_entropy(lif.gamma_c + 0.1);
    const double jump = above - below, drift = std::abs(below - far);
    ok = ok && jump > kFermiJumpMin && jump > kFermiJumpRatio * drift;
    os << fmt(" S(L/2) at gamma_c-1.1, -0.1, +0.1: %.4f %.4f %.4f (jump %.4f, drift %.4f)", far, below, above, jump,
              drift);
    return {ok, os.str()};
}

// 6
double eb_c(double nu, double w, double gamma0) {
    ScalingSeries s;
    s.geometry = Geometry::open_log;
    for (int L : {16, 32, 64, 128}) {
        const auto rep = report_for(build_eb_ssh(L, nu, w, gamma0, Boundary::antiperiodic), Partition::range(0, L));
        s.points.push_back({L, rep.entropy_vn});
    }
    return fit_central_charge(s, FitOptions{16, 128, 1e-6, 4}).c;
}

Outcome eb_crossover() {
    const double c0 = eb_c(1.5, 1.0, 0.0), c10 = eb_c(1.5, 1.0, 10.0);
    try {
        info(6, fmt("nu=w=1 (Hermitian): c(gamma0=0)=%.4f c(gamma0=10)=%.4f", eb_c(1.0, 1.0, 0.0), eb_c(1.0, 1.0, 10.0)));
    } catch (const std::exception& e) {
        info(6, std::string("nu=w=1: ") + e.what());
    }
    return {std::abs(c0 + 2.0) <= kEbTol && std::abs(c10 - 1.0) <= kEbTol,
            fmt("nu=1.5 w=1: c(gamma0=0)=%.4f c(gamma0=10)=%.4f", c0, c10)};
}

// 7 and 11 share the oracle comparison.
KernelMatrix wrap(const CMatrix& m) {
    KernelMatrix K;
    K.entries = m;
    for (int i = 0; i < m.rows(); ++i) K.labels.push_back({i, 0});
    return K;
}

std::vector<cplx> product_spectrum(const std::vector<cplx>& eps) {
    std::vector<cplx> out{1.0};
    for (const auto& e : eps) {
        std::vector<cplx> next;
        for (const auto& p : out) {
            next.push_back(p * e);
            next.push_back(p * (1.0 - e));
        }
        out = std::move(next);
    }
    return out;
}

struct OracleDiff {
    double entropy = 0.0, modified = 0.0, spectrum = 0.0, purity = 0.0;
};

OracleDiff oracle_diff(const KernelMatrix& K, const std::vector<int>& a_sites) {
    const int n = K.dim();
    const auto sys = biorthogonal_eig(K);
    const auto sel = select_occupied(sys, Rational{1, 2});
    const auto spec = entanglement_spectrum(correlation_matrix(sys, sel, Partition::of(a_sites)));

    const auto g = oracle::manybody_biortho_ground(oracle::fock_hamiltonian(K, oracle::a_first_order(n, a_sites)),
                                                   static_cast<int>(sel.occupied.size()));
    const CMatrix rho = oracle::density_matrix(g);
    const auto rep = oracle::oracle_report(oracle::partial_trace_pure(g, static_cast<int>(a_sites.size())));

    OracleDiff d;
    d.entropy = std::abs(vn_entropy(spec.eps) - rep.entropy_vn);
    d.modified = std::abs(modified_entropy_raw(spec.eps) - rep.entropy_modified);
    d.spectrum = multiset_mismatch(product_spectrum(spec.eps), rep.spectrum);
    d.purity = testsupport::max_abs(rho * rho - rho);
    return d;
}

struct OracleCase {
    std::string name;
    KernelMatrix K;
    std::vector<int> a;
};

std::vector<OracleCase> oracle_cases() {
    std::vector<OracleCase> cases;
    std::mt19937 rng(20240611);
    std::uniform_int_distribution<int> pick(0, 7);
    for (int r = 0; r < kOracleKernels; ++r) {
        std::vector<int> a;
        while (a.size() < 4) {
            const int s = pick(rng);
            if (std::find(a.begin(), a.end(), s) == a.end()) a.push_back(s);
        }
        std::sort(a.begin(), a.end());
        cases.push_back({"random", wrap(testsupport::random_nonhermitian(8, rng, kOracleKappa)), a});
    }
    cases.push_back({"nh_ssh", build_nh_ssh_real(4, 0.5, 1.5, 0.3, Boundary::open), {0, 1, 2, 3}});
    cases.push_back({"nh_ssh_pt", build_nh_ssh_real(4, 1.5, 1.0, 0.3, Boundary::periodic), {2, 3, 4, 5}});
    cases.push_back({"hatano_nelson", build_hatano_nelson(8, 1.0, 0.5, Boundary::antiperiodic), {1, 2, 5, 6}});
    cases.push_back({"hatano_nelson_open", build_hatano_nelson(8, 1.0, 0.8, Boundary::open), {0, 1, 2, 3}});
    return cases;
}

Outcome oracle_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    OracleDiff worst;
    int n = 0;
    for (const auto& c : oracle_cases()) {
        const auto d = oracle_diff(c.K, c.a);
        worst.entropy = std::max(worst.entropy, d.entropy);
        worst.spectrum = std::max(worst.spectrum, d.spectrum);
        worst.purity = std::max(worst.purity, d.purity);
        ++n;
    }
    // Generic complex kernels: eigenvalues with Re eps outside [0,1] put many-body weights in the left
    // half-plane, where the principal-branch -sum lambda ln lambda and the factorized sum differ by a
    // branch offset. Reported only.
    std::mt19937 rng(7);
    int offset = 0;
    double spec_strong = 0.0;
    for (int r = 0; r < 40; ++r) {
        const auto d = oracle_diff(wrap(testsupport::random_matrix(8, rng)), {0, 1, 2, 3});
        offset += d.entropy > kOracleEntropyTol;
        spec_strong = std::max(spec_strong, d.spectrum);
    }
    info(7, fmt("generic complex kernels: %d/40 vn branch offsets, spectrum mismatch %.1e", offset, spec_strong));

    const double dt = seconds_since(t0);
    return {worst.entropy < kOracleEntropyTol && worst.spectrum < kOracleSpectrumTol &&
                worst.purity < kOraclePurityTol && dt < kOracleSeconds,
            fmt("%d kernels (%d random, kappa=%.2f): max|dS|=%.1e spectrum %.1e purity %.1e runtime %.1fs", n,
                kOracleKernels, kOracleKappa, worst.entropy, worst.spectrum, worst.purity, dt)};
}

// 8
Outcome duality() {
    struct Cfg {
        const char* name;
        KernelMatrix K;
        Partition part;
    };
    const std::vector<Cfg> zoo = {
        {"hatano_nelson", build_hatano_nelson(60, 1.0, 0.7, Boundary::periodic), Partition::range(0, 30)},
        {"nh_ssh", build_nh_ssh_real(30, 0.5, 1.5, 0.3, Boundary::open), Partition::range(0, 30)},
        {"quasicrystal",
         build_quasicrystal(89, 0.0, 1.0, 1.3, Rational{55, 89}, QuasicrystalVariant::exp_phase),
         Partition::range(0, 44)},
        {"guo_chain", build_guo_chain(64, 2, 1.0, 1.2, Boundary::antiperiodic), Partition::range(0, 32)},
        {"eb_ssh", build_eb_ssh(40, 1.5, 1.0, 2.0, Boundary::antiperiodic), Partition::range(0, 40)},
    };
    double worst = 0.0;
    bool counts = true;
    std::ostringstream os;
    for (const auto& c : zoo) {
        const auto sys = biorthogonal_eig(c.K);
        const auto rep = check_duality(sys, select_occupied(sys, Rational{1, 2}), c.part);
        worst = std::max(worst, rep.max_mismatch);
        counts = counts && rep.nonzero_rpr == rep.nonzero_prp;
        os << fmt(" %s=%.1e", c.name, rep.max_mismatch);
    }
    return {worst < kDualityTol && counts, "mismatch" + os.str()};
}

// 9
Outcome quasicrystal_scan() {
    const int L = 144, p = 89;
    int pinv = 1;
    while (pinv * p % L != 1) ++pinv;
    std::vector<int> kset;
    for (int m = 0; m < L; ++m)
        if (static_cast<long>(m) * pinv % L < L / 2) kset.push_back(m);
    const auto rpart = Partition::range(0, L / 2);
    const auto kpart = Partition::of(kset, Space::momentum);

    auto entropies = [&](double V) {
        const auto K = build_quasicrystal(L, 0.0, 1.0, V, Rational{p, L}, QuasicrystalVariant::exp_phase);
        return std::pair{report_for(K, rpart).entropy_vn.real(), report_for(momentum_transform(K), kpart).entropy_vn.real()};
    };
    auto gap = [&](double V) {
        const auto [sr, sk] = entropies(V);
        return sr - sk;
    };
    double lo = 0.5, hi = 1.5;
    if (!(gap(lo) > 0 && gap(hi) < 0)) return {false, "real and momentum entropies do not cross in [0.5, 1.5]"};
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0 ? lo : hi) = mid;
    }
    const double vstar = 0.5 * (lo + hi);
    const double before = entropies(vstar - 0.1).first, after = entropies(vstar + 0.1).first;
    return {after < (1.0 - kQuasiDrop) * before,
            fmt("V*=%.4f; real-space S(V*-0.1)=%.4f S(V*+0.1)=%.4f", vstar, before, after)};
}

// 10
Outcome dynamics_checks() {
    std::ostringstream os;
    bool ok = true;

    // (a) Gamma = 0 against the unitary reference.
    const int L = 32;
    std::vector<int> even;
    for (int i = 0; i < L; i += 2) even.push_back(i);
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.25 * i);
    const auto K0 = build_measurement_heff(L, 1.0, 0.0, Boundary::open);
    const auto part = Partition::range(0, L / 2);
    const auto nj = evolve_no_jump(K0, product_state(L, even), grid, part);
    const auto ref = evolve_unitary_reference(K0, product_state(L, even), grid, part);
    double dev = 0.0, purity = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dev = std::max(dev, std::abs(nj[i].report.entropy_vn - ref[i].entropy_vn));
        dev = std::max(dev, multiset_mismatch(nj[i].report.correlation_eigenvalues, ref[i].correlation_eigenvalues));
        purity = std::max(purity, nj[i].purity_residual);
    }
    ok = ok && dev < kUnitaryTol;
    os << fmt("(a) max dev %.1e", dev);

    // (b) and (c) on the measurement-induced chain from a Neel state.
    const int M = 64;
    std::vector<int> neel;
    for (int i = 0; i < M; i += 2) neel.push_back(i);
    const std::vector<double> times = {2, 4, 6, 8, 10, 12, 14, 16, 20, 24};
    const auto half = Partition::range(0, M / 2);
    const auto free = evolve_no_jump(build_measurement_heff(M, 1.0, 0.0, Boundary::open), product_state(M, neel), times, half);
    const auto meas = evolve_no_jump(build_measurement_heff(M, 1.0, 0.5, Boundary::open), product_state(M, neel), times, half);
    bool smaller = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
        smaller = smaller && meas[i].report.entropy_vn.real() < free[i].report.entropy_vn.real();
        purity = std::max({purity, free[i].purity_residual, meas[i].purity_residual});
    }
    ok = ok && purity < kPurityTol && smaller;
    os << fmt("; (b) max Tr|C^2-C| %.1e; (c) S(t=24): Gamma=0 %.3f, Gamma=0.5 %.3f, smaller at all %zu times: %s",
              purity, free.back().report.entropy_vn.real(), meas.back().report.entropy_vn.real(), times.size(),
              smaller ? "yes" : "no");
    return {ok, os.str()};
}

// 11
Outcome modified_entropy_checks() {
    // Realness on conjugate-closed spectra.
    double realness = 0.0;
    for (double u : {0.1, 0.3, 0.45}) {
        const auto K = build_nh_ssh_real(40, 1.5, 1.0, u, Boundary::periodic);
        for (int la : {10, 20, 37}) realness = std::max(realness, report_for(K, Partition::range(0, la)).modified_residual);
    }
    realness = std::max(realness, report_for(build_nh_ssh_real(50, 0.5, 1.5, 0.5, Boundary::open),
                                             Partition::range(26, 76)).modified_residual);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-0.5, 1.5);
    for (int r = 0; r < 50; ++r) {
        std::vector<cplx> eps;
        for (int j = 0; j < 6; ++j) {
            const cplx e(uni(rng), uni(rng));
            eps.push_back(e);
            eps.push_back(std::conj(e));
        }
        eps.push_back(uni(rng));
        realness = std::max(realness, std::abs(modified_entropy_raw(eps).imag()));
    }

    // Hermitian limit.
    double herm = 0.0;
    for (int L : {40, 100}) {
        const auto rep = report_for(build_hatano_nelson(L, 1.0, 0.0, Boundary::open), Partition::range(0, L / 2));
        herm = std::max(herm, std::abs(rep.entropy_modified - rep.entropy_vn.real()));
    }
    for (int r = 0; r < 10; ++r) {
        const auto rep = report_for(wrap(testsupport::random_hermitian(16, rng)), Partition::range(0, 8));
        herm = std::max(herm, std::abs(rep.entropy_modified - rep.entropy_vn.real()));
    }

    // Oracle -Tr rho_A ln|rho_A|, including generic complex kernels.
    double orc = 0.0;
    for (const auto& c : oracle_cases()) orc = std::max(orc, oracle_diff(c.K, c.a).modified);
    std::mt19937 rng2(7);
    for (int r = 0; r < 20; ++r) orc = std::max(orc, oracle_diff(wrap(testsupport::random_matrix(8, rng2)), {0, 1, 2, 3}).modified);

    return {realness < kRealnessTol && herm < kHermitianLimitTol && orc < kModifiedOracleTol,
            fmt("realness %.1e, Hermitian limit %.1e, oracle %.1e", realness, herm, orc)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"hermitian calibration", calibration},
        {"nh ssh negative central charge", nh_ssh_negative_c},
        {"mid-gap conjugate pair", midgap_pair},
        {"hatano-nelson alpha independence", alpha_independence},
        {"fermi-point counting", fermi_points},
        {"eb crossover", eb_crossover},
        {"oracle equivalence", oracle_suite},
        {"duality spectrum equality", duality},
        {"quasicrystal transition", quasicrystal_scan},
        {"dynamics", dynamics_checks},
        {"modified entropy", modified_entropy_checks},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, fn] = criteria[i];
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
