#include <doctest.h>

#include <nhent/errors.hpp>
#include <nhent/linalg.hpp>
#include <nhent/model_zoo.hpp>
#include <nhent/scaling.hpp>

#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace nhent;
using testsupport::max_abs;
using testsupport::multiset_distance;

namespace {

const cplx I(0.0, 1.0);
constexpr double pi = std::numbers::pi;

double hermiticity(const KernelMatrix& K) { return max_abs(K.entries - K.entries.adjoint()); }

// Shift every site by `cells` unit cells.
CMatrix shift_cells(const KernelMatrix& K, int cells) {
    const int n = K.dim(), nb = K.sublattices();
    CMatrix P = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) P((i + cells * nb) % n, i) = 1.0;
    return P * K.entries * P.transpose();
}

std::vector<cplx> bloch_union(const KernelMatrix& K) {
    std::vector<cplx> all;
    for (double k : momentum_grid(K.cells(), K.bc)) {
        const CVector ev = linalg::eigvals_general(bloch_reduce(K, k));
        for (int i = 0; i < ev.size(); ++i) all.push_back(ev[i]);
    }
    return all;
}

std::vector<cplx> eigvals(const KernelMatrix& K) { return testsupport::to_vec(linalg::eigvals_general(K.entries)); }

} // namespace

TEST_CASE("hatano_nelson entries") {
    const auto h = build_hatano_nelson(4, 1.0, 0.0, Boundary::open);
    CHECK(hermiticity(h) < 1e-14);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(h.entries(i, i + 1) + 1.0) < 1e-15);
    CHECK(std::abs(h.entries(0, 3)) == 0.0);

    const auto k = build_hatano_nelson(3, 1.0, 0.5, Boundary::open);
    CHECK(std::abs(k.entries(0, 1) + std::exp(0.5)) < 1e-15);
    CHECK(std::abs(k.entries(1, 0) + std::exp(-0.5)) < 1e-15);
    CHECK(std::abs(k.entries(1, 2) + std::exp(0.5)) < 1e-15);
    CHECK(std::abs(k.entries(2, 0)) == 0.0);

    // L=2 periodic: bulk bond (0,1) and wrap bond (1,0) land on the same pair.
    const auto p = build_hatano_nelson(2, 1.0, 1.0, Boundary::periodic);
    const double both = -(std::exp(1.0) + std::exp(-1.0));
    CHECK(std::abs(p.entries(0, 1) - both) < 1e-14);
    CHECK(std::abs(p.entries(1, 0) - both) < 1e-14);

    CHECK_THROWS_AS(build_hatano_nelson(1, 1.0, 0.0, Boundary::open), SizeError);
}

TEST_CASE("nh_ssh real space and bloch") {
    CHECK(hermiticity(build_nh_ssh_real(2, 1.0, 1.0, 0.0, Boundary::open)) < 1e-14);
    const auto K = build_nh_ssh_real(2, 1.0, 0.5, 0.3, Boundary::open);
    const cplx diag[4] = {0.3 * I, -0.3 * I, 0.3 * I, -0.3 * I};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(K.entries(i, i) - diag[i]) < 1e-15);
    CHECK(std::abs(K.entries(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(K.entries(1, 2) - 0.5) < 1e-15);

    // Real-space omega sits on the intracell bond, so the Bloch block exchanges omega and upsilon.
    const auto Kp = build_nh_ssh_real(8, 0.7, 1.3, 0.4, Boundary::periodic);
    for (double k : momentum_grid(8, Boundary::periodic)) {
        const auto b = build_nh_ssh_bloch(k, 1.3, 0.7, 0.4);
        CHECK(max_abs(bloch_reduce(Kp, k) - CMatrix(b.h)) < 1e-13);
    }

    const double k = 0.83;
    const auto herm = build_nh_ssh_bloch(k, 1.0, 0.5, 0.0);
    const double vk = std::abs(1.0 * std::exp(-I * k) + 0.5);
    CHECK(std::abs(herm.energies[0] - vk) < 1e-14);
    CHECK(std::abs(herm.energies[1] + vk) < 1e-14);

    // |v_k| = u at k = pi for omega = 1, upsilon = 0.5, u = 0.5.
    const auto ep = build_nh_ssh_bloch(pi, 1.0, 0.5, 0.5);
    CHECK(std::abs(ep.energies[0]) < 1e-7);
    CHECK(std::abs(ep.energies[1]) < 1e-7);

    const auto b0 = build_nh_ssh_bloch(0.0, 1.0, 0.5, 0.3);
    CHECK(std::abs(b0.energies[0] - 1.4696938456699069) < 1e-14);
    CHECK(std::abs(b0.energies[1] + 1.4696938456699069) < 1e-14);
    CHECK(std::abs(b0.h(0, 0) - 0.3 * I) < 1e-15);
    CHECK(std::abs(b0.h(0, 1) - 1.5) < 1e-15);
}

TEST_CASE("quasicrystal potentials") {
    const auto zero = build_quasicrystal(8, 0.3, 1.1, 0.0, Rational{3, 8}, QuasicrystalVariant::exp_phase);
    const auto hn = build_hatano_nelson(8, 1.0, 0.0, Boundary::periodic);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(zero.entries(i, i)) == 0.0);
        CHECK(std::abs(zero.entries(i, (i + 1) % 8) - 0.3) < 1e-15);
        CHECK(std::abs(zero.entries((i + 1) % 8, i) - 1.1) < 1e-15);
    }
    CHECK((zero.entries.array() != 0.0).count() == (hn.entries.array() != 0.0).count());

    const auto K = build_quasicrystal(5, 1.0, 1.0, 0.5, Rational{2, 5}, QuasicrystalVariant::exp_phase);
    for (int n = 0; n < 5; ++n)
        CHECK(std::abs(K.entries(n, n) - 0.5 * std::exp(-2.0 * pi * I * (0.4 * n))) < 1e-14);

    const auto M = build_quasicrystal(5, 1.0, 1.0, 1.0, Rational{2, 5}, QuasicrystalVariant::mobility_edge, 0.5);
    CHECK(std::abs(M.entries(0, 0) - 2.0) < 1e-14);
    CHECK_THROWS_AS(build_quasicrystal(5, 1.0, 1.0, 1.0, Rational{2, 5}, QuasicrystalVariant::mobility_edge, 1.0),
                    SingularPotentialError);

    CHECK(fibonacci_partner(144) == 89);
    CHECK_THROWS_AS(fibonacci_partner(100), SizeError);
}

TEST_CASE("guo chain") {
    CHECK(hermiticity(build_guo_chain(12, 2, 1.0, 0.0, Boundary::periodic)) < 1e-14);
    const auto K = build_guo_chain(8, 2, 1.0, 0.4, Boundary::open);
    for (int i = 0; i < 7; ++i) {
        const bool first = i % 2 == 0;
        CHECK(std::abs(K.entries(i, i + 1) - (first ? 1.2 : 1.0)) < 1e-15);
        CHECK(std::abs(K.entries(i + 1, i) - (first ? 0.8 : 1.0)) < 1e-15);
    }
    CHECK_THROWS_AS(build_guo_chain(9, 2, 1.0, 0.4, Boundary::open), SizeError);

    // Folded cosine band of the 64-site ring.
    const auto H = build_guo_chain(64, 2, 1.0, 0.0, Boundary::periodic);
    std::vector<cplx> ref;
    for (int j = 0; j < 64; ++j) ref.emplace_back(2.0 * std::cos(2.0 * pi * j / 64.0), 0.0);
    CHECK(multiset_distance(eigvals(H), ref) < 1e-12);
    CHECK(count_fermi_points(H, Rational{1, 2}) == 2);
}

TEST_CASE("guo 2d") {
    CHECK(hermiticity(build_guo_2d(4, 4, 0.0, Boundary::periodic)) < 1e-14);
    CHECK_THROWS_AS(build_guo_2d(3, 4, 0.1, Boundary::open), SizeError);
    const int Lx = 4, Ly = 4;
    const auto K = build_guo_2d(Lx, Ly, 0.4, Boundary::open);
    auto idx = [&](int x, int y) { return x + Lx * y; };
    CHECK(std::abs(K.entries(idx(0, 1), idx(1, 1)) - 1.2) < 1e-15);
    CHECK(std::abs(K.entries(idx(1, 1), idx(0, 1)) - 0.8) < 1e-15);
    CHECK(std::abs(K.entries(idx(2, 0), idx(2, 1)) - 1.2) < 1e-15);
    CHECK(std::abs(K.entries(idx(2, 1), idx(2, 0)) - 0.8) < 1e-15);
    CHECK(std::abs(K.entries(idx(1, 1), idx(2, 1)) - 1.0) < 1e-15);

    // Rows of fixed y are Guo chains; different rows couple only site-to-site.
    const auto chain = build_guo_chain(Lx, 2, 1.0, 0.4, Boundary::open);
    for (int ya = 0; ya < Ly; ++ya)
        for (int yb = 0; yb < Ly; ++yb) {
            const CMatrix blk = K.entries.block(Lx * ya, Lx * yb, Lx, Lx);
            if (ya == yb) {
                CHECK(max_abs(blk - chain.entries) < 1e-15);
            } else {
                CMatrix off = blk;
                off.diagonal().setZero();
                CHECK(max_abs(off) == 0.0);
            }
        }
}

TEST_CASE("chern ribbon") {
    for (auto axis : {Axis::x, Axis::y}) {
        CHECK(hermiticity(build_chern_ribbon(10, 0.4, 1.0, -1.0, 0.0, axis)) < 1e-14);
    }
    // Bloch check: a periodic version of the ribbon reduces to the quoted H_k.
    const double kx = 0.3, ky = -1.1;
    const auto rib = build_chern_ribbon(6, kx, 1.0, -1.0, 0.5, Axis::x);
    CHECK(rib.dim() == 12);
    // The open-axis Fourier sum over a bulk cell reproduces H_k with the wrap omitted.
    CMatrix hk = CMatrix::Zero(2, 2);
    for (int c = 0; c < 6; ++c) {
        const int d = c - 2;
        if (std::abs(d) > 1) continue;
        hk += rib.entries.block(4, 2 * c, 2, 2) * std::exp(I * (ky * d));
    }
    CHECK(max_abs(hk - CMatrix(chern_bloch(kx, ky, 1.0, -1.0, 0.5))) < 1e-14);

    // Edge branches: the open ribbon has states deep inside the bulk gap for some k_perp.
    const double t = 1.0, m = -1.0, g = 0.5;
    double bulk_gap = 1e300;
    for (int a = 0; a < 64; ++a)
        for (int b = 0; b < 64; ++b) {
            const Eigen::Vector2cd ev = chern_bloch(2 * pi * a / 64, 2 * pi * b / 64, t, m, g).eigenvalues();
            bulk_gap = std::min({bulk_gap, std::abs(ev[0].real()), std::abs(ev[1].real())});
        }
    double edge = 1e300;
    for (int a = 0; a < 64; ++a) {
        const auto R = build_chern_ribbon(40, 2 * pi * a / 64, t, m, g, Axis::x);
        for (const auto& e : eigvals(R)) edge = std::min(edge, std::abs(e.real()));
    }
    CHECK(bulk_gap > 0.1);
    CHECK(edge < 0.25 * bulk_gap);
}

TEST_CASE("eb ssh") {
    CHECK(hermiticity(build_eb_ssh(6, 1.0, 1.0, 0.0, Boundary::periodic)) < 1e-14);
    const double nu = 1.3, w = 0.8, g0 = 0.6;
    const auto K = build_eb_ssh(8, nu, w, g0, Boundary::periodic);
    const CMatrix h = bloch_reduce(K, pi / 2);
    const cplx cx = 0.5 * (h(0, 1) + h(1, 0));
    const cplx cz = 0.5 * (h(0, 0) - h(1, 1));
    const cplx cy = 0.5 * I * (h(0, 1) - h(1, 0));
    CHECK(std::abs(cx - nu) < 1e-14);
    CHECK(std::abs(cz - g0) < 1e-14);
    CHECK(std::abs(cy - I * (nu - w)) < 1e-14);
    for (double k : momentum_grid(8, Boundary::periodic))
        CHECK(max_abs(bloch_reduce(K, k) - CMatrix(eb_bloch(k, nu, w, g0))) < 1e-14);

    // Long-wavelength form: sigma_x -> a0/2 + b0 k^2 with a0 = 2(nu - w), b0 = w/2; sigma_z -> gamma0 k.
    const double k = 1e-3;
    const Eigen::Matrix2cd hk = eb_bloch(k, nu, w, g0);
    const cplx sx = 0.5 * (hk(0, 1) + hk(1, 0)), sz = 0.5 * (hk(0, 0) - hk(1, 1));
    const double a0 = 2.0 * (nu - w), b0 = w / 2.0;
    CHECK(std::abs(sx - (a0 / 2.0 + b0 * k * k)) < 1e-12);
    CHECK(std::abs(sz - g0 * k) < 1e-9);
}

TEST_CASE("measurement heff") {
    const auto h0 = build_measurement_heff(5, 1.0, 0.0, Boundary::open);
    CHECK(hermiticity(h0) < 1e-14);
    CHECK(std::abs(h0.entries(0, 1) + 0.25) < 1e-15);
    CHECK(std::abs(h0.entries(1, 0) + 0.25) < 1e-15);

    const auto K = build_measurement_heff(3, 1.0, 0.5, Boundary::open);
    CHECK(std::abs(K.entries(0, 0) + 0.125 * I) < 1e-15);
    CHECK(std::abs(K.entries(1, 1) + 0.25 * I) < 1e-15);
    CHECK(std::abs(K.entries(2, 2) + 0.125 * I) < 1e-15);

    const auto U = build_measurement_heff(4, 1.0, 1.0, Boundary::open);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(U.entries(i, i + 1)) < 1e-15);
        CHECK(std::abs(U.entries(i + 1, i) + 0.5) < 1e-15);
    }
}

TEST_CASE("effective hamiltonian from jumps") {
    const int L = 6;
    const double Gamma = 0.7;
    const auto H = build_measurement_heff(L, 1.0, 0.0, Boundary::open);
    CHECK(max_abs(build_heff_from_jumps(H, {}, {}).entries - H.entries) == 0.0);

    std::vector<Jump> jumps;
    std::vector<double> rates;
    for (int i = 0; i + 1 < L; ++i) {
        Jump j{Jump::Kind::projector, CVector::Zero(L)};
        j.u[i] = 1.0 / std::sqrt(2.0);
        j.u[i + 1] = -I / std::sqrt(2.0);
        jumps.push_back(j);
        rates.push_back(Gamma);
    }
    const auto heff = build_heff_from_jumps(H, jumps, rates);
    CHECK(max_abs(heff.entries - build_measurement_heff(L, 1.0, Gamma, Boundary::open).entries) < 1e-15);

    std::vector<Jump> loss;
    for (int i = 0; i < L; ++i) {
        Jump j{Jump::Kind::linear, CVector::Zero(L)};
        j.u[i] = 1.0;
        loss.push_back(j);
    }
    const auto lossy = build_heff_from_jumps(H, loss, std::vector<double>(L, Gamma));
    CHECK(max_abs(lossy.entries - H.entries + (0.5 * I * Gamma) * CMatrix::Identity(L, L)) < 1e-15);

    Jump bad{Jump::Kind::projector, CVector::Ones(L)};
    CHECK_THROWS_AS(build_heff_from_jumps(H, {bad}, {1.0}), NormalizationError);
}

TEST_CASE("hermitian limits of every builder") {
    CHECK(hermiticity(build_hatano_nelson(7, 1.0, 0.0, Boundary::periodic)) < 1e-14);
    CHECK(hermiticity(build_nh_ssh_real(5, 0.4, 1.2, 0.0, Boundary::antiperiodic)) < 1e-14);
    CHECK(hermiticity(build_guo_chain(12, 3, 0.9, 0.0, Boundary::open)) < 1e-14);
    CHECK(hermiticity(build_guo_2d(6, 4, 0.0, Boundary::open)) < 1e-14);
    CHECK(hermiticity(build_chern_ribbon(8, 1.9, 1.0, -1.0, 0.0, Axis::y)) < 1e-14);
    CHECK(hermiticity(build_eb_ssh(5, 0.7, 0.7, 0.3, Boundary::periodic)) < 1e-14);
    CHECK(hermiticity(build_measurement_heff(9, 1.0, 0.0, Boundary::periodic)) < 1e-14);
}

TEST_CASE("translation covariance of periodic builders") {
    std::mt19937 rng(7);
    const std::vector<KernelMatrix> models = {
        build_hatano_nelson(9, 1.0, 0.3, Boundary::periodic),
        build_nh_ssh_real(6, 0.8, 1.1, 0.3, Boundary::periodic),
        build_guo_chain(12, 3, 1.0, 0.5, Boundary::periodic),
        build_eb_ssh(7, 1.5, 1.0, 0.4, Boundary::periodic),
        build_measurement_heff(10, 1.0, 0.5, Boundary::periodic),
    };
    for (const auto& K : models) {
        std::uniform_int_distribution<int> pick(1, K.cells() - 1);
        for (int rep = 0; rep < 3; ++rep) CHECK(max_abs(shift_cells(K, pick(rng)) - K.entries) < 1e-14);
    }

    // The quasicrystal potential is not translation invariant; shifting by s moves the phase by 2 pi alpha s.
    const int L = 13;
    const auto Q = build_quasicrystal(L, 0.4, 1.0, 0.9, Rational{8, L}, QuasicrystalVariant::exp_phase);
    for (int rep = 0; rep < 3; ++rep) {
        const int s = std::uniform_int_distribution<int>(1, L - 1)(rng);
        const CMatrix S = shift_cells(Q, s);
        CMatrix hop = S - Q.entries;
        hop.diagonal().setZero();
        CHECK(max_abs(hop) < 1e-14);
        for (int n = 0; n < L; ++n) CHECK(std::abs(S((n + s) % L, (n + s) % L) - Q.entries(n, n)) < 1e-14);
    }
}

TEST_CASE("bloch and real-space spectra agree") {
    const std::vector<KernelMatrix> models = {
        build_hatano_nelson(11, 1.0, 0.4, Boundary::periodic),
        build_nh_ssh_real(8, 1.2, 0.7, 0.3, Boundary::periodic),
        build_nh_ssh_real(8, 1.2, 0.7, 0.3, Boundary::antiperiodic),
        build_guo_chain(24, 2, 1.0, 0.8, Boundary::antiperiodic),
        build_guo_chain(18, 3, 1.0, 0.5, Boundary::periodic),
        build_eb_ssh(10, 1.5, 1.0, 0.6, Boundary::antiperiodic),
        build_measurement_heff(12, 1.0, 0.5, Boundary::periodic),
    };
    for (const auto& K : models) CHECK(multiset_distance(eigvals(K), bloch_union(K)) < 1e-10);
    CHECK_THROWS_AS(momentum_grid(4, Boundary::open), UnsupportedError);
}

TEST_CASE("model spec completion") {
    ModelSpec s;
    s.family = Family::hatano_nelson;
    s.params = {{"L", 6}, {"alpha", 0.2}};
    const auto full = complete(s);
    CHECK(full.params.count("t") == 1);
    CHECK(build(full).dim() == 6);

    ModelSpec typo = s;
    typo.params["alhpa"] = 0.1;
    CHECK_THROWS_AS(complete(typo), ConfigError);

    ModelSpec missing;
    missing.family = Family::nh_ssh;
    CHECK_THROWS_AS(complete(missing), ConfigError);

    for (const auto& info : family_catalog()) CHECK(family_from_string(to_string(info.family)) == info.family);
}
