#include "nhent/model_zoo.hpp"

#include "nhent/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace nhent {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I1{0.0, 1.0};

Eigen::Matrix2cd pauli_x() { return (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(); }
Eigen::Matrix2cd pauli_y() { return (Eigen::Matrix2cd() << 0, -I1, I1, 0).finished(); }
Eigen::Matrix2cd pauli_z() { return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(); }

double wrap_sign(Boundary bc) { return bc == Boundary::antiperiodic ? -1.0 : 1.0; }

KernelMatrix empty_kernel(int dim, Boundary bc, int per_cell) {
    KernelMatrix K;
    K.entries = CMatrix::Zero(dim, dim);
    K.bc = bc;
    K.labels.resize(dim);
    for (int i = 0; i < dim; ++i) K.labels[i] = {i / per_cell, i % per_cell};
    return K;
}

// Adds a c_i^dag c_j term, folding the boundary sign into wrap bonds.
void add_bond(KernelMatrix& K, int i, int j, cplx forward, cplx backward, bool wraps) {
    if (wraps) {
        if (K.bc == Boundary::open) return;
        forward *= wrap_sign(K.bc);
        backward *= wrap_sign(K.bc);
    }
    K.entries(i, j) += forward;
    K.entries(j, i) += backward;
}

double param(const ModelSpec& s, const std::string& name) {
    auto it = s.params.find(name);
    if (it == s.params.end()) throw ConfigError("missing parameter '" + name + "'");
    return it->second;
}

int int_param(const ModelSpec& s, const std::string& name) {
    const double v = param(s, name);
    if (v != std::floor(v)) throw ConfigError("parameter '" + name + "' must be an integer");
    return static_cast<int>(v);
}

} // namespace

std::string to_string(Boundary bc) {
    switch (bc) {
    case Boundary::open: return "open";
    case Boundary::periodic: return "periodic";
    case Boundary::antiperiodic: return "antiperiodic";
    }
    return "?";
}

Boundary boundary_from_string(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    if (s == "antiperiodic") return Boundary::antiperiodic;
    throw ConfigError("unknown boundary condition '" + s + "'");
}

int KernelMatrix::cells() const {
    int m = 0;
    for (const auto& l : labels) m = std::max(m, l.cell + 1);
    return m;
}

int KernelMatrix::sublattices() const {
    int m = 0;
    for (const auto& l : labels) m = std::max(m, l.sub + 1);
    return m;
}

Rational parse_rational(const std::string& s) {
    Rational r;
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            r.num = std::stol(s);
            r.den = 1;
        } else {
            r.num = std::stol(s.substr(0, slash));
            r.den = std::stol(s.substr(slash + 1));
        }
    } catch (const std::exception&) {
        throw ConfigError("cannot parse rational '" + s + "'");
    }
    if (r.den <= 0) throw ConfigError("rational '" + s + "' needs a positive denominator");
    return r;
}

std::string to_string(Family f) {
    switch (f) {
    case Family::hatano_nelson: return "hatano_nelson";
    case Family::nh_ssh: return "nh_ssh";
    case Family::quasicrystal: return "quasicrystal";
    case Family::guo_chain: return "guo_chain";
    case Family::guo_2d: return "guo_2d";
    case Family::chern_ribbon: return "chern_ribbon";
    case Family::eb_ssh: return "eb_ssh";
    case Family::measurement: return "measurement";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (const auto& info : family_catalog())
        if (to_string(info.family) == s) return info.family;
    throw ConfigError("unknown model family '" + s + "'");
}

const std::vector<FamilyInfo>& family_catalog() {
    static const std::vector<FamilyInfo> catalog = {
        {Family::hatano_nelson, {"L", "alpha"}, {{"t", 1.0}}, {}, "nonreciprocal chain, hoppings -t e^{+-alpha}"},
        {Family::nh_ssh, {"N_cells", "omega", "upsilon", "u"}, {}, {},
         "SSH chain with staggered +-iu; omega intracell, upsilon intercell"},
        {Family::quasicrystal,
         {"L", "V"},
         {{"J_L", 0.0}, {"J_R", 1.0}, {"p", 0.0}, {"a", 0.0}},
         {{"variant", {"exp_phase", "mobility_edge"}}},
         "asymmetric hopping chain with complex incommensurate potential, alpha = p/L (p = 0: Fibonacci partner)"},
        {Family::guo_chain, {"L", "gamma"}, {{"n", 2.0}, {"t", 1.0}}, {},
         "n-site cells, first bond nonreciprocal 1 +- gamma/2"},
        {Family::guo_2d, {"Lx", "Ly", "gamma"}, {}, {}, "2D lattice dimerized along both axes"},
        {Family::chern_ribbon, {"L", "k_perp", "m", "gamma"}, {{"t", 1.0}}, {{"cut_axis", {"x", "y"}}},
         "Chern insulator ribbon at fixed momentum along cut_axis"},
        {Family::eb_ssh, {"L", "nu", "w", "gamma0"}, {}, {}, "generalized SSH with an exceptional gapless point"},
        {Family::measurement, {"L", "Gamma"}, {{"t", 1.0}}, {}, "no-jump chain under two-site wave-packet monitoring"},
    };
    return catalog;
}

const FamilyInfo& family_info(Family f) {
    for (const auto& info : family_catalog())
        if (info.family == f) return info;
    throw ConfigError("unknown family");
}

ModelSpec complete(const ModelSpec& spec) {
    const auto& info = family_info(spec.family);
    ModelSpec out = spec;
    std::set<std::string> known(info.required.begin(), info.required.end());
    for (const auto& [k, v] : info.defaults) {
        known.insert(k);
        out.params.try_emplace(k, v);
    }
    for (const auto& name : info.required)
        if (!spec.params.count(name))
            throw ConfigError("model " + to_string(spec.family) + ": missing parameter '" + name + "'");
    for (const auto& [k, v] : spec.params) {
        if (!known.count(k)) throw ConfigError("model " + to_string(spec.family) + ": unknown parameter '" + k + "'");
        if (!std::isfinite(v)) throw ConfigError("model " + to_string(spec.family) + ": parameter '" + k + "' not finite");
    }
    for (const auto& [k, allowed] : info.options) {
        auto it = out.options.find(k);
        if (it == out.options.end()) {
            out.options[k] = allowed.front();
        } else if (std::find(allowed.begin(), allowed.end(), it->second) == allowed.end()) {
            throw ConfigError("model " + to_string(spec.family) + ": option " + k + " = '" + it->second + "' not allowed");
        }
    }
    for (const auto& [k, v] : spec.options)
        if (!info.options.count(k)) throw ConfigError("model " + to_string(spec.family) + ": unknown option '" + k + "'");
    return out;
}

KernelMatrix build(const ModelSpec& raw) {
    const ModelSpec s = complete(raw);
    switch (s.family) {
    case Family::hatano_nelson:
        return build_hatano_nelson(int_param(s, "L"), param(s, "t"), param(s, "alpha"), s.bc);
    case Family::nh_ssh:
        return build_nh_ssh_real(int_param(s, "N_cells"), param(s, "omega"), param(s, "upsilon"), param(s, "u"), s.bc);
    case Family::quasicrystal: {
        const int L = int_param(s, "L");
        long p = static_cast<long>(param(s, "p"));
        if (p == 0) p = fibonacci_partner(L);
        const auto variant = s.options.at("variant") == "exp_phase" ? QuasicrystalVariant::exp_phase
                                                                     : QuasicrystalVariant::mobility_edge;
        return build_quasicrystal(L, param(s, "J_L"), param(s, "J_R"), param(s, "V"), Rational{p, L}, variant,
                                  param(s, "a"), s.bc);
    }
    case Family::guo_chain:
        return build_guo_chain(int_param(s, "L"), int_param(s, "n"), param(s, "t"), param(s, "gamma"), s.bc);
    case Family::guo_2d:
        return build_guo_2d(int_param(s, "Lx"), int_param(s, "Ly"), param(s, "gamma"), s.bc);
    case Family::chern_ribbon:
        return build_chern_ribbon(int_param(s, "L"), param(s, "k_perp"), param(s, "t"), param(s, "m"),
                                  param(s, "gamma"), s.options.at("cut_axis") == "x" ? Axis::x : Axis::y);
    case Family::eb_ssh:
        return build_eb_ssh(int_param(s, "L"), param(s, "nu"), param(s, "w"), param(s, "gamma0"), s.bc);
    case Family::measurement:
        return build_measurement_heff(int_param(s, "L"), param(s, "t"), param(s, "Gamma"), s.bc);
    }
    throw ConfigError("unhandled family");
}

KernelMatrix build_hatano_nelson(int L, double t, double alpha, Boundary bc) {
    if (L < 2) throw SizeError("hatano_nelson: L must be >= 2");
    KernelMatrix K = empty_kernel(L, bc, 1);
    const cplx fwd = -t * std::exp(alpha), bwd = -t * std::exp(-alpha);
    for (int x = 0; x < L; ++x) {
        const bool wraps = x == L - 1;
        if (wraps && bc == Boundary::open) continue;
        add_bond(K, x, (x + 1) % L, fwd, bwd, wraps);
    }
    return K;
}

KernelMatrix build_nh_ssh_real(int n_cells, double omega, double upsilon, double u, Boundary bc) {
    if (n_cells < 2) throw SizeError("nh_ssh: N_cells must be >= 2");
    const int n = 2 * n_cells;
    KernelMatrix K = empty_kernel(n, bc, 2);
    for (int j = 0; j < n; ++j) K.entries(j, j) = (j % 2 == 0 ? 1.0 : -1.0) * u * I1;
    for (int c = 0; c < n_cells; ++c) {
        add_bond(K, 2 * c, 2 * c + 1, omega, omega, false);
        add_bond(K, 2 * c + 1, (2 * c + 2) % n, upsilon, upsilon, c == n_cells - 1);
    }
    return K;
}

BlochPair build_nh_ssh_bloch(double k, double omega, double upsilon, double u) {
    const cplx vk = omega * std::exp(-I1 * k) + upsilon;
    BlochPair out;
    out.h << I1 * u, vk, std::conj(vk), -I1 * u;
    const cplx e = std::sqrt(cplx(std::norm(vk) - u * u, 0.0));
    out.energies = {e, -e};
    return out;
}

long fibonacci_partner(long L) {
    long a = 1, b = 1;
    while (b < L) {
        const long c = a + b;
        a = b;
        b = c;
    }
    if (b != L) throw SizeError("quasicrystal: L = " + std::to_string(L) + " is not a Fibonacci number");
    return a;
}

KernelMatrix build_quasicrystal(int L, double J_L, double J_R, double V, Rational alpha,
                                QuasicrystalVariant variant, double a, Boundary bc) {
    if (L < 2) throw SizeError("quasicrystal: L must be >= 2");
    KernelMatrix K = empty_kernel(L, bc, 1);
    for (int n = 0; n < L; ++n) {
        const double phase = 2.0 * kPi * alpha.value() * n;
        if (variant == QuasicrystalVariant::exp_phase) {
            K.entries(n, n) = V * std::exp(-I1 * phase);
        } else {
            const cplx denom = 1.0 - a * std::exp(I1 * phase);
            if (std::abs(denom) < 1e-12)
                throw SingularPotentialError("quasicrystal: 1 - a e^{i 2 pi alpha n} vanishes at n = " +
                                             std::to_string(n));
            K.entries(n, n) = V / denom;
        }
    }
    // J_R moves a particle n -> n+1 (c_{n+1}^dag c_n), J_L the reverse.
    for (int n = 0; n < L; ++n) {
        const bool wraps = n == L - 1;
        if (wraps && bc == Boundary::open) continue;
        add_bond(K, n, (n + 1) % L, J_L, J_R, wraps);
    }
    return K;
}

KernelMatrix build_guo_chain(int L, int n, double t, double gamma, Boundary bc) {
    if (n < 1 || L < 2 || L % n != 0) throw SizeError("guo_chain: L must be a positive multiple of n");
    KernelMatrix K = empty_kernel(L, bc, n);
    const double tl = 1.0 + gamma / 2.0, tr = 1.0 - gamma / 2.0;
    for (int i = 0; i < L; ++i) {
        const bool wraps = i == L - 1;
        if (wraps && bc == Boundary::open) continue;
        const bool first = i % n == 0;
        add_bond(K, i, (i + 1) % L, first ? tl : t, first ? tr : t, wraps);
    }
    return K;
}

KernelMatrix build_guo_2d(int Lx, int Ly, double gamma, Boundary bc) {
    if (Lx < 2 || Ly < 2 || Lx % 2 || Ly % 2) throw SizeError("guo_2d: Lx and Ly must be even and >= 2");
    const int n = Lx * Ly;
    KernelMatrix K;
    K.entries = CMatrix::Zero(n, n);
    K.bc = bc;
    K.labels.resize(n);
    const double tl = 1.0 + gamma / 2.0, tr = 1.0 - gamma / 2.0;
    auto idx = [Lx](int x, int y) { return x + Lx * y; };
    for (int y = 0; y < Ly; ++y)
        for (int x = 0; x < Lx; ++x) K.labels[idx(x, y)] = {y, x};
    for (int y = 0; y < Ly; ++y) {
        for (int x = 0; x < Lx; ++x) {
            const bool first = x % 2 == 0;
            const bool wraps = x == Lx - 1;
            if (!(wraps && bc == Boundary::open))
                add_bond(K, idx(x, y), idx((x + 1) % Lx, y), first ? tl : 1.0, first ? tr : 1.0, wraps);
        }
    }
    for (int x = 0; x < Lx; ++x) {
        for (int y = 0; y < Ly; ++y) {
            const bool first = y % 2 == 0;
            const bool wraps = y == Ly - 1;
            if (!(wraps && bc == Boundary::open))
                add_bond(K, idx(x, y), idx(x, (y + 1) % Ly), first ? tl : 1.0, first ? tr : 1.0, wraps);
        }
    }
    return K;
}

Eigen::Matrix2cd chern_bloch(double kx, double ky, double t, double m, double gamma) {
    return (m + t * std::cos(kx) + t * std::cos(ky)) * pauli_x() + (I1 * gamma + t * std::sin(kx)) * pauli_y() +
           (t * std::sin(ky)) * pauli_z();
}

KernelMatrix build_chern_ribbon(int L, double k_perp, double t, double m, double gamma, Axis cut_axis) {
    if (L < 2) throw SizeError("chern_ribbon: L must be >= 2");
    // Fourier blocks along the open axis; cos -> (e^{ik}+e^{-ik})/2, sin -> (e^{ik}-e^{-ik})/2i.
    const cplx half = 0.5, halfi = 1.0 / (2.0 * I1);
    Eigen::Matrix2cd a0, ap, am;
    if (cut_axis == Axis::x) {
        a0 = (m + t * std::cos(k_perp)) * pauli_x() + (I1 * gamma + t * std::sin(k_perp)) * pauli_y();
        ap = t * half * pauli_x() + t * halfi * pauli_z();
        am = t * half * pauli_x() - t * halfi * pauli_z();
    } else {
        a0 = (m + t * std::cos(k_perp)) * pauli_x() + I1 * gamma * pauli_y() + t * std::sin(k_perp) * pauli_z();
        ap = t * half * pauli_x() + t * halfi * pauli_y();
        am = t * half * pauli_x() - t * halfi * pauli_y();
    }
    return chain_from_bloch_blocks(L, am, a0, ap, Boundary::open);
}

Eigen::Matrix2cd eb_bloch(double k, double nu, double w, double gamma0) {
    return (nu - w * std::cos(k)) * pauli_x() + gamma0 * std::sin(k) * pauli_z() + I1 * (nu - w) * pauli_y();
}

KernelMatrix build_eb_ssh(int L, double nu, double w, double gamma0, Boundary bc) {
    if (L < 2) throw SizeError("eb_ssh: L must be >= 2");
    const cplx halfi = 1.0 / (2.0 * I1);
    const Eigen::Matrix2cd a0 = nu * pauli_x() + I1 * (nu - w) * pauli_y();
    const Eigen::Matrix2cd ap = -0.5 * w * pauli_x() + gamma0 * halfi * pauli_z();
    const Eigen::Matrix2cd am = -0.5 * w * pauli_x() - gamma0 * halfi * pauli_z();
    return chain_from_bloch_blocks(L, am, a0, ap, bc);
}

KernelMatrix build_measurement_heff(int L, double t, double Gamma, Boundary bc) {
    if (L < 2) throw SizeError("measurement: L must be >= 2");
    KernelMatrix K = empty_kernel(L, bc, 1);
    for (int i = 0; i < L; ++i) {
        const bool wraps = i == L - 1;
        if (wraps && bc == Boundary::open) continue;
        const int j = (i + 1) % L;
        add_bond(K, i, j, (-t + Gamma) / 4.0, -(t + Gamma) / 4.0, wraps);
        K.entries(i, i) += -I1 * Gamma / 4.0;
        K.entries(j, j) += -I1 * Gamma / 4.0;
    }
    return K;
}

KernelMatrix build_heff_from_jumps(const KernelMatrix& H, const std::vector<Jump>& jumps,
                                   const std::vector<double>& rates) {
    if (jumps.size() != rates.size()) throw ConfigError("heff: one rate per jump operator required");
    KernelMatrix out = H;
    for (std::size_t a = 0; a < jumps.size(); ++a) {
        const auto& j = jumps[a];
        if (j.u.size() != H.dim()) throw SizeError("heff: jump vector length differs from kernel dimension");
        if (rates[a] < 0) throw ConfigError("heff: rates must be non-negative");
        if (j.kind == Jump::Kind::projector) {
            if (std::abs(j.u.norm() - 1.0) > 1e-12)
                throw NormalizationError("heff: projector vector has norm " + std::to_string(j.u.norm()));
            out.entries += (-0.5 * I1 * rates[a]) * (j.u * j.u.adjoint());
        } else {
            out.entries += (-0.5 * I1 * rates[a]) * (j.u * j.u.adjoint()).conjugate();
        }
    }
    return out;
}

KernelMatrix chain_from_bloch_blocks(int n_cells, const Eigen::MatrixXcd& a_minus, const Eigen::MatrixXcd& a0,
                                     const Eigen::MatrixXcd& a_plus, Boundary bc) {
    const int nb = static_cast<int>(a0.rows());
    KernelMatrix K = empty_kernel(n_cells * nb, bc, nb);
    for (int c = 0; c < n_cells; ++c) {
        K.entries.block(c * nb, c * nb, nb, nb) += a0;
        const bool wraps = c == n_cells - 1;
        if (wraps && bc == Boundary::open) continue;
        const int d = (c + 1) % n_cells;
        const double s = wraps ? wrap_sign(bc) : 1.0;
        K.entries.block(c * nb, d * nb, nb, nb) += s * a_plus;
        K.entries.block(d * nb, c * nb, nb, nb) += s * a_minus;
    }
    return K;
}

std::vector<double> momentum_grid(int n_cells, Boundary bc) {
    if (bc == Boundary::open) throw UnsupportedError("momentum grid requires a periodic or antiperiodic chain");
    const double phi = bc == Boundary::antiperiodic ? kPi : 0.0;
    std::vector<double> ks(n_cells);
    for (int m = 0; m < n_cells; ++m) ks[m] = (2.0 * kPi * m + phi) / n_cells;
    return ks;
}

CMatrix bloch_reduce(const KernelMatrix& K, double k) {
    if (K.bc == Boundary::open) throw UnsupportedError("bloch_reduce requires a periodic or antiperiodic kernel");
    const int nb = K.sublattices();
    CMatrix h = CMatrix::Zero(nb, nb);
    std::vector<int> origin(nb, -1);
    for (int i = 0; i < K.dim(); ++i)
        if (K.labels[i].cell == 0) origin[K.labels[i].sub] = i;
    for (int s = 0; s < nb; ++s) {
        for (int j = 0; j < K.dim(); ++j) {
            const auto& l = K.labels[j];
            h(s, l.sub) += K.entries(origin[s], j) * std::exp(I1 * (k * l.cell));
        }
    }
    return h;
}

} // namespace nhent
