#pragma once

#include "nhent/types.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace nhent {

enum class Family { hatano_nelson, nh_ssh, quasicrystal, guo_chain, guo_2d, chern_ribbon, eb_ssh, measurement };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct ModelSpec {
    Family family = Family::hatano_nelson;
    std::map<std::string, double> params;
    std::map<std::string, std::string> options; // variant, cut_axis
    Boundary bc = Boundary::open;
};

struct FamilyInfo {
    Family family;
    std::vector<std::string> required;
    std::map<std::string, double> defaults;
    std::map<std::string, std::vector<std::string>> options;
    std::string summary;
};

const std::vector<FamilyInfo>& family_catalog();
const FamilyInfo& family_info(Family f);

// Fills defaults and throws ConfigError on missing or unknown parameters.
ModelSpec complete(const ModelSpec& spec);
KernelMatrix build(const ModelSpec& spec);

KernelMatrix build_hatano_nelson(int L, double t, double alpha, Boundary bc);
KernelMatrix build_nh_ssh_real(int n_cells, double omega, double upsilon, double u, Boundary bc);

struct BlochPair {
    Eigen::Matrix2cd h;
    std::array<cplx, 2> energies; // (+E, -E) with E the principal square root
};
BlochPair build_nh_ssh_bloch(double k, double omega, double upsilon, double u);

enum class QuasicrystalVariant { exp_phase, mobility_edge };
KernelMatrix build_quasicrystal(int L, double J_L, double J_R, double V, Rational alpha,
                                QuasicrystalVariant variant, double a = 0.0,
                                Boundary bc = Boundary::periodic);
// p with p/L a ratio of consecutive Fibonacci numbers; throws SizeError if L is not Fibonacci.
long fibonacci_partner(long L);

KernelMatrix build_guo_chain(int L, int n, double t, double gamma, Boundary bc);
KernelMatrix build_guo_2d(int Lx, int Ly, double gamma, Boundary bc);

enum class Axis { x, y };
// `cut_axis` stays momentum-resolved at k_perp; the other axis is open with L sites.
KernelMatrix build_chern_ribbon(int L, double k_perp, double t, double m, double gamma, Axis cut_axis);
Eigen::Matrix2cd chern_bloch(double kx, double ky, double t, double m, double gamma);

KernelMatrix build_eb_ssh(int L, double nu, double w, double gamma0, Boundary bc);
// Bloch form after the sigma_y <-> sigma_z exchange.
Eigen::Matrix2cd eb_bloch(double k, double nu, double w, double gamma0);

KernelMatrix build_measurement_heff(int L, double t, double Gamma, Boundary bc);

struct Jump {
    enum class Kind { linear, projector };
    Kind kind = Kind::linear;
    // linear: L = sum_j u_j c_j. projector: xi^dag = sum_j u_j c_j^dag, P = xi^dag xi.
    CVector u;
};
KernelMatrix build_heff_from_jumps(const KernelMatrix& H, const std::vector<Jump>& jumps,
                                   const std::vector<double>& rates);

// Chain kernel from Fourier blocks: H(k) = sum_R blocks[R] e^{ikR}, R in {-1, 0, 1}.
KernelMatrix chain_from_bloch_blocks(int n_cells, const Eigen::MatrixXcd& a_minus,
                                     const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& a_plus, Boundary bc);

// Momentum grid of a translation-invariant chain: k_m = (2 pi m + phi)/n_cells, phi = pi when antiperiodic.
std::vector<double> momentum_grid(int n_cells, Boundary bc);
// H(k)_{ss'} = sum_c K[(0,s),(c,s')] e^{ikc}; exact on the grid returned by momentum_grid.
CMatrix bloch_reduce(const KernelMatrix& K, double k);

} // namespace nhent
