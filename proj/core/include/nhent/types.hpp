#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace nhent {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class Boundary { open, periodic, antiperiodic };

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& s);

struct SiteLabel {
    int cell = 0;
    int sub = 0;
    bool operator==(const SiteLabel&) const = default;
};

// Dense single-particle kernel H_ij of H = sum_ij c_i^dag H_ij c_j.
struct KernelMatrix {
    CMatrix entries;
    Boundary bc = Boundary::open;
    std::vector<SiteLabel> labels;
    bool momentum_basis = false;

    int dim() const { return static_cast<int>(entries.rows()); }
    int cells() const;
    int sublattices() const;
};

struct Rational {
    long num = 1;
    long den = 2;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational parse_rational(const std::string& s);

struct Warning {
    std::string code;
    std::string message;
};

} // namespace nhent
