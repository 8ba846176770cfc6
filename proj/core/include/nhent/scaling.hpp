#pragma once

#include "nhent/ent.hpp"
#include "nhent/spectra.hpp"
#include "nhent/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace nhent {

enum class Geometry { chord, open_log };
std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

struct SeriesPoint {
    int la = 0;
    cplx s;
};

// chord: x = ln sin(pi L_A / L). open_log: x = ln L_A (L_A may be a system size);
// total_length = 0 disables the upper window cut for open_log series.
struct ScalingSeries {
    int total_length = 0;
    std::vector<SeriesPoint> points;
    Geometry geometry = Geometry::chord;

    void validate() const;
};

struct FitOptions {
    int la_min = 4;
    int la_max = -1; // -1: total_length - 4
    double imag_tol = 1e-6;
    int min_points = 4;
};

struct FitResult {
    double c = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::pair<int, int> window{0, 0};
    int points_used = 0;
    std::vector<int> rejected; // L_A values dropped for |Im S| > imag_tol
    double shrink_delta = 0.0; // |c change| when the window loses one point at each end
    bool robust = true;
};

FitResult fit_central_charge(const ScalingSeries& series, const FitOptions& opt = {});

// S(L_A) for contiguous blocks of la cells starting at cell 0.
ScalingSeries entropy_series(const BiorthogonalSystem& sys, const GroundStateSelection& sel, int sites_per_cell,
                             int total_cells, const std::vector<int>& la_cells, Geometry geometry,
                             const EntOptions& opt = {}, int workers = 1);

struct BandStructure {
    std::vector<double> k;
    std::vector<std::vector<cplx>> energies; // [k][band], bands continued across k
};

BandStructure band_structure(const KernelMatrix& K);
int count_fermi_points(const BandStructure& bands, Rational filling);
int count_fermi_points(const KernelMatrix& K, Rational filling);

struct LifshitzResult {
    double gamma_c = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int nf_below = 0;
    int nf_above = 0;
    bool found = false;
};

// Scans upward in `step` until N_f changes, then bisects to `tol`.
LifshitzResult lifshitz_scan(const std::function<int(double)>& nf_of_gamma, double lo, double hi, double step,
                             double tol = 1e-6);

} // namespace nhent
