#pragma once

#include <nhent/types.hpp>

#include <algorithm>
#include <random>
#include <vector>

namespace testsupport {

using nhent::CMatrix;
using nhent::cplx;

inline CMatrix random_matrix(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline CMatrix random_hermitian(int n, std::mt19937& rng) {
    const CMatrix a = random_matrix(n, rng);
    return 0.5 * (a + a.adjoint());
}

// Hermitian part plus i*kappa times an independent Hermitian part.
inline CMatrix random_nonhermitian(int n, std::mt19937& rng, double kappa) {
    const CMatrix h = random_hermitian(n, rng);
    const CMatrix v = random_hermitian(n, rng);
    return h + cplx(0.0, kappa) * v;
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Greedy nearest-neighbour multiset distance, both directions.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (const auto& z : a) {
        double best = 1e300;
        std::size_t bi = 0;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (!used[j] && std::abs(z - b[j]) < best) {
                best = std::abs(z - b[j]);
                bi = j;
            }
        used[bi] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

inline std::vector<cplx> to_vec(const nhent::CVector& v) { return {v.data(), v.data() + v.size()}; }

} // namespace testsupport
