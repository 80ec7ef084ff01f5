#pragma once

/*
 * Eigensystem of the momentum coin C_k with branch labeling.
 *
 * Labeling convention:
 *   - 2D/3D Grover coins: analytic frequency ordering (see dispersion.hpp);
 *     numeric eigenpairs are matched to the analytic target phases.
 *   - generic coins: eigenphases sorted ascending in (-pi, pi], ties broken
 *     lexicographically on the eigenvector entries.
 *
 * Eigenvectors inside a degenerate cluster are re-orthonormalized (a plain
 * eigensolver does not guarantee orthogonality there); each vector's global
 * phase is fixed by making its largest-modulus component real-positive.
 */

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/dispersion.hpp"

namespace qwalk {

// Branches closer than this in eigenphase are treated as one degenerate cluster.
constexpr double kDegeneracyTol = 1e-8;

struct EigenSystem {
    KPoint k;
    Eigen::VectorXd omegas;  // branch s (1-based) at index s-1
    Matrix vectors;          // orthonormal columns, same order
    std::vector<std::vector<int>> clusters;  // 0-based branch indices, degenerate groups
};

namespace detail {

inline void fix_global_phase(Eigen::Ref<CVector> v) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best + 1e-12) { best = a; imax = i; }
    }
    const cxd z = v[imax];
    if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
    v.normalize();
}

inline bool lex_less(const CVector& a, const CVector& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

// Raw eigensystem of a unitary matrix: phases omega with lambda = exp(-i omega),
// columns orthonormalized within degenerate clusters, sorted ascending phase.
struct RawEigen {
    Eigen::VectorXd omegas;
    Matrix vectors;
    std::vector<std::vector<int>> clusters;
};

inline RawEigen unitary_eigensystem(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> solver(m, true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensolver failure on momentum coin");
    const int d = int(m.rows());
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    Eigen::VectorXd om(d);
    for (int i = 0; i < d; ++i) om[i] = wrap_phase(-std::arg(solver.eigenvalues()[i]));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(om[a] - om[b]) > 1e-12) return om[a] < om[b];
        return lex_less(solver.eigenvectors().col(a), solver.eigenvectors().col(b));
    });

    RawEigen out;
    out.omegas.resize(d);
    out.vectors.resize(d, d);
    for (int i = 0; i < d; ++i) {
        out.omegas[i] = om[order[i]];
        out.vectors.col(i) = solver.eigenvectors().col(order[i]);
    }

    // Cluster consecutive phases (circularly, so -pi and pi join).
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < d; ++i) {
        if (!clusters.empty() &&
            circular_distance(out.omegas[i], out.omegas[clusters.back().back()]) < kDegeneracyTol)
            clusters.back().push_back(i);
        else
            clusters.push_back({i});
    }
    if (clusters.size() > 1 &&
        circular_distance(out.omegas[clusters.front().front()],
                          out.omegas[clusters.back().back()]) < kDegeneracyTol) {
        for (int i : clusters.back()) clusters.front().push_back(i);
        clusters.pop_back();
    }

    for (auto& cl : clusters) {
        if (cl.size() < 2) continue;
        Matrix block(d, cl.size());
        for (size_t j = 0; j < cl.size(); ++j) block.col(int(j)) = out.vectors.col(cl[j]);
        Eigen::HouseholderQR<Matrix> qr(block);
        Matrix q = qr.householderQ() * Matrix::Identity(d, int(cl.size()));
        for (size_t j = 0; j < cl.size(); ++j) out.vectors.col(cl[j]) = q.col(int(j));
    }
    for (int i = 0; i < d; ++i) fix_global_phase(out.vectors.col(i));
    out.clusters = std::move(clusters);
    return out;
}

inline std::vector<double> analytic_targets(const CoinMatrix& c, const KPoint& k) {
    if (c.id() == "grover" && c.dim_n() == 2) {
        const auto w = grover2d_dispersion(k);
        return {w.begin(), w.end()};
    }
    if (c.id() == "grover" && c.dim_n() == 3) {
        const auto w = grover3d_dispersion(k);
        return {w.begin(), w.end()};
    }
    return {};
}

}  // namespace detail

inline EigenSystem eigensystem_at(const CoinMatrix& c, const KPoint& k) {
    if (k.size() != c.dim_n())
        throw ContractError("invalid-argument: k length does not match coin dimension");
    detail::RawEigen raw = detail::unitary_eigensystem(momentum_coin_entries(c, k));
    const int d = c.size();

    EigenSystem es;
    es.k = k;
    es.omegas.resize(d);
    es.vectors.resize(d, d);

    const std::vector<double> targets = detail::analytic_targets(c, k);
    std::vector<int> perm(d);  // perm[s] = raw index assigned to branch s
    if (!targets.empty()) {
        std::vector<bool> used(d, false);
        for (int s = 0; s < d; ++s) {
            int best = -1;
            double bd = 1e9;
            for (int i = 0; i < d; ++i) {
                if (used[i]) continue;
                const double dd = circular_distance(raw.omegas[i], targets[size_t(s)]);
                if (dd < bd) { bd = dd; best = i; }
            }
            used[best] = true;
            perm[s] = best;
        }
    } else {
        std::iota(perm.begin(), perm.end(), 0);  // ascending phase order
    }

    std::vector<int> inv(d);
    for (int s = 0; s < d; ++s) {
        es.omegas[s] = !targets.empty() ? wrap_phase(targets[size_t(s)]) : raw.omegas[perm[s]];
        es.vectors.col(s) = raw.vectors.col(perm[s]);
        inv[perm[s]] = s;
    }
    for (const auto& cl : raw.clusters) {
        std::vector<int> mapped;
        for (int i : cl) mapped.push_back(inv[i]);
        std::sort(mapped.begin(), mapped.end());
        es.clusters.push_back(std::move(mapped));
    }
    return es;
}

}  // namespace qwalk
