#pragma once

/*
 * Lattice states and their exact evolution.
 *
 * A LatticeField stores psi_{x,t}^{alpha,eta} on a periodic box, site-major
 * with the 2N coin components fastest. Coordinates are x = origin + index.
 *
 * Two backends implement the same map:
 *   step_position  — psi_{x,t+1}^{a,eta} = sum C^{a,eta}_{a',eta'} psi_{x - eta u_a, t}^{a',eta'}
 *   evolve_spectral — DFT, apply C_k^t through its eigendecomposition, inverse DFT.
 */

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/eigensystem.hpp"
#include "qwalk/fft.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

inline std::ostream*& diag_stream() {
    static std::ostream* s = &std::cerr;
    return s;
}

struct LatticeField {
    int dim_n = 0;
    std::vector<int> shape;      // per-axis site counts
    std::vector<long> origin;    // coordinate of index 0 per axis
    long time = 0;
    std::vector<cxd> amp;        // site-major, coin component fastest

    int ncomp() const { return 2 * dim_n; }
    std::size_t nsites() const {
        std::size_t n = 1;
        for (int s : shape) n *= std::size_t(s);
        return n;
    }
    double norm2() const {
        double s = 0;
        for (const cxd& z : amp) s += std::norm(z);
        return s;
    }
};

struct ProbabilityField {
    int dim_n = 0;
    std::vector<int> shape;
    std::vector<long> origin;
    long time = 0;
    std::vector<double> values;

    double total() const {
        double s = 0;
        for (double v : values) s += v;
        return s;
    }
};

struct MomentSummary {
    double total = 0;
    Eigen::VectorXd centroid;
    Eigen::MatrixXd covariance;
};

inline LatticeField make_field(int dim_n, std::vector<int> shape,
                               std::vector<long> origin = {}) {
    if (dim_n < 1) throw ContractError("invalid-dimension: field dimension must be >= 1");
    if (int(shape.size()) != dim_n) throw ContractError("shape length must equal dim_n");
    for (int s : shape)
        if (s <= 0) throw ContractError("shape must be strictly positive");
    LatticeField f;
    f.dim_n = dim_n;
    f.shape = std::move(shape);
    if (origin.empty()) {
        for (int s : f.shape) origin.push_back(-long(s) / 2);
    }
    if (int(origin.size()) != dim_n) throw ContractError("origin length must equal dim_n");
    f.origin = std::move(origin);
    f.amp.assign(f.nsites() * std::size_t(f.ncomp()), cxd(0, 0));
    return f;
}

namespace detail {

// Row-major strides over the site index (coin component excluded).
inline std::vector<std::size_t> site_strides(const std::vector<int>& shape) {
    std::vector<std::size_t> st(shape.size());
    std::size_t acc = 1;
    for (int a = int(shape.size()) - 1; a >= 0; --a) {
        st[std::size_t(a)] = acc;
        acc *= std::size_t(shape[std::size_t(a)]);
    }
    return st;
}

inline void site_coords(std::size_t idx, const std::vector<std::size_t>& strides,
                        const std::vector<int>& shape, std::vector<int>& out) {
    for (std::size_t a = 0; a < shape.size(); ++a) {
        out[a] = int(idx / strides[a]);
        idx %= strides[a];
    }
}

}  // namespace detail

inline LatticeField step_position(const LatticeField& state, const CoinMatrix& c,
                                  int threads = 1) {
    if (state.dim_n != c.dim_n())
        throw ContractError("invalid-argument: state and coin dimensions differ");
    const int nc = state.ncomp();
    LatticeField out = state;
    out.time = state.time + 1;
    const auto strides = detail::site_strides(state.shape);
    const std::size_t nsites = state.nsites();
    const Matrix& cm = c.entries();

    parallel_for(nsites, threads, [&](std::size_t b, std::size_t e) {
        std::vector<int> coords(std::size_t(state.dim_n));
        for (std::size_t site = b; site < e; ++site) {
            detail::site_coords(site, strides, state.shape, coords);
            for (int row = 0; row < nc; ++row) {
                const int axis = coin_axis(row);
                const int eta = coin_eta(row);
                int src = coords[std::size_t(axis)] - eta;
                const int len = state.shape[std::size_t(axis)];
                if (src < 0) src += len;
                if (src >= len) src -= len;
                const std::size_t neighbor =
                    site + std::size_t(long(src) - long(coords[std::size_t(axis)])) *
                               strides[std::size_t(axis)];
                cxd acc(0, 0);
                const cxd* in = &state.amp[neighbor * std::size_t(nc)];
                for (int col = 0; col < nc; ++col) acc += cm(row, col) * in[col];
                out.amp[site * std::size_t(nc) + std::size_t(row)] = acc;
            }
        }
    });
    return out;
}

inline LatticeField evolve_spectral(const LatticeField& state, const CoinMatrix& c,
                                    long steps, int threads = 1) {
    if (state.dim_n != c.dim_n())
        throw ContractError("invalid-argument: state and coin dimensions differ");
    if (steps < 0) throw ContractError("invalid-argument: steps must be non-negative");
    LatticeField out = state;
    if (steps == 0) return out;
    const int nc = state.ncomp();
    dft_inplace(out.amp, out.shape, nc, FFTW_FORWARD);

    const auto strides = detail::site_strides(state.shape);
    const std::size_t nsites = state.nsites();
    parallel_for(nsites, threads, [&](std::size_t b, std::size_t e) {
        std::vector<int> coords(std::size_t(state.dim_n));
        KPoint k(state.dim_n);
        CVector psi(nc), tmp(nc);
        for (std::size_t site = b; site < e; ++site) {
            detail::site_coords(site, strides, state.shape, coords);
            for (int a = 0; a < state.dim_n; ++a)
                k[a] = 2.0 * M_PI * double(coords[std::size_t(a)]) /
                       double(state.shape[std::size_t(a)]);
            const detail::RawEigen es = detail::unitary_eigensystem(momentum_coin_entries(c, k));
            for (int j = 0; j < nc; ++j) psi[j] = out.amp[site * std::size_t(nc) + std::size_t(j)];
            tmp = es.vectors.adjoint() * psi;
            for (int s = 0; s < nc; ++s)
                tmp[s] *= std::polar(1.0, -es.omegas[s] * double(steps));
            psi = es.vectors * tmp;
            for (int j = 0; j < nc; ++j) out.amp[site * std::size_t(nc) + std::size_t(j)] = psi[j];
        }
    });

    dft_inplace(out.amp, out.shape, nc, FFTW_BACKWARD);
    out.time = state.time + steps;
    return out;
}

inline ProbabilityField probability_field(const LatticeField& state) {
    ProbabilityField p;
    p.dim_n = state.dim_n;
    p.shape = state.shape;
    p.origin = state.origin;
    p.time = state.time;
    const int nc = state.ncomp();
    p.values.resize(state.nsites());
    for (std::size_t site = 0; site < p.values.size(); ++site) {
        double s = 0;
        for (int j = 0; j < nc; ++j) s += std::norm(state.amp[site * std::size_t(nc) + std::size_t(j)]);
        p.values[site] = s;
    }
    return p;
}

inline MomentSummary moments(const ProbabilityField& p) {
    MomentSummary m;
    m.total = p.total();
    if (m.total <= 0)
        throw ContractError("degenerate-field: probability field has zero total");
    const int n = p.dim_n;
    m.centroid = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
    const auto strides = detail::site_strides(p.shape);
    std::vector<int> coords(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd x(n);
    for (std::size_t site = 0; site < p.values.size(); ++site) {
        const double w = p.values[site];
        if (w == 0) continue;
        detail::site_coords(site, strides, p.shape, coords);
        for (int a = 0; a < n; ++a)
            x[a] = double(p.origin[std::size_t(a)] + coords[std::size_t(a)]);
        m.centroid += w * x;
        second += w * x * x.transpose();
    }
    m.centroid /= m.total;
    m.covariance = second / m.total - m.centroid * m.centroid.transpose();
    return m;
}

// Keeps only the components along the requested branches (1-based labels).
// At a degenerate k-point any orthonormal basis of the cluster eigenspace
// consists of genuine eigenvectors, so the deterministic labeled vectors are
// used there too: completeness and per-branch weight additivity then hold
// exactly, and a single grid point's attribution choice has measure zero.
inline LatticeField project_onto_branches(const LatticeField& state, const CoinMatrix& c,
                                          const std::set<int>& branches, int threads = 1) {
    if (state.dim_n != c.dim_n())
        throw ContractError("invalid-argument: state and coin dimensions differ");
    const int nc = state.ncomp();
    for (int s : branches)
        if (s < 1 || s > nc)
            throw ContractError("invalid-argument: branch index out of range");
    LatticeField out = state;
    dft_inplace(out.amp, out.shape, nc, FFTW_FORWARD);

    const auto strides = detail::site_strides(state.shape);
    parallel_for(state.nsites(), threads, [&](std::size_t b, std::size_t e) {
        std::vector<int> coords(std::size_t(state.dim_n));
        KPoint k(state.dim_n);
        CVector psi(nc), res(nc);
        for (std::size_t site = b; site < e; ++site) {
            detail::site_coords(site, strides, state.shape, coords);
            for (int a = 0; a < state.dim_n; ++a)
                k[a] = 2.0 * M_PI * double(coords[std::size_t(a)]) /
                       double(state.shape[std::size_t(a)]);
            const EigenSystem es = eigensystem_at(c, k);
            for (int j = 0; j < nc; ++j) psi[j] = out.amp[site * std::size_t(nc) + std::size_t(j)];
            res.setZero();
            for (int s : branches)
                res += es.vectors.col(s - 1) * (es.vectors.col(s - 1).adjoint() * psi);
            for (int j = 0; j < nc; ++j) out.amp[site * std::size_t(nc) + std::size_t(j)] = res[j];
        }
    });

    dft_inplace(out.amp, out.shape, nc, FFTW_BACKWARD);
    return out;
}

// Translates the state by an integer vector on the periodic box.
inline LatticeField translate(const LatticeField& state, const std::vector<long>& d) {
    if (int(d.size()) != state.dim_n) throw ContractError("invalid-argument: bad shift length");
    LatticeField out = state;
    const auto strides = detail::site_strides(state.shape);
    const int nc = state.ncomp();
    std::vector<int> coords(std::size_t(state.dim_n));
    for (std::size_t site = 0; site < state.nsites(); ++site) {
        detail::site_coords(site, strides, state.shape, coords);
        std::size_t dst = 0;
        for (int a = 0; a < state.dim_n; ++a) {
            const long len = state.shape[std::size_t(a)];
            long nc2 = (coords[std::size_t(a)] + d[std::size_t(a)]) % len;
            if (nc2 < 0) nc2 += len;
            dst += std::size_t(nc2) * strides[std::size_t(a)];
        }
        for (int j = 0; j < nc; ++j)
            out.amp[dst * std::size_t(nc) + std::size_t(j)] =
                state.amp[site * std::size_t(nc) + std::size_t(j)];
    }
    return out;
}

// True if any probability within 3 sites of the box edge exceeds 1e-8.
inline bool wrap_risk(const ProbabilityField& p) {
    const auto strides = detail::site_strides(p.shape);
    std::vector<int> coords(std::size_t(p.dim_n));
    for (std::size_t site = 0; site < p.values.size(); ++site) {
        if (p.values[site] <= 1e-8) continue;
        detail::site_coords(site, strides, p.shape, coords);
        for (int a = 0; a < p.dim_n; ++a) {
            const int x = coords[std::size_t(a)];
            if (x < 3 || x >= p.shape[std::size_t(a)] - 3) return true;
        }
    }
    return false;
}

}  // namespace qwalk
