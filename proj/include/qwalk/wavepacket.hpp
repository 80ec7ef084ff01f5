#pragma once

/*
 * Construction of normalized extended initial states: Gaussian and
 * sinc-tapered envelopes times a plane-wave carrier, with the same coin
 * vector at every site.
 */

#include <cmath>
#include <string>
#include <vector>

#include "qwalk/eigensystem.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

enum class EnvelopeKind { kGaussian, kGaussianSinc };

struct WavePacketSpec {
    EnvelopeKind envelope = EnvelopeKind::kGaussian;
    double sigma = 0;
    double sigma0 = 0;            // sinc scale, gaussian-sinc only
    KPoint k0;                    // carrier wavevector
    CVector coin;                 // normalized coin vector applied at every site
    std::vector<long> center;     // lattice coordinates of the envelope center
};

// The coin state (1/2)(1,1,-1,-1): equal superposition of the two conical
// branches at the 2D central degeneracy, orthogonal to both flat bands.
inline CVector diabolo_coin_state() {
    CVector v(4);
    v << 0.5, 0.5, -0.5, -0.5;
    return v;
}

// Eigenvector of C_{k0} for branch s (1-based), deterministic global phase.
inline CVector branch_coin_at(const CoinMatrix& c, const KPoint& k0, int s) {
    const EigenSystem es = eigensystem_at(c, k0);
    if (s < 1 || s > c.size())
        throw ContractError("invalid-argument: branch index out of range");
    for (const auto& cl : es.clusters) {
        if (cl.size() < 2) continue;
        for (int idx : cl)
            if (idx == s - 1)
                throw ContractError(
                    "ambiguous-branch: requested branch is degenerate at k0; "
                    "supply an explicit coin vector instead");
    }
    return es.vectors.col(s - 1);
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        const double y = M_PI * x;
        return 1.0 - y * y / 6.0;
    }
    return std::sin(M_PI * x) / (M_PI * x);
}

inline LatticeField build_packet(const WavePacketSpec& spec, const std::vector<int>& box,
                                 int threads = 1) {
    const int n = int(box.size());
    if (spec.sigma <= 0) throw ContractError("invalid-argument: sigma must be positive");
    if (spec.envelope == EnvelopeKind::kGaussianSinc && spec.sigma0 <= 0)
        throw ContractError("invalid-argument: sigma0 must be positive");
    if (spec.k0.size() != n)
        throw ContractError("invalid-argument: k0 length does not match box dimension");
    if (spec.coin.size() != 2 * n)
        throw ContractError("invalid-argument: coin vector length must be 2N");
    if (std::abs(spec.coin.norm() - 1.0) > 1e-12)
        throw ContractError("invalid-argument: coin vector must be normalized");

    LatticeField f = make_field(n, box);
    std::vector<long> center = spec.center;
    if (center.empty()) center.assign(std::size_t(n), 0);  // box center is coordinate 0
    if (int(center.size()) != n)
        throw ContractError("invalid-argument: center length does not match dimension");

    const auto strides = detail::site_strides(f.shape);
    const int nc = f.ncomp();
    parallel_for(f.nsites(), threads, [&](std::size_t b, std::size_t e) {
        std::vector<int> coords(static_cast<std::size_t>(n), 0);
        for (std::size_t site = b; site < e; ++site) {
            detail::site_coords(site, strides, f.shape, coords);
            double r2 = 0, phase = 0, taper = 1.0;
            for (int a = 0; a < n; ++a) {
                const double x = double(f.origin[std::size_t(a)] + coords[std::size_t(a)]);
                const double dx = x - double(center[std::size_t(a)]);
                r2 += dx * dx;
                phase += spec.k0[a] * x;
                if (spec.envelope == EnvelopeKind::kGaussianSinc)
                    taper *= sinc(dx / spec.sigma0);
            }
            const cxd amp = taper * std::exp(-r2 / (2.0 * spec.sigma * spec.sigma)) *
                            std::polar(1.0, phase);
            for (int j = 0; j < nc; ++j)
                f.amp[site * std::size_t(nc) + std::size_t(j)] = amp * spec.coin[j];
        }
    });

    const double norm = std::sqrt(f.norm2());
    if (norm <= 0) throw NumericalError("degenerate packet: zero norm");
    for (cxd& z : f.amp) z /= norm;

    if (wrap_risk(probability_field(f)) && diag_stream())
        *diag_stream() << "warning: wrap-risk: packet tail reaches the box edge\n";
    return f;
}

}  // namespace qwalk
