#pragma once

/*
 * Second-order continuum model of a narrow-spectrum packet: carrier at k0,
 * envelope advected at the group velocity and dispersed by the Hessian of
 * the branch frequency. The envelope equation
 *     i dA/dt = -(1/2) sum_ij w_ij d^2 A / dX_i dX_j
 * is solved exactly in k-space by the multiplier exp(-(i/2) k.w.k t).
 */

#include <cmath>
#include <sstream>
#include <string>

#include "qwalk/degeneracy.hpp"
#include "qwalk/dispersion.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/wavepacket.hpp"

namespace qwalk {

struct ContinuumCoefficients {
    KPoint k0;
    int branch = 0;            // 1-based
    double omega0 = 0;         // branch frequency at k0
    Eigen::VectorXd v_g;       // group velocity
    Eigen::MatrixXd hessian;   // symmetric dispersion curvature
};

struct Envelope {
    int dim_n = 0;
    std::vector<int> shape;
    std::vector<long> origin;
    double time = 0;
    Eigen::VectorXd frame_shift;  // accumulated v_g * t (co-moving frame)
    std::vector<cxd> values;

    std::size_t nsites() const {
        std::size_t n = 1;
        for (int s : shape) n *= std::size_t(s);
        return n;
    }
    double norm2() const {
        double s = 0;
        for (const cxd& z : values) s += std::norm(z);
        return s;
    }
};

namespace detail {

inline double branch_omega(const CoinMatrix& c, const KPoint& k, int s) {
    return eigensystem_at(c, k).omegas[s - 1];
}

}  // namespace detail

// Taylor coefficients of branch s about k0. Closed-form for the Grover 2D/3D
// dispersions, finite differences otherwise. Refuses points too close to a
// degeneracy, where the expansion does not exist.
inline ContinuumCoefficients continuum_coefficients(const CoinMatrix& c, const KPoint& k0,
                                                    int s, double h = 1e-4) {
    if (k0.size() != c.dim_n())
        throw ContractError("invalid-argument: k0 length does not match coin dimension");
    if (s < 1 || s > c.size())
        throw ContractError("invalid-argument: branch index out of range");
    {
        // Only degeneracies touching the requested branch spoil its expansion.
        const EigenSystem es = eigensystem_at(c, k0);
        double gap = 2.0 * M_PI;
        for (int j = 0; j < c.size(); ++j)
            if (j != s - 1)
                gap = std::min(gap, circular_distance(es.omegas[s - 1], es.omegas[j]));
        if (gap < 10.0 * h)
            throw ContractError(
                "regularity-violation: k0 is within 10 finite-difference steps of a "
                "degeneracy of the requested branch; the quadratic expansion does not "
                "apply there");
    }

    ContinuumCoefficients out;
    out.k0 = k0;
    out.branch = s;
    const int n = c.dim_n();

    const bool grover2 = (c.id() == "grover" && n == 2);
    const bool grover3 = (c.id() == "grover" && n == 3);

    BranchFunction omega;
    if (grover2)
        omega = [s](const KPoint& k) { return grover2d_dispersion(k)[std::size_t(s - 1)]; };
    else if (grover3)
        omega = [s](const KPoint& k) { return grover3d_dispersion(k)[std::size_t(s - 1)]; };
    else
        omega = [&c, s](const KPoint& k) { return detail::branch_omega(c, k, s); };

    out.omega0 = omega(k0);

    if (grover2 && (s == 1 || s == 2)) {
        out.v_g = grover2d_group_velocity(k0, s);
    } else if (grover2) {
        out.v_g = Eigen::VectorXd::Zero(2);  // flat bands
    } else if (grover3 && s <= 4) {
        out.v_g = grover3d_group_velocity(k0, s);
    } else if (grover3) {
        out.v_g = Eigen::VectorXd::Zero(3);
    } else {
        out.v_g.resize(n);
        for (int a = 0; a < n; ++a) {
            KPoint kp = k0, km = k0;
            kp[a] += h;
            km[a] -= h;
            out.v_g[a] = (omega(kp) - omega(km)) / (2.0 * h);
        }
    }

    const HessianResult hess = hessian_at(omega, k0, h);
    if (hess.near_singularity)
        throw NumericalError("hessian evaluation unstable near k0 (asymmetry above 1e-5)");
    out.hessian = hess.hessian;
    return out;
}

inline Envelope make_envelope(int dim_n, std::vector<int> shape,
                              std::vector<long> origin = {}) {
    LatticeField f = make_field(dim_n, std::move(shape), std::move(origin));
    Envelope env;
    env.dim_n = f.dim_n;
    env.shape = f.shape;
    env.origin = f.origin;
    env.frame_shift = Eigen::VectorXd::Zero(dim_n);
    env.values.assign(env.nsites(), cxd(0, 0));
    return env;
}

// Exact evolution of the envelope equation over time t (co-moving frame:
// advection is recorded in frame_shift, not applied to the samples).
inline Envelope evolve_envelope(const Envelope& env, const ContinuumCoefficients& coeffs,
                                double t, int threads = 1) {
    if (int(coeffs.hessian.rows()) != env.dim_n)
        throw ContractError("invalid-argument: coefficient dimension mismatch");
    if ((coeffs.hessian - coeffs.hessian.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw ContractError("invalid-argument: hessian must be symmetric");
    Envelope out = env;
    dft_inplace(out.values, out.shape, 1, FFTW_FORWARD);
    const auto strides = detail::site_strides(out.shape);
    parallel_for(out.nsites(), threads, [&](std::size_t b, std::size_t e) {
        std::vector<int> coords(std::size_t(env.dim_n));
        Eigen::VectorXd k(env.dim_n);
        for (std::size_t site = b; site < e; ++site) {
            detail::site_coords(site, strides, out.shape, coords);
            for (int a = 0; a < env.dim_n; ++a) {
                // DFT frequencies folded into (-pi, pi].
                const int m = coords[std::size_t(a)];
                const int l = out.shape[std::size_t(a)];
                const int folded = (m <= l / 2) ? m : m - l;
                k[a] = 2.0 * M_PI * double(folded) / double(l);
            }
            const double phase = -0.5 * (k.transpose() * coeffs.hessian * k).value() * t;
            out.values[site] *= std::polar(1.0, phase);
        }
    });
    dft_inplace(out.values, out.shape, 1, FFTW_BACKWARD);
    out.time = env.time + t;
    out.frame_shift = env.frame_shift + coeffs.v_g * t;
    return out;
}

// One-dimensional factor of the dispersing Gaussian with curvature w:
//   A(x,t) = exp(-x^2 / (2 (sigma^2 + i w t))) / sqrt(sigma^2 + i w t),
// the solution of i dA/dt = -(w/2) d^2A/dx^2 that starts from
// exp(-x^2/(2 sigma^2)) / sigma. Products of per-axis factors solve the
// envelope equation for diagonal Hessians. |A| is chirp-insensitive: the
// conjugate-convention form (sigma^2 - i w t) has the identical modulus.
inline cxd gaussian_closed_form(double sigma, double w, double t, double x) {
    if (sigma <= 0) throw ContractError("invalid-argument: sigma must be positive");
    const cxd q(sigma * sigma, w * t);
    return std::exp(-(x * x) / (2.0 * q)) / std::sqrt(q);
}

struct ContinuumComparison {
    double l1 = 0;              // L1 distance between normalized probability fields
    Eigen::VectorXd centroid_exact;
    Eigen::VectorXd centroid_cont;
    Eigen::VectorXd width_ratio;  // per-axis std of exact / continuum
    double projection = 0;        // initial weight on the selected branch

    std::string to_text() const {
        std::ostringstream os;
        os.precision(17);
        os << "L1=" << l1 << " centroid_err=(";
        for (int a = 0; a < centroid_exact.size(); ++a)
            os << (a ? "," : "") << (centroid_exact[a] - centroid_cont[a]);
        os << ") width_ratio=(";
        for (int a = 0; a < width_ratio.size(); ++a) os << (a ? "," : "") << width_ratio[a];
        os << ") projection=" << projection;
        return os.str();
    }
};

// Evolves spec exactly for t steps and against the continuum model on the
// same box, comparing probability fields. The packet must sit almost
// entirely on the requested branch for the comparison to be meaningful.
inline ContinuumComparison compare_exact_continuum(const WavePacketSpec& spec,
                                                   const CoinMatrix& c,
                                                   const std::vector<int>& box, int s,
                                                   long t, int threads = 1,
                                                   ProbabilityField* out_exact = nullptr,
                                                   ProbabilityField* out_cont = nullptr) {
    LatticeField psi0 = build_packet(spec, box, threads);
    const LatticeField proj = project_onto_branches(psi0, c, {s}, threads);
    const double weight = proj.norm2();
    if (weight < 0.99) {
        std::ostringstream os;
        os << "ill-posed-comparison: packet projects only " << weight
           << " onto branch " << s << " (needs >= 0.99)";
        throw ContractError(os.str());
    }

    const ContinuumCoefficients coeffs = continuum_coefficients(c, spec.k0, s);
    const LatticeField psi_t = evolve_spectral(psi0, c, t, threads);
    const ProbabilityField p_exact = probability_field(psi_t);

    // Continuum prediction: evolve the (branch-projected) envelope and shift
    // by the accumulated group displacement, rounded to the nearest site.
    // Initial envelope: site magnitude of the branch-projected state. The
    // initial envelope is real-positive by construction, so stripping the
    // carrier phase this way is exact at t = 0.
    Envelope env = make_envelope(psi0.dim_n, box);
    {
        const int nc = psi0.ncomp();
        for (std::size_t site = 0; site < psi0.nsites(); ++site) {
            double mag2 = 0;
            for (int j = 0; j < nc; ++j)
                mag2 += std::norm(proj.amp[site * std::size_t(nc) + std::size_t(j)]);
            env.values[site] = std::sqrt(mag2);
        }
    }
    env = evolve_envelope(env, coeffs, double(t), threads);

    ProbabilityField p_cont;
    p_cont.dim_n = psi0.dim_n;
    p_cont.shape = psi0.shape;
    p_cont.origin = psi0.origin;
    p_cont.time = t;
    p_cont.values.resize(env.nsites());
    {
        std::vector<long> shift(std::size_t(psi0.dim_n));
        for (int a = 0; a < psi0.dim_n; ++a) shift[std::size_t(a)] = std::lround(env.frame_shift[a]);
        const auto strides = detail::site_strides(psi0.shape);
        std::vector<int> coords(std::size_t(psi0.dim_n));
        for (std::size_t site = 0; site < p_cont.values.size(); ++site) {
            detail::site_coords(site, strides, p_cont.shape, coords);
            std::size_t src = 0;
            for (int a = 0; a < psi0.dim_n; ++a) {
                const long l = p_cont.shape[std::size_t(a)];
                long m = (long(coords[std::size_t(a)]) - shift[std::size_t(a)]) % l;
                if (m < 0) m += l;
                src += std::size_t(m) * strides[std::size_t(a)];
            }
            p_cont.values[site] = std::norm(env.values[src]);
        }
    }

    if (out_exact) *out_exact = p_exact;
    if (out_cont) *out_cont = p_cont;
    const double se = p_exact.total();
    const double sc = p_cont.total();
    ContinuumComparison cmp;
    cmp.projection = weight;
    cmp.l1 = 0;
    for (std::size_t i = 0; i < p_exact.values.size(); ++i)
        cmp.l1 += std::abs(p_exact.values[i] / se - p_cont.values[i] / sc);
    const MomentSummary me = moments(p_exact);
    const MomentSummary mc = moments(p_cont);
    cmp.centroid_exact = me.centroid;
    cmp.centroid_cont = mc.centroid;
    cmp.width_ratio.resize(psi0.dim_n);
    for (int a = 0; a < psi0.dim_n; ++a)
        cmp.width_ratio[a] =
            std::sqrt(me.covariance(a, a)) / std::max(1e-300, std::sqrt(mc.covariance(a, a)));
    return cmp;
}

}  // namespace qwalk
