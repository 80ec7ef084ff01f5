#pragma once

/*
 * Closed-form dispersion relations of the 2D and 3D Grover walks,
 * group velocities, the near-diabolo cone expansion and eigenvector
 * limits, and finite-difference Hessians of arbitrary branch functions.
 *
 * 2D:  omega^(1,2) = pi +- Omega_k,  omega^(3) = pi,  omega^(4) = 0,
 *      Omega_k = arccos[(cos k1 + cos k2)/2].
 * 3D:  omega^(1,2) = +-Omega+, omega^(3,4) = +-Omega-, omega^(5) = 0,
 *      omega^(6) = pi, with
 *      cos Omega+- = -(1/3)[sum_i cos k_i +- sqrt(R)],
 *      R = (1/2) sum_{i<j} (cos k_i - cos k_j)^2.
 */

#include <array>
#include <cmath>
#include <functional>

#include "qwalk/coin.hpp"
#include "qwalk/errors.hpp"

namespace qwalk {

// Distance between eigenphases on the circle, so pi and -pi coincide.
inline double circular_distance(double a, double b) {
    double d = std::fmod(a - b, 2.0 * M_PI);
    if (d < 0) d += 2.0 * M_PI;
    return std::min(d, 2.0 * M_PI - d);
}

// Wraps a phase into (-pi, pi].
inline double wrap_phase(double w) {
    w = std::fmod(w, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    if (w > M_PI) w -= 2.0 * M_PI;
    return w;
}

// ---------------------------------------------------------------- 2D Grover

inline double grover2d_omega_cap(const KPoint& k) {
    if (k.size() != 2) throw ContractError("invalid-argument: grover2d expects k of length 2");
    double u = 0.5 * (std::cos(k[0]) + std::cos(k[1]));
    u = std::clamp(u, -1.0, 1.0);
    return std::acos(u);  // in [0, pi]
}

// Branch phases (omega^(1),...,omega^(4)) = (pi+Omega, pi-Omega, pi, 0).
inline std::array<double, 4> grover2d_dispersion(const KPoint& k) {
    const double om = grover2d_omega_cap(k);
    return {M_PI + om, M_PI - om, M_PI, 0.0};
}

// v_g^(1,2) = +-grad Omega = +-(sin k1, sin k2)/sqrt(4 - (cos k1 + cos k2)^2).
inline Eigen::Vector2d grover2d_group_velocity(const KPoint& k, int s) {
    if (k.size() != 2) throw ContractError("invalid-argument: grover2d expects k of length 2");
    if (s != 1 && s != 2) throw ContractError("invalid-argument: branch must be 1 or 2");
    const double c = std::cos(k[0]) + std::cos(k[1]);
    const double den2 = 4.0 - c * c;
    if (den2 < 1e-18 || std::sqrt(den2) < 1e-9)
        throw ContractError("singular-point: group velocity undefined at a diabolical point");
    const double sign = (s == 1) ? +1.0 : -1.0;
    return sign / std::sqrt(den2) * Eigen::Vector2d(std::sin(k[0]), std::sin(k[1]));
}

// Cubic cone expansion of Omega_k about the central diabolo,
// Omega ~= k/sqrt(2) - k^3 (1+cos 4 theta) / (96 sqrt(2)).
// (Along the diagonals Omega = k/sqrt(2) exactly.)
inline double grover2d_cone_expansion(double k, double theta) {
    return k / std::sqrt(2.0) - k * k * k * (1.0 + std::cos(4.0 * theta)) / (96.0 * std::sqrt(2.0));
}

// k->0 limit eigenvectors of the 2D Grover momentum coin along azimuth theta.
// Columns s=1..4; phi^(4) = (1/2)(1,1,1,1) is azimuth independent.
inline Matrix grover2d_eigenvectors_near_origin(double theta) {
    const double r2 = std::sqrt(2.0);
    const double ct = std::cos(theta), st = std::sin(theta);
    Matrix v(4, 4);
    v.col(0) << 1 + r2 * ct, 1 - r2 * ct, -1 - r2 * st, -1 + r2 * st;
    v.col(0) /= 2 * r2;
    v.col(1) << 1 - r2 * ct, 1 + r2 * ct, -1 + r2 * st, -1 - r2 * st;
    v.col(1) /= 2 * r2;
    v.col(2) << st, -st, ct, -ct;
    v.col(2) /= r2;
    v.col(3) << 1, 1, 1, 1;
    v.col(3) /= 2;
    return v;
}

// ---------------------------------------------------------------- 3D Grover

struct Grover3dCaps {
    double omega_plus;   // Omega+ in [0, pi]
    double omega_minus;  // Omega- in [0, pi]
};

inline Grover3dCaps grover3d_caps(const KPoint& k) {
    if (k.size() != 3) throw ContractError("invalid-argument: grover3d expects k of length 3");
    const double c0 = std::cos(k[0]), c1 = std::cos(k[1]), c2 = std::cos(k[2]);
    const double sum = c0 + c1 + c2;
    double rad = 0.5 * ((c0 - c1) * (c0 - c1) + (c0 - c2) * (c0 - c2) + (c1 - c2) * (c1 - c2));
    if (rad < 0) rad = 0;  // clamp rounding
    const double root = std::sqrt(rad);
    const double cp = std::clamp(-(sum + root) / 3.0, -1.0, 1.0);
    const double cm = std::clamp(-(sum - root) / 3.0, -1.0, 1.0);
    return {std::acos(cp), std::acos(cm)};
}

// Branch phases (omega^(1),...,omega^(6)) = (Omega+, -Omega+, Omega-, -Omega-, 0, pi).
inline std::array<double, 6> grover3d_dispersion(const KPoint& k) {
    const auto caps = grover3d_caps(k);
    return {caps.omega_plus, -caps.omega_plus, caps.omega_minus, -caps.omega_minus, 0.0, M_PI};
}

// v_g^(1,2) = +-grad Omega+, v_g^(3,4) = +-grad Omega-; branches 5,6 are flat.
inline Eigen::Vector3d grover3d_group_velocity(const KPoint& k, int s) {
    if (s < 1 || s > 4) throw ContractError("invalid-argument: branch must be in 1..4");
    const auto caps = grover3d_caps(k);
    const double om = (s <= 2) ? caps.omega_plus : caps.omega_minus;
    const double co = std::cos(om), so = std::sin(om);
    const double c0 = std::cos(k[0]), c1 = std::cos(k[1]), c2 = std::cos(k[2]);
    const double sum = c0 + c1 + c2;
    const double den = 2.0 * (3.0 * co + sum) * so;
    if (std::abs(den) < 1e-9)
        throw ContractError("singular-point: 3D group velocity undefined here");
    const double sign = (s % 2 == 1) ? +1.0 : -1.0;  // s=1,3 carry +grad
    Eigen::Vector3d v;
    const double cs[3] = {c0, c1, c2};
    for (int i = 0; i < 3; ++i) {
        const double other = sum - cs[i];
        v[i] = -sign * (2.0 * co + other) * std::sin(k[i]) / den;
    }
    return v;
}

// ------------------------------------------------------------------ Hessian

using BranchFunction = std::function<double(const KPoint&)>;

struct HessianResult {
    Eigen::MatrixXd hessian;   // symmetrized
    double asymmetry = 0.0;    // max |H_ij - H_ji| before symmetrization
    bool near_singularity = false;  // asymmetry > 1e-5
};

// Central second differences, step h = 1e-4, one Richardson extrapolation.
inline HessianResult hessian_at(const BranchFunction& omega, const KPoint& k0,
                                double h = 1e-4) {
    const int n = int(k0.size());
    auto second = [&](double step) {
        Eigen::MatrixXd hm(n, n);
        const double f0 = omega(k0);
        for (int i = 0; i < n; ++i) {
            KPoint kp = k0, km = k0;
            kp[i] += step;
            km[i] -= step;
            hm(i, i) = (omega(kp) - 2.0 * f0 + omega(km)) / (step * step);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                KPoint kpp = k0, kpm = k0, kmp = k0, kmm = k0;
                kpp[i] += step; kpp[j] += step;
                kpm[i] += step; kpm[j] -= step;
                kmp[i] -= step; kmp[j] += step;
                kmm[i] -= step; kmm[j] -= step;
                hm(i, j) = (omega(kpp) - omega(kpm) - omega(kmp) + omega(kmm)) /
                           (4.0 * step * step);
            }
        return hm;
    };
    const Eigen::MatrixXd h1 = second(h);
    const Eigen::MatrixXd h2 = second(h / 2.0);
    Eigen::MatrixXd hm = (4.0 * h2 - h1) / 3.0;
    HessianResult res;
    res.asymmetry = (hm - hm.transpose()).cwiseAbs().maxCoeff();
    res.near_singularity = res.asymmetry > 1e-5;
    res.hessian = 0.5 * (hm + hm.transpose());
    return res;
}

}  // namespace qwalk
