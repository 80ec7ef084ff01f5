#pragma once

/*
 * Dynamics launched at the 2D conical degeneracy: radially symmetric packet
 * spectra, Bessel quadrature of the two ring integrals, the asymptotic
 * double-ring radial profile, feature extraction, and an azimuthal-symmetry
 * metric for probability fields.
 *
 * p0(x,t) = (2 pi)^-1 Int dk cos(k c t) J0(k x) k F(k)
 * p1(x,t) = (2 pi)^-1 Int dk sin(k c t) J1(k x) k F(k)
 * with c = 1/sqrt(2) for the 2D Grover cone and, for a Gaussian packet,
 * F(k) = 2 sigma sqrt(pi) exp(-sigma^2 k^2 / 2).
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

constexpr double kConeSpeed2d = 0.70710678118654752440;  // 1/sqrt(2)

struct RadialSpectrum {
    double sigma = 0;
    std::function<double(double)> value;  // F(k), radially symmetric

    double kmax() const { return 6.0 / sigma; }
};

inline RadialSpectrum gaussian_radial_spectrum(double sigma) {
    if (sigma <= 0) throw ContractError("invalid-argument: sigma must be positive");
    RadialSpectrum s;
    s.sigma = sigma;
    s.value = [sigma](double k) {
        return 2.0 * sigma * std::sqrt(M_PI) * std::exp(-0.5 * sigma * sigma * k * k);
    };
    return s;
}

struct RadialProfile {
    std::vector<double> xi;  // (r - c t) / sigma
    std::vector<double> p;   // probability profile (non-negative)
};

struct RingFeatures {
    double xi_inner_max = 0;
    double xi_zero = 0;
    double xi_outer_max = 0;
    double peak_ratio = 0;  // inner peak height / outer peak height
};

namespace detail {

// Modified Bessel function of the first kind by its power series; supports
// the fractional (including negative) orders needed here. Argument range in
// this module is modest (z <= ~25), where the series converges quickly.
inline double bessel_i_series(double nu, double z) {
    const double half = 0.5 * z;
    double term = std::pow(half, nu) / std::tgamma(nu + 1.0);
    double sum = term;
    for (int m = 1; m < 200; ++m) {
        term *= half * half / (double(m) * (double(m) + nu));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace detail

// Ring-integral pair by composite Gauss-Legendre quadrature over (0, kmax],
// with subintervals short against the fastest oscillation cos(k c t), J(k x).
inline std::pair<double, double> p0_p1(const RadialSpectrum& spectrum, double c, double t,
                                       double x) {
    if (c <= 0) throw ContractError("invalid-argument: cone speed must be positive");
    if (spectrum.sigma <= 0) throw ContractError("invalid-argument: spectrum sigma unset");
    const double kmax = spectrum.kmax();
    const double scale = std::max({c * t, x, 1.0});
    const double maxlen = M_PI / (4.0 * scale);
    const std::size_t nsub = std::size_t(std::ceil(kmax / maxlen));
    if (nsub > 4000000)
        throw NumericalError("quadrature resolution: (t, x) oscillation scale too fine");

    // 10-point Gauss-Legendre nodes/weights on [-1, 1].
    static const double xs[5] = {0.14887433898163121, 0.43339539412924719,
                                 0.67940956829902441, 0.86506336668898451,
                                 0.97390652851717172};
    static const double ws[5] = {0.29552422471475287, 0.26926671930999636,
                                 0.21908636251598204, 0.14945134915058059,
                                 0.066671344308688138};

    const double h = kmax / double(nsub);
    double s0 = 0, s1 = 0;
    for (std::size_t i = 0; i < nsub; ++i) {
        const double mid = (double(i) + 0.5) * h;
        for (int j = 0; j < 5; ++j) {
            for (double sgn : {-1.0, 1.0}) {
                const double k = mid + sgn * 0.5 * h * xs[j];
                const double w = 0.5 * h * ws[j];
                const double common = k * spectrum.value(k);
                s0 += w * std::cos(k * c * t) * std::cyl_bessel_j(0, k * x) * common;
                s1 += w * std::sin(k * c * t) * std::cyl_bessel_j(1, k * x) * common;
            }
        }
    }
    const double inv2pi = 1.0 / (2.0 * M_PI);
    return {inv2pi * s0, inv2pi * s1};
}

// Asymptotic radial profile P(xi) about the expanding ring, normalized up to
// the overall 1/(sigma c t) scale factor. P = 2 p0^2 with
//   p0 ~ e^{-xi^2/4} { xi sqrt|xi| [I_{-1/4} - I_{3/4}](xi^2/4)
//                      + [xi^2 I_{5/4} - (xi^2 - 2) I_{1/4}](xi^2/4) / sqrt|xi| }.
inline double poggendorff_asymptotic(double xi) {
    const double z = 0.25 * xi * xi;
    double p0;
    if (std::abs(xi) < 1e-12) {
        // Removable limit: only the 2 I_{1/4}(z)/sqrt|xi| term survives.
        p0 = 2.0 * std::pow(8.0, -0.25) / std::tgamma(1.25);
    } else {
        const double rt = std::sqrt(std::abs(xi));
        const double t1 =
            xi * rt * (detail::bessel_i_series(-0.25, z) - detail::bessel_i_series(0.75, z));
        const double t2 = (xi * xi * detail::bessel_i_series(1.25, z) -
                           (xi * xi - 2.0) * detail::bessel_i_series(0.25, z)) /
                          rt;
        p0 = std::exp(-z) * (t1 + t2);
    }
    return 2.0 * p0 * p0;
}

inline RadialProfile sample_asymptotic_profile(double xi_lo = -4.0, double xi_hi = 3.0,
                                               double dxi = 0.01) {
    RadialProfile prof;
    for (double xi = xi_lo; xi <= xi_hi + 1e-12; xi += dxi) {
        prof.xi.push_back(xi);
        prof.p.push_back(poggendorff_asymptotic(xi));
    }
    return prof;
}

namespace detail {

// Parabolic refinement of an extremum bracketed at samples (i-1, i, i+1).
inline double parabolic_vertex(const std::vector<double>& x, const std::vector<double>& y,
                               std::size_t i) {
    const double d1 = y[i] - y[i - 1], d2 = y[i] - y[i + 1];
    const double denom = d1 + d2;
    if (std::abs(denom) < 1e-300) return x[i];
    const double h = x[i + 1] - x[i];
    return x[i] + 0.5 * h * (d1 - d2) / denom;
}

}  // namespace detail

inline RingFeatures ring_features(const RadialProfile& profile) {
    const std::size_t n = profile.xi.size();
    if (n < 5) throw ContractError("feature-extraction: profile too short");
    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (profile.p[i] > profile.p[i - 1] && profile.p[i] >= profile.p[i + 1])
            maxima.push_back(i);
    // Keep the two strongest maxima, in xi order.
    std::sort(maxima.begin(), maxima.end(),
              [&](std::size_t a, std::size_t b) { return profile.p[a] > profile.p[b]; });
    if (maxima.size() < 2)
        throw ContractError("feature-extraction: fewer than two local maxima in profile");
    std::size_t ia = maxima[0], ib = maxima[1];
    if (ia > ib) std::swap(ia, ib);

    std::size_t imin = ia;
    for (std::size_t i = ia; i <= ib; ++i)
        if (profile.p[i] < profile.p[imin]) imin = i;

    RingFeatures f;
    f.xi_inner_max = detail::parabolic_vertex(profile.xi, profile.p, ia);
    f.xi_zero = detail::parabolic_vertex(profile.xi, profile.p, imin);
    f.xi_outer_max = detail::parabolic_vertex(profile.xi, profile.p, ib);
    f.peak_ratio = profile.p[ia] / profile.p[ib];
    return f;
}

// Azimuthally averaged radial profile of a 2D probability field, in the
// scaled coordinate xi = (r - c t)/sigma, bins one site wide.
inline RadialProfile radial_profile_from_field(const ProbabilityField& p, double c, double t,
                                               double sigma) {
    if (p.dim_n != 2) throw ContractError("invalid-argument: radial profile needs a 2D field");
    double rmax = 0;
    for (int a = 0; a < 2; ++a)
        rmax = std::max(rmax, double(p.shape[std::size_t(a)]) / 2.0);
    const std::size_t nbins = std::size_t(rmax);
    std::vector<double> sum(nbins, 0.0);
    std::vector<std::size_t> cnt(nbins, 0);
    const auto strides = detail::site_strides(p.shape);
    std::vector<int> coords(2);
    for (std::size_t site = 0; site < p.values.size(); ++site) {
        detail::site_coords(site, strides, p.shape, coords);
        const double x1 = double(p.origin[0] + coords[0]);
        const double x2 = double(p.origin[1] + coords[1]);
        const double r = std::sqrt(x1 * x1 + x2 * x2);
        const std::size_t bin = std::size_t(r);
        if (bin >= nbins) continue;
        sum[bin] += p.values[site];
        cnt[bin] += 1;
    }
    RadialProfile prof;
    for (std::size_t b = 0; b < nbins; ++b) {
        if (cnt[b] == 0) continue;
        prof.xi.push_back((double(b) + 0.5 - c * t) / sigma);
        prof.p.push_back(sum[b] / double(cnt[b]));
    }
    return prof;
}

// Relative azimuthal deviation: over radial bins one site wide (centered on
// coordinate 0), the maximum of std_b / peak, where std_b is the standard
// deviation of P within bin b and peak is the largest bin mean. Normalizing
// by the profile peak (rather than the local bin mean) keeps the metric
// insensitive to radial-slope aliasing inside a bin near zeros of the
// profile, which would otherwise dominate for perfectly ring-symmetric
// fields. Bins with negligible weight are skipped; an optional [r_lo, r_hi)
// window restricts the metric to an annulus.
inline double azimuthal_symmetry(const ProbabilityField& p, double r_lo = 0.0,
                                 double r_hi = 1e300) {
    if (p.dim_n != 2) throw ContractError("invalid-argument: azimuthal metric needs a 2D field");
    double rmax = 0;
    for (int a = 0; a < 2; ++a)
        rmax = std::max(rmax, double(p.shape[std::size_t(a)]) / 2.0);
    const std::size_t nbins = std::size_t(rmax);
    std::vector<double> s1(nbins, 0.0), s2(nbins, 0.0);
    std::vector<std::size_t> cnt(nbins, 0);
    const auto strides = detail::site_strides(p.shape);
    std::vector<int> coords(2);
    for (std::size_t site = 0; site < p.values.size(); ++site) {
        detail::site_coords(site, strides, p.shape, coords);
        const double x1 = double(p.origin[0] + coords[0]);
        const double x2 = double(p.origin[1] + coords[1]);
        const std::size_t bin = std::size_t(std::sqrt(x1 * x1 + x2 * x2));
        if (bin >= nbins) continue;
        s1[bin] += p.values[site];
        s2[bin] += p.values[site] * p.values[site];
        cnt[bin] += 1;
    }
    double peak_mean = 0;
    std::vector<double> mean(nbins, 0.0);
    for (std::size_t b = 0; b < nbins; ++b) {
        if (cnt[b] == 0) continue;
        mean[b] = s1[b] / double(cnt[b]);
        if (double(b) + 0.5 >= r_lo && double(b) + 0.5 < r_hi)
            peak_mean = std::max(peak_mean, mean[b]);
    }
    double worst = 0;
    for (std::size_t b = 0; b < nbins; ++b) {
        if (double(b) + 0.5 < r_lo || double(b) + 0.5 >= r_hi) continue;
        if (cnt[b] < 8 || mean[b] <= 1e-3 * peak_mean) continue;
        const double var = s2[b] / double(cnt[b]) - mean[b] * mean[b];
        if (var <= 0) continue;
        worst = std::max(worst, std::sqrt(var) / peak_mean);
    }
    return worst;
}

}  // namespace qwalk
