#include <catch_amalgamated.hpp>

#include "qwalk/continuum.hpp"

using namespace qwalk;

namespace {

KPoint kp2(double a, double b) {
    KPoint k(2);
    k << a, b;
    return k;
}

KPoint kp3(double a, double b, double c) {
    KPoint k(3);
    k << a, b, c;
    return k;
}

Envelope gaussian_envelope(int dim_n, int side, double sigma) {
    Envelope env = make_envelope(dim_n, std::vector<int>(std::size_t(dim_n), side));
    const auto strides = detail::site_strides(env.shape);
    std::vector<int> coords(std::size_t(dim_n), 0);
    for (std::size_t site = 0; site < env.nsites(); ++site) {
        detail::site_coords(site, strides, env.shape, coords);
        double r2 = 0;
        for (int a = 0; a < dim_n; ++a) {
            const double x = double(env.origin[std::size_t(a)] + coords[std::size_t(a)]);
            r2 += x * x;
        }
        env.values[site] = std::exp(-r2 / (2.0 * sigma * sigma));
    }
    return env;
}

}  // namespace

TEST_CASE("coefficients at the ballistic point: velocity (1/2,1/2), zero curvature") {
    const ContinuumCoefficients cc = continuum_coefficients(grover_coin(2), kp2(M_PI / 2, M_PI / 2), 1);
    CHECK(cc.v_g[0] == Catch::Approx(0.5));
    CHECK(cc.v_g[1] == Catch::Approx(0.5));
    CHECK(cc.hessian.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(cc.omega0 == Catch::Approx(M_PI + M_PI / 2));
}

TEST_CASE("coefficients at the saddle point: zero velocity, diag(-1/2, 1/2) curvature") {
    const ContinuumCoefficients cc = continuum_coefficients(grover_coin(2), kp2(0, M_PI), 2);
    CHECK(cc.v_g.norm() < 1e-12);
    CHECK(cc.hessian(0, 0) == Catch::Approx(-0.5).margin(1e-4));
    CHECK(cc.hessian(1, 1) == Catch::Approx(0.5).margin(1e-4));
    CHECK(std::abs(cc.hessian(0, 1)) < 1e-4);
}

TEST_CASE("coefficients at the 3D null-velocity point: anisotropic curvature") {
    const ContinuumCoefficients cc = continuum_coefficients(grover_coin(3), kp3(0, 0, M_PI), 3);
    CHECK(cc.v_g.norm() < 1e-12);
    const double r = 1.0 / (4.0 * std::sqrt(2.0));
    CHECK(cc.hessian(0, 0) == Catch::Approx(-r).margin(1e-4));
    CHECK(cc.hessian(1, 1) == Catch::Approx(-r).margin(1e-4));
    CHECK(cc.hessian(2, 2) == Catch::Approx(4 * r).margin(1e-4));
}

TEST_CASE("coefficients near a degeneracy are refused") {
    CHECK_THROWS_AS(continuum_coefficients(grover_coin(2), kp2(1e-4, 0), 1), ContractError);
    CHECK_THROWS_AS(continuum_coefficients(grover_coin(2), kp2(0, 0), 1), ContractError);
}

TEST_CASE("coefficients for a generic coin fall back to finite differences") {
    const CoinMatrix c = dft_coin(2);
    const KPoint k0 = kp2(0.8, -0.4);
    const ContinuumCoefficients cc = continuum_coefficients(c, k0, 1);
    // Cross-check v_g against a direct secant of the labeled branch.
    const double h = 1e-5;
    for (int a = 0; a < 2; ++a) {
        KPoint kp = k0, km = k0;
        kp[a] += h;
        km[a] -= h;
        const double fd =
            (eigensystem_at(c, kp).omegas[0] - eigensystem_at(c, km).omegas[0]) / (2 * h);
        CHECK(cc.v_g[a] == Catch::Approx(fd).margin(1e-6));
    }
    CHECK((cc.hessian - cc.hessian.transpose()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("envelope evolution conserves the norm and zero curvature is the identity") {
    Envelope env = gaussian_envelope(2, 64, 6.0);
    ContinuumCoefficients cc;
    cc.v_g = Eigen::VectorXd::Zero(2);
    cc.hessian = Eigen::MatrixXd::Zero(2, 2);

    const Envelope same = evolve_envelope(env, cc, 37.0);
    double diff = 0;
    for (std::size_t i = 0; i < env.values.size(); ++i)
        diff = std::max(diff, std::abs(same.values[i] - env.values[i]));
    CHECK(diff < 1e-12);

    cc.hessian << 0.3, 0.1, 0.1, -0.2;
    const Envelope out = evolve_envelope(env, cc, 12.5);
    CHECK(out.norm2() == Catch::Approx(env.norm2()).margin(1e-12 * env.norm2()));
}

TEST_CASE("advection lives in the frame shift") {
    Envelope env = gaussian_envelope(2, 32, 4.0);
    ContinuumCoefficients cc;
    cc.v_g = Eigen::VectorXd(2);
    cc.v_g << 0.5, -0.25;
    cc.hessian = Eigen::MatrixXd::Zero(2, 2);
    const Envelope out = evolve_envelope(env, cc, 40.0);
    CHECK(out.frame_shift[0] == Catch::Approx(20.0));
    CHECK(out.frame_shift[1] == Catch::Approx(-10.0));
    CHECK(out.time == Catch::Approx(40.0));
}

TEST_CASE("closed-form gaussian matches the multiplier evolution pointwise") {
    const double sigma = 6.0, w = 0.4, t = 30.0;
    Envelope env = gaussian_envelope(1, 256, sigma);
    ContinuumCoefficients cc;
    cc.v_g = Eigen::VectorXd::Zero(1);
    cc.hessian = Eigen::MatrixXd::Constant(1, 1, w);
    const Envelope out = evolve_envelope(env, cc, t);

    // The closed form at t=0 equals the initial gaussian divided by sigma;
    // rescale by that constant.
    const cxd scale = gaussian_closed_form(sigma, w, 0.0, 0.0);
    for (int x = -100; x <= 100; x += 7) {
        const std::size_t site = std::size_t(x - env.origin[0]);
        const cxd predicted = gaussian_closed_form(sigma, w, t, double(x)) / scale;
        CHECK(std::abs(out.values[site] - predicted) < 1e-8);
    }
}

TEST_CASE("closed-form gaussian in 3D factorizes over axes") {
    const double sigma = 5.0, t = 15.0;
    const double r = 1.0 / (4.0 * std::sqrt(2.0));
    const double ws[3] = {-r, -r, 4 * r};
    Envelope env = gaussian_envelope(3, 64, sigma);
    ContinuumCoefficients cc;
    cc.v_g = Eigen::VectorXd::Zero(3);
    cc.hessian = Eigen::MatrixXd::Zero(3, 3);
    for (int a = 0; a < 3; ++a) cc.hessian(a, a) = ws[a];
    const Envelope out = evolve_envelope(env, cc, t);

    const auto strides = detail::site_strides(env.shape);
    cxd scale(1, 0);
    for (int a = 0; a < 3; ++a) scale *= gaussian_closed_form(sigma, ws[a], 0.0, 0.0);
    for (long x : {-20L, -7L, 0L, 5L, 18L}) {
        cxd predicted(1, 0);
        for (int a = 0; a < 3; ++a) predicted *= gaussian_closed_form(sigma, ws[a], t, double(x));
        predicted /= scale;
        std::size_t site = 0;
        for (int a = 0; a < 3; ++a)
            site += std::size_t(x - env.origin[std::size_t(a)]) * strides[std::size_t(a)];
        CHECK(std::abs(out.values[site] - predicted) < 1e-8);
    }
}

TEST_CASE("closed-form width doubles at the characteristic time sigma^2/|w|") {
    const double sigma = 4.0, w = 0.7;
    const double t = sigma * sigma / w;
    // Amplitude width sigma_a(t)^2 = sigma^2 (1 + (w t / sigma^2)^2) = 2 sigma^2
    // at t; |A|^2 has variance sigma_a^2 / 2, so sigma^2 here (double the t=0
    // variance sigma^2/2).
    double m0 = 0, m2 = 0;
    for (double x = -60; x <= 60; x += 0.25) {
        const double p = std::norm(gaussian_closed_form(sigma, w, t, x));
        m0 += p;
        m2 += p * x * x;
    }
    CHECK(m2 / m0 == Catch::Approx(sigma * sigma).epsilon(1e-3));
    CHECK(std::norm(gaussian_closed_form(sigma, w, 0.0, 3.0)) ==
          Catch::Approx(std::exp(-9.0 / (sigma * sigma)) / (sigma * sigma)));
}

TEST_CASE("saddle curvature spreads symmetrically with opposite chirps") {
    Envelope env = gaussian_envelope(2, 128, 8.0);
    ContinuumCoefficients cc;
    cc.v_g = Eigen::VectorXd::Zero(2);
    cc.hessian = Eigen::MatrixXd::Zero(2, 2);
    cc.hessian(0, 0) = -0.5;
    cc.hessian(1, 1) = 0.5;
    const Envelope out = evolve_envelope(env, cc, 60.0);
    // |A| is symmetric under swapping the two axes.
    const auto strides = detail::site_strides(env.shape);
    for (long x1 : {-30L, -11L, 4L, 25L})
        for (long x2 : {-18L, 9L, 30L}) {
            const std::size_t a = std::size_t(x1 - env.origin[0]) * strides[0] +
                                  std::size_t(x2 - env.origin[1]) * strides[1];
            const std::size_t b = std::size_t(x2 - env.origin[0]) * strides[0] +
                                  std::size_t(x1 - env.origin[1]) * strides[1];
            CHECK(std::abs(std::abs(out.values[a]) - std::abs(out.values[b])) < 1e-10);
        }
}

TEST_CASE("exact-vs-continuum comparison at a regular carrier") {
    const CoinMatrix c = grover_coin(2);
    const KPoint k0 = kp2(M_PI / 2, M_PI / 2);
    WavePacketSpec spec;
    spec.sigma = 10;
    spec.k0 = k0;
    spec.coin = branch_coin_at(c, k0, 1);
    const ContinuumComparison cmp = compare_exact_continuum(spec, c, {256, 256}, 1, 60);
    CHECK(cmp.projection >= 0.99);
    CHECK((cmp.centroid_exact - cmp.centroid_cont).cwiseAbs().maxCoeff() < 1.0);
    CHECK(cmp.centroid_exact[0] == Catch::Approx(30.0).margin(1.0));
    CHECK(cmp.width_ratio[0] == Catch::Approx(1.0).margin(0.1));
    CHECK(cmp.width_ratio[1] == Catch::Approx(1.0).margin(0.1));
    CHECK(cmp.l1 < 0.2);
}

TEST_CASE("comparison error shrinks monotonically with packet width") {
    const CoinMatrix c = grover_coin(2);
    const KPoint k0 = kp2(M_PI / 2, M_PI / 2);
    double prev = 1e9;
    for (double sigma : {5.0, 10.0, 20.0}) {
        WavePacketSpec spec;
        spec.sigma = sigma;
        spec.k0 = k0;
        spec.coin = branch_coin_at(c, k0, 1);
        const ContinuumComparison cmp = compare_exact_continuum(spec, c, {256, 256}, 1, 40);
        CHECK(cmp.l1 < prev);
        prev = cmp.l1;
    }
}

TEST_CASE("mixed-branch packets are rejected as ill-posed comparisons") {
    const CoinMatrix c = grover_coin(2);
    const KPoint k0 = kp2(M_PI / 2, M_PI / 2);
    WavePacketSpec spec;
    spec.sigma = 10;
    spec.k0 = k0;
    spec.coin = diabolo_coin_state();  // splits between branches 1 and 2 here
    CHECK_THROWS_AS(compare_exact_continuum(spec, c, {128, 128}, 1, 20), ContractError);
}
