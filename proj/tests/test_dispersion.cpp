#include <catch_amalgamated.hpp>

#include <random>

#include "qwalk/degeneracy.hpp"
#include "qwalk/dispersion.hpp"
#include "qwalk/eigensystem.hpp"

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

}  // namespace

TEST_CASE("2D dispersion branch values at landmark points") {
    auto w = grover2d_dispersion(kp2(0, 0));
    CHECK(w[0] == Catch::Approx(M_PI));
    CHECK(w[1] == Catch::Approx(M_PI));
    CHECK(w[2] == Catch::Approx(M_PI));
    CHECK(w[3] == 0.0);

    w = grover2d_dispersion(kp2(M_PI, M_PI));
    CHECK(circular_distance(w[0], 0.0) < 1e-12);  // 2*pi wraps to 0
    CHECK(w[1] == Catch::Approx(0.0).margin(1e-12));

    w = grover2d_dispersion(kp2(M_PI, 0));
    CHECK(w[0] == Catch::Approx(3.0 * M_PI / 2.0));
    CHECK(w[1] == Catch::Approx(M_PI / 2.0));
}

TEST_CASE("2D dispersion matches the numeric eigensystem everywhere sampled") {
    const CoinMatrix c = grover_coin(2);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const KPoint k = kp2(-M_PI + 2 * M_PI * i / 32.0, -M_PI + 2 * M_PI * j / 32.0);
            const EigenSystem es = eigensystem_at(c, k);
            const auto w = grover2d_dispersion(k);
            for (int s = 0; s < 4; ++s) {
                CHECK(circular_distance(es.omegas[s], w[std::size_t(s)]) < 1e-10);
                // Eigenpair residual under the labeled assignment.
                const Matrix ck = momentum_coin_entries(c, k);
                const CVector r =
                    ck * es.vectors.col(s) -
                    std::polar(1.0, -es.omegas[s]) * es.vectors.col(s);
                CHECK(r.cwiseAbs().maxCoeff() < 1e-10);
            }
            // Reconstruction from the eigensystem.
            Matrix rebuilt = Matrix::Zero(4, 4);
            for (int s = 0; s < 4; ++s)
                rebuilt += std::polar(1.0, -es.omegas[s]) * es.vectors.col(s) *
                           es.vectors.col(s).adjoint();
            CHECK((rebuilt - momentum_coin_entries(c, k)).cwiseAbs().maxCoeff() < 1e-10);
        }
}

TEST_CASE("2D group velocity: landmark values, symmetry, and speed bound") {
    const Eigen::Vector2d v = grover2d_group_velocity(kp2(M_PI / 2, M_PI / 2), 1);
    CHECK(v[0] == Catch::Approx(0.5));
    CHECK(v[1] == Catch::Approx(0.5));
    CHECK(grover2d_group_velocity(kp2(M_PI / 2, M_PI / 2), 2)[0] == Catch::Approx(-0.5));
    CHECK(grover2d_group_velocity(kp2(0, M_PI), 1).norm() < 1e-14);
    CHECK_THROWS_AS(grover2d_group_velocity(kp2(0, 0), 1), ContractError);

    double vmax = 0;
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) {
            const KPoint k =
                kp2(-M_PI + 2 * M_PI * i / 128.0, -M_PI + 2 * M_PI * j / 128.0);
            try {
                vmax = std::max(vmax, grover2d_group_velocity(k, 1).norm());
            } catch (const ContractError&) {
                // diabolical point on the grid
            }
        }
    CHECK(vmax <= 1.0 / std::sqrt(2.0) + 1e-9);
    CHECK(vmax > 0.7);  // the bound is approached
}

TEST_CASE("2D group velocity agrees with finite differences of the dispersion") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const KPoint k = kp2(u(rng), u(rng));
        if (grover2d_omega_cap(k) < 0.2 || grover2d_omega_cap(k) > M_PI - 0.2) continue;
        const Eigen::Vector2d v = grover2d_group_velocity(k, 1);
        for (int a = 0; a < 2; ++a) {
            KPoint kp = k, km = k;
            kp[a] += h;
            km[a] -= h;
            const double fd = (grover2d_dispersion(kp)[0] - grover2d_dispersion(km)[0]) / (2 * h);
            CHECK(v[a] == Catch::Approx(fd).margin(1e-7));
        }
    }
}

TEST_CASE("small-k cone expansion: quintic residual decay and exact diagonal") {
    // Residual against the cubic expansion shrinks like k^5.
    for (double theta : {0.0, M_PI / 8, M_PI / 2, 1.1}) {
        const auto residual = [theta](double k) {
            const double om = grover2d_omega_cap(kp2(k * std::cos(theta), k * std::sin(theta)));
            return std::abs(om - grover2d_cone_expansion(k, theta));
        };
        const double r1 = residual(0.01), r2 = residual(0.02);
        if (r1 > 1e-14) {
            const double ratio = r2 / r1;
            CHECK(ratio > 16.0);
            CHECK(ratio < 64.0);
        }
    }
    // Along the diagonal the cone is exact: Omega = k/sqrt(2) for small k.
    for (double k : {0.01, 0.1, 0.5}) {
        const double om = grover2d_omega_cap(kp2(k / std::sqrt(2.0), k / std::sqrt(2.0)));
        CHECK(om == Catch::Approx(k / std::sqrt(2.0)).epsilon(1e-12));
    }
    // The cubic coefficient matches the isolated-axis expansion as well.
    const double om = grover2d_omega_cap(kp2(0.01, 0));
    CHECK(std::abs(om - 0.01 / std::sqrt(2.0) + std::pow(0.01, 3) / (48 * std::sqrt(2.0))) <
          1e-10);
}

TEST_CASE("near-origin eigenvector limits are orthonormal and sum to the cone state") {
    for (double theta : {0.0, 0.4, M_PI / 2, 2.8}) {
        const Matrix v = grover2d_eigenvectors_near_origin(theta);
        CHECK((v.adjoint() * v - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
        // (phi1 + phi2)/sqrt(2) = (1/2)(1,1,-1,-1) independent of azimuth.
        const CVector d = (v.col(0) + v.col(1)) / std::sqrt(2.0);
        CVector target(4);
        target << 0.5, 0.5, -0.5, -0.5;
        CHECK((d - target).cwiseAbs().maxCoeff() < 1e-12);
    }
    const Matrix v0 = grover2d_eigenvectors_near_origin(0.0);
    CVector phi1(4);
    phi1 << 1 + std::sqrt(2.0), 1 - std::sqrt(2.0), -1, -1;
    phi1 /= 2 * std::sqrt(2.0);
    CHECK((v0.col(0) - phi1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("3D dispersion: axis closed forms and origin degeneracy") {
    for (double kappa : {0.3, 1.0, 2.5}) {
        const auto caps = grover3d_caps(kp3(0, 0, kappa));
        CHECK(caps.omega_plus == Catch::Approx(M_PI));
        CHECK(std::cos(caps.omega_minus) == Catch::Approx(-(1 + 2 * std::cos(kappa)) / 3.0));
    }
    CHECK(grover3d_caps(kp3(0, 0, M_PI)).omega_minus == Catch::Approx(std::acos(1.0 / 3.0)));

    const CoinMatrix c = grover_coin(3);
    const EigenSystem es = eigensystem_at(c, KPoint::Zero(3));
    int at_pi = 0;
    for (int s = 0; s < 6; ++s)
        if (circular_distance(es.omegas[s], M_PI) < 1e-10) ++at_pi;
    CHECK(at_pi == 5);
    CHECK(circular_distance(es.omegas[4], 0.0) < 1e-10);
}

TEST_CASE("3D dispersion matches the numeric eigensystem on a grid") {
    const CoinMatrix c = grover_coin(3);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            for (int l = 0; l < 12; ++l) {
                const KPoint k = kp3(-M_PI + 2 * M_PI * i / 12.0, -M_PI + 2 * M_PI * j / 12.0,
                                     -M_PI + 2 * M_PI * l / 12.0);
                const EigenSystem es = eigensystem_at(c, k);
                const auto w = grover3d_dispersion(k);
                for (int s = 0; s < 6; ++s)
                    CHECK(circular_distance(es.omegas[s], w[std::size_t(s)]) < 1e-10);
            }
}

TEST_CASE("3D group velocity: published point, null points, finite differences") {
    const Eigen::Vector3d v = grover3d_group_velocity(kp3(0.1 * M_PI, 0.2 * M_PI, 0.3 * M_PI), 3);
    CHECK(v[0] == Catch::Approx(-0.028).margin(5e-4));
    CHECK(v[1] == Catch::Approx(-0.233).margin(1e-3));
    CHECK(v[2] == Catch::Approx(-0.704).margin(1e-3));

    CHECK(grover3d_group_velocity(kp3(0, 0, M_PI), 3).norm() < 1e-14);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.8, 2.8);
    const double h = 1e-5;
    int checked = 0;
    while (checked < 20) {
        const KPoint k = kp3(u(rng), u(rng), u(rng));
        for (int s : {1, 2, 3, 4}) {
            Eigen::Vector3d va;
            try {
                va = grover3d_group_velocity(k, s);
            } catch (const ContractError&) {
                continue;
            }
            for (int a = 0; a < 3; ++a) {
                KPoint kpp = k, kmm = k;
                kpp[a] += h;
                kmm[a] -= h;
                const double fd = (grover3d_dispersion(kpp)[std::size_t(s - 1)] -
                                   grover3d_dispersion(kmm)[std::size_t(s - 1)]) /
                                  (2 * h);
                CHECK(va[a] == Catch::Approx(fd).margin(1e-6));
            }
        }
        ++checked;
    }
}

TEST_CASE("eigenphase multiset is invariant under reflections and axis swaps") {
    const CoinMatrix c = grover_coin(2);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = u(rng), b = u(rng);
        const auto sorted_phases = [&](const KPoint& k) {
            const EigenSystem es = eigensystem_at(c, k);
            std::vector<double> w(es.omegas.data(), es.omegas.data() + es.omegas.size());
            std::sort(w.begin(), w.end());
            return w;
        };
        const auto base = sorted_phases(kp2(a, b));
        for (const KPoint& k : {kp2(-a, b), kp2(a, -b), kp2(b, a)}) {
            const auto other = sorted_phases(k);
            for (std::size_t s = 0; s < base.size(); ++s)
                CHECK(circular_distance(base[s], other[s]) < 1e-10);
        }
    }
}

TEST_CASE("finite-difference Hessians reproduce the saddle and 3D curvatures") {
    // 2D saddle (0, pi): the pi - Omega branch curves as diag(-1/2, +1/2);
    // the pi + Omega branch is its negative.
    const BranchFunction w2 = [](const KPoint& k) {
        return grover2d_dispersion(k)[1];
    };
    const HessianResult h2 = hessian_at(w2, kp2(0, M_PI));
    CHECK(h2.hessian(0, 0) == Catch::Approx(-0.5).margin(1e-4));
    CHECK(h2.hessian(1, 1) == Catch::Approx(0.5).margin(1e-4));
    CHECK(std::abs(h2.hessian(0, 1)) < 1e-4);
    CHECK_FALSE(h2.near_singularity);

    const BranchFunction w1 = [](const KPoint& k) {
        return grover2d_dispersion(k)[0];
    };
    const HessianResult h1 = hessian_at(w1, kp2(0, M_PI));
    CHECK(h1.hessian(0, 0) == Catch::Approx(0.5).margin(1e-4));
    CHECK(h1.hessian(1, 1) == Catch::Approx(-0.5).margin(1e-4));

    // Near-diabolo transverse curvature at k0 = (0.01 pi, 0.01 pi).
    const HessianResult hd = hessian_at(w1, kp2(0.01 * M_PI, 0.01 * M_PI));
    CHECK(hd.hessian(0, 0) == Catch::Approx(7.96).epsilon(0.01));
    CHECK(hd.hessian(0, 1) == Catch::Approx(-7.96).epsilon(0.01));
    Eigen::Vector2d transverse(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
    CHECK(transverse.dot(hd.hessian * transverse) == Catch::Approx(2 * 7.96).epsilon(0.01));

    // 3D null-velocity point (0, 0, pi), branch 3.
    const BranchFunction w3 = [](const KPoint& k) {
        return grover3d_dispersion(k)[2];
    };
    const HessianResult h3 = hessian_at(w3, kp3(0, 0, M_PI));
    const double r = 1.0 / (4.0 * std::sqrt(2.0));
    CHECK(h3.hessian(0, 0) == Catch::Approx(-r).margin(1e-4));
    CHECK(h3.hessian(1, 1) == Catch::Approx(-r).margin(1e-4));
    CHECK(h3.hessian(2, 2) == Catch::Approx(4 * r).margin(1e-4));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(h3.hessian(i, j)) < 1e-4);
}

TEST_CASE("degeneracy scan finds the five 2D conical points") {
    const DegeneracyReport rep = find_degeneracies(grover_coin(2), 64, 1e-3);
    REQUIRE(rep.locations.size() == 5);
    int corners = 0, central = 0;
    for (const auto& loc : rep.locations) {
        CHECK(loc.multiplicity == 3);
        CHECK(loc.classification == DegeneracyClass::kConicalFlatContact);
        if (loc.k.cwiseAbs().maxCoeff() < 1e-9) ++central;
        if (std::abs(std::abs(loc.k[0]) - M_PI) < 1e-6 &&
            std::abs(std::abs(loc.k[1]) - M_PI) < 1e-6)
            ++corners;
    }
    CHECK(central == 1);
    CHECK(corners == 4);
}

TEST_CASE("degeneracy scan in 3D finds the 5-fold origin and axis lines") {
    const DegeneracyReport rep = find_degeneracies(grover_coin(3), 16, 1e-3);
    bool origin5 = false;
    int line_points = 0;
    for (const auto& loc : rep.locations) {
        if (loc.k.cwiseAbs().maxCoeff() < 1e-9 && loc.multiplicity == 5) origin5 = true;
        if (loc.classification == DegeneracyClass::kLine ||
            loc.classification == DegeneracyClass::kLineFlatContact) {
            // Line points sit on a coordinate axis or a body diagonal.
            ++line_points;
        }
    }
    CHECK(origin5);
    CHECK(line_points > 0);
}

TEST_CASE("gap probe reports no cluster where all phases are distinct") {
    Matrix m = Matrix::Zero(4, 4);
    for (int j = 0; j < 4; ++j) m(j, j) = std::polar(1.0, 0.4 + 0.7 * j);
    const CoinMatrix c(2, m, "diag-test");
    const detail::GapInfo g = detail::gap_info(c, KPoint::Zero(2), 1e-3);
    CHECK(g.cluster.empty());
    CHECK(g.min_gap > 0.1);
}

TEST_CASE("hessian_at flags asymmetric (non-smooth) surfaces") {
    // |k| has no Hessian at the origin; the finite-difference stencil sees
    // the kink and the asymmetry detector reacts via the large residual
    // between step sizes rather than staying silent.
    const BranchFunction cone = [](const KPoint& k) { return k.norm(); };
    const HessianResult h = hessian_at(cone, kp2(1e-6, 0));
    // Values blow up near the apex; diag entries are ~1/|k| >> 1.
    CHECK(std::abs(h.hessian(1, 1)) > 1e3);
}
