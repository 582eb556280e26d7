#include <catch2/catch_amalgamated.hpp>

#include "qfsi/transform_state.hpp"
#include "test_util.hpp"

using namespace qfsi;

TEST_CASE("cutoff profile: plateaus and monotonicity") {
    Grid g(GridConfig{16, 1.0, 0.9, 0.25, 0.2});
    Cutoff cut(g.R_O, g.r_gap);
    REQUIRE(cut.value(Vec3::Zero()) == 1.0);
    // a point whose distance to the wall is r/4 sits in the zero plateau
    Vec3 x = (g.R_O - 0.25 * g.r_gap) * Vec3(1, 0, 0);
    REQUIRE(cut.value(x) == 0.0);

    double prev = 2.0;
    for (int s = 0; s <= 1000; ++s) {
        double rad = (g.R_O - g.r_gap) + s * (0.5 * g.r_gap) / 1000.0;
        double v = cut.value(rad * Vec3(0, 1, 0));
        REQUIRE(v <= prev + 1e-15);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("collar correction: right inverse of the divergence with support control") {
    Grid g(GridConfig{20, 1.0, 0.9, 0.25, 0.3});
    CollarCorrection collar(g, g.r_gap);

    SECTION("zero input gives zero output") {
        std::vector<double> zero(g.ncell, 0.0);
        VelocityField c = collar.apply(zero);
        for (int a = 0; a < 3; ++a)
            for (long f = 0; f < g.nf[a]; ++f) REQUIRE(c.c[a][f] == 0.0);
    }

    SECTION("reproduces the divergence of a collar-supported field") {
        auto rng = qfsi::test::make_rng(3);
        VelocityField cstar(g);
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g.active_faces[a]) {
                int i, j, k;
                g.face_ijk(a, f, i, j, k);
                long chi = g.cid(i, j, k);
                long clo = g.cid(i - (a == 0), j - (a == 1), k - (a == 2));
                if (collar.member(chi) && collar.member(clo))
                    cstar.c[a][f] = qfsi::test::uream(rng);
            }
        std::vector<double> gdiv;
        stencil::div_faces(g, cstar, gdiv);
        VelocityField c = collar.apply(gdiv);
        std::vector<double> dc;
        stencil::div_faces(g, c, dc);
        double worst = 0;
        for (int32_t cc : g.fluid_cells)
            worst = std::max(worst, std::abs(dc[cc] - gdiv[cc]));
        REQUIRE(worst < 1e-8);
        // support control: nothing outside the collar
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g.active_faces[a]) {
                int i, j, k;
                g.face_ijk(a, f, i, j, k);
                long chi = g.cid(i, j, k);
                long clo = g.cid(i - (a == 0), j - (a == 1), k - (a == 2));
                if (!(collar.member(chi) && collar.member(clo)))
                    REQUIRE(c.c[a][f] == 0.0);
            }
    }

    SECTION("nonzero mean is rejected") {
        std::vector<double> bad(g.ncell, 0.0);
        bad[collar.cells()[0]] = 1.0;
        REQUIRE_THROWS_AS(collar.apply(bad), CompatibilityError);
    }
}

TEST_CASE("build_b: rest state, rigid interior values, divergence") {
    Grid g(GridConfig{20, 1.0, 0.9, 0.25, 0.3});
    CollarCorrection collar(g, g.r_gap);
    RigidBodyState body = RigidBodyState::ball(g.a_body);

    SECTION("rest gives b = 0 exactly") {
        BField b = build_b(body, g, collar, g.r_gap);
        for (int a = 0; a < 3; ++a)
            for (long f = 0; f < g.nf[a]; ++f) REQUIRE(b.faces.c[a][f] == 0.0);
    }

    SECTION("pure rotation matches omega x x away from the collar") {
        body.omega = Vec3(0, 0, 1);
        BField b = build_b(body, g, collar, g.r_gap);
        double inner = g.R_O - g.r_gap - 2.0 * g.dx - 0.5 * g.dx;
        for (int a = 0; a < 3; ++a)
            for (long f = 0; f < g.nf[a]; ++f) {
                int i, j, k;
                g.face_ijk(a, f, i, j, k);
                Vec3 x = g.face_center(a, i, j, k);
                if (x.norm() > inner) continue;
                double expect = Vec3(0, 0, 1).cross(x)[a];
                REQUIRE(b.faces.c[a][f] == Catch::Approx(expect).margin(1e-14));
            }
    }

    SECTION("random velocities: divergence-free, rigid at the interface") {
        auto rng = qfsi::test::make_rng(5);
        body.ell = Vec3(qfsi::test::uream(rng), qfsi::test::uream(rng),
                        qfsi::test::uream(rng));
        body.omega = Vec3(qfsi::test::uream(rng), qfsi::test::uream(rng),
                          qfsi::test::uream(rng));
        BField b = build_b(body, g, collar, g.r_gap);
        std::vector<double> dv;
        stencil::div_faces(g, b.faces, dv);
        double worst = 0;
        for (int32_t c : g.fluid_cells) worst = std::max(worst, std::abs(dv[c]));
        REQUIRE(worst < 1e-8);
        // faces adjacent to the body carry the rigid velocity exactly
        for (int a = 0; a < 3; ++a)
            for (long f = 0; f < g.nf[a]; ++f) {
                if (g.face_kind[a][f] != FaceKind::BodyFixed) continue;
                int i, j, k;
                g.face_ijk(a, f, i, j, k);
                Vec3 x = g.face_center(a, i, j, k);
                double expect = body.rigid_velocity_at(x)[a];
                REQUIRE(b.faces.c[a][f] == Catch::Approx(expect).margin(1e-13));
            }
    }

    SECTION("wall proximity raises CollisionError") {
        body.h = Vec3(0.54, 0, 0); // dist = 0.9 - (0.54 + 0.25) = 0.11 < r/2
        REQUIRE_THROWS_AS(build_b(body, g, collar, g.r_gap), CollisionError);
    }
}

TEST_CASE("advance_X: frozen at rest, rigid-rotation oracle") {
    Grid g(GridConfig{16, 1.0, 0.9, 0.25, 0.2});

    SECTION("b = 0 leaves the identity untouched") {
        TransformState ts(g);
        ts.refresh_geometry();
        BAtTime zero = [](double, const Vec3&) { return Vec3::Zero(); };
        advance_X(ts, zero, 0.05);
        for (long c = 0; c < g.ncell; ++c) {
            int i, j, k;
            g.cell_ijk(c, i, j, k);
            Vec3 x = g.cell_center(i, j, k);
            for (int a = 0; a < 3; ++a) {
                REQUIRE(ts.X[a][c] == x[a]);
                REQUIRE(ts.Y[a][c] == x[a]);
            }
        }
        ts.refresh_geometry();
        REQUIRE(ts.det_defect() < 1e-12);
    }

    SECTION("global rigid rotation matches the closed form") {
        TransformState ts(g);
        ts.refresh_geometry();
        Vec3 omega(0, 0, 1);
        Mat3 m = RigidBodyState::skew(omega);
        double dt = 2e-3;
        int nstep = 50;
        double t = 0;
        for (int s = 0; s < nstep; ++s) {
            BAtTime b = [&](double, const Vec3& x) -> Vec3 { return m * x; };
            advance_X(ts, b, dt);
            ts.refresh_geometry();
            t += dt;
        }
        Mat3 K = m;
        Mat3 R = Mat3::Identity() + std::sin(t) * K + (1 - std::cos(t)) * K * K;
        double worstX = 0;
        for (int32_t c : g.fluid_cells) {
            int i, j, k;
            g.cell_ijk(c, i, j, k);
            Vec3 y = g.cell_center(i, j, k);
            worstX = std::max(worstX, (ts.X_at(c) - R * y).norm());
        }
        INFO("max |X - R y| = " << worstX);
        REQUIRE(worstX < 1e-9);
        REQUIRE(ts.det_defect() < 1e-10);
        REQUIRE(ts.inverse_consistency() < 1e-7);
    }
}

TEST_CASE("metrics: identity, isometry, first-order scaling of Christoffels") {
    Grid g(GridConfig{16, 1.0, 0.9, 0.25, 0.2});

    SECTION("identity map") {
        TransformState ts(g);
        ts.refresh_geometry();
        for (int32_t c : g.fluid_cells) {
            REQUIRE((ts.gup_at(c) - Mat3::Identity()).norm() < 1e-12);
            for (int e = 0; e < 27; ++e) REQUIRE(std::abs(ts.gamma[e][c]) < 1e-12);
        }
    }

    SECTION("rotations are isometries") {
        TransformState ts(g);
        Vec3 axis = Vec3(1, 2, -1).normalized();
        Mat3 K = RigidBodyState::skew(axis);
        Mat3 R = Mat3::Identity() + std::sin(0.7) * K + (1 - std::cos(0.7)) * K * K;
        ts.set_from_map([&](const Vec3& y) -> Vec3 { return R * y; },
                        [&](const Vec3& x) -> Vec3 { return R.transpose() * x; });
        ts.refresh_geometry();
        for (int32_t c : g.fluid_cells) {
            REQUIRE((ts.gup_at(c) - Mat3::Identity()).norm() < 1e-12);
            for (int e = 0; e < 27; ++e) REQUIRE(std::abs(ts.gamma[e][c]) < 1e-8);
        }
        REQUIRE(ts.det_defect() < 1e-12);
        REQUIRE(ts.jacobian_consistency() < 1e-10);
    }

    SECTION("Gamma = O(eps) for X = id + eps phi") {
        auto phi = [](const Vec3& y) {
            return Vec3(std::sin(y[1]), std::cos(y[2]), std::sin(y[0] + y[1]));
        };
        std::vector<double> eps = {1e-2, 1e-3, 1e-4};
        std::vector<double> gmax;
        for (double e : eps) {
            TransformState ts(g);
            ts.set_from_map([&](const Vec3& y) -> Vec3 { return y + e * phi(y); },
                            [&](const Vec3& x) -> Vec3 { return x; });
            ts.refresh_geometry();
            double m = 0;
            for (int32_t c : g.fluid_cells)
                for (int q = 0; q < 27; ++q) m = std::max(m, std::abs(ts.gamma[q][c]));
            gmax.push_back(m);
        }
        double slope1 = std::log10(gmax[0] / gmax[1]);
        double slope2 = std::log10(gmax[1] / gmax[2]);
        INFO("Gamma maxima " << gmax[0] << " " << gmax[1] << " " << gmax[2]);
        REQUIRE(slope1 == Catch::Approx(1.0).margin(0.1));
        REQUIRE(slope2 == Catch::Approx(1.0).margin(0.1));
    }
}

TEST_CASE("transform invariants over a short driven run") {
    // small-amplitude run exercising the full b -> X -> geometry path
    Grid g(GridConfig{16, 1.0, 0.9, 0.25, 0.4});
    CollarCorrection collar(g, g.r_gap);
    RigidBodyState body = RigidBodyState::ball(g.a_body);
    auto rng = qfsi::test::make_rng(11);
    double amp = 2e-7;
    body.ell = amp * Vec3(qfsi::test::uream(rng), qfsi::test::uream(rng),
                          qfsi::test::uream(rng));
    body.omega = amp * Vec3(qfsi::test::uream(rng), qfsi::test::uream(rng),
                            qfsi::test::uream(rng));
    TransformState ts(g);
    ts.refresh_geometry();
    double dt = 0.01;
    for (int s = 0; s < 60; ++s) {
        body.advance_pose(dt);
        BField bf = build_b(body, g, collar, g.r_gap);
        BAtTime bt = [&](double, const Vec3& x) { return bf.at(x); };
        advance_X(ts, bt, dt);
        ts.refresh_geometry();
    }
    INFO("det defect " << ts.det_defect());
    REQUIRE(ts.det_defect() < 1e-6);
    INFO("jacobian consistency " << ts.jacobian_consistency());
    REQUIRE(ts.jacobian_consistency() < 1e-8);
    INFO("inverse consistency " << ts.inverse_consistency());
    REQUIRE(ts.inverse_consistency() < 1e-6 * g.dx);
    // locality: X = id exactly wherever dist(x, dO) <= r/2
    for (long c = 0; c < g.ncell; ++c) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        Vec3 x = g.cell_center(i, j, k);
        if (g.R_O - x.norm() > 0.5 * g.r_gap) continue;
        for (int a = 0; a < 3; ++a) REQUIRE(ts.X[a][c] == x[a]);
    }
}
