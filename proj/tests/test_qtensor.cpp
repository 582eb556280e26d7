#include <catch2/catch_amalgamated.hpp>

#include "qfsi/qtensor.hpp"
#include "test_util.hpp"

using namespace qfsi;
using qfsi::test::make_rng;
using qfsi::test::random_matrix;
using qfsi::test::random_qtensor;
using qfsi::test::random_traceless;

namespace {

// independent dense 3x3 evaluation of the constitutive formulas
Mat3 dense_s_xi(const Mat3& q, const Mat3& a, double xi) {
    Mat3 i3 = Mat3::Identity();
    return q * a - a * q - (2.0 * xi / 3.0) * a - xi * (q * a + a * q) +
           2.0 * xi * (q + i3 / 3.0) * (q * a).trace();
}

Mat3 dense_s_xi_tilde(const Mat3& q, const Mat3& b, double xi) {
    Mat3 i3 = Mat3::Identity();
    Mat3 bs = 0.5 * (b + b.transpose());
    Mat3 ba = 0.5 * (b - b.transpose());
    return q * ba - ba * q - (xi / 3.0) * (b + b.transpose()) -
           xi * (q * bs + bs * q) + xi * (q + i3 / 3.0) * (q * (b + b.transpose())).trace();
}

Mat3 dense_h_bulk(const Mat3& q, const ModelParams& p) {
    Mat3 q2 = q * q;
    double t2 = q2.trace();
    return -p.a_c * q + p.b_c * (q2 - t2 / 3.0 * Mat3::Identity()) - p.c_c * t2 * q;
}

} // namespace

TEST_CASE("QTensor reconstruction is symmetric traceless and exact") {
    auto rng = make_rng();
    for (int t = 0; t < 100; ++t) {
        QTensor q = random_qtensor(rng);
        Mat3 m = q.matrix();
        REQUIRE((m - m.transpose()).norm() == 0.0);
        REQUIRE(m.trace() == Catch::Approx(0.0).margin(1e-15));
        QTensor back = QTensor::from_symmetric(m);
        for (int k = 0; k < 5; ++k) REQUIRE(back[k] == q[k]);
    }
}

TEST_CASE("h_bulk matches the dense oracle") {
    ModelParams p;
    REQUIRE(h_bulk(QTensor::zero(), p).norm() == 0.0);

    // uniaxial Q = s (e3 x e3 - I/3), s = 1
    Mat3 n3 = Vec3(0, 0, 1) * Vec3(0, 0, 1).transpose();
    QTensor q = QTensor::from_symmetric(n3 - Mat3::Identity() / 3.0);
    Mat3 expect = dense_h_bulk(q.matrix(), p);
    REQUIRE((h_bulk(q, p).matrix() - expect).norm() < 1e-14);

    auto rng = make_rng(7);
    for (int t = 0; t < 10000; ++t) {
        QTensor qq = random_qtensor(rng);
        Mat3 h = h_bulk(qq, p).matrix();
        REQUIRE(std::abs(h.trace()) < 1e-14);
    }
}

TEST_CASE("S_xi collapse and oracle") {
    auto rng = make_rng(11);
    SECTION("Q = 0 gives -(2 xi/3) A") {
        for (int t = 0; t < 50; ++t) {
            QTensor a = random_qtensor(rng);
            double xi = qfsi::test::uream(rng, -2, 2);
            Mat3 got = s_xi_apply(QTensor::zero(), a, xi);
            REQUIRE((got + (2.0 * xi / 3.0) * a.matrix()).norm() < 1e-14);
        }
    }
    SECTION("xi = 0 gives the pure commutator") {
        for (int t = 0; t < 50; ++t) {
            QTensor q = random_qtensor(rng), a = random_qtensor(rng);
            Mat3 mq = q.matrix(), ma = a.matrix();
            REQUIRE((s_xi_apply(q, a, 0.0) - (mq * ma - ma * mq)).norm() < 1e-14);
        }
    }
    SECTION("random inputs agree with the dense formula and are traceless") {
        for (int t = 0; t < 2000; ++t) {
            QTensor q = random_qtensor(rng), a = random_qtensor(rng);
            double xi = qfsi::test::uream(rng, -2, 2);
            Mat3 got = s_xi_apply(q, a, xi);
            REQUIRE((got - dense_s_xi(q.matrix(), a.matrix(), xi)).norm() < 1e-13);
            REQUIRE(std::abs(got.trace()) < 1e-13);
        }
    }
}

TEST_CASE("S_xi_tilde collapse, symmetry and adjoint identity") {
    auto rng = make_rng(13);
    SECTION("Q = 0 gives -(xi/3)(B + B^T)") {
        for (int t = 0; t < 50; ++t) {
            Mat3 b = random_traceless(rng);
            double xi = qfsi::test::uream(rng, -2, 2);
            Mat3 got = s_xi_tilde_apply(QTensor::zero(), b, xi).matrix();
            REQUIRE((got + (xi / 3.0) * (b + b.transpose())).norm() < 1e-14);
        }
    }
    SECTION("symmetric B at xi = 0 is annihilated") {
        for (int t = 0; t < 50; ++t) {
            Mat3 b0 = random_traceless(rng);
            Mat3 b = 0.5 * (b0 + b0.transpose());
            QTensor q = random_qtensor(rng);
            REQUIRE(s_xi_tilde_apply(q, b, 0.0).norm() < 1e-14);
        }
    }
    SECTION("random inputs match the dense formula, output symmetric traceless") {
        for (int t = 0; t < 2000; ++t) {
            QTensor q = random_qtensor(rng);
            Mat3 b = random_traceless(rng);
            double xi = qfsi::test::uream(rng, -2, 2);
            Mat3 got = s_xi_tilde_apply(q, b, xi).matrix();
            Mat3 oracle = dense_s_xi_tilde(q.matrix(), b, xi);
            oracle = 0.5 * (oracle + oracle.transpose());
            REQUIRE((got - oracle).norm() < 1e-13);
            REQUIRE(std::abs(got.trace()) < 1e-13);
        }
    }
    SECTION("adjoint identity <S_xi(Q)A, B> = <A, S~_xi(Q)B>") {
        for (int t = 0; t < 10000; ++t) {
            QTensor q = random_qtensor(rng), a = random_qtensor(rng);
            Mat3 b = random_traceless(rng);
            double xi = qfsi::test::uream(rng, -2, 2);
            double lhs = frob(s_xi_apply(q, a, xi), b);
            double rhs = frob(a.matrix(), s_xi_tilde_apply(q, b, xi).matrix());
            REQUIRE(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("stretch_rotation_S properties") {
    auto rng = make_rng(17);
    SECTION("zero gradient") {
        QTensor q = random_qtensor(rng);
        REQUIRE(stretch_rotation_S(Mat3::Zero(), q, 0.7).norm() == 0.0);
    }
    SECTION("Q = 0 keeps only the xi/3 part") {
        for (int t = 0; t < 50; ++t) {
            Mat3 gu = random_traceless(rng); // velocity gradients are traceless
            double xi = qfsi::test::uream(rng, -2, 2);
            Mat3 got = stretch_rotation_S(gu, QTensor::zero(), xi).matrix();
            REQUIRE((got - (xi / 3.0) * (gu + gu.transpose())).norm() < 1e-14);
        }
    }
    SECTION("S(G,Q) + S~_xi(Q)G = 0") {
        for (int t = 0; t < 2000; ++t) {
            QTensor q = random_qtensor(rng);
            Mat3 gu = random_matrix(rng);
            gu -= gu.trace() / 3.0 * Mat3::Identity(); // velocity gradients are traceless
            double xi = qfsi::test::uream(rng, -2, 2);
            Mat3 s = stretch_rotation_S(gu, q, xi).matrix();
            Mat3 st = s_xi_tilde_apply(q, gu, xi).matrix();
            REQUIRE((s + st).norm() < 1e-12);
        }
    }
}

TEST_CASE("sigma antisymmetric and commutator oracle") {
    auto rng = make_rng(19);
    QTensor q = random_qtensor(rng);
    REQUIRE(sigma_stress(q, q).norm() < 1e-15);

    QTensor qd(0.4, 0, 0, -0.7, 0); // diagonal
    QTensor hd(1.1, 0, 0, 0.2, 0);
    REQUIRE(sigma_stress(qd, hd).norm() < 1e-15);

    for (int t = 0; t < 2000; ++t) {
        QTensor qq = random_qtensor(rng), hh = random_qtensor(rng);
        Mat3 s = sigma_stress(qq, hh);
        REQUIRE((s + s.transpose()).norm() < 1e-13);
        Mat3 oracle = qq.matrix() * hh.matrix() - hh.matrix() * qq.matrix();
        REQUIRE((s - oracle).norm() < 1e-13);
    }
}

TEST_CASE("odot oracle") {
    auto rng = make_rng(23);
    QGrad zero;
    REQUIRE(odot(zero, zero).norm() == 0.0);

    QGrad single;
    single.d[0] = random_qtensor(rng);
    Mat3 m = odot(single, single);
    REQUIRE(m(0, 0) >= 0.0);
    REQUIRE(std::abs(m(0, 0) - (single.d[0].matrix() * single.d[0].matrix()).trace()) <
            1e-14);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i || j) REQUIRE(m(i, j) == (i == 0 && j == 0 ? m(0, 0) : 0.0));

    for (int t = 0; t < 500; ++t) {
        QGrad a, b;
        for (int k = 0; k < 3; ++k) {
            a.d[k] = random_qtensor(rng);
            b.d[k] = random_qtensor(rng);
        }
        Mat3 got = odot(a, b);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double oracle = (a.d[i].matrix() * b.d[j].matrix()).trace();
                REQUIRE(std::abs(got(i, j) - oracle) < 1e-13);
            }
        Mat3 sym = odot(a, a);
        REQUIRE((sym - sym.transpose()).norm() < 1e-14);
    }
}

TEST_CASE("tau collapse, symmetry and the tau_h + sigma identity") {
    auto rng = make_rng(29);
    ModelParams p;
    SECTION("Q = 0, grad Q = 0 leaves -(2 xi/3) H") {
        for (int t = 0; t < 50; ++t) {
            QTensor h = random_qtensor(rng);
            p.xi = qfsi::test::uream(rng, -2, 2);
            Mat3 got = tau_stress(QTensor::zero(), h, QGrad{}, p);
            REQUIRE((got + (2.0 * p.xi / 3.0) * h.matrix()).norm() < 1e-14);
        }
    }
    SECTION("grad Q = 0 and xi = 0 vanishes") {
        p.xi = 0.0;
        QTensor q = random_qtensor(rng), h = random_qtensor(rng);
        REQUIRE(tau_stress(q, h, QGrad{}, p).norm() < 1e-15);
    }
    SECTION("tau is symmetric") {
        p.xi = 0.8;
        for (int t = 0; t < 500; ++t) {
            QTensor q = random_qtensor(rng), h = random_qtensor(rng);
            QGrad gq;
            for (int k = 0; k < 3; ++k) gq.d[k] = random_qtensor(rng);
            Mat3 tau = tau_stress(q, h, gq, p);
            REQUIRE((tau - tau.transpose()).norm() < 1e-13);
        }
    }
    SECTION("tau_h + sigma = S_xi(Q)(high-order molecular field)") {
        for (int t = 0; t < 2000; ++t) {
            QTensor q = random_qtensor(rng);
            QTensor hh = random_qtensor(rng); // stands in for (lap - I)Q
            double xi = qfsi::test::uream(rng, -2, 2);
            QTensor hfull = hh + h_low(q);
            Mat3 lhs = tau_h_stress(q, hh, xi) + sigma_stress(q, hfull);
            Mat3 rhs = s_xi_apply(q, hh, xi);
            REQUIRE((lhs - rhs).norm() < 1e-12);
        }
    }
    SECTION("tau_h + tau_l reassemble tau at unit parameters") {
        for (int t = 0; t < 500; ++t) {
            QTensor q = random_qtensor(rng);
            QTensor hh = random_qtensor(rng);
            QGrad gq;
            for (int k = 0; k < 3; ++k) gq.d[k] = random_qtensor(rng);
            p.xi = qfsi::test::uream(rng, -2, 2);
            QTensor hfull = hh + h_low(q);
            Mat3 whole = tau_stress(q, hfull, gq, p);
            Mat3 split = tau_h_stress(q, hh, p.xi) + tau_l_stress(q, gq, p);
            REQUIRE((whole - split).norm() < 1e-12);
        }
    }
}

TEST_CASE("free energy density values and scaling") {
    ModelParams p;
    REQUIRE(free_energy_density(QTensor::zero(), QGrad{}, p) == 0.0);

    // uniaxial Q = s (e3 x e3 - I/3), grad Q = 0, parameters 1
    double s = 1.0;
    Mat3 n3 = Vec3(0, 0, 1) * Vec3(0, 0, 1).transpose();
    QTensor q = QTensor::from_symmetric(s * (n3 - Mat3::Identity() / 3.0));
    double t2 = 2.0 * s * s / 3.0;
    double t3 = 2.0 * s * s * s / 9.0;
    double expect = 0.5 * t2 - t3 / 3.0 + 0.25 * t2 * t2;
    REQUIRE(free_energy_density(q, QGrad{}, p) == Catch::Approx(expect).epsilon(1e-14));

    // homogeneity of the a- and c-terms with b = 0
    ModelParams pb;
    pb.b_c = 0.0;
    auto rng = make_rng(31);
    for (int t = 0; t < 50; ++t) {
        QTensor qq = random_qtensor(rng);
        ModelParams pa = pb, pc = pb;
        pa.c_c = 0.0;
        pc.a_c = 0.0;
        double ea1 = free_energy_density(qq, QGrad{}, pa);
        double ec1 = free_energy_density(qq, QGrad{}, pc);
        double ea2 = free_energy_density(2.0 * qq, QGrad{}, pa);
        double ec2 = free_energy_density(2.0 * qq, QGrad{}, pc);
        REQUIRE(ea2 == Catch::Approx(4.0 * ea1).epsilon(1e-12));
        REQUIRE(ec2 == Catch::Approx(16.0 * ec1).epsilon(1e-12));
    }
}
