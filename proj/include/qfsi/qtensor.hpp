#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace qfsi {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Material and model parameters of the Beris-Edwards system.
/// All default to 1; mu_visc, lambda_el, a_c must stay positive.
struct ModelParams {
    double xi = 1.0;        // tumbling/alignment ratio, any real
    double mu_visc = 1.0;   // viscosity
    double lambda_el = 1.0; // elastic constant
    double a_c = 1.0;       // Landau-de Gennes a
    double b_c = 1.0;       // Landau-de Gennes b
    double c_c = 1.0;       // Landau-de Gennes c
};

/// Symmetric traceless 3x3 matrix stored by its five independent
/// components; q33 = -q11-q22 is implicit, so symmetry and
/// tracelessness hold by construction.
struct QTensor {
    double q11 = 0, q12 = 0, q13 = 0, q22 = 0, q23 = 0;

    QTensor() = default;
    QTensor(double a11, double a12, double a13, double a22, double a23)
        : q11(a11), q12(a12), q13(a13), q22(a22), q23(a23) {}

    static QTensor zero() { return {}; }

    /// Project a general matrix onto the symmetric traceless part.
    static QTensor from_matrix(const Mat3& m) {
        Mat3 s = 0.5 * (m + m.transpose());
        double t = s.trace() / 3.0;
        return {s(0, 0) - t, s(0, 1), s(0, 2), s(1, 1) - t, s(1, 2)};
    }

    /// Exact for matrices that are already symmetric traceless (no
    /// projection applied).
    static QTensor from_symmetric(const Mat3& s) {
        return {s(0, 0), s(0, 1), s(0, 2), s(1, 1), s(1, 2)};
    }

    Mat3 matrix() const {
        Mat3 m;
        m << q11, q12, q13,
             q12, q22, q23,
             q13, q23, -q11 - q22;
        return m;
    }

    double& operator[](int k) {
        switch (k) {
            case 0: return q11;
            case 1: return q12;
            case 2: return q13;
            case 3: return q22;
            default: return q23;
        }
    }
    double operator[](int k) const {
        return const_cast<QTensor&>(*this)[k];
    }

    QTensor& operator+=(const QTensor& o) {
        q11 += o.q11; q12 += o.q12; q13 += o.q13; q22 += o.q22; q23 += o.q23;
        return *this;
    }
    QTensor& operator-=(const QTensor& o) {
        q11 -= o.q11; q12 -= o.q12; q13 -= o.q13; q22 -= o.q22; q23 -= o.q23;
        return *this;
    }
    QTensor& operator*=(double s) {
        q11 *= s; q12 *= s; q13 *= s; q22 *= s; q23 *= s;
        return *this;
    }
    friend QTensor operator+(QTensor a, const QTensor& b) { return a += b; }
    friend QTensor operator-(QTensor a, const QTensor& b) { return a -= b; }
    friend QTensor operator*(double s, QTensor a) { return a *= s; }
    friend QTensor operator*(QTensor a, double s) { return a *= s; }

    double norm() const { return matrix().norm(); }
};

/// Frobenius pairing tr(X Y^T); for real arguments this is the paper's
/// A : B product.
inline double frob(const Mat3& x, const Mat3& y) {
    return (x.array() * y.array()).sum();
}

/// tr(Q^2) evaluated from the five stored components.
inline double tr_q2(const QTensor& q) {
    double q33 = -q.q11 - q.q22;
    return q.q11 * q.q11 + q.q22 * q.q22 + q33 * q33 +
           2.0 * (q.q12 * q.q12 + q.q13 * q.q13 + q.q23 * q.q23);
}

/// Bulk (non-Laplacian) part of the molecular field:
///   -a Q + b (Q^2 - tr(Q^2) I/3) - c tr(Q^2) Q.
/// The full field-level molecular field is lambda * laplacian(Q) + h_bulk(Q).
inline QTensor h_bulk(const QTensor& q, const ModelParams& p) {
    Mat3 m = q.matrix();
    Mat3 m2 = m * m;
    double t2 = m2.trace();
    Mat3 h = -p.a_c * m + p.b_c * (m2 - t2 / 3.0 * Mat3::Identity()) - p.c_c * t2 * m;
    return QTensor::from_symmetric(0.5 * (h + h.transpose()));
}

/// Low-order part H_l = (Q^2 - tr(Q^2) I/3) - tr(Q^2) Q (unit b, c).
inline QTensor h_low(const QTensor& q) {
    Mat3 m = q.matrix();
    Mat3 m2 = m * m;
    double t2 = m2.trace();
    Mat3 h = m2 - t2 / 3.0 * Mat3::Identity() - t2 * m;
    return QTensor::from_symmetric(0.5 * (h + h.transpose()));
}

/// S_xi(Q)A = [Q,A] - (2 xi/3) A - xi {Q,A} + 2 xi (Q + I/3) tr(QA).
/// Maps symmetric traceless A to a traceless (not symmetric) matrix.
inline Mat3 s_xi_apply(const QTensor& q, const QTensor& a, double xi) {
    Mat3 mq = q.matrix();
    Mat3 ma = a.matrix();
    Mat3 comm = mq * ma - ma * mq;
    Mat3 anti = mq * ma + ma * mq;
    double trqa = (mq * ma).trace();
    return comm - (2.0 * xi / 3.0) * ma - xi * anti +
           2.0 * xi * (mq + Mat3::Identity() / 3.0) * trqa;
}

/// S~_xi(Q)B for real arguments; maps a traceless matrix B to a
/// symmetric traceless one.  Adjoint of S_xi in the Frobenius pairing.
inline QTensor s_xi_tilde_apply(const QTensor& q, const Mat3& b, double xi) {
    Mat3 mq = q.matrix();
    Mat3 bs = 0.5 * (b + b.transpose());
    Mat3 ba = 0.5 * (b - b.transpose());
    Mat3 r = mq * ba - ba * mq
           - (2.0 * xi / 3.0) * bs
           - xi * (mq * bs + bs * mq)
           + 2.0 * xi * (mq + Mat3::Identity() / 3.0) * (mq.array() * bs.array()).sum();
    return QTensor::from_symmetric(0.5 * (r + r.transpose()));
}

/// Co-deformation term S(grad u, Q) of the Q evolution equation.
/// Satisfies S(G, Q) = -S~_xi(Q) G.
inline QTensor stretch_rotation_S(const Mat3& grad_u, const QTensor& q, double xi) {
    Mat3 mq = q.matrix();
    Mat3 d = 0.5 * (grad_u + grad_u.transpose());
    Mat3 w = 0.5 * (grad_u - grad_u.transpose());
    Mat3 qi = mq + Mat3::Identity() / 3.0;
    double trqg = (mq.array() * grad_u.transpose().array()).sum(); // tr(Q grad_u)
    Mat3 s = (xi * d + w) * qi + qi * (xi * d - w) - 2.0 * xi * qi * trqg;
    return QTensor::from_symmetric(0.5 * (s + s.transpose()));
}

/// Antisymmetric stress sigma = Q H - H Q.
inline Mat3 sigma_stress(const QTensor& q, const QTensor& hval) {
    Mat3 mq = q.matrix();
    Mat3 mh = hval.matrix();
    return mq * mh - mh * mq;
}

/// Gradient of Q in the three axis directions, stored pointwise.
struct QGrad {
    QTensor d[3];
};

/// (i,j) entry tr(d_i Qa d_j Qb); symmetric when both arguments coincide.
inline Mat3 odot(const QGrad& ga, const QGrad& gb) {
    Mat3 r;
    Mat3 ma[3] = {ga.d[0].matrix(), ga.d[1].matrix(), ga.d[2].matrix()};
    Mat3 mb[3] = {gb.d[0].matrix(), gb.d[1].matrix(), gb.d[2].matrix()};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = (ma[i] * mb[j]).trace();
    return r;
}

/// Higher-order symmetric stress
///   tau_h = -xi (2/3 Hh + {Q,Hh} - 2 (Q+I/3) tr(Q Hh)),
/// where Hh is the (discretely supplied) high-order molecular field
/// (Delta - I)Q.  Together with sigma it satisfies
/// tau_h + sigma = S_xi(Q)(Delta - I)Q.
inline Mat3 tau_h_stress(const QTensor& q, const QTensor& h_high, double xi) {
    Mat3 mq = q.matrix();
    Mat3 mh = h_high.matrix();
    double trqh = (mq * mh).trace();
    return -xi * ((2.0 / 3.0) * mh + mq * mh + mh * mq -
                  2.0 * (mq + Mat3::Identity() / 3.0) * trqh);
}

/// Lower-order symmetric stress
///   tau_l = 2 xi (Q+I/3)(tr(Q^3) - tr(Q^2)^2) - lambda grad Q (.) grad Q
///           - 2 xi (Q+I/3) H_l   ... assembled per the decomposition
/// tau = tau_h + tau_l with unit Landau coefficients.
inline Mat3 tau_l_stress(const QTensor& q, const QGrad& gq, const ModelParams& p) {
    Mat3 mq = q.matrix();
    Mat3 qi = mq + Mat3::Identity() / 3.0;
    Mat3 m2 = mq * mq;
    double t2 = m2.trace();
    double t3 = (m2 * mq).trace();
    Mat3 r = 2.0 * p.xi * qi * (t3 - t2 * t2)
           - p.lambda_el * odot(gq, gq)
           - 2.0 * p.xi * qi * h_low(q).matrix();
    return r;
}

/// Full symmetric stress
///   tau = -lambda grad Q (.) grad Q - xi (Q+I/3) H - xi H (Q+I/3)
///         + 2 xi (Q+I/3) tr(Q H),
/// with the molecular field supplied by the caller (so the discrete
/// Laplacian is shared with the rest of the scheme).
inline Mat3 tau_stress(const QTensor& q, const QTensor& hval, const QGrad& gq,
                       const ModelParams& p) {
    Mat3 mq = q.matrix();
    Mat3 mh = hval.matrix();
    Mat3 qi = mq + Mat3::Identity() / 3.0;
    double trqh = (mq * mh).trace();
    return -p.lambda_el * odot(gq, gq) - p.xi * (qi * mh + mh * qi) + 2.0 * p.xi * qi * trqh;
}

/// Landau-de Gennes + elastic free energy density
///   lambda/2 |grad Q|^2 + a/2 tr(Q^2) - b/3 tr(Q^3) + c/4 tr(Q^2)^2.
inline double free_energy_density(const QTensor& q, const QGrad& gq,
                                  const ModelParams& p) {
    Mat3 mq = q.matrix();
    Mat3 m2 = mq * mq;
    double t2 = m2.trace();
    double t3 = (m2 * mq).trace();
    double grad2 = 0.0;
    for (int k = 0; k < 3; ++k) grad2 += gq.d[k].matrix().squaredNorm();
    return 0.5 * p.lambda_el * grad2 + 0.5 * p.a_c * t2 - p.b_c / 3.0 * t3 +
           0.25 * p.c_c * t2 * t2;
}

} // namespace qfsi
