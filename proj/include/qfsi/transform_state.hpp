#pragma once

#include <array>
#include <functional>

#include "qfsi/transform.hpp"

namespace qfsi {

/// b(theta, x): transport field at intermediate step time theta in [0,1].
using BAtTime = std::function<Vec3(double, const Vec3&)>;

/// Full-lattice samples of the diffeomorphism X(t,.), its inverse Y(t,.)
/// and every derived geometric quantity needed by the transformed
/// operators.  All samples live on the cell-center lattice; derivatives are
/// centered differences of the node samples (one sided at the box edge).
///
/// Index conventions: jx[3*m+n] is dX_m/dy_n; ainv[3*m+n] is (J_X^{-1})_mn,
/// which equals (dY_m/dx_n) composed with X; gup/gdn are the contravariant
/// and covariant metric tensors; gamma[(i*3+j)*3+k] is Gamma^i_{jk}.
struct TransformState {
    const Grid* g = nullptr;
    double time = 0;

    std::array<std::vector<double>, 3> X;  // X(t,y) samples
    std::array<std::vector<double>, 3> Y;  // Y(t,x) samples

    std::array<std::vector<double>, 9> jx;    // J_X by differencing X
    std::array<std::vector<double>, 9> ainv;  // exact inverse of jx per node
    std::vector<double> detjx;
    std::array<std::vector<double>, 9> gup;   // g^{ij} = (A A^T)
    std::array<std::vector<double>, 9> gdn;   // g_{ij} = (J^T J)
    std::array<std::vector<double>, 27> gamma;
    std::array<std::vector<double>, 3> lapY;  // (Delta Y_k) o X
    std::array<std::vector<double>, 3> dtY;   // b^(Y)(t,y) = -A b(t, X(y))
    std::array<std::vector<double>, 9> djdtX; // d_j of (d_t X_k) = d_j [b o X]

    explicit TransformState(const Grid& grid) : g(&grid) {
        for (auto& v : X) v.assign(grid.ncell, 0.0);
        for (auto& v : Y) v.assign(grid.ncell, 0.0);
        reset_identity();
    }

    void reset_identity() {
        const Grid& gr = *g;
        for (long c = 0; c < gr.ncell; ++c) {
            int i, j, k;
            gr.cell_ijk(c, i, j, k);
            Vec3 x = gr.cell_center(i, j, k);
            for (int a = 0; a < 3; ++a) {
                X[a][c] = x[a];
                Y[a][c] = x[a];
            }
        }
        time = 0;
    }

    /// Overwrite samples from analytic maps (test oracles and equivariance
    /// studies use this; the simulator advances the ODE instead).
    void set_from_map(const std::function<Vec3(const Vec3&)>& xmap,
                      const std::function<Vec3(const Vec3&)>& ymap) {
        const Grid& gr = *g;
        for (long c = 0; c < gr.ncell; ++c) {
            int i, j, k;
            gr.cell_ijk(c, i, j, k);
            Vec3 y = gr.cell_center(i, j, k);
            Vec3 xv = xmap(y), yv = ymap(y);
            for (int a = 0; a < 3; ++a) {
                X[a][c] = xv[a];
                Y[a][c] = yv[a];
            }
        }
    }

    Vec3 X_at(long c) const { return {X[0][c], X[1][c], X[2][c]}; }
    Mat3 jx_at(long c) const {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = jx[3 * i + j][c];
        return m;
    }
    Mat3 ainv_at(long c) const {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = ainv[3 * i + j][c];
        return m;
    }
    Mat3 gup_at(long c) const {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = gup[3 * i + j][c];
        return m;
    }

    /// Recompute Jacobians, the metric tensors, Christoffel symbols and the
    /// composed Laplacian of Y from the current samples.
    void refresh_geometry(const BAtTime* b_now = nullptr) {
        const Grid& gr = *g;
        std::vector<double> tmp;
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                stencil::d1_full(gr, X[m], n, tmp);
                jx[3 * m + n] = tmp;
            }
        detjx.assign(gr.ncell, 0.0);
        for (auto& v : ainv) v.assign(gr.ncell, 0.0);
        for (auto& v : gup) v.assign(gr.ncell, 0.0);
        for (auto& v : gdn) v.assign(gr.ncell, 0.0);
        for (long c = 0; c < gr.ncell; ++c) {
            Mat3 J = jx_at(c);
            double det = J.determinant();
            detjx[c] = det;
            Mat3 A = J.inverse();
            Mat3 GU = A * A.transpose();
            Mat3 GD = J.transpose() * J;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    ainv[3 * i + j][c] = A(i, j);
                    gup[3 * i + j][c] = GU(i, j);
                    gdn[3 * i + j][c] = GD(i, j);
                }
        }
        // Christoffel symbols from differenced covariant metrics
        std::array<std::vector<double>, 27> dg; // dg[(i*3+j)*3+k] = d_k g_ij
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    stencil::d1_full(gr, gdn[3 * i + j], k, tmp);
                    dg[(i * 3 + j) * 3 + k] = tmp;
                }
        for (auto& v : gamma) v.assign(gr.ncell, 0.0);
        for (long c = 0; c < gr.ncell; ++c) {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = j; k < 3; ++k) {
                        double s = 0;
                        for (int l = 0; l < 3; ++l)
                            s += gup[3 * i + l][c] *
                                 (dg[(j * 3 + l) * 3 + k][c] +
                                  dg[(k * 3 + l) * 3 + j][c] -
                                  dg[(j * 3 + k) * 3 + l][c]);
                        double v = 0.5 * s;
                        gamma[(i * 3 + j) * 3 + k][c] = v;
                        gamma[(i * 3 + k) * 3 + j][c] = v;
                    }
        }
        // (Delta Y_k) o X = sum_{m,n} A_nm d_n A_km
        std::array<std::array<std::vector<double>, 3>, 9> dA;
        for (int e = 0; e < 9; ++e)
            for (int n2 = 0; n2 < 3; ++n2) stencil::d1_full(gr, ainv[e], n2, dA[e][n2]);
        for (int k = 0; k < 3; ++k) {
            lapY[k].assign(gr.ncell, 0.0);
            for (long c = 0; c < gr.ncell; ++c) {
                double s = 0;
                for (int m = 0; m < 3; ++m)
                    for (int n2 = 0; n2 < 3; ++n2)
                        s += ainv[3 * n2 + m][c] * dA[3 * k + m][n2][c];
                lapY[k][c] = s;
            }
        }
        // dtY = -A b(t, X(y)) and its use in the M operator; also d_j(dtX)
        std::array<std::vector<double>, 3> bX;
        for (auto& v : bX) v.assign(gr.ncell, 0.0);
        if (b_now) {
            for (long c = 0; c < gr.ncell; ++c) {
                Vec3 bx = (*b_now)(0.0, X_at(c));
                for (int a = 0; a < 3; ++a) bX[a][c] = bx[a];
            }
        }
        for (int a = 0; a < 3; ++a) dtY[a].assign(gr.ncell, 0.0);
        if (b_now) {
            for (long c = 0; c < gr.ncell; ++c) {
                Vec3 bx{bX[0][c], bX[1][c], bX[2][c]};
                Vec3 w = -ainv_at(c) * bx;
                for (int a = 0; a < 3; ++a) dtY[a][c] = w[a];
            }
        }
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                if (b_now) {
                    stencil::d1_full(gr, bX[m], n, tmp);
                    djdtX[3 * m + n] = tmp;
                } else {
                    djdtX[3 * m + n].assign(gr.ncell, 0.0);
                }
            }
    }

    /// Max |det J_X - 1| over the lattice.
    double det_defect() const {
        double m = 0;
        for (double d : detjx) m = std::max(m, std::abs(d - 1.0));
        return m;
    }

    /// Max over nodes of || J_X(y) J_Y(X(y)) - I || where J_Y comes from
    /// differencing the Y samples and tricubic interpolation at X(y).
    double jacobian_consistency() const {
        const Grid& gr = *g;
        std::array<std::vector<double>, 9> jy;
        std::vector<double> tmp;
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                stencil::d1_full(gr, Y[m], n, tmp);
                jy[3 * m + n] = tmp;
            }
        double worst = 0;
        for (int32_t c : gr.fluid_cells) {
            Vec3 x = X_at(c);
            Mat3 JY;
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n)
                    JY(m, n) = stencil::interp_cell_cubic(gr, jy[3 * m + n], x);
            worst = std::max(worst, (jx_at(c) * JY - Mat3::Identity()).norm());
        }
        return worst;
    }

    /// Max over fluid nodes of |Y(t, X(t,y)) - y| (tricubic interpolation of
    /// the Y samples at X(y)).
    double inverse_consistency() const {
        const Grid& gr = *g;
        double worst = 0;
        for (int32_t c : gr.fluid_cells) {
            int i, j, k;
            gr.cell_ijk(c, i, j, k);
            Vec3 y = gr.cell_center(i, j, k);
            Vec3 x = X_at(c);
            Vec3 yy{stencil::interp_cell_cubic(gr, Y[0], x),
                    stencil::interp_cell_cubic(gr, Y[1], x),
                    stencil::interp_cell_cubic(gr, Y[2], x)};
            worst = std::max(worst, (yy - y).norm());
        }
        return worst;
    }
};

/// One classical RK4 sweep of dX/dt = b(t, X) per node, followed by the
/// inverse map update dY/dt = b^(Y)(t, Y) with
/// b^(Y)(t,y) = -J_X^{-1}(t,y) b(t, X(t,y)); geometric fields are refreshed
/// from the new samples.  Throws CollisionError when the body violates the
/// r/2 wall margin.
inline void advance_X(TransformState& ts, const BAtTime& b, double dt,
                      const BAtTime* b_end = nullptr) {
    const Grid& gr = *ts.g;
    auto bt = [&](double th, const Vec3& x) -> Vec3 {
        if (!b_end) return b(th, x);
        Vec3 b0 = b(th, x), b1 = (*b_end)(th, x);
        return (1.0 - th) * b0 + th * b1;
    };
    std::array<std::vector<double>, 3> Xold = ts.X;
    // X update
    for (long c = 0; c < gr.ncell; ++c) {
        Vec3 x = ts.X_at(c);
        Vec3 k1 = bt(0.0, x);
        Vec3 k2 = bt(0.5, x + 0.5 * dt * k1);
        Vec3 k3 = bt(0.5, x + 0.5 * dt * k2);
        Vec3 k4 = bt(1.0, x + dt * k3);
        Vec3 xn = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        for (int a = 0; a < 3; ++a) ts.X[a][c] = xn[a];
    }
    // end-of-step inverse Jacobians for second-order staging of the inverse
    // map equation
    std::array<std::vector<double>, 9> ainv_new;
    {
        std::vector<double> tmp;
        std::array<std::vector<double>, 9> jxn;
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                stencil::d1_full(gr, ts.X[m], n, tmp);
                jxn[3 * m + n] = tmp;
            }
        for (auto& v : ainv_new) v.assign(gr.ncell, 0.0);
        for (long c = 0; c < gr.ncell; ++c) {
            Mat3 J;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) J(i, j) = jxn[3 * i + j][c];
            Mat3 A = J.inverse();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) ainv_new[3 * i + j][c] = A(i, j);
        }
    }
    // Y update: b^(Y)(th, y) = -A(th, y) b(th, X(th, y)) with A and X
    // linearly interpolated in time and tricubically in space
    auto bY = [&](double th, const Vec3& y) -> Vec3 {
        Mat3 A;
        for (int e2 = 0; e2 < 9; ++e2) {
            double a0 = stencil::interp_cell_cubic(gr, ts.ainv[e2], y);
            double a1 = stencil::interp_cell_cubic(gr, ainv_new[e2], y);
            A(e2 / 3, e2 % 3) = (1.0 - th) * a0 + th * a1;
        }
        Vec3 xy;
        for (int a = 0; a < 3; ++a) {
            double x0 = stencil::interp_cell_cubic(gr, Xold[a], y);
            double x1 = stencil::interp_cell_cubic(gr, ts.X[a], y);
            xy[a] = (1.0 - th) * x0 + th * x1;
        }
        return -(A * bt(th, xy));
    };
    for (long c = 0; c < gr.ncell; ++c) {
        Vec3 y{ts.Y[0][c], ts.Y[1][c], ts.Y[2][c]};
        Vec3 k1 = bY(0.0, y);
        Vec3 k2 = bY(0.5, y + 0.5 * dt * k1);
        Vec3 k3 = bY(0.5, y + 0.5 * dt * k2);
        Vec3 k4 = bY(1.0, y + dt * k3);
        Vec3 yn = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        for (int a = 0; a < 3; ++a) ts.Y[a][c] = yn[a];
    }
    ts.time += dt;
}

} // namespace qfsi
