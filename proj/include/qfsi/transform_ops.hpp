#pragma once

#include "qfsi/fields.hpp"
#include "qfsi/qtensor.hpp"
#include "qfsi/transform_state.hpp"

namespace qfsi {

/// Cell-collocated vector field (used for the explicit transformed terms).
using Vec3Field = std::array<std::vector<double>, 3>;

inline Vec3Field make_vec3_field(const Grid& g) {
    Vec3Field f;
    for (auto& v : f) v.assign(g.ncell, 0.0);
    return f;
}

/// Average staggered components to cell centers (boundary faces included,
/// so the interface data participates).
inline Vec3Field collocate(const Grid& g, const VelocityField& v) {
    Vec3Field out = make_vec3_field(g);
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        out[0][c] = 0.5 * (v.c[0][g.fid(0, i, j, k)] + v.c[0][g.fid(0, i + 1, j, k)]);
        out[1][c] = 0.5 * (v.c[1][g.fid(1, i, j, k)] + v.c[1][g.fid(1, i, j + 1, k)]);
        out[2][c] = 0.5 * (v.c[2][g.fid(2, i, j, k)] + v.c[2][g.fid(2, i, j, k + 1)]);
    }
    return out;
}

/// Access symmetric traceless component planes by full (i,j) indices.
struct SymView {
    const std::array<std::vector<double>, 5>* f;
    double operator()(long c, int i, int j) const {
        static constexpr int map[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, -1}};
        int m = map[i][j];
        if (m >= 0) return (*f)[m][c];
        return -(*f)[0][c] - (*f)[3][c];
    }
};

/// Named sub-terms of the stress divergences div sigma and div tau,
/// evaluated at A = Q (the integrator only needs the diagonal of the
/// bilinear forms).
struct StressDivTerms {
    Vec3Field b_sigma_11, b_sigma_12, b_sigma_2;
    Vec3Field b_tau_h1, b_tau_h2, b_tau_h3;
    Vec3Field b_tau_l1, b_tau_l2, b_tau_l3;
    Vec3Field b_sigma; // sigma_11 + sigma_12 + sigma_2
    Vec3Field b_tau;   // xi (h1 + h2 + h3 + l1) + l2 - xi l3
};

/// The stress-divergence assembly written once against a derivative
/// provider: D.dx(f, j) is the (possibly transformed) spatial derivative of
/// cell field f and D.l2(f) the (possibly transformed) Laplacian.  With the
/// flat provider every term reduces to the plain stencil composition, which
/// is exactly the untransformed operator family.
template <class Deriv>
StressDivTerms stress_divergence_terms(const Grid& g, const QTensorField& q,
                                       double xi, const Deriv& D) {
    StressDivTerms t;
    QTensorField l2q(g);
    for (int m = 0; m < 5; ++m) l2q.c[m] = D.l2(q.c[m]);
    std::array<std::array<std::vector<double>, 5>, 3> dxq, dxl2q;
    for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 5; ++m) {
            dxq[j][m] = D.dx(q.c[m], j);
            dxl2q[j][m] = D.dx(l2q.c[m], j);
        }
    SymView Q{&q.c}, L2Q{&l2q.c};
    auto DQ = [&](int j) { return SymView{&dxq[j]}; };
    auto DL2Q = [&](int j) { return SymView{&dxl2q[j]}; };

    t.b_sigma_11 = make_vec3_field(g);
    t.b_sigma_12 = make_vec3_field(g);
    t.b_sigma_2 = make_vec3_field(g);
    for (int32_t c : g.fluid_cells)
        for (int i = 0; i < 3; ++i) {
            double s11 = 0, s12 = 0, s2 = 0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    s11 += DQ(j)(c, i, k) * L2Q(c, k, j);
                    s12 += Q(c, i, k) * DL2Q(j)(c, k, j);
                    s2 -= DL2Q(j)(c, i, k) * Q(c, k, j) + L2Q(c, i, k) * DQ(j)(c, k, j);
                }
            t.b_sigma_11[i][c] = s11;
            t.b_sigma_12[i][c] = s12;
            t.b_sigma_2[i][c] = s2;
        }

    // tau_h1 = -(2/3) dx_j (L2 Q - Q)_ij
    t.b_tau_h1 = make_vec3_field(g);
    for (int32_t c : g.fluid_cells)
        for (int i = 0; i < 3; ++i) {
            double s = 0;
            for (int j = 0; j < 3; ++j) s += DL2Q(j)(c, i, j) - DQ(j)(c, i, j);
            t.b_tau_h1[i][c] = -(2.0 / 3.0) * s;
        }

    // tau_h2 = -B_sigma1 + B_sigma2 + 2 [dx_j(Q_ik) Q_kj + Q_ik dx_j(Q_kj)]
    t.b_tau_h2 = make_vec3_field(g);
    for (int32_t c : g.fluid_cells)
        for (int i = 0; i < 3; ++i) {
            double extra = 0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    extra += DQ(j)(c, i, k) * Q(c, k, j) + Q(c, i, k) * DQ(j)(c, k, j);
            t.b_tau_h2[i][c] = -(t.b_sigma_11[i][c] + t.b_sigma_12[i][c]) +
                               t.b_sigma_2[i][c] + 2.0 * extra;
        }

    // tau_h3 = 2 [ dx_j(Q_ij) (tr(Q L2Q) - tr(Q^2))
    //            + (Q_ij + d_ij/3) dx_j(tr(Q L2Q) - tr(Q^2)) ]  (product rule)
    t.b_tau_h3 = make_vec3_field(g);
    for (int32_t c : g.fluid_cells) {
        double trQL = 0, trQQ = 0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                trQL += Q(c, k, l) * L2Q(c, l, k);
                trQQ += Q(c, k, l) * Q(c, l, k);
            }
        for (int i = 0; i < 3; ++i) {
            double s = 0;
            for (int j = 0; j < 3; ++j) {
                double dj_trQL = 0, dj_trQQ = 0;
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        dj_trQL += DQ(j)(c, k, l) * L2Q(c, l, k) +
                                   Q(c, k, l) * DL2Q(j)(c, l, k);
                        dj_trQQ += 2.0 * DQ(j)(c, k, l) * Q(c, l, k);
                    }
                double qi = Q(c, i, j) + (i == j ? 1.0 / 3.0 : 0.0);
                s += DQ(j)(c, i, j) * (trQL - trQQ) + qi * (dj_trQL - dj_trQQ);
            }
            t.b_tau_h3[i][c] = 2.0 * s;
        }
    }

    // tau_l1 = 2 [ dx_j(Q_ij) (tr Q^3 - (tr Q^2)^2)
    //            + (Q_ij + d_ij/3) dx_j(tr Q^3 - (tr Q^2)^2) ]
    std::vector<double> s3(g.ncell, 0.0);
    for (int32_t c : g.fluid_cells) {
        Mat3 m = q.at(c).matrix();
        Mat3 m2 = m * m;
        s3[c] = (m2 * m).trace() - m2.trace() * m2.trace();
    }
    std::array<std::vector<double>, 3> dxs3;
    for (int j = 0; j < 3; ++j) dxs3[j] = D.dx(s3, j);
    t.b_tau_l1 = make_vec3_field(g);
    for (int32_t c : g.fluid_cells)
        for (int i = 0; i < 3; ++i) {
            double s = 0;
            for (int j = 0; j < 3; ++j) {
                double qi = Q(c, i, j) + (i == j ? 1.0 / 3.0 : 0.0);
                s += DQ(j)(c, i, j) * s3[c] + qi * dxs3[j][c];
            }
            t.b_tau_l1[i][c] = 2.0 * s;
        }

    // tau_l2 = -[ dx_i(Q_jk) (L2 Q)_kj + dx_l(Q_kj) dx_l(dx_i Q_jk) ]
    t.b_tau_l2 = make_vec3_field(g);
    {
        std::array<std::array<std::array<std::vector<double>, 5>, 3>, 3> dxx;
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 5; ++m) dxx[i][l][m] = D.dx(dxq[i][m], l);
        for (int32_t c : g.fluid_cells)
            for (int i = 0; i < 3; ++i) {
                double s = 0;
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) {
                        s += DQ(i)(c, j, k) * L2Q(c, k, j);
                        for (int l = 0; l < 3; ++l)
                            s += DQ(l)(c, k, j) * SymView{&dxx[i][l]}(c, j, k);
                    }
                t.b_tau_l2[i][c] = -s;
            }
    }

    // tau_l3 = div of 2 (Q + I/3) H_l (enters tau with a minus sign)
    QTensorField hl(g);
    for (int32_t c : g.fluid_cells) hl.set(c, h_low(q.at(c)));
    std::array<std::array<std::vector<double>, 5>, 3> dxhl;
    for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 5; ++m) dxhl[j][m] = D.dx(hl.c[m], j);
    SymView HL{&hl.c};
    auto DHL = [&](int j) { return SymView{&dxhl[j]}; };
    t.b_tau_l3 = make_vec3_field(g);
    for (int32_t c : g.fluid_cells)
        for (int i = 0; i < 3; ++i) {
            double s = 0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double qik = Q(c, i, k) + (i == k ? 1.0 / 3.0 : 0.0);
                    s += DQ(j)(c, i, k) * HL(c, k, j) + qik * DHL(j)(c, k, j);
                }
            t.b_tau_l3[i][c] = 2.0 * s;
        }

    t.b_sigma = make_vec3_field(g);
    t.b_tau = make_vec3_field(g);
    for (int i = 0; i < 3; ++i)
        for (int32_t c : g.fluid_cells) {
            t.b_sigma[i][c] =
                t.b_sigma_11[i][c] + t.b_sigma_12[i][c] + t.b_sigma_2[i][c];
            t.b_tau[i][c] =
                xi * (t.b_tau_h1[i][c] + t.b_tau_h2[i][c] + t.b_tau_h3[i][c]) +
                xi * t.b_tau_l1[i][c] + t.b_tau_l2[i][c] - xi * t.b_tau_l3[i][c];
        }
    return t;
}

/// Flat derivative provider: plain masked stencils.
struct FlatDeriv {
    const Grid* g;
    std::vector<double> dx(const std::vector<double>& f, int j) const {
        std::vector<double> out;
        stencil::d1(*g, f, j, out);
        return out;
    }
    std::vector<double> l2(const std::vector<double>& f) const {
        std::vector<double> out;
        stencil::laplacian(*g, f, out);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Flat (untransformed) operators on collocated fields.
// ---------------------------------------------------------------------------

namespace flat {

inline Vec3Field laplacian_vec(const Grid& g, const Vec3Field& v) {
    Vec3Field out = make_vec3_field(g);
    std::vector<double> tmp;
    for (int i = 0; i < 3; ++i) {
        stencil::laplacian(g, v[i], tmp);
        for (int32_t c : g.fluid_cells) out[i][c] = tmp[c];
    }
    return out;
}

inline Vec3Field convection(const Grid& g, const Vec3Field& v) {
    Vec3Field out = make_vec3_field(g);
    std::vector<double> tmp;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            stencil::d1(g, v[i], j, tmp);
            for (int32_t c : g.fluid_cells) out[i][c] += v[j][c] * tmp[c];
        }
    return out;
}

inline Vec3Field gradient(const Grid& g, const std::vector<double>& p) {
    Vec3Field out = make_vec3_field(g);
    std::vector<double> tmp;
    for (int i = 0; i < 3; ++i) {
        stencil::d1(g, p, i, tmp);
        for (int32_t c : g.fluid_cells) out[i][c] = tmp[c];
    }
    return out;
}

/// Collocated velocity gradient, (i,j) = d_j v_i with the same first
/// derivative stencil family as the transformed D operator.
inline Matrix3Field grad_collocated(const Grid& g, const Vec3Field& v) {
    Matrix3Field out(g);
    std::vector<double> tmp;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            stencil::d1(g, v[i], j, tmp);
            for (int32_t c : g.fluid_cells) out.c[3 * i + j][c] = tmp[c];
        }
    return out;
}

inline StressDivTerms stress_divergence_terms(const Grid& g, const QTensorField& q,
                                              double xi) {
    FlatDeriv d{&g};
    return qfsi::stress_divergence_terms(g, q, xi, d);
}

/// div S_xi(0)(lap - I)Q = -(2 xi/3) div(lap Q - Q) with the shared
/// composite stencils (identical code path to b_tau_h1 scaled by xi).
inline Vec3Field div_sxi0_hh(const Grid& g, const QTensorField& q, double xi) {
    StressDivTerms t = stress_divergence_terms(g, q, 0.0);
    Vec3Field out = make_vec3_field(g);
    for (int i = 0; i < 3; ++i)
        for (int32_t c : g.fluid_cells) out[i][c] = xi * t.b_tau_h1[i][c];
    return out;
}

} // namespace flat

// ---------------------------------------------------------------------------
// Transformed operators on the fixed domain.
// ---------------------------------------------------------------------------

class TransformedOps {
  public:
    TransformedOps(const Grid& g, const TransformState& ts) : g_(g), ts_(ts) {
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    stencil::d1_full(g, ts.jx[3 * i + k], l, ddX_[i][k][l]);
    }

    const TransformState& state() const { return ts_; }

    /// Transformed spatial derivative dx_j f = sum_m A_mj d_m f.
    std::vector<double> dx(const std::vector<double>& f, int j) const {
        std::vector<double> out(g_.ncell, 0.0), tmp;
        for (int m = 0; m < 3; ++m) {
            stencil::d1(g_, f, m, tmp);
            const auto& a = ts_.ainv[3 * m + j];
            for (int32_t c : g_.fluid_cells) out[c] += a[c] * tmp[c];
        }
        return out;
    }

    /// Transformed scalar Laplacian L2 f = g^{kl} d_k d_l f + (lap Y_k) d_k f.
    std::vector<double> l2(const std::vector<double>& f) const {
        std::vector<double> out(g_.ncell, 0.0), tmp;
        for (int k = 0; k < 3; ++k) {
            stencil::d2(g_, f, k, tmp);
            const auto& gk = ts_.gup[3 * k + k];
            for (int32_t c : g_.fluid_cells) out[c] += gk[c] * tmp[c];
        }
        for (int k = 0; k < 3; ++k)
            for (int l = k + 1; l < 3; ++l) {
                stencil::d2m(g_, f, k, l, tmp);
                const auto& gkl = ts_.gup[3 * k + l];
                for (int32_t c : g_.fluid_cells) out[c] += 2.0 * gkl[c] * tmp[c];
            }
        for (int k = 0; k < 3; ++k) {
            stencil::d1(g_, f, k, tmp);
            const auto& ly = ts_.lapY[k];
            for (int32_t c : g_.fluid_cells) out[c] += ly[c] * tmp[c];
        }
        return out;
    }

    QTensorField l2_field(const QTensorField& q) const {
        QTensorField out(g_);
        for (int m = 0; m < 5; ++m) out.c[m] = l2(q.c[m]);
        return out;
    }

    /// Transformed vector Laplacian L1 on a collocated field.
    Vec3Field l1(const Vec3Field& v) const {
        Vec3Field out = make_vec3_field(g_);
        std::vector<double> tmp;
        std::array<std::array<std::vector<double>, 3>, 3> dv; // dv[j][i] = d_j v_i
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) stencil::d1(g_, v[i], j, dv[j][i]);
        for (int i = 0; i < 3; ++i) {
            // g^{jk} d_j d_k v_i + (d_j g^{jk}) d_k v_i
            for (int k = 0; k < 3; ++k) {
                stencil::d2(g_, v[i], k, tmp);
                const auto& gk = ts_.gup[3 * k + k];
                for (int32_t c : g_.fluid_cells) out[i][c] += gk[c] * tmp[c];
            }
            for (int k = 0; k < 3; ++k)
                for (int j = k + 1; j < 3; ++j) {
                    stencil::d2m(g_, v[i], k, j, tmp);
                    const auto& gkj = ts_.gup[3 * k + j];
                    for (int32_t c : g_.fluid_cells) out[i][c] += 2.0 * gkj[c] * tmp[c];
                }
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    stencil::d1_full(g_, ts_.gup[3 * j + k], j, tmp);
                    for (int32_t c : g_.fluid_cells) out[i][c] += tmp[c] * dv[k][i][c];
                }
        }
        // 2 g^{kl} Gamma^i_{jk} d_l v_j
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const auto& gkl = ts_.gup[3 * k + l];
                        const auto& gm = ts_.gamma[(i * 3 + j) * 3 + k];
                        for (int32_t c : g_.fluid_cells)
                            out[i][c] += 2.0 * gkl[c] * gm[c] * dv[l][j][c];
                    }
        // (d_k (g^{kl} Gamma^i_{jl}) + g^{kl} Gamma^m_{jl} Gamma^i_{km}) v_j
        std::vector<double> prod(g_.ncell, 0.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                std::vector<double> coef(g_.ncell, 0.0);
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const auto& gkl = ts_.gup[3 * k + l];
                        const auto& gm = ts_.gamma[(i * 3 + j) * 3 + l];
                        for (long c = 0; c < g_.ncell; ++c) prod[c] = gkl[c] * gm[c];
                        stencil::d1_full(g_, prod, k, tmp);
                        for (int32_t c : g_.fluid_cells) coef[c] += tmp[c];
                        for (int m = 0; m < 3; ++m) {
                            const auto& g1 = ts_.gamma[(m * 3 + j) * 3 + l];
                            const auto& g2 = ts_.gamma[(i * 3 + m) * 3 + k];
                            for (int32_t c : g_.fluid_cells)
                                coef[c] += gkl[c] * g1[c] * g2[c];
                        }
                    }
                for (int32_t c : g_.fluid_cells) out[i][c] += coef[c] * v[j][c];
            }
        return out;
    }

    /// Transformed time-derivative correction M v.
    Vec3Field m_op(const Vec3Field& v) const {
        Vec3Field out = make_vec3_field(g_);
        std::vector<double> tmp;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                stencil::d1(g_, v[i], j, tmp);
                const auto& ty = ts_.dtY[j];
                for (int32_t c : g_.fluid_cells) out[i][c] += ty[c] * tmp[c];
            }
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    const auto& gm = ts_.gamma[(i * 3 + j) * 3 + k];
                    const auto& ty = ts_.dtY[k];
                    const auto& aik = ts_.ainv[3 * i + k];
                    const auto& dj = ts_.djdtX[3 * k + j];
                    for (int32_t c : g_.fluid_cells)
                        out[i][c] += (gm[c] * ty[c] + aik[c] * dj[c]) * v[j][c];
                }
        }
        return out;
    }

    /// Transformed convection N(v)_i = v_j d_j v_i + Gamma^i_{jk} v_j v_k.
    Vec3Field n_op(const Vec3Field& v) const {
        Vec3Field out = make_vec3_field(g_);
        std::vector<double> tmp;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                stencil::d1(g_, v[i], j, tmp);
                for (int32_t c : g_.fluid_cells) out[i][c] += v[j][c] * tmp[c];
            }
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    const auto& gm = ts_.gamma[(i * 3 + j) * 3 + k];
                    for (int32_t c : g_.fluid_cells)
                        out[i][c] += gm[c] * v[j][c] * v[k][c];
                }
        }
        return out;
    }

    /// Transformed pressure gradient (G pi)_i = g^{ij} d_j pi.
    Vec3Field g_op(const std::vector<double>& pi) const {
        Vec3Field out = make_vec3_field(g_);
        std::vector<double> tmp;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                stencil::d1(g_, pi, j, tmp);
                const auto& gij = ts_.gup[3 * i + j];
                for (int32_t c : g_.fluid_cells) out[i][c] += gij[c] * tmp[c];
            }
        return out;
    }

    /// Transformed velocity gradient D(v)_ij = (d u_i / d x_j) o X.
    Matrix3Field d_op(const Vec3Field& v) const {
        Matrix3Field out(g_);
        std::array<std::array<std::vector<double>, 3>, 3> dv;
        for (int l = 0; l < 3; ++l)
            for (int k = 0; k < 3; ++k) stencil::d1(g_, v[k], l, dv[l][k]);
        for (int32_t c : g_.fluid_cells) {
            Mat3 A = ts_.ainv_at(c);
            Mat3 J = ts_.jx_at(c);
            Mat3 m = Mat3::Zero();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double s = 0;
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            s += ddX_[i][k][l][c] * A(l, j) * v[k][c] +
                                 J(i, k) * dv[l][k][c] * A(l, j);
                    m(i, j) = s;
                }
            out.set(c, m);
        }
        return out;
    }

    /// Transformed co-deformation term: the pointwise kernel applied to the
    /// transformed gradient.
    QTensorField s_transformed(const Vec3Field& v, const QTensorField& q,
                               double xi) const {
        Matrix3Field d = d_op(v);
        QTensorField out(g_);
        for (int32_t c : g_.fluid_cells)
            out.set(c, stretch_rotation_S(d.at(c), q.at(c), xi));
        return out;
    }

    StressDivTerms stress_divergences(const QTensorField& q, double xi) const {
        return qfsi::stress_divergence_terms(g_, q, xi, *this);
    }
    Vec3Field b_sigma(const QTensorField& q, double xi) const {
        return stress_divergences(q, xi).b_sigma;
    }
    Vec3Field b_tau(const QTensorField& q, double xi) const {
        return stress_divergences(q, xi).b_tau;
    }

  private:
    const Grid& g_;
    const TransformState& ts_;
    std::array<std::array<std::array<std::vector<double>, 3>, 3>, 3> ddX_;
};

} // namespace qfsi
