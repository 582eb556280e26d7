#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qfsi/fields.hpp"
#include "qfsi/stencils.hpp"

namespace qfsi {

/// Latitude-longitude quadrature over a sphere.  Nodes sit on a sphere of
/// radius `radius` around `center`; `normal` is the fluid-domain outward
/// normal, i.e. directed into the body.
struct SphereQuad {
    std::vector<Vec3> node;
    std::vector<Vec3> normal; // unit, pointing into the body
    std::vector<double> weight;
    double radius = 0;

    SphereQuad() = default;

    SphereQuad(const Vec3& center, double r, int ntheta, int nphi) : radius(r) {
        using std::numbers::pi;
        node.reserve(static_cast<size_t>(ntheta) * nphi);
        normal.reserve(node.capacity());
        weight.reserve(node.capacity());
        double dth = pi / ntheta, dph = 2.0 * pi / nphi;
        for (int it = 0; it < ntheta; ++it) {
            double th = (it + 0.5) * dth;
            for (int ip = 0; ip < nphi; ++ip) {
                double ph = (ip + 0.5) * dph;
                Vec3 er{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                        std::cos(th)};
                node.push_back(center + r * er);
                normal.push_back(-er);
                weight.push_back(r * r * std::sin(th) * dth * dph);
            }
        }
    }

    double area() const {
        double s = 0;
        for (double w : weight) s += w;
        return s;
    }
};

/// Quadrature with nodes on the body surface itself; 2 n^2 nodes.  Used for
/// analytically known boundary data (rigid velocities, normals).
inline SphereQuad body_quadrature(const Grid& g) {
    return SphereQuad(Vec3::Zero(), g.a_body, g.n, 2 * g.n);
}

/// Volume integral of a cell field over the fluid cells.
inline double fluid_integral(const Grid& g, const std::vector<double>& f) {
    double s = 0.0;
    for (int32_t c : g.fluid_cells) s += f[c];
    return s * g.cell_volume();
}

struct ForceTorque {
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();
    Eigen::Matrix<double, 6, 1> packed() const {
        Eigen::Matrix<double, 6, 1> r;
        r << force, torque;
        return r;
    }
    ForceTorque& operator+=(const ForceTorque& o) {
        force += o.force;
        torque += o.torque;
        return *this;
    }
    ForceTorque& operator*=(double s) {
        force *= s;
        torque *= s;
        return *this;
    }
};

namespace detail {
/// Tricubic if the full 4^3 support is fluid, otherwise fluid-masked
/// trilinear.
inline double interp_surface(const Grid& g, const std::vector<double>& f,
                             const Vec3& x) {
    double gx = (x[0] + g.L) / g.dx - 0.5;
    double gy = (x[1] + g.L) / g.dx - 0.5;
    double gz = (x[2] + g.L) / g.dx - 0.5;
    int i0 = static_cast<int>(std::floor(gx));
    int j0 = static_cast<int>(std::floor(gy));
    int k0 = static_cast<int>(std::floor(gz));
    bool cubic_ok = true;
    for (int dk = -1; dk <= 2 && cubic_ok; ++dk)
        for (int dj = -1; dj <= 2 && cubic_ok; ++dj)
            for (int di = -1; di <= 2 && cubic_ok; ++di)
                cubic_ok = g.is_fluid(i0 + di, j0 + dj, k0 + dk);
    if (cubic_ok) return stencil::interp_cell_cubic(g, f, x);
    return stencil::interp_cell_fluid(g, f, x);
}
} // namespace detail

/// Surface integrals over the body boundary.  Integrands are evaluated on a
/// concentric sphere a few cells into the fluid, where interpolation is
/// accurate, and transported back to the true surface with a discrete
/// shell correction from the divergence theorem:
///   int_{dS0} T n dG = -int_{Se} T e_r dG + int_shell div T dV      (n into body)
/// and for torques an extra eps:T volume term covers antisymmetric stresses.
class SurfaceIntegrator {
  public:
    SurfaceIntegrator(const Grid& g, double eval_offset_cells = 3.0)
        : g_(&g), surf_(body_quadrature(g)) {
        double mid = 0.5 * (g.a_body + g.R_O);
        double re = std::min(g.a_body + eval_offset_cells * g.dx, mid);
        eval_ = SphereQuad(Vec3::Zero(), re, g.n, 2 * g.n);
        for (int32_t c : g.fluid_cells) {
            int i, j, k;
            g.cell_ijk(c, i, j, k);
            if (g.cell_center(i, j, k).norm() < re) shell_.push_back(c);
        }
    }

    const SphereQuad& surface_quad() const { return surf_; }
    const SphereQuad& eval_quad() const { return eval_; }

    /// approx int_{dS0} T n dG and int y x (T n) dG with n into the body.
    ForceTorque tensor_flux(const Matrix3Field& t) const {
        const Grid& g = *g_;
        ForceTorque ft;
        for (size_t m = 0; m < eval_.node.size(); ++m) {
            Mat3 tm;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    tm(i, j) = detail::interp_surface(g, t.c[3 * i + j], eval_.node[m]);
            Vec3 tn = tm * (-eval_.normal[m]); // outward normal of the shell
            ft.force -= eval_.weight[m] * tn;
            ft.torque -= eval_.weight[m] * eval_.node[m].cross(tn);
        }
        // shell corrections: div_h T, y x div_h T and the eps:T moment term
        std::array<std::vector<double>, 3> divt;
        std::vector<double> tmp;
        for (int i = 0; i < 3; ++i) {
            divt[i].assign(g.ncell, 0.0);
            for (int j = 0; j < 3; ++j) {
                stencil::d1_onesided(g, t.c[3 * i + j], j, tmp);
                for (int32_t c : shell_) divt[i][c] += tmp[c];
            }
        }
        double vol = g.cell_volume();
        for (int32_t c : shell_) {
            int i, j, k;
            g.cell_ijk(c, i, j, k);
            Vec3 x = g.cell_center(i, j, k);
            Vec3 dv{divt[0][c], divt[1][c], divt[2][c]};
            Mat3 tm = t.at(c);
            Vec3 eps{tm(2, 1) - tm(1, 2), tm(0, 2) - tm(2, 0), tm(1, 0) - tm(0, 1)};
            ft.force += vol * dv;
            ft.torque += vol * (x.cross(dv) + eps);
        }
        return ft;
    }

    /// approx int_{dS0} phi n dG and int y x (phi n) dG with n into the body.
    ForceTorque scalar_normal_flux(const std::vector<double>& phi) const {
        const Grid& g = *g_;
        ForceTorque ft;
        for (size_t m = 0; m < eval_.node.size(); ++m) {
            double p = detail::interp_surface(g, phi, eval_.node[m]);
            Vec3 pn = p * (-eval_.normal[m]);
            ft.force -= eval_.weight[m] * pn;
            ft.torque -= eval_.weight[m] * eval_.node[m].cross(pn);
        }
        std::array<std::vector<double>, 3> gp;
        for (int a = 0; a < 3; ++a) stencil::d1_onesided(g, phi, a, gp[a]);
        double vol = g.cell_volume();
        for (int32_t c : shell_) {
            int i, j, k;
            g.cell_ijk(c, i, j, k);
            Vec3 x = g.cell_center(i, j, k);
            Vec3 grad{gp[0][c], gp[1][c], gp[2][c]};
            ft.force += vol * grad;
            ft.torque += vol * x.cross(grad);
        }
        return ft;
    }

  private:
    const Grid* g_;
    SphereQuad surf_;
    SphereQuad eval_;
    std::vector<int32_t> shell_;
};

/// One-off helper used by tests and diagnostics.
inline ForceTorque surface_force_torque(const Grid& g, const Matrix3Field& stress,
                                        const SurfaceIntegrator& si) {
    (void)g;
    return si.tensor_flux(stress);
}

inline ForceTorque surface_force_torque(const Grid& g, const Matrix3Field& stress) {
    return SurfaceIntegrator(g).tensor_flux(stress);
}

} // namespace qfsi
