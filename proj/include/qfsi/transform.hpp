#pragma once

#include <functional>
#include <memory>

#include "qfsi/poisson.hpp"
#include "qfsi/quadrature.hpp"

namespace qfsi {

/// Rigid body pose and velocities.  ell and omega are body-frame; the
/// spatial quantities follow from the rotation matrix.
struct RigidBodyState {
    Vec3 h = Vec3::Zero();          // center of mass
    Mat3 O = Mat3::Identity();      // rotation, SO(3)
    Vec3 ell = Vec3::Zero();        // translational velocity, body frame
    Vec3 omega = Vec3::Zero();      // angular velocity, body frame
    double m_S = 1.0;
    Mat3 J0 = Mat3::Identity();

    static RigidBodyState ball(double radius, double density = 1.0) {
        RigidBodyState s;
        s.m_S = density * 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
        s.J0 = 0.4 * s.m_S * radius * radius * Mat3::Identity();
        return s;
    }

    Vec3 h_dot() const { return O * ell; }          // spatial translational velocity
    Vec3 Omega() const { return O * omega; }        // spatial angular velocity
    Mat3 J() const { return O * J0 * O.transpose(); }

    static Mat3 skew(const Vec3& w) {
        Mat3 m;
        m << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
        return m;
    }

    Vec3 rigid_velocity_at(const Vec3& x) const {
        return h_dot() + Omega().cross(x - h);
    }

    double orthonormality_defect() const {
        return (O.transpose() * O - Mat3::Identity()).norm();
    }

    void re_orthonormalize() {
        Eigen::JacobiSVD<Mat3> svd(O, Eigen::ComputeFullU | Eigen::ComputeFullV);
        O = svd.matrixU() * svd.matrixV().transpose();
    }

    /// Advance the pose with frozen velocities over dt (exact exponential in
    /// the body frame).
    void advance_pose(double dt) {
        Vec3 w = Omega();
        double th = w.norm() * dt;
        Mat3 R;
        if (th < 1e-14) {
            R = Mat3::Identity() + dt * skew(w);
        } else {
            Vec3 axis = w.normalized();
            Mat3 K = skew(axis);
            R = Mat3::Identity() + std::sin(th) * K + (1.0 - std::cos(th)) * K * K;
        }
        h += dt * h_dot();
        O = R * O;
        re_orthonormalize();
    }
};

/// Radial quintic cutoff: 1 where dist(x, dO) >= r, 0 where dist <= r/2,
/// C^2 quintic blend in between.  For the spherical container the distance
/// is R_O - |x|.
struct Cutoff {
    double R_O = 0, r = 0;
    double inner_pad = 0; // widens the zero plateau; keeps the discrete
                          // divergence support strictly inside the collar
    Cutoff() = default;
    Cutoff(double Ro, double rr, double pad = 0.0) : R_O(Ro), r(rr), inner_pad(pad) {}

    double value(const Vec3& x) const {
        double dist = R_O - x.norm();
        if (dist >= r) return 1.0;
        double lo = 0.5 * r + inner_pad;
        if (dist <= lo || lo >= r) return 0.0;
        double s = (dist - lo) / (r - lo);
        return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    }
};

inline ScalarField cutoff_chi(const Grid& g, double r) {
    Cutoff cut(g.R_O, r);
    ScalarField s(g);
    for (long c = 0; c < g.ncell; ++c) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        s[c] = cut.value(g.cell_center(i, j, k));
    }
    return s;
}

/// Discrete right inverse of the divergence with support control: solves a
/// Neumann Poisson problem on the (inward-dilated) collar cell set and
/// returns c = grad(phi) on faces interior to the collar, so div c = rhs
/// holds on every collar cell and c vanishes identically outside,
/// in particular wherever dist(x, dO) <= r/2.
class CollarCorrection {
  public:
    CollarCorrection(const Grid& g, double r) : g_(&g) {
        double lo = g.R_O - r - 2.0 * g.dx, hi = g.R_O - 0.5 * r;
        member_.assign(g.ncell, 0);
        for (int32_t c : g.fluid_cells) {
            int i, j, k;
            g.cell_ijk(c, i, j, k);
            double rad = g.cell_center(i, j, k).norm();
            if (rad >= lo && rad <= hi) {
                member_[c] = 1;
                cells_.push_back(c);
            }
        }
        poisson_ = std::make_unique<CellPoisson>(g, cells_);
    }

    const std::vector<int32_t>& cells() const { return cells_; }
    bool member(long c) const { return member_[c] != 0; }

    VelocityField apply(const std::vector<double>& rhs) const {
        const Grid& g = *g_;
        double sum = 0, l1 = 0;
        for (int32_t c : cells_) {
            sum += rhs[c];
            l1 += std::abs(rhs[c]);
        }
        for (long c = 0; c < g.ncell; ++c)
            if (!member_[c] && rhs[c] != 0.0)
                throw CompatibilityError("correction rhs not supported in the collar");
        if (l1 > 0 && std::abs(sum) > 1e-10 * l1)
            throw CompatibilityError("collar correction rhs has nonzero mean");
        VelocityField c_out(g);
        if (l1 == 0) return c_out;
        std::vector<double> neg(rhs);
        for (int32_t c : cells_) neg[c] = -neg[c];
        CgOptions opt;
        opt.rtol = 1e-13;
        opt.atol_inf = 1e-10 * std::max(1.0, linf(rhs));
        std::vector<double> phi = poisson_->solve(neg, opt);
        // gradient only across faces interior to the collar
        const double inv = 1.0 / g.dx;
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g.active_faces[a]) {
                int i, j, k;
                g.face_ijk(a, f, i, j, k);
                long chi = g.cid(i, j, k);
                long clo = g.cid(i - (a == 0), j - (a == 1), k - (a == 2));
                if (member_[chi] && member_[clo])
                    c_out.c[a][f] = (phi[chi] - phi[clo]) * inv;
            }
        return c_out;
    }

  private:
    double linf(const std::vector<double>& v) const {
        double m = 0;
        for (int32_t c : cells_) m = std::max(m, std::abs(v[c]));
        return m;
    }
    const Grid* g_;
    std::vector<uint8_t> member_;
    std::vector<int32_t> cells_;
    std::unique_ptr<CellPoisson> poisson_;
};

/// The transport field b(t, .): cutoff rigid motion plus the collar
/// correction that restores div b = 0.
struct BField {
    const Grid* g = nullptr;
    Cutoff cut;
    RigidBodyState body;      // pose/velocities the field was built from
    VelocityField faces;      // b sampled on the staggered faces
    VelocityField correction; // collar part only (face samples)

    Vec3 at(const Vec3& x) const {
        Vec3 u = body.rigid_velocity_at(x);
        double chi = cut.value(x);
        Vec3 corr{stencil::interp_face(*g, correction, 0, x),
                  stencil::interp_face(*g, correction, 1, x),
                  stencil::interp_face(*g, correction, 2, x)};
        return chi * u - corr;
    }
};

/// Builds b = chi [m(x-h)+h'] - B(div(chi u_rigid)); the discrete rhs is the
/// exact face divergence of the sampled cutoff field, so div b vanishes to
/// solver accuracy on every fluid cell.
inline BField build_b(const RigidBodyState& state, const Grid& g,
                      const CollarCorrection& collar, double r) {
    if (g.body_wall_distance(state.h) <= 0.5 * r)
        throw CollisionError("body too close to the container wall");
    BField b;
    b.g = &g;
    b.cut = Cutoff(g.R_O, r, g.dx);
    b.body = state;
    b.faces = VelocityField(g);
    VelocityField chiu(g);
    for (int a = 0; a < 3; ++a) {
        int ni = (a == 0) ? g.n + 1 : g.n;
        int nj = (a == 1) ? g.n + 1 : g.n;
        int nk = (a == 2) ? g.n + 1 : g.n;
        for (int k = 0; k < nk; ++k)
            for (int j = 0; j < nj; ++j)
                for (int i = 0; i < ni; ++i) {
                    Vec3 x = g.face_center(a, i, j, k);
                    chiu.c[a][g.fid(a, i, j, k)] =
                        b.cut.value(x) * state.rigid_velocity_at(x)[a];
                }
    }
    // divergence restricted to the collar support (chi u is rigid inside,
    // zero outside; its discrete divergence is supported in the blend zone)
    std::vector<double> dv;
    stencil::div_faces(g, chiu, dv);
    // rigid fields are affine, so the discrete divergence vanishes to fp
    // noise outside the blend zone; clamp it there and flag real leakage
    double umax = 0.0;
    for (int a = 0; a < 3; ++a)
        for (long f = 0; f < g.nf[a]; ++f) umax = std::max(umax, std::abs(chiu.c[a][f]));
    double noise = 1e-12 * (1.0 + umax / g.dx);
    for (long c = 0; c < g.ncell; ++c)
        if (!collar.member(c)) {
            if (std::abs(dv[c]) > noise)
                throw CompatibilityError("cutoff divergence leaks outside the collar");
            dv[c] = 0.0;
        }
    b.correction = collar.apply(dv);
    b.faces = chiu;
    for (int a = 0; a < 3; ++a)
        for (long f = 0; f < g.nf[a]; ++f) b.faces.c[a][f] -= b.correction.c[a][f];
    return b;
}

} // namespace qfsi
