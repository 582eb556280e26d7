#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "qfsi/errors.hpp"
#include "qfsi/stencils.hpp"

namespace qfsi {

struct CgOptions {
    double rtol = 1e-11;
    double atol_inf = 0.0; // optional extra max-norm target on the residual
    int max_iter = 10000;
};

/// Diagonally preconditioned CG on the compact fluid-cell vector of the
/// masked Neumann Laplacian A = -lap.  The constant nullspace is projected
/// out of the right-hand side and the iterates.
class CellPoisson {
  public:
    explicit CellPoisson(const Grid& g) : CellPoisson(g, g.fluid_cells) {}

    /// Restriction of the Neumann Laplacian to an arbitrary cell subset
    /// (used by the collar correction).
    CellPoisson(const Grid& g, const std::vector<int32_t>& cells)
        : g_(g), cells_(cells) {
        member_.assign(g.ncell, 0);
        for (int32_t c : cells_) member_[c] = 1;
        diag_.assign(g.ncell, 1.0);
        const double inv = 1.0 / (g.dx * g.dx);
        for (int32_t c : cells_) {
            int i, j, k;
            g.cell_ijk(c, i, j, k);
            int nb = is_member(i + 1, j, k) + is_member(i - 1, j, k) +
                     is_member(i, j + 1, k) + is_member(i, j - 1, k) +
                     is_member(i, j, k + 1) + is_member(i, j, k - 1);
            diag_[c] = std::max(1, nb) * inv;
        }
    }

    bool is_member(int i, int j, int k) const {
        if (i < 0 || j < 0 || k < 0 || i >= g_.n || j >= g_.n || k >= g_.n)
            return false;
        return member_[g_.cid(i, j, k)] != 0;
    }

    /// Solve -lap(phi) = rhs for the mean-zero phi; rhs is mean-corrected.
    std::vector<double> solve(const std::vector<double>& rhs,
                              const CgOptions& opt = {}) const {
        const auto& cells = cells_;
        std::vector<double> b = rhs;
        remove_mean(b);
        std::vector<double> x(g_.ncell, 0.0), r = b, z(g_.ncell, 0.0), p(g_.ncell, 0.0),
            ap(g_.ncell, 0.0);
        double bnorm = std::sqrt(dot(b, b));
        if (bnorm == 0.0) return x;
        for (int32_t c : cells) z[c] = r[c] / diag_[c];
        p = z;
        double rz = dot(r, z);
        for (int it = 0; it < opt.max_iter; ++it) {
            apply(p, ap);

            double pap = dot(p, ap);
            if (pap <= 0.0) throw SolverError("cell CG: indefinite operator");
            double alpha = rz / pap;
            for (int32_t c : cells) {
                x[c] += alpha * p[c];
                r[c] -= alpha * ap[c];
            }
            double rn = std::sqrt(dot(r, r));
            if (rn <= opt.rtol * bnorm &&
                (opt.atol_inf <= 0.0 || max_abs(r) <= opt.atol_inf)) {
                remove_mean(x);
                return x;
            }
            for (int32_t c : cells) z[c] = r[c] / diag_[c];
            double rz_new = dot(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            for (int32_t c : cells) p[c] = z[c] + beta * p[c];
        }
        throw SolverError("cell CG stagnated after max iterations");
    }

    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        out.assign(g_.ncell, 0.0);
        const double inv = 1.0 / (g_.dx * g_.dx);
        for (int32_t c : cells_) {
            int i, j, k;
            g_.cell_ijk(c, i, j, k);
            double fc = x[c], s = 0.0;
            if (is_member(i + 1, j, k)) s += x[g_.cid(i + 1, j, k)] - fc;
            if (is_member(i - 1, j, k)) s += x[g_.cid(i - 1, j, k)] - fc;
            if (is_member(i, j + 1, k)) s += x[g_.cid(i, j + 1, k)] - fc;
            if (is_member(i, j - 1, k)) s += x[g_.cid(i, j - 1, k)] - fc;
            if (is_member(i, j, k + 1)) s += x[g_.cid(i, j, k + 1)] - fc;
            if (is_member(i, j, k - 1)) s += x[g_.cid(i, j, k - 1)] - fc;
            out[c] = -s * inv;
        }
    }

    double dot(const std::vector<double>& a, const std::vector<double>& b) const {
        double s = 0.0;
        for (int32_t c : cells_) s += a[c] * b[c];
        return s;
    }
    double max_abs(const std::vector<double>& a) const {
        double s = 0.0;
        for (int32_t c : cells_) s = std::max(s, std::abs(a[c]));
        return s;
    }
    void remove_mean(std::vector<double>& a) const {
        double m = 0.0;
        for (int32_t c : cells_) m += a[c];
        m /= static_cast<double>(cells_.size());
        for (int32_t c : cells_) a[c] -= m;
    }

  private:
    const Grid& g_;
    std::vector<int32_t> cells_;
    std::vector<uint8_t> member_;
    std::vector<double> diag_;
};

/// CG for (shift - lap_D) on active velocity faces with homogeneous
/// Dirichlet conditions; inhomogeneous boundary data is handled by callers
/// through a right-hand-side lifting.
class FaceHelmholtz {
  public:
    FaceHelmholtz(const Grid& g, double shift) : g_(g), shift_(shift) {}

    void apply(const VelocityField& x, VelocityField& out) const {
        stencil::lap_velocity(g_, x, out);
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g_.active_faces[a])
                out.c[a][f] = shift_ * x.c[a][f] - out.c[a][f];
    }

    /// Stencil contribution of stored Dirichlet face values, to be added to
    /// the right-hand side of the homogeneous problem.
    VelocityField dirichlet_rhs(const VelocityField& bc) const {
        VelocityField vb = bc;
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g_.active_faces[a]) vb.c[a][f] = 0.0;
        VelocityField out(g_);
        stencil::lap_velocity(g_, vb, out);
        return out; // (shift - lap)(x + vb) = rhs  =>  A x = rhs + lap(vb)
    }

    VelocityField solve(const VelocityField& rhs, const CgOptions& opt = {}) const {
        VelocityField x(g_), r = rhs, z(g_), p(g_), ap(g_);
        zero_nonactive(r);
        double bnorm = std::sqrt(dot(r, r));
        VelocityField out(g_);
        if (bnorm == 0.0) return out;
        double dshift = shift_ + 6.0 / (g_.dx * g_.dx);
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g_.active_faces[a]) z.c[a][f] = r.c[a][f] / dshift;
        p = z;
        double rz = dot(r, z);
        for (int it = 0; it < opt.max_iter; ++it) {
            apply(p, ap);
            double pap = dot(p, ap);
            if (pap <= 0.0) throw SolverError("face CG: indefinite operator");
            double alpha = rz / pap;
            for (int a = 0; a < 3; ++a)
                for (int32_t f : g_.active_faces[a]) {
                    x.c[a][f] += alpha * p.c[a][f];
                    r.c[a][f] -= alpha * ap.c[a][f];
                }
            double rn = std::sqrt(dot(r, r));
            if (rn <= opt.rtol * bnorm) return x;
            for (int a = 0; a < 3; ++a)
                for (int32_t f : g_.active_faces[a]) z.c[a][f] = r.c[a][f] / dshift;
            double rz_new = dot(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            for (int a = 0; a < 3; ++a)
                for (int32_t f : g_.active_faces[a])
                    p.c[a][f] = z.c[a][f] + beta * p.c[a][f];
        }
        throw SolverError("face CG stagnated after max iterations");
    }

    double dot(const VelocityField& a, const VelocityField& b) const {
        double s = 0.0;
        for (int ax = 0; ax < 3; ++ax)
            for (int32_t f : g_.active_faces[ax]) s += a.c[ax][f] * b.c[ax][f];
        return s;
    }
    void zero_nonactive(VelocityField& v) const {
        for (int a = 0; a < 3; ++a) {
            std::vector<double> tmp(g_.nf[a], 0.0);
            for (int32_t f : g_.active_faces[a]) tmp[f] = v.c[a][f];
            v.c[a] = std::move(tmp);
        }
    }

  private:
    const Grid& g_;
    double shift_;
};

/// Discrete Helmholtz decomposition machinery: P v = v - grad(phi) on
/// active faces, where phi solves the masked Neumann Poisson problem with
/// the active-face divergence.  Boundary (Dirichlet) face values are left
/// untouched, so they carry the normal interface data.
class Projector {
  public:
    explicit Projector(const Grid& g) : g_(g), poisson_(g) {}

    /// Projects in place; returns the potential phi (mean zero).
    std::vector<double> project(VelocityField& v, double rtol = 1e-12) const {
        std::vector<double> dv;
        stencil::div_active(g_, v, dv);
        double vmax = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g_.active_faces[a])
                vmax = std::max(vmax, std::abs(v.c[a][f]));
        // the CG residual equals the remaining divergence pointwise, so the
        // max-norm target enforces the projection contract directly
        CgOptions opt;
        opt.rtol = rtol;
        opt.atol_inf = (vmax > 0) ? 5e-11 * std::max(1.0, vmax) : 0.0;
        // solve -lap(phi) = -div(v)
        for (int32_t c : g_.fluid_cells) dv[c] = -dv[c];
        std::vector<double> phi = poisson_.solve(dv, opt);
        VelocityField gp(g_);
        stencil::grad_to_active(g_, phi, gp);
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g_.active_faces[a]) v.c[a][f] -= gp.c[a][f];
        return phi;
    }

    const CellPoisson& poisson() const { return poisson_; }

  private:
    const Grid& g_;
    CellPoisson poisson_;
};

} // namespace qfsi
