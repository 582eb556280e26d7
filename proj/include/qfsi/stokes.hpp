#pragma once

#include "qfsi/poisson.hpp"
#include "qfsi/quadrature.hpp"
#include "qfsi/transform.hpp"

namespace qfsi {

/// Steady Stokes solves with prescribed rigid boundary data via Uzawa-type
/// CG on the pressure Schur complement; every inner application is a CG
/// solve of the component Laplacian on active faces.
class StokesSolver {
  public:
    explicit StokesSolver(const Grid& g)
        : g_(g), helm_(g, 0.0), poisson_(g) {}

    struct Solution {
        VelocityField w; // includes the Dirichlet boundary values
        std::vector<double> psi;
        int outer_iterations = 0;
        double div_residual = 0;
    };

    /// Solve -lap w + grad psi = 0, div w = 0 with the boundary values
    /// stored on the non-active faces of `bc`.
    Solution solve(const VelocityField& bc, double div_tol = 1e-10,
                   int max_outer = 400) const {
        Solution sol;
        CgOptions inner;
        inner.rtol = 1e-12;
        // particular solution: A_D w0 = lap(vb)
        VelocityField d = helm_.dirichlet_rhs(bc);
        VelocityField w0 = helm_.solve(d, inner);
        // boundary-face divergence contribution
        VelocityField bc_only = bc;
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g_.active_faces[a]) bc_only.c[a][f] = 0.0;
        std::vector<double> bflux;
        stencil::div_faces(g_, bc_only, bflux);
        std::vector<double> rhs;
        stencil::div_active(g_, w0, rhs);
        for (int32_t c : g_.fluid_cells) rhs[c] += bflux[c];
        // Schur CG: (G^T A^{-1} G) psi = -rhs, SPD on mean-zero fields
        std::vector<double> psi(g_.ncell, 0.0), r = rhs, p(g_.ncell, 0.0),
            ap(g_.ncell, 0.0);
        for (int32_t c : g_.fluid_cells) r[c] = -r[c];
        remove_mean(r);
        double scale = 0;
        for (int32_t c : g_.fluid_cells) scale = std::max(scale, std::abs(r[c]));
        p = r;
        double rr = dot(r, r);
        auto schur = [&](const std::vector<double>& x, std::vector<double>& out) {
            VelocityField gx(g_);
            stencil::grad_to_active(g_, x, gx);
            VelocityField aig = helm_.solve(gx, inner);
            stencil::div_active(g_, aig, out);
            for (int32_t c : g_.fluid_cells) out[c] = -out[c];
        };
        int it = 0;
        if (scale > 0) {
            for (; it < max_outer; ++it) {
                schur(p, ap);
                double pap = dot(p, ap);
                if (pap <= 0) throw SolverError("stokes schur: loss of definiteness");
                double alpha = rr / pap;
                for (int32_t c : g_.fluid_cells) {
                    psi[c] += alpha * p[c];
                    r[c] -= alpha * ap[c];
                }
                double rinf = 0;
                for (int32_t c : g_.fluid_cells) rinf = std::max(rinf, std::abs(r[c]));
                if (rinf <= div_tol) break;
                double rr_new = dot(r, r);
                double beta = rr_new / rr;
                rr = rr_new;
                for (int32_t c : g_.fluid_cells) p[c] = r[c] + beta * p[c];
            }
            if (it == max_outer)
                throw SolverError("stokes schur iteration stagnated");
        }
        remove_mean(psi);
        // final velocity for the converged pressure
        VelocityField gpsi(g_);
        stencil::grad_to_active(g_, psi, gpsi);
        VelocityField rhsv = d;
        for (int a = 0; a < 3; ++a)
            for (int32_t f : g_.active_faces[a]) rhsv.c[a][f] -= gpsi.c[a][f];
        sol.w = helm_.solve(rhsv, inner);
        for (int a = 0; a < 3; ++a)
            for (long f = 0; f < g_.nf[a]; ++f)
                if (g_.face_kind[a][f] != FaceKind::Active)
                    sol.w.c[a][f] = bc.c[a][f];
        sol.psi = psi;
        sol.outer_iterations = it + 1;
        std::vector<double> dtot;
        stencil::div_faces(g_, sol.w, dtot);
        for (int32_t c : g_.fluid_cells)
            sol.div_residual = std::max(sol.div_residual, std::abs(dtot[c]));
        return sol;
    }

  private:
    void remove_mean(std::vector<double>& a) const {
        double m = 0;
        for (int32_t c : g_.fluid_cells) m += a[c];
        m /= static_cast<double>(g_.n_fluid());
        for (int32_t c : g_.fluid_cells) a[c] -= m;
    }
    double dot(const std::vector<double>& a, const std::vector<double>& b) const {
        double s = 0;
        for (int32_t c : g_.fluid_cells) s += a[c] * b[c];
        return s;
    }
    const Grid& g_;
    FaceHelmholtz helm_;
    CellPoisson poisson_;
};

/// The six Stokes liftings W_i with pressures Psi_i (unit translations and
/// rotations on the body boundary, no-slip at the wall), together with the
/// drag matrix B_ij = int DW_i : DW_j.
struct LiftingBasis {
    std::array<VelocityField, 6> W;
    std::array<std::vector<double>, 6> Psi;
    Eigen::Matrix<double, 6, 6> drag = Eigen::Matrix<double, 6, 6>::Zero();
    double worst_div = 0;
};

inline LiftingBasis solve_stokes_lifting(const Grid& g, double div_tol = 1e-10) {
    StokesSolver stokes(g);
    LiftingBasis basis;
    for (int i = 0; i < 6; ++i) {
        Vec3 ell = Vec3::Zero(), omega = Vec3::Zero();
        if (i < 3)
            ell[i] = 1.0;
        else
            omega[i - 3] = 1.0;
        VelocityField bc(g);
        stencil::fill_rigid_boundary(g, bc, ell, omega);
        StokesSolver::Solution sol = stokes.solve(bc, div_tol);
        basis.W[i] = sol.w;
        basis.Psi[i] = sol.psi;
        basis.worst_div = std::max(basis.worst_div, sol.div_residual);
    }
    std::array<Matrix3Field, 6> grads;
    for (int i = 0; i < 6; ++i) {
        grads[i] = Matrix3Field(g);
        stencil::grad_velocity(g, basis.W[i], grads[i]);
    }
    double vol = g.cell_volume();
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
            double s = 0;
            for (int32_t c : g.fluid_cells)
                for (int e = 0; e < 9; ++e) s += grads[i].c[e][c] * grads[j].c[e][c];
            basis.drag(i, j) = basis.drag(j, i) = s * vol;
        }
    return basis;
}

/// D_fl(ell, omega) = sum ell_i W_i + sum omega_i W_{i+3} as a velocity
/// field with the rigid boundary data baked into the non-active faces.
inline VelocityField lift_velocity(const Grid& g, const LiftingBasis& basis,
                                   const Vec3& ell, const Vec3& omega) {
    VelocityField out(g);
    for (int i = 0; i < 6; ++i) {
        double c = (i < 3) ? ell[i] : omega[i - 3];
        if (c == 0.0) continue;
        out.axpy(c, basis.W[i]);
    }
    return out;
}

inline std::vector<double> lift_pressure(const Grid& g, const LiftingBasis& basis,
                                         const Vec3& ell, const Vec3& omega) {
    std::vector<double> out(g.ncell, 0.0);
    for (int i = 0; i < 6; ++i) {
        double c = (i < 3) ? ell[i] : omega[i - 3];
        if (c == 0.0) continue;
        for (int32_t cc : g.fluid_cells) out[cc] += c * basis.Psi[i][cc];
    }
    return out;
}

} // namespace qfsi
