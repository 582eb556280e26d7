#pragma once

#include <algorithm>
#include <cmath>

#include "qfsi/fields.hpp"
#include "qfsi/grid.hpp"

namespace qfsi {

// ---------------------------------------------------------------------------
// Cell-field stencils for state fields (Q components, pressure, ...).
// Non-fluid neighbors are mirrored (ghost = center value), which realizes
// the homogeneous Neumann condition at the staircase boundary and keeps the
// Laplacian equal to div(grad) with masked faces.
// ---------------------------------------------------------------------------

namespace stencil {

inline double cellv_mirror(const Grid& g, const std::vector<double>& f, int i, int j,
                           int k, double center) {
    return g.is_fluid(i, j, k) ? f[g.cid(i, j, k)] : center;
}

/// First derivative along axis `a` (centered; first order at the boundary
/// through mirroring).  Output defined on fluid cells, zero elsewhere.
inline void d1(const Grid& g, const std::vector<double>& f, int a,
               std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const double inv2 = 1.0 / (2.0 * g.dx);
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        double fc = f[c];
        int ip = i + (a == 0), jp = j + (a == 1), kp = k + (a == 2);
        int im = i - (a == 0), jm = j - (a == 1), km = k - (a == 2);
        out[c] = (cellv_mirror(g, f, ip, jp, kp, fc) -
                  cellv_mirror(g, f, im, jm, km, fc)) * inv2;
    }
}

/// Pure second derivative along axis `a` with mirror ghosts; summing over
/// axes reproduces the masked Neumann Laplacian exactly.
inline void d2(const Grid& g, const std::vector<double>& f, int a,
               std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const double inv = 1.0 / (g.dx * g.dx);
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        double fc = f[c];
        int ip = i + (a == 0), jp = j + (a == 1), kp = k + (a == 2);
        int im = i - (a == 0), jm = j - (a == 1), km = k - (a == 2);
        out[c] = (cellv_mirror(g, f, ip, jp, kp, fc) - 2.0 * fc +
                  cellv_mirror(g, f, im, jm, km, fc)) * inv;
    }
}

/// First derivative that never mirrors: centered where both axis neighbors
/// are fluid, otherwise one-sided (second order when two fluid neighbors are
/// available on the open side).  Used by surface corrections where state
/// fields vary strongly toward the boundary.
inline void d1_onesided(const Grid& g, const std::vector<double>& f, int a,
                        std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const double inv = 1.0 / g.dx, inv2 = 1.0 / (2.0 * g.dx);
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        auto fl = [&](int s) {
            return g.is_fluid(i + s * (a == 0), j + s * (a == 1), k + s * (a == 2));
        };
        auto fv = [&](int s) {
            return f[g.cid(i + s * (a == 0), j + s * (a == 1), k + s * (a == 2))];
        };
        if (fl(1) && fl(-1)) {
            out[c] = (fv(1) - fv(-1)) * inv2;
        } else if (fl(1)) {
            out[c] = fl(2) ? (-3.0 * f[c] + 4.0 * fv(1) - fv(2)) * inv2
                           : (fv(1) - f[c]) * inv;
        } else if (fl(-1)) {
            out[c] = fl(-2) ? (3.0 * f[c] - 4.0 * fv(-1) + fv(-2)) * inv2
                            : (f[c] - fv(-1)) * inv;
        }
    }
}

/// Mixed second derivative d_a d_b (a != b), centered cross stencil with
/// mirrored corners.
inline void d2m(const Grid& g, const std::vector<double>& f, int a, int b,
                std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const double inv = 1.0 / (4.0 * g.dx * g.dx);
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        double fc = f[c];
        auto v = [&](int sa, int sb) {
            int ii = i + sa * (a == 0) + sb * (b == 0);
            int jj = j + sa * (a == 1) + sb * (b == 1);
            int kk = k + sa * (a == 2) + sb * (b == 2);
            return cellv_mirror(g, f, ii, jj, kk, fc);
        };
        out[c] = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) * inv;
    }
}

/// Masked Neumann Laplacian on cell fields (zero flux through non-fluid
/// faces); equals the sum of d2 over the three axes.
inline void laplacian(const Grid& g, const std::vector<double>& f,
                      std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const double inv = 1.0 / (g.dx * g.dx);
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        double fc = f[c];
        double s = 0.0;
        s += cellv_mirror(g, f, i + 1, j, k, fc) + cellv_mirror(g, f, i - 1, j, k, fc);
        s += cellv_mirror(g, f, i, j + 1, k, fc) + cellv_mirror(g, f, i, j - 1, k, fc);
        s += cellv_mirror(g, f, i, j, k + 1, fc) + cellv_mirror(g, f, i, j, k - 1, fc);
        out[c] = (s - 6.0 * fc) * inv;
    }
}

// ---------------------------------------------------------------------------
// Full-lattice stencils for transform samples (defined on every box cell).
// Centered in the interior, one-sided second order at the box edge.
// ---------------------------------------------------------------------------

inline void d1_full(const Grid& g, const std::vector<double>& f, int a,
                    std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const int n = g.n;
    const double inv2 = 1.0 / (2.0 * g.dx);
    for (long c = 0; c < g.ncell; ++c) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        int p = (a == 0) ? i : (a == 1) ? j : k;
        auto at = [&](int q) {
            int ii = (a == 0) ? q : i, jj = (a == 1) ? q : j, kk = (a == 2) ? q : k;
            return f[g.cid(ii, jj, kk)];
        };
        if (p == 0)
            out[c] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2;
        else if (p == n - 1)
            out[c] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2;
        else
            out[c] = (at(p + 1) - at(p - 1)) * inv2;
    }
}

// ---------------------------------------------------------------------------
// Staggered velocity operators.
// ---------------------------------------------------------------------------

/// Divergence on fluid cells using all adjacent face values (boundary data
/// included).  Non-fluid cells get zero.
inline void div_faces(const Grid& g, const VelocityField& v, std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const double inv = 1.0 / g.dx;
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        double s = v.c[0][g.fid(0, i + 1, j, k)] - v.c[0][g.fid(0, i, j, k)];
        s += v.c[1][g.fid(1, i, j + 1, k)] - v.c[1][g.fid(1, i, j, k)];
        s += v.c[2][g.fid(2, i, j, k + 1)] - v.c[2][g.fid(2, i, j, k)];
        out[c] = s * inv;
    }
}

/// Divergence counting active-face contributions only; this is the exact
/// negative adjoint of grad_to_active and drives the Helmholtz projection.
inline void div_active(const Grid& g, const VelocityField& v, std::vector<double>& out) {
    out.assign(g.ncell, 0.0);
    const double inv = 1.0 / g.dx;
    for (int a = 0; a < 3; ++a)
        for (int32_t f : g.active_faces[a]) {
            int i, j, k;
            g.face_ijk(a, f, i, j, k);
            double val = v.c[a][f] * inv;
            int il = i - (a == 0), jl = j - (a == 1), kl = k - (a == 2);
            out[g.cid(i, j, k)] -= val;       // face is the low face of (i,j,k)
            out[g.cid(il, jl, kl)] += val;    // and the high face of the lower cell
        }
}

/// Gradient of a cell scalar onto active faces (zero on all others).
inline void grad_to_active(const Grid& g, const std::vector<double>& p,
                           VelocityField& out) {
    out.zero();
    const double inv = 1.0 / g.dx;
    for (int a = 0; a < 3; ++a)
        for (int32_t f : g.active_faces[a]) {
            int i, j, k;
            g.face_ijk(a, f, i, j, k);
            int il = i - (a == 0), jl = j - (a == 1), kl = k - (a == 2);
            out.c[a][f] = (p[g.cid(i, j, k)] - p[g.cid(il, jl, kl)]) * inv;
        }
}

/// Seven-point component Laplacian evaluated on active faces; neighbor face
/// values are read from the arrays, so Dirichlet data participates via the
/// stored boundary values.
inline void lap_velocity(const Grid& g, const VelocityField& v, VelocityField& out) {
    out.zero();
    const double inv = 1.0 / (g.dx * g.dx);
    for (int a = 0; a < 3; ++a) {
        int ni = (a == 0) ? g.n + 1 : g.n;
        int nj = (a == 1) ? g.n + 1 : g.n;
        int nk = (a == 2) ? g.n + 1 : g.n;
        for (int32_t f : g.active_faces[a]) {
            int i, j, k;
            g.face_ijk(a, f, i, j, k);
            auto fv = [&](int ii, int jj, int kk) -> double {
                if (ii < 0 || jj < 0 || kk < 0 || ii >= ni || jj >= nj || kk >= nk)
                    return 0.0;
                return v.c[a][g.fid(a, ii, jj, kk)];
            };
            double s = fv(i + 1, j, k) + fv(i - 1, j, k) + fv(i, j + 1, k) +
                       fv(i, j - 1, k) + fv(i, j, k + 1) + fv(i, j, k - 1) -
                       6.0 * v.c[a][f];
            out.c[a][f] = s * inv;
        }
    }
}

/// Velocity gradient at cell centers, (i,j) entry = d_j w_i.  Diagonal
/// entries use the natural MAC difference; off-diagonal entries difference
/// cell-averaged components with mirrored non-fluid neighbors.
inline void grad_velocity(const Grid& g, const VelocityField& w, Matrix3Field& out) {
    for (auto& v : out.c) std::fill(v.begin(), v.end(), 0.0);
    const double inv = 1.0 / g.dx;
    const double inv2 = 1.0 / (2.0 * g.dx);
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        auto avg = [&](int comp, int ci, int cj, int ck) {
            long flo = g.fid(comp, ci, cj, ck);
            long fhi = g.fid(comp, ci + (comp == 0), cj + (comp == 1), ck + (comp == 2));
            return 0.5 * (w.c[comp][flo] + w.c[comp][fhi]);
        };
        for (int ci2 = 0; ci2 < 3; ++ci2) {
            // diagonal: d_i w_i
            long flo = g.fid(ci2, i, j, k);
            long fhi = g.fid(ci2, i + (ci2 == 0), j + (ci2 == 1), k + (ci2 == 2));
            out.c[3 * ci2 + ci2][c] = (w.c[ci2][fhi] - w.c[ci2][flo]) * inv;
        }
        for (int comp = 0; comp < 3; ++comp)
            for (int d = 0; d < 3; ++d) {
                if (comp == d) continue;
                int ip = i + (d == 0), jp = j + (d == 1), kp = k + (d == 2);
                int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                double center = avg(comp, i, j, k);
                double vp = g.is_fluid(ip, jp, kp) ? avg(comp, ip, jp, kp) : center;
                double vm = g.is_fluid(im, jm, km) ? avg(comp, im, jm, km) : center;
                out.c[3 * comp + d][c] = (vp - vm) * inv2;
            }
    }
}

/// Exact negative adjoint of grad_velocity restricted to active faces:
/// consistent divergence of a cell tensor, (div T)_i = d_j T_ij, with
/// <div_tensor(T), w>_faces = -<T, grad_velocity(w)>_cells for any w
/// supported on active faces.
inline void div_tensor(const Grid& g, const Matrix3Field& t, VelocityField& out) {
    out.zero();
    const double inv = 1.0 / g.dx;
    const double inv2 = 1.0 / (2.0 * g.dx);
    auto face_active = [&](int a, int i, int j, int k) {
        return g.face_kind[a][g.fid(a, i, j, k)] == FaceKind::Active;
    };
    for (int32_t c : g.fluid_cells) {
        int i, j, k;
        g.cell_ijk(c, i, j, k);
        // transpose of the diagonal gather
        for (int a = 0; a < 3; ++a) {
            double tii = t.c[3 * a + a][c] * inv;
            int ih = i + (a == 0), jh = j + (a == 1), kh = k + (a == 2);
            if (face_active(a, ih, jh, kh)) out.c[a][g.fid(a, ih, jh, kh)] += tii;
            if (face_active(a, i, j, k)) out.c[a][g.fid(a, i, j, k)] -= tii;
        }
        // transpose of the off-diagonal gather: T_comp,d (c) was built from
        // averaged comp-faces of the d+/- neighbor cells (mirrored to the
        // center when non-fluid)
        for (int comp = 0; comp < 3; ++comp)
            for (int d = 0; d < 3; ++d) {
                if (comp == d) continue;
                double tcd = t.c[3 * comp + d][c] * inv2;
                auto scatter = [&](int ci, int cj, int ck, double wgt) {
                    long flo = g.fid(comp, ci, cj, ck);
                    long fhi = g.fid(comp, ci + (comp == 0), cj + (comp == 1),
                                     ck + (comp == 2));
                    if (g.face_kind[comp][flo] == FaceKind::Active)
                        out.c[comp][flo] += 0.5 * wgt;
                    if (g.face_kind[comp][fhi] == FaceKind::Active)
                        out.c[comp][fhi] += 0.5 * wgt;
                };
                int ip = i + (d == 0), jp = j + (d == 1), kp = k + (d == 2);
                int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                bool fp = g.is_fluid(ip, jp, kp), fm = g.is_fluid(im, jm, km);
                if (fp) scatter(ip, jp, kp, tcd);
                if (fm) scatter(im, jm, km, -tcd);
                // mirrored contributions hit the center cell averages
                if (!fp) scatter(i, j, k, tcd);
                if (!fm) scatter(i, j, k, -tcd);
            }
    }
    // gather reads (vp - vm), so the adjoint scatters -T to the plus side;
    // flip sign to produce +div
    for (int a = 0; a < 3; ++a)
        for (int32_t f : g.active_faces[a]) out.c[a][f] = -out.c[a][f];
}

/// Rigid velocity ell + omega x y evaluated at y.
inline Vec3 rigid_velocity(const Vec3& ell, const Vec3& omega, const Vec3& y) {
    return ell + omega.cross(y);
}

/// Store the boundary data on non-active faces: the rigid interface
/// velocity on faces touching the body, zero on wall/exterior faces.
inline void fill_rigid_boundary(const Grid& g, VelocityField& v, const Vec3& ell,
                                const Vec3& omega) {
    for (int a = 0; a < 3; ++a) {
        int ni = (a == 0) ? g.n + 1 : g.n;
        int nj = (a == 1) ? g.n + 1 : g.n;
        int nk = (a == 2) ? g.n + 1 : g.n;
        for (int k = 0; k < nk; ++k)
            for (int j = 0; j < nj; ++j)
                for (int i = 0; i < ni; ++i) {
                    long f = g.fid(a, i, j, k);
                    switch (g.face_kind[a][f]) {
                        case FaceKind::Active: break;
                        case FaceKind::BodyFixed:
                            v.c[a][f] = rigid_velocity(ell, omega, g.face_center(a, i, j, k))[a];
                            break;
                        default: {
                            // faces fully inside the body keep the rigid motion
                            Vec3 x = g.face_center(a, i, j, k);
                            v.c[a][f] = (x.norm() < g.a_body)
                                            ? rigid_velocity(ell, omega, x)[a]
                                            : 0.0;
                        }
                    }
                }
    }
}

// ---------------------------------------------------------------------------
// Interpolation.
// ---------------------------------------------------------------------------

/// Trilinear interpolation of a cell-centered field at point x (clamped to
/// the cell-center lattice hull).
inline double interp_cell(const Grid& g, const std::vector<double>& f, const Vec3& x) {
    double gx = (x[0] + g.L) / g.dx - 0.5;
    double gy = (x[1] + g.L) / g.dx - 0.5;
    double gz = (x[2] + g.L) / g.dx - 0.5;
    int i0 = std::clamp(static_cast<int>(std::floor(gx)), 0, g.n - 2);
    int j0 = std::clamp(static_cast<int>(std::floor(gy)), 0, g.n - 2);
    int k0 = std::clamp(static_cast<int>(std::floor(gz)), 0, g.n - 2);
    double fx = std::clamp(gx - i0, 0.0, 1.0);
    double fy = std::clamp(gy - j0, 0.0, 1.0);
    double fz = std::clamp(gz - k0, 0.0, 1.0);
    double r = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                r += w * f[g.cid(i0 + di, j0 + dj, k0 + dk)];
            }
    return r;
}

/// Trilinear interpolation restricted to fluid cells: weights of non-fluid
/// neighbors are dropped and the rest renormalized.  First-order accurate at
/// the staircase boundary, identical to interp_cell away from it.
inline double interp_cell_fluid(const Grid& g, const std::vector<double>& f,
                                const Vec3& x) {
    double gx = (x[0] + g.L) / g.dx - 0.5;
    double gy = (x[1] + g.L) / g.dx - 0.5;
    double gz = (x[2] + g.L) / g.dx - 0.5;
    int i0 = std::clamp(static_cast<int>(std::floor(gx)), 0, g.n - 2);
    int j0 = std::clamp(static_cast<int>(std::floor(gy)), 0, g.n - 2);
    int k0 = std::clamp(static_cast<int>(std::floor(gz)), 0, g.n - 2);
    double fx = std::clamp(gx - i0, 0.0, 1.0);
    double fy = std::clamp(gy - j0, 0.0, 1.0);
    double fz = std::clamp(gz - k0, 0.0, 1.0);
    double r = 0.0, wsum = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                if (!g.is_fluid(i0 + di, j0 + dj, k0 + dk)) continue;
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                r += w * f[g.cid(i0 + di, j0 + dj, k0 + dk)];
                wsum += w;
            }
    return (wsum > 1e-12) ? r / wsum : 0.0;
}

/// Adjoint of interp_cell: spread a weighted sample into the eight
/// neighboring cell centers.
inline void spread_to_cells(const Grid& g, const Vec3& x, double val,
                            std::vector<double>& f) {
    double gx = (x[0] + g.L) / g.dx - 0.5;
    double gy = (x[1] + g.L) / g.dx - 0.5;
    double gz = (x[2] + g.L) / g.dx - 0.5;
    int i0 = std::clamp(static_cast<int>(std::floor(gx)), 0, g.n - 2);
    int j0 = std::clamp(static_cast<int>(std::floor(gy)), 0, g.n - 2);
    int k0 = std::clamp(static_cast<int>(std::floor(gz)), 0, g.n - 2);
    double fx = std::clamp(gx - i0, 0.0, 1.0);
    double fy = std::clamp(gy - j0, 0.0, 1.0);
    double fz = std::clamp(gz - k0, 0.0, 1.0);
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                f[g.cid(i0 + di, j0 + dj, k0 + dk)] += w * val;
            }
}

/// Trilinear interpolation of one staggered velocity component.
inline double interp_face(const Grid& g, const VelocityField& v, int a, const Vec3& x) {
    // component a lives at cell centers shifted by -dx/2 along a
    double gx = (x[0] + g.L) / g.dx - (a == 0 ? 0.0 : 0.5);
    double gy = (x[1] + g.L) / g.dx - (a == 1 ? 0.0 : 0.5);
    double gz = (x[2] + g.L) / g.dx - (a == 2 ? 0.0 : 0.5);
    int ni = (a == 0) ? g.n + 1 : g.n;
    int nj = (a == 1) ? g.n + 1 : g.n;
    int nk = (a == 2) ? g.n + 1 : g.n;
    int i0 = std::clamp(static_cast<int>(std::floor(gx)), 0, ni - 2);
    int j0 = std::clamp(static_cast<int>(std::floor(gy)), 0, nj - 2);
    int k0 = std::clamp(static_cast<int>(std::floor(gz)), 0, nk - 2);
    double fx = std::clamp(gx - i0, 0.0, 1.0);
    double fy = std::clamp(gy - j0, 0.0, 1.0);
    double fz = std::clamp(gz - k0, 0.0, 1.0);
    double r = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                r += w * v.c[a][g.fid(a, i0 + di, j0 + dj, k0 + dk)];
            }
    return r;
}

namespace detail {
inline double cr_weight(double t, int idx) {
    // Catmull-Rom basis on nodes {-1, 0, 1, 2}
    switch (idx) {
        case 0: return 0.5 * (-t + 2 * t * t - t * t * t);
        case 1: return 0.5 * (2 - 5 * t * t + 3 * t * t * t);
        case 2: return 0.5 * (t + 4 * t * t - 3 * t * t * t);
        default: return 0.5 * (-t * t + t * t * t);
    }
}
} // namespace detail

/// Tricubic (Catmull-Rom) interpolation of a full-lattice cell field; used
/// by the transform consistency diagnostics where trilinear accuracy is not
/// enough.  Falls back to clamped indices near the box edge.
inline double interp_cell_cubic(const Grid& g, const std::vector<double>& f,
                                const Vec3& x) {
    double gx = (x[0] + g.L) / g.dx - 0.5;
    double gy = (x[1] + g.L) / g.dx - 0.5;
    double gz = (x[2] + g.L) / g.dx - 0.5;
    int i0 = std::clamp(static_cast<int>(std::floor(gx)), 1, g.n - 3);
    int j0 = std::clamp(static_cast<int>(std::floor(gy)), 1, g.n - 3);
    int k0 = std::clamp(static_cast<int>(std::floor(gz)), 1, g.n - 3);
    double tx = gx - i0, ty = gy - j0, tz = gz - k0;
    double r = 0.0;
    for (int dk = -1; dk <= 2; ++dk) {
        double wz = detail::cr_weight(tz, dk + 1);
        for (int dj = -1; dj <= 2; ++dj) {
            double wy = detail::cr_weight(ty, dj + 1);
            for (int di = -1; di <= 2; ++di) {
                double wx = detail::cr_weight(tx, di + 1);
                r += wx * wy * wz * f[g.cid(i0 + di, j0 + dj, k0 + dk)];
            }
        }
    }
    return r;
}

} // namespace stencil
} // namespace qfsi
