#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qfsi/errors.hpp"
#include "qfsi/qtensor.hpp"

namespace qfsi {

enum class CellKind : uint8_t { Fluid = 0, Body = 1, Exterior = 2 };

/// Face classification per axis.  Active faces are unknowns (both
/// neighbor cells fluid); BodyFixed faces carry the rigid velocity,
/// Wall faces carry zero.  Dead faces have no fluid neighbor.
enum class FaceKind : uint8_t { Active = 0, BodyFixed = 1, Wall = 2, Dead = 3 };

struct GridConfig {
    int n = 16;             // cells per axis
    double box_half = 1.0;  // computational box is [-L, L]^3
    double R_O = 0.9;       // container radius
    double a_body = 0.25;   // rigid ball radius
    double r_gap = 0.2;     // the collision parameter r
};

/// Cartesian staggered (MAC) grid over a cubic box with a spherical
/// container O and a spherical body S0 centered at the origin.
/// Immutable after construction.
class Grid {
  public:
    int n = 0;
    double L = 0, dx = 0;
    double R_O = 0, a_body = 0, r_gap = 0;
    long ncell = 0;

    std::vector<CellKind> cell_kind;       // n^3
    std::vector<int32_t> cell_compact;     // n^3, fluid ordinal or -1
    std::vector<int32_t> fluid_cells;      // flat ids of fluid cells

    // face arrays, one per axis; sizes nf[a]
    std::array<std::vector<FaceKind>, 3> face_kind;
    std::array<std::vector<int32_t>, 3> active_faces; // flat ids
    std::array<long, 3> nf{};

    explicit Grid(const GridConfig& cfg) {
        n = cfg.n;
        L = cfg.box_half;
        R_O = cfg.R_O;
        a_body = cfg.a_body;
        r_gap = cfg.r_gap;
        if (n < 8) throw GeometryError("grid resolution must be >= 8");
        if (a_body <= 0.0) throw GeometryError("body radius must be positive");
        if (!(a_body + r_gap < R_O))
            throw GeometryError("dist(S0, dO) = R_O - a_body must exceed r");
        dx = 2.0 * L / n;
        if (!(R_O < L))
            throw GeometryError("container must lie strictly inside the box");
        ncell = static_cast<long>(n) * n * n;

        cell_kind.resize(ncell);
        cell_compact.assign(ncell, -1);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    Vec3 x = cell_center(i, j, k);
                    double rr = x.norm();
                    CellKind ck = CellKind::Exterior;
                    if (rr < R_O) ck = (rr > a_body) ? CellKind::Fluid : CellKind::Body;
                    cell_kind[cid(i, j, k)] = ck;
                }
        for (long c = 0; c < ncell; ++c)
            if (cell_kind[c] == CellKind::Fluid) {
                cell_compact[c] = static_cast<int32_t>(fluid_cells.size());
                fluid_cells.push_back(static_cast<int32_t>(c));
            }
        if (fluid_cells.empty()) throw GeometryError("no fluid cells");

        for (int a = 0; a < 3; ++a) {
            nf[a] = static_cast<long>(n + 1) * n * n;
            face_kind[a].assign(nf[a], FaceKind::Dead);
        }
        for (int a = 0; a < 3; ++a) {
            int ni = (a == 0) ? n + 1 : n;
            int nj = (a == 1) ? n + 1 : n;
            int nk = (a == 2) ? n + 1 : n;
            for (int k = 0; k < nk; ++k)
                for (int j = 0; j < nj; ++j)
                    for (int i = 0; i < ni; ++i) {
                        CellKind lo = neighbor_kind(a, i, j, k, -1);
                        CellKind hi = neighbor_kind(a, i, j, k, 0);
                        FaceKind fk;
                        if (lo == CellKind::Fluid && hi == CellKind::Fluid)
                            fk = FaceKind::Active;
                        else if (lo == CellKind::Body || hi == CellKind::Body)
                            fk = FaceKind::BodyFixed;
                        else if (lo == CellKind::Fluid || hi == CellKind::Fluid)
                            fk = FaceKind::Wall;
                        else
                            fk = FaceKind::Dead;
                        face_kind[a][fid(a, i, j, k)] = fk;
                    }
            for (long f = 0; f < nf[a]; ++f)
                if (face_kind[a][f] == FaceKind::Active)
                    active_faces[a].push_back(static_cast<int32_t>(f));
        }
    }

    long cid(int i, int j, int k) const {
        return i + static_cast<long>(n) * (j + static_cast<long>(n) * k);
    }
    // face flat id; axis-a faces are indexed with the a-direction
    // running over n+1 values
    long fid(int a, int i, int j, int k) const {
        int ni = (a == 0) ? n + 1 : n;
        int nj = (a == 1) ? n + 1 : n;
        return i + static_cast<long>(ni) * (j + static_cast<long>(nj) * k);
    }

    Vec3 cell_center(int i, int j, int k) const {
        return {-L + (i + 0.5) * dx, -L + (j + 0.5) * dx, -L + (k + 0.5) * dx};
    }
    Vec3 face_center(int a, int i, int j, int k) const {
        Vec3 x{-L + (i + 0.5) * dx, -L + (j + 0.5) * dx, -L + (k + 0.5) * dx};
        x[a] -= 0.5 * dx;
        return x;
    }
    void cell_ijk(long c, int& i, int& j, int& k) const {
        i = static_cast<int>(c % n);
        j = static_cast<int>((c / n) % n);
        k = static_cast<int>(c / (static_cast<long>(n) * n));
    }
    void face_ijk(int a, long f, int& i, int& j, int& k) const {
        int ni = (a == 0) ? n + 1 : n;
        int nj = (a == 1) ? n + 1 : n;
        i = static_cast<int>(f % ni);
        j = static_cast<int>((f / ni) % nj);
        k = static_cast<int>(f / (static_cast<long>(ni) * nj));
    }

    bool is_fluid(int i, int j, int k) const {
        if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return false;
        return cell_kind[cid(i, j, k)] == CellKind::Fluid;
    }
    CellKind kind(int i, int j, int k) const {
        if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n)
            return CellKind::Exterior;
        return cell_kind[cid(i, j, k)];
    }

    double cell_volume() const { return dx * dx * dx; }
    long n_fluid() const { return static_cast<long>(fluid_cells.size()); }

    // distance of the body surface (center h) to the container wall
    double body_wall_distance(const Vec3& h) const {
        return R_O - (h.norm() + a_body);
    }

  private:
    // side = -1: cell on the negative side of the face, side = 0: positive
    CellKind neighbor_kind(int a, int i, int j, int k, int side) const {
        int ci = i, cj = j, ck = k;
        if (a == 0) ci += side;
        else if (a == 1) cj += side;
        else ck += side;
        return kind(ci, cj, ck);
    }
};

} // namespace qfsi
