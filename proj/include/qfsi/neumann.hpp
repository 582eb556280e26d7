#pragma once

#include "qfsi/poisson.hpp"
#include "qfsi/quadrature.hpp"

namespace qfsi {

/// Harmonic Neumann lifting on the fluid shell: solves lap(phi) = 0 with
/// prescribed normal-derivative data on the boundary spheres.  The data is
/// given at quadrature nodes and enters the discrete weak form through the
/// adjoint of fluid-masked trilinear interpolation.
class NeumannLift {
  public:
    explicit NeumannLift(const Grid& g)
        : g_(g), poisson_(g), body_(body_quadrature(g)),
          outer_(Vec3::Zero(), g.R_O, g.n, 2 * g.n) {
        // outer-sphere normals point out of the fluid (away from the center)
        for (auto& nrm : outer_.normal) nrm = -nrm;
    }

    const SphereQuad& body_quad() const { return body_; }
    const SphereQuad& outer_quad() const { return outer_; }

    /// Lifting from data on the body sphere only (the operator N_{S0}).
    std::vector<double> lift_body(const std::vector<double>& h,
                                  double compat_tol = 1e-8) const {
        return lift(h, nullptr, compat_tol);
    }

    /// Same, also returning the discrete source field (the weak-form image
    /// of the boundary data); pairings (source_i, phi_j) are symmetric to
    /// solver accuracy because the masked Laplacian is self-adjoint.
    std::pair<std::vector<double>, std::vector<double>> lift_body_with_source(
        const std::vector<double>& h, double compat_tol = 1e-8) const {
        std::vector<double> src(g_.ncell, 0.0);
        double total = 0, l1 = 0;
        for (size_t m = 0; m < body_.node.size(); ++m) {
            double val = h[m] * body_.weight[m];
            total += val;
            l1 += std::abs(val);
            spread_fluid(body_.node[m], val, src);
        }
        if (l1 > 0 && std::abs(total) > compat_tol * l1)
            throw CompatibilityError("Neumann data has nonzero mean");
        double vol = g_.cell_volume();
        std::vector<double> rhs(g_.ncell, 0.0);
        for (int32_t c : g_.fluid_cells) rhs[c] = src[c] / vol;
        CgOptions opt;
        opt.rtol = 1e-12;
        return {poisson_.solve(rhs, opt), src};
    }

    /// Lifting from data on both boundary components.
    std::vector<double> lift(const std::vector<double>& h_body,
                             const std::vector<double>* h_outer,
                             double compat_tol = 1e-8) const {
        std::vector<double> src(g_.ncell, 0.0);
        double total = 0, l1 = 0;
        auto deposit = [&](const SphereQuad& q, const std::vector<double>& h) {
            for (size_t m = 0; m < q.node.size(); ++m) {
                double val = h[m] * q.weight[m];
                total += val;
                l1 += std::abs(val);
                spread_fluid(q.node[m], val, src);
            }
        };
        deposit(body_, h_body);
        if (h_outer) deposit(outer_, *h_outer);
        if (l1 > 0 && std::abs(total) > compat_tol * l1)
            throw CompatibilityError("Neumann data has nonzero mean");
        double vol = g_.cell_volume();
        std::vector<double> rhs(g_.ncell, 0.0);
        for (int32_t c : g_.fluid_cells) rhs[c] = src[c] / vol;
        CgOptions opt;
        opt.rtol = 1e-12;
        // weak form: (grad phi, grad psi) = boundary data pairing, i.e.
        // -lap(phi) = rhs with the residual mean removed inside the solver
        return poisson_.solve(rhs, opt);
    }

  private:
    /// adjoint of the fluid-masked renormalized trilinear interpolation
    void spread_fluid(const Vec3& x, double val, std::vector<double>& f) const {
        const Grid& g = g_;
        double gx = (x[0] + g.L) / g.dx - 0.5;
        double gy = (x[1] + g.L) / g.dx - 0.5;
        double gz = (x[2] + g.L) / g.dx - 0.5;
        int i0 = std::clamp(static_cast<int>(std::floor(gx)), 0, g.n - 2);
        int j0 = std::clamp(static_cast<int>(std::floor(gy)), 0, g.n - 2);
        int k0 = std::clamp(static_cast<int>(std::floor(gz)), 0, g.n - 2);
        double fx = std::clamp(gx - i0, 0.0, 1.0);
        double fy = std::clamp(gy - j0, 0.0, 1.0);
        double fz = std::clamp(gz - k0, 0.0, 1.0);
        double w[8];
        long cc[8];
        double wsum = 0;
        int nlive = 0;
        for (int dk = 0; dk < 2; ++dk)
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) {
                    if (!g.is_fluid(i0 + di, j0 + dj, k0 + dk)) continue;
                    double ww =
                        (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                    w[nlive] = ww;
                    cc[nlive] = g.cid(i0 + di, j0 + dj, k0 + dk);
                    wsum += ww;
                    ++nlive;
                }
        if (wsum <= 1e-12) return;
        for (int m = 0; m < nlive; ++m) f[cc[m]] += val * w[m] / wsum;
    }

    const Grid& g_;
    CellPoisson poisson_;
    SphereQuad body_;
    SphereQuad outer_;
};

} // namespace qfsi
