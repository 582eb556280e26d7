#pragma once

#include "qfsi/neumann.hpp"
#include "qfsi/transform.hpp"

namespace qfsi {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Added-mass matrix M (potential-flow correction from the Neumann lifting
/// of rigid normal data) and the invertible system matrix
/// K = blockdiag(m_S I, J0) + M.
struct AddedMassSystem {
    Mat6 M = Mat6::Zero();
    Mat6 K = Mat6::Zero();
    Eigen::PartialPivLU<Mat6> K_lu;
    double condition = 0;

    Vec6 solve(const Vec6& rhs) const { return K_lu.solve(rhs); }
};

/// M_ij = boundary pairing of the rigid datum h_i with the lifted
/// potential phi_j; evaluated through the discrete weak form
/// (source_i, phi_j), which is symmetric positive semidefinite because the
/// masked Neumann Laplacian is self-adjoint.
inline AddedMassSystem build_added_mass(const Grid& g, const RigidBodyState& body,
                                        const NeumannLift& lift) {
    AddedMassSystem sys;
    const SphereQuad& q = lift.body_quad();
    std::array<std::vector<double>, 6> phi, src;
    std::array<bool, 6> live{};
    for (int col = 0; col < 6; ++col) {
        Vec3 ell = Vec3::Zero(), omega = Vec3::Zero();
        if (col < 3)
            ell[col] = 1.0;
        else
            omega[col - 3] = 1.0;
        std::vector<double> h(q.node.size());
        double any = 0;
        for (size_t m = 0; m < q.node.size(); ++m) {
            h[m] = (ell + omega.cross(q.node[m])).dot(q.normal[m]);
            any = std::max(any, std::abs(h[m]));
        }
        live[col] = any > 1e-14; // rotations of a sphere carry no normal flux
        if (!live[col]) continue;
        auto pr = lift.lift_body_with_source(h);
        phi[col] = std::move(pr.first);
        src[col] = std::move(pr.second);
    }
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (!live[i] || !live[j]) continue;
            double s = 0;
            for (int32_t c : g.fluid_cells) s += src[i][c] * phi[j][c];
            sys.M(i, j) = s;
        }
    sys.K = sys.M;
    sys.K.topLeftCorner<3, 3>() += body.m_S * Mat3::Identity();
    sys.K.bottomRightCorner<3, 3>() += body.J0;
    sys.K_lu = Eigen::PartialPivLU<Mat6>(sys.K);
    Eigen::JacobiSVD<Mat6> svd(sys.K);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    if (smin <= 0) throw SolverError("added-mass system matrix is singular");
    sys.condition = smax / smin;
    return sys;
}

} // namespace qfsi
