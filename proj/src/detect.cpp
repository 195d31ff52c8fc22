// SPDX-License-Identifier: Apache-2.0

#include "dirs/detect.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace dirs {

std::string_view to_string(DetectorKind kind) { return kind == DetectorKind::ZF ? "ZF" : "MRC"; }

DetectorMatrix mrc(const CMatrix& h_d) { return {h_d, DetectorKind::MRC}; }

DetectorMatrix zf(const CMatrix& h_d) {
    const Eigen::Index n = h_d.rows(), k = h_d.cols();
    if (n < k) {
        std::ostringstream msg;
        msg << "zf: H_d is " << n << "x" << k << ", fewer antennas than users";
        throw SingularityError(msg.str(), std::numeric_limits<double>::infinity());
    }
    Eigen::HouseholderQR<CMatrix> qr(h_d);
    const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(r).singularValues();
    const double cond = sv.size() == 0 ? 1.0 : (sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                                       : std::numeric_limits<double>::infinity());
    if (!(cond <= kZfConditionLimit)) {
        std::ostringstream msg;
        msg << "zf: direct channel is rank deficient (condition number " << cond << " > " << kZfConditionLimit << ")";
        throw SingularityError(msg.str(), cond);
    }
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, k);
    // W^H = R^{-1} Q^H.
    const CMatrix w_h = r.triangularView<Eigen::Upper>().solve(q.adjoint());
    return {w_h.adjoint(), DetectorKind::ZF};
}

DetectorMatrix build_detector(DetectorKind kind, const CMatrix& h_d) {
    return kind == DetectorKind::ZF ? zf(h_d) : mrc(h_d);
}

double zf_residual(const DetectorMatrix& det, const CMatrix& h_d) {
    const CMatrix e = det.w.adjoint() * h_d - CMatrix::Identity(h_d.cols(), h_d.cols());
    return e.cwiseAbs().maxCoeff();
}

}  // namespace dirs
