#include "torsflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torsflow/error.hpp"

namespace torsflow {

namespace {

void require_finite(const CMatrix& a) {
    if (!all_finite(a)) {
        throw Error(ErrorCode::InvalidInput, "matrix has a non-finite entry");
    }
}

}  // namespace

bool all_finite(const CMatrix& a) {
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            const Complex z = a(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
    }
    return true;
}

double max_abs(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    const CMatrix g = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
    return max_abs(g);
}

void normalize_phases(CMatrix& basis) {
    for (Index j = 0; j < basis.cols(); ++j) {
        auto col = basis.col(j);
        double best = 0.0;
        for (Index i = 0; i < col.size(); ++i) best = std::max(best, std::abs(col(i)));
        if (best == 0.0) continue;
        // First entry within a hair of the maximum, so ties resolve by position.
        for (Index i = 0; i < col.size(); ++i) {
            const double mag = std::abs(col(i));
            if (mag >= best * (1.0 - 1e-9)) {
                const Complex phase = col(i) / mag;
                col *= std::conj(phase);
                col(i) = Complex(mag, 0.0);
                break;
            }
        }
    }
}

RankResult rank_nullspace(const CMatrix& a, double tol_rel) {
    return rank_nullspace(a, RankOptions{tol_rel, 0.0});
}

RankResult rank_nullspace(const CMatrix& a, const RankOptions& options) {
    if (!(options.tol_rel > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
    }
    require_finite(a);

    const Index rows = a.rows();
    const Index cols = a.cols();
    RankResult out;

    if (rows == 0 || cols == 0) {
        out.kernel_basis = CMatrix::Identity(cols, cols);
        out.cokernel_basis = CMatrix::Identity(rows, rows);
        out.image_basis = CMatrix(rows, 0);
        out.coimage_basis = CMatrix(cols, 0);
        out.singular_values = Eigen::VectorXd(0);
        out.tolerance_used = std::max(options.tol_rel, options.abs_floor);
        return out;
    }

    Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    double threshold = sigma_max > 0.0
                           ? options.tol_rel * static_cast<double>(std::max(rows, cols)) * sigma_max
                           : options.tol_rel;
    threshold = std::max(threshold, options.abs_floor);

    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold) ++rank;
        if (sv(i) > threshold / 10.0 && sv(i) < threshold * 10.0) out.ambiguous_rank = true;
    }

    const CMatrix& u = svd.matrixU();
    const CMatrix& v = svd.matrixV();
    out.rank = rank;
    out.singular_values = sv;
    out.tolerance_used = threshold;
    out.image_basis = u.leftCols(rank);
    out.cokernel_basis = u.rightCols(rows - rank);
    out.coimage_basis = v.leftCols(rank);
    out.kernel_basis = v.rightCols(cols - rank);
    normalize_phases(out.kernel_basis);
    normalize_phases(out.cokernel_basis);
    normalize_phases(out.image_basis);
    normalize_phases(out.coimage_basis);
    return out;
}

double det_modulus(const CMatrix& a, double tol_rel) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::InvalidInput, "det_modulus needs a square matrix");
    }
    require_finite(a);
    if (a.rows() == 0) return 1.0;
    Eigen::FullPivLU<CMatrix> lu(a);
    lu.setThreshold(tol_rel);
    if (lu.rank() < a.rows()) return 0.0;
    return std::abs(lu.determinant());
}

double log_det_modulus(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::InvalidInput, "log_det_modulus needs a square matrix");
    }
    if (a.rows() == 0) return 0.0;
    Eigen::FullPivLU<CMatrix> lu(a);
    double acc = 0.0;
    const auto diag = lu.matrixLU().diagonal();
    for (Index i = 0; i < diag.size(); ++i) acc += std::log(std::abs(diag(i)));
    return acc;
}

CMatrix span_basis(const CMatrix& vectors, const RankOptions& options) {
    if (vectors.cols() == 0) return CMatrix(vectors.rows(), 0);
    return rank_nullspace(vectors, options).image_basis;
}

CMatrix orthogonal_complement(const CMatrix& space, const CMatrix& sub, const RankOptions& options) {
    if (sub.cols() == 0 || space.cols() == 0) return space;
    const CMatrix overlap = sub.adjoint() * space;
    // Orthonormal inputs: singular values are cosines of principal angles.
    RankOptions angle = options;
    angle.abs_floor = std::max(options.abs_floor, 1e-8);
    const RankResult rr = rank_nullspace(overlap, angle);
    CMatrix out = space * rr.kernel_basis;
    normalize_phases(out);
    return out;
}

CMatrix least_squares(const CMatrix& a, const CMatrix& b, const RankOptions& options) {
    if (a.rows() != b.rows()) {
        throw Error(ErrorCode::InvalidInput, "least_squares: row count mismatch");
    }
    if (a.cols() == 0) return CMatrix(0, b.cols());
    if (a.rows() == 0) return CMatrix::Zero(a.cols(), b.cols());
    require_finite(a);
    Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    double threshold = sigma_max > 0.0
                           ? options.tol_rel * static_cast<double>(std::max(a.rows(), a.cols())) * sigma_max
                           : options.tol_rel;
    threshold = std::max(threshold, options.abs_floor);
    Index k = 0;
    while (k < sv.size() && sv(k) > threshold) ++k;
    if (k == 0) return CMatrix::Zero(a.cols(), b.cols());
    // A = U_k S_k V_k^H  =>  A^+ = V_k S_k^{-1} U_k^H
    const Eigen::VectorXd inv = sv.head(k).cwiseInverse();
    return svd.matrixV().leftCols(k) * inv.cast<Complex>().asDiagonal() *
           (svd.matrixU().leftCols(k).adjoint() * b);
}

CMatrix hstack(Index rows, std::initializer_list<const CMatrix*> blocks) {
    Index cols = 0;
    for (const CMatrix* m : blocks) {
        if (m->rows() != rows && m->cols() != 0) {
            throw Error(ErrorCode::InvalidInput, "hstack: row count mismatch");
        }
        cols += m->cols();
    }
    CMatrix out(rows, cols);
    Index at = 0;
    for (const CMatrix* m : blocks) {
        if (m->cols() == 0) continue;
        out.middleCols(at, m->cols()) = *m;
        at += m->cols();
    }
    return out;
}

}  // namespace torsflow
