#pragma once

#include <complex>

#include <Eigen/Dense>

namespace torsflow {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultTolerance = 1e-10;

/// Rank decisions use threshold = max(tol_rel * max(rows, cols) * sigma_max, abs_floor),
/// or max(tol_rel, abs_floor) for the zero matrix.
struct RankOptions {
    double tol_rel = kDefaultTolerance;
    double abs_floor = 0.0;
};

/// SVD-derived rank data. All bases are orthonormal column sets with the
/// phase of each column fixed so its largest entry is real and positive.
/// The phases are fixed independently per basis, so image_basis and
/// coimage_basis are not a paired singular-vector set.
struct RankResult {
    Index rank = 0;
    CMatrix kernel_basis;    // cols x (cols - rank)
    CMatrix cokernel_basis;  // rows x (rows - rank), spans (im A)^perp
    CMatrix image_basis;     // rows x rank
    CMatrix coimage_basis;   // cols x rank, spans (ker A)^perp
    Eigen::VectorXd singular_values;
    double tolerance_used = 0.0;
    // Some singular value lies within a factor of 10 of the threshold.
    bool ambiguous_rank = false;
};

RankResult rank_nullspace(const CMatrix& a, double tol_rel = kDefaultTolerance);
RankResult rank_nullspace(const CMatrix& a, const RankOptions& options);

/// |det A| through a fully pivoted LU; exactly 0 when the LU rank falls short.
double det_modulus(const CMatrix& a, double tol_rel = kDefaultTolerance);

/// log |det A| without rank truncation (-inf for an exactly singular factor).
double log_det_modulus(const CMatrix& a);

bool all_finite(const CMatrix& a);
double max_abs(const CMatrix& a);

/// max_ij |(U^H U - I)_ij|
double unitarity_defect(const CMatrix& u);

/// Orthonormal basis of the column span of `vectors`.
CMatrix span_basis(const CMatrix& vectors, const RankOptions& options);

/// Orthonormal basis of the part of span(space) orthogonal to span(sub).
/// `space` must have orthonormal columns.
CMatrix orthogonal_complement(const CMatrix& space, const CMatrix& sub, const RankOptions& options);

/// Minimum-norm least-squares solution of A X = B with the same rank cutoff
/// as rank_nullspace.
CMatrix least_squares(const CMatrix& a, const CMatrix& b, const RankOptions& options);

/// Rotate each column by a unit scalar so its largest-modulus entry is real positive.
void normalize_phases(CMatrix& basis);

/// Horizontal concatenation; all blocks must share the row count `rows`.
CMatrix hstack(Index rows, std::initializer_list<const CMatrix*> blocks);

}  // namespace torsflow
