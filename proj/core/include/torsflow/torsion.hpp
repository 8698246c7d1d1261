#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "torsflow/linalg.hpp"

namespace torsflow {

/// How a torsion modulus depends on cohomology bases.
enum class BasisNote {
    AcyclicCanonical,          // no cohomology; the value is basis independent
    RelativeToSuppliedBases,   // cohomology bases were provided by the caller
    RelativeToComputedBases,   // orthonormal harmonic bases chosen internally
};

std::string_view to_string(BasisNote note);

/// Modulus of a torsion element, carried as a logarithm so long products of
/// determinant factors neither overflow nor underflow.
struct TorsionScalar {
    double log_modulus = 0.0;
    BasisNote note = BasisNote::AcyclicCanonical;

    double modulus() const { return std::exp(log_modulus); }

    static TorsionScalar from_modulus(double modulus, BasisNote note = BasisNote::AcyclicCanonical) {
        return TorsionScalar{std::log(modulus), note};
    }

    TorsionScalar& operator*=(const TorsionScalar& other);
    TorsionScalar inverse() const { return TorsionScalar{-log_modulus, note}; }
    /// Raise to (-1)^n.
    TorsionScalar alternate(int n) const { return n % 2 == 0 ? *this : inverse(); }
};

TorsionScalar operator*(TorsionScalar a, const TorsionScalar& b);

/// Relative deviation |a/b - 1| evaluated in log space.
double relative_gap(const TorsionScalar& a, const TorsionScalar& b);

/// Finite cochain complex 0 -> V^0 -> ... -> V^top -> 0 with the standard
/// coordinate basis in every degree as the preferred basis.
class BasedComplex {
public:
    BasedComplex() = default;
    /// differentials[i] maps degree i to degree i+1 and has shape dims[i+1] x dims[i].
    BasedComplex(std::vector<Index> dims, std::vector<CMatrix> differentials);

    static BasedComplex two_term(const CMatrix& a);

    int top_degree() const { return static_cast<int>(dims_.size()) - 1; }
    int degree_count() const { return static_cast<int>(dims_.size()); }
    Index dim(int degree) const;
    const std::vector<Index>& dims() const { return dims_; }
    const std::vector<CMatrix>& differentials() const { return ds_; }

    /// d^i; a zero matrix of the right shape outside [0, top).
    CMatrix d(int degree) const;

    /// Largest entry magnitude over all differentials.
    double scale() const;
    /// max over i of max |d^{i+1} d^i|.
    double square_defect() const;

private:
    std::vector<Index> dims_;
    std::vector<CMatrix> ds_;
};

struct TorsionOptions {
    double tol_rel = kDefaultTolerance;
    // When set, complements of the cocycle spaces are drawn at random from
    // this seed instead of taking orthogonal complements. The modulus must
    // not depend on this choice.
    std::optional<std::uint64_t> complement_seed;
    // Rank and d^2 thresholds use max(own scale, reference_scale). Set this for
    // complexes cut out of a larger one, whose entries may be pure rounding.
    double reference_scale = 0.0;
};

struct TorsionResult {
    TorsionScalar torsion;
    std::vector<Index> cohomology_dims;
    /// Cocycle representatives used for each degree (computed or supplied).
    std::vector<CMatrix> cohomology_bases;
    bool ambiguous_rank = false;
};

/// d^2 and exactness checks are absolute at this level for unit-scale input.
inline constexpr double kComplexTolerance = 1e-9;

/// Throws NotAComplex when d^{i+1} d^i exceeds kComplexTolerance * scale^2.
void require_complex(const BasedComplex& c);

/// Orthonormal bases of the harmonic spaces ker d^i ∩ ker (d^{i-1})^H.
std::vector<CMatrix> harmonic_cohomology(const BasedComplex& c, const TorsionOptions& options = {});

/// Torsion modulus of a based complex relative to its preferred bases. Without
/// supplied cohomology representatives, orthonormal harmonic ones are used.
TorsionResult complex_torsion(const BasedComplex& c, const TorsionOptions& options = {});
TorsionResult complex_torsion(const BasedComplex& c, const std::vector<CMatrix>& cohomology_bases,
                              const TorsionOptions& options = {});

/// Torsion of 0 -> V --A--> W -> 0 with the given bases of ker A and of a
/// complement of im A (lifts of a cokernel basis).
TorsionScalar map_torsion(const CMatrix& a, const CMatrix& ker_basis, const CMatrix& coker_basis,
                          double tol_rel = kDefaultTolerance);

/// 0 -> sub --i--> total --j--> quotient -> 0, degreewise.
struct ShortExactSequence {
    BasedComplex sub;
    BasedComplex total;
    BasedComplex quotient;
    std::vector<CMatrix> inclusion;   // per degree: total.dim x sub.dim
    std::vector<CMatrix> projection;  // per degree: quotient.dim x total.dim
};

struct SesTorsion {
    TorsionScalar sub;
    TorsionScalar total;
    TorsionScalar quotient;
    TorsionScalar homology;  // torsion of the long exact cohomology sequence
    BasedComplex long_exact;  // H^0(sub) -> H^0(total) -> H^0(quot) -> H^1(sub) -> ...
    double identity_gap = 0.0;  // relative gap of total vs sub * quotient * homology
    bool identity_holds = false;
};

inline constexpr double kProductTolerance = 1e-8;

/// Torsions of the three complexes and of the long exact sequence in their
/// computed harmonic cohomology bases, plus the multiplicativity check.
SesTorsion ses_torsion(const ShortExactSequence& ses, const TorsionOptions& options = {});

}  // namespace torsflow
