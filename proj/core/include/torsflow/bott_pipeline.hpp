#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "torsflow/bott_model.hpp"
#include "torsflow/spectral.hpp"

namespace torsflow {

/// Cohomology of one block relative to the sublevel set just below it.
struct BlockCohomology {
    std::string id;
    BlockKind kind = BlockKind::Circle;
    int level = 0;
    int degree = 0;  // n
    CMatrix D;       // circle: I - delta rho(gamma); torus/Klein: stacked m x 2m column
    CMatrix D_star;  // torus/Klein only
    /// Local complex on the block's Morse points, degrees 0..3.
    BasedComplex local;
    std::array<Index, 4> dims{};
    /// Orthonormal harmonic representatives in local coordinates.
    std::array<CMatrix, 4> harmonic;
    TorsionScalar torsion_factor;
    bool acyclic = true;
    bool ambiguous_rank = false;
};

BlockCohomology block_cohomology(const CriticalBlock& block, const Representation& rep,
                                 const TorsionOptions& options = {});

/// Sum over orbits of sign * rho(holonomy).
CMatrix connection_matrix(const Representation& rep, const std::vector<Orbit>& orbits);

/// Explicit twisted Morse cochain complex. Point j of cells[k] owns rows
/// [j*m, (j+1)*m) of degree k; its filtration level is its block's level.
struct MorseComplex {
    MorseData morse;
    Index rep_dim = 1;
    FilteredComplex filtered;
    /// MissingConnection remarks for licensed pairs with no orbits given.
    std::vector<std::string> warnings;
};

/// Throws IllegalConnection for a pair the block levels do not license and
/// NotAComplex when the connection data break d^2 = 0.
MorseComplex morse_complex(const BottModel& model, const std::vector<BlockCohomology>& blocks);

/// E_1 as a sum of block cohomologies, with bases embedded in Morse coordinates.
struct PageOne {
    std::map<Bidegree, Index> dims;
    std::map<Bidegree, CMatrix> basis;
};

PageOne page_one(const MorseComplex& mc, const std::vector<BlockCohomology>& blocks);

/// d_1 : E_1^{n,q} -> E_1^{n+1,q} in the harmonic E_1 bases.
std::map<Bidegree, CMatrix> assemble_d1(const MorseComplex& mc, const PageOne& e1);

/// d_2 : E_2^{0,q} -> E_2^{2,q-1}. `after_d1` is the page step of d_1, whose
/// `next` bases give E_2 inside E_1.
std::map<Bidegree, CMatrix> assemble_d2(const MorseComplex& mc, const PageOne& e1, const PageStep& after_d1,
                                        const TorsionOptions& options = {});

enum class Mode { Auto, Fast, Full };

std::string_view to_string(Mode mode);

/// Product of |det D|^{(-1)^u} over circle blocks; nullopt unless every block
/// is a circle with nonsingular D.
std::optional<TorsionScalar> fast_path_torsion(const BottModel& model, double tol_rel = kDefaultTolerance);

struct TorsionReport {
    std::vector<BlockCohomology> blocks;
    Mode mode_used = Mode::Full;
    bool pages_computed = false;
    std::map<Bidegree, Index> e1, e2, e_inf;
    std::map<Bidegree, CMatrix> d1, d2;
    TorsionScalar tau_d0, tau_d1, tau_d2;
    TorsionScalar total;
    bool acyclic = false;
    std::optional<double> cross_check_gap;  // auto mode: fast vs full
    bool ambiguous_rank = false;
    std::vector<std::string> warnings;
};

/// Throws the model's first diagnostic when invalid and FastPathUnavailable
/// for Mode::Fast on a model the fast path does not cover.
TorsionReport total_torsion(const BottModel& model, Mode mode = Mode::Auto, const TorsionOptions& options = {});

}  // namespace torsflow
