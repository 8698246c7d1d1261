#pragma once

#include <map>
#include <utility>
#include <vector>

#include "torsflow/torsion.hpp"

namespace torsflow {

/// (n, q): filtration index and complementary degree; total degree n + q.
using Bidegree = std::pair<int, int>;

/// A based complex with a decreasing filtration by coordinate subspaces.
/// Each preferred basis vector carries a level; F_n is spanned by the vectors
/// of level >= n, so F_0 is everything and F_{N+1} = 0 for N the top level.
class FilteredComplex {
public:
    /// levels[i][k] is the level of basis vector k in degree i.
    /// Throws InvalidFiltration unless d(F_n) lies in F_n.
    FilteredComplex(BasedComplex base, std::vector<std::vector<int>> levels);

    const BasedComplex& base() const { return base_; }
    const std::vector<std::vector<int>>& levels() const { return levels_; }
    /// N, the largest level present.
    int length() const { return length_; }

private:
    BasedComplex base_;
    std::vector<std::vector<int>> levels_;
    int length_ = 0;
};

/// One page E_r of a spectral sequence. Every space is stored with an
/// orthonormal coordinate basis; `representatives` are cocycle-level lifts of
/// that basis into the underlying complex when the page came from one.
struct Page {
    int r = 0;
    std::map<Bidegree, Index> dims;
    std::map<Bidegree, CMatrix> representatives;
    /// d_r : E_r^{n,q} -> E_r^{n+r, q-r+1}, keyed by source bidegree.
    std::map<Bidegree, CMatrix> differential;
    TorsionScalar torsion;  // tau_{d_r}; unused on the limit page

    Index dim(const Bidegree& b) const;
    /// Sum of dim E_r^{n,q} over n + q = degree.
    Index total_dim(int degree) const;
    bool is_zero() const;
};

struct PageStep {
    TorsionScalar torsion;
    /// Orthonormal harmonic basis of E_{r+1}^{n,q} in E_r^{n,q} coordinates.
    std::map<Bidegree, CMatrix> next;
    std::map<Bidegree, Index> next_dims;
    double square_defect = 0.0;
    bool ambiguous_rank = false;
};

/// Torsion of (E_r, d_r) graded by total degree, relative to the orthonormal
/// page basis and to harmonic bases of its cohomology, which become E_{r+1}.
PageStep page_step(const std::map<Bidegree, Index>& dims, const std::map<Bidegree, CMatrix>& differential,
                   int r, const TorsionOptions& options = {});

struct SpectralSequence {
    std::vector<Page> pages;  // E_0 .. E_N, each with d_r and tau_{d_r}
    Page limit;               // E_{N+1} = E_infinity
    TorsionScalar page_product;
    /// tau_d of the base complex, cohomology bases lifted from E_infinity.
    TorsionScalar direct;
    double product_gap = 0.0;
    bool product_holds = false;
    bool ambiguous_rank = false;
};

SpectralSequence filtered_pages(const FilteredComplex& filtered, const TorsionOptions& options = {});

}  // namespace torsflow
