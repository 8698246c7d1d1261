#pragma once

#include <array>
#include <string>
#include <vector>

#include "torsflow/representation.hpp"
#include "torsflow/torsion.hpp"

namespace torsflow {

/// One term of a cell boundary: incidence times the face translated along a
/// path whose holonomy is `path`.
struct CellFace {
    std::string face;
    int incidence = 1;
    Word path;
};

struct Cell {
    std::string id;
    std::vector<CellFace> boundary;  // faces are cells of one dimension lower
};

/// Finite CW complex of dimension at most 3 with boundary data in the group
/// ring of the fundamental group.
struct CWComplex {
    std::string name;
    std::array<std::vector<Cell>, 4> cells;

    int top_dimension() const;
    std::size_t cell_count() const;
};

/// Cochains with values in C^m: degree i carries one copy of C^m per i-cell,
/// and the block of d for (cell, face) is the sum of incidence * rho(path).
/// Throws InvalidCW on malformed cells or when the twisted d^2 is nonzero.
BasedComplex twisted_cochain(const CWComplex& k, const Representation& rep);

struct CWTorsion {
    std::vector<Index> dims;
    TorsionScalar torsion;
    bool acyclic = false;
    bool ambiguous_rank = false;
};

CWTorsion cw_torsion(const CWComplex& k, const Representation& rep, const TorsionOptions& options = {});

/// q* with q q* = 1 mod p. Throws InvalidInput unless p >= 2 and gcd(p, q) = 1.
int lens_inverse(int p, int q);

/// L(p, q) with one cell per dimension and generator "t".
CWComplex lens_space(int p, int q);

CWComplex point_complex();
CWComplex circle_complex();        // generator t
CWComplex torus_complex();         // generators a, b
CWComplex klein_bottle_complex();  // generators a, b with a b a^-1 = b^-1
CWComplex rp3_complex();

/// Named complexes of the built-in corpus.
std::vector<CWComplex> corpus();

/// Add a copy c' of the k-cell c and a (k+1)-cell with boundary c' - c.
/// The result is simple homotopy equivalent to the input.
CWComplex elementary_expansion(const CWComplex& k, int dim, std::size_t cell);

}  // namespace torsflow
