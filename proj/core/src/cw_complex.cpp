#include "torsflow/cw_complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "torsflow/error.hpp"

namespace torsflow {

int CWComplex::top_dimension() const {
    int top = 0;
    for (int d = 0; d < 4; ++d)
        if (!cells[static_cast<std::size_t>(d)].empty()) top = d;
    return top;
}

std::size_t CWComplex::cell_count() const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.size();
    return n;
}

BasedComplex twisted_cochain(const CWComplex& k, const Representation& rep) {
    const Index m = rep.dim();
    const int top = k.top_dimension();

    std::set<std::string> ids;
    std::array<std::map<std::string, Index>, 4> position;
    for (int d = 0; d < 4; ++d) {
        const auto& cs = k.cells[static_cast<std::size_t>(d)];
        for (std::size_t j = 0; j < cs.size(); ++j) {
            if (cs[j].id.empty()) throw Error(ErrorCode::InvalidCW, "cell with an empty id");
            if (!ids.insert(cs[j].id).second) throw Error(ErrorCode::InvalidCW, "duplicate cell id '" + cs[j].id + "'");
            position[static_cast<std::size_t>(d)][cs[j].id] = static_cast<Index>(j);
            if (d == 0 && !cs[j].boundary.empty())
                throw Error(ErrorCode::InvalidCW, "0-cell '" + cs[j].id + "' has a boundary");
        }
    }

    std::vector<Index> dims;
    for (int d = 0; d <= top; ++d) dims.push_back(static_cast<Index>(k.cells[static_cast<std::size_t>(d)].size()) * m);
    std::vector<CMatrix> ds;
    for (int d = 0; d < top; ++d) {
        const auto ud = static_cast<std::size_t>(d);
        CMatrix block = CMatrix::Zero(dims[ud + 1], dims[ud]);
        const auto& upper = k.cells[ud + 1];
        for (std::size_t j = 0; j < upper.size(); ++j) {
            for (const CellFace& f : upper[j].boundary) {
                const auto it = position[ud].find(f.face);
                if (it == position[ud].end()) {
                    throw Error(ErrorCode::InvalidCW, "cell '" + upper[j].id + "' names '" + f.face +
                                                          "', which is not a " + std::to_string(d) + "-cell");
                }
                block.block(static_cast<Index>(j) * m, it->second * m, m, m) +=
                    static_cast<double>(f.incidence) * rep.evaluate(f.path);
            }
        }
        ds.push_back(std::move(block));
    }
    BasedComplex out(dims, ds);
    const double s = std::max(out.scale(), 1.0);
    if (out.square_defect() > kComplexTolerance * s * s) {
        throw Error(ErrorCode::InvalidCW, "twisted boundary does not square to zero for this representation");
    }
    return out;
}

CWTorsion cw_torsion(const CWComplex& k, const Representation& rep, const TorsionOptions& options) {
    const BasedComplex c = twisted_cochain(k, rep);
    // entries are signed sums of unitary blocks; cancellation residue is
    // measured against 1
    TorsionOptions unit_options = options;
    unit_options.reference_scale = std::max(options.reference_scale, 1.0);
    const TorsionResult tr = complex_torsion(c, unit_options);
    CWTorsion out;
    out.dims = tr.cohomology_dims;
    out.torsion = tr.torsion;
    out.ambiguous_rank = tr.ambiguous_rank;
    out.acyclic = std::all_of(out.dims.begin(), out.dims.end(), [](Index d) { return d == 0; });
    return out;
}

int lens_inverse(int p, int q) {
    if (p < 2) throw Error(ErrorCode::InvalidInput, "lens space needs p >= 2");
    if (std::gcd(p, q) != 1) {
        throw Error(ErrorCode::InvalidInput,
                    "lens space needs gcd(p, q) = 1, got gcd(" + std::to_string(p) + ", " + std::to_string(q) + ")");
    }
    const int r = ((q % p) + p) % p;
    for (int x = 1; x < p; ++x)
        if ((r * x) % p == 1) return x;
    throw Error(ErrorCode::InvalidInput, "no inverse of q mod p");  // unreachable when gcd(p, q) = 1
}

namespace {

Word power(const std::string& g, int k) {
    if (k == 0) return {};
    return {Letter{g, k}};
}

}  // namespace

CWComplex lens_space(int p, int q) {
    const int qs = lens_inverse(p, q);
    CWComplex k;
    k.name = "L(" + std::to_string(p) + "," + std::to_string(q) + ")";
    k.cells[0] = {Cell{"e0", {}}};
    k.cells[1] = {Cell{"e1", {{"e0", 1, power("t", 1)}, {"e0", -1, {}}}}};
    Cell e2{"e2", {}};
    for (int j = 0; j < p; ++j) e2.boundary.push_back({"e1", 1, power("t", j)});
    k.cells[2] = {e2};
    k.cells[3] = {Cell{"e3", {{"e2", 1, power("t", qs)}, {"e2", -1, {}}}}};
    return k;
}

CWComplex point_complex() {
    CWComplex k;
    k.name = "point";
    k.cells[0] = {Cell{"v", {}}};
    return k;
}

CWComplex circle_complex() {
    CWComplex k;
    k.name = "circle";
    k.cells[0] = {Cell{"v", {}}};
    k.cells[1] = {Cell{"e", {{"v", 1, parse_word("t")}, {"v", -1, {}}}}};
    return k;
}

// Two-cell boundaries are Fox derivatives of the relator.
CWComplex torus_complex() {
    CWComplex k;
    k.name = "torus";
    k.cells[0] = {Cell{"v", {}}};
    k.cells[1] = {Cell{"a", {{"v", 1, parse_word("a")}, {"v", -1, {}}}},
                  Cell{"b", {{"v", 1, parse_word("b")}, {"v", -1, {}}}}};
    // r = a b a^-1 b^-1
    k.cells[2] = {Cell{"f",
                       {{"a", 1, {}},
                        {"a", -1, parse_word("a b a^-1")},
                        {"b", 1, parse_word("a")},
                        {"b", -1, parse_word("a b a^-1 b^-1")}}}};
    return k;
}

CWComplex klein_bottle_complex() {
    CWComplex k;
    k.name = "klein";
    k.cells[0] = {Cell{"v", {}}};
    k.cells[1] = {Cell{"a", {{"v", 1, parse_word("a")}, {"v", -1, {}}}},
                  Cell{"b", {{"v", 1, parse_word("b")}, {"v", -1, {}}}}};
    // r = a b a^-1 b
    k.cells[2] = {Cell{"f",
                       {{"a", 1, {}},
                        {"a", -1, parse_word("a b a^-1")},
                        {"b", 1, parse_word("a")},
                        {"b", 1, parse_word("a b a^-1")}}}};
    return k;
}

CWComplex rp3_complex() {
    CWComplex k = lens_space(2, 1);
    k.name = "rp3";
    return k;
}

std::vector<CWComplex> corpus() {
    std::vector<CWComplex> out{point_complex(), circle_complex(), torus_complex(), klein_bottle_complex(),
                               rp3_complex()};
    for (int p : {3, 5, 7}) out.push_back(lens_space(p, 1));
    out.push_back(lens_space(5, 2));
    return out;
}

CWComplex elementary_expansion(const CWComplex& k, int dim, std::size_t cell) {
    if (dim < 0 || dim > 2) throw Error(ErrorCode::InvalidInput, "expansion needs a cell of dimension 0, 1 or 2");
    const auto ud = static_cast<std::size_t>(dim);
    if (cell >= k.cells[ud].size()) throw Error(ErrorCode::InvalidInput, "no such cell to expand");
    CWComplex out = k;
    const Cell& c = k.cells[ud][cell];
    Cell copy{c.id + "'", c.boundary};
    Cell filler{c.id + "*", {{copy.id, 1, {}}, {c.id, -1, {}}}};
    out.cells[ud].push_back(std::move(copy));
    out.cells[ud + 1].push_back(std::move(filler));
    return out;
}

}  // namespace torsflow
