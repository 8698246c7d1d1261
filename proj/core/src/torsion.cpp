#include "torsflow/torsion.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "torsflow/error.hpp"

namespace torsflow {

std::string_view to_string(BasisNote note) {
    switch (note) {
        case BasisNote::AcyclicCanonical: return "acyclic-canonical";
        case BasisNote::RelativeToSuppliedBases: return "relative-to-supplied-cohomology-bases";
        case BasisNote::RelativeToComputedBases: return "relative-to-computed-cohomology-bases";
    }
    return "unknown";
}

TorsionScalar& TorsionScalar::operator*=(const TorsionScalar& other) {
    log_modulus += other.log_modulus;
    note = std::max(note, other.note);
    return *this;
}

TorsionScalar operator*(TorsionScalar a, const TorsionScalar& b) {
    a *= b;
    return a;
}

double relative_gap(const TorsionScalar& a, const TorsionScalar& b) {
    return std::abs(std::expm1(a.log_modulus - b.log_modulus));
}

// ---------------------------------------------------------------------------

BasedComplex::BasedComplex(std::vector<Index> dims, std::vector<CMatrix> differentials)
    : dims_(std::move(dims)), ds_(std::move(differentials)) {
    if (dims_.empty()) {
        throw Error(ErrorCode::InvalidInput, "a complex needs at least one degree");
    }
    if (ds_.size() + 1 != dims_.size()) {
        throw Error(ErrorCode::InvalidInput, "expected one differential per consecutive degree pair");
    }
    for (std::size_t i = 0; i < ds_.size(); ++i) {
        if (ds_[i].rows() != dims_[i + 1] || ds_[i].cols() != dims_[i]) {
            std::ostringstream msg;
            msg << "d^" << i << " has shape " << ds_[i].rows() << "x" << ds_[i].cols() << ", expected "
                << dims_[i + 1] << "x" << dims_[i];
            throw Error(ErrorCode::InvalidInput, msg.str());
        }
        if (!all_finite(ds_[i])) {
            throw Error(ErrorCode::InvalidInput, "differential has a non-finite entry");
        }
    }
}

BasedComplex BasedComplex::two_term(const CMatrix& a) {
    return BasedComplex({a.cols(), a.rows()}, {a});
}

Index BasedComplex::dim(int degree) const {
    if (degree < 0 || degree > top_degree()) return 0;
    return dims_[static_cast<std::size_t>(degree)];
}

CMatrix BasedComplex::d(int degree) const {
    if (degree >= 0 && degree < top_degree()) return ds_[static_cast<std::size_t>(degree)];
    return CMatrix::Zero(dim(degree + 1), dim(degree));
}

double BasedComplex::scale() const {
    double s = 0.0;
    for (const auto& m : ds_) s = std::max(s, max_abs(m));
    return s;
}

double BasedComplex::square_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < ds_.size(); ++i) {
        worst = std::max(worst, max_abs(ds_[i + 1] * ds_[i]));
    }
    return worst;
}

void require_complex(const BasedComplex& c) {
    const double s = c.scale();
    const double defect = c.square_defect();
    if (defect > kComplexTolerance * std::max(s * s, 1e-300)) {
        std::ostringstream msg;
        msg << "d^2 != 0 (max entry " << defect << " at scale " << s << ")";
        throw Error(ErrorCode::NotAComplex, msg.str());
    }
}

// ---------------------------------------------------------------------------

namespace {

double effective_scale(const BasedComplex& c, const TorsionOptions& options) {
    return std::max(c.scale(), options.reference_scale);
}

RankOptions complex_rank_options(const BasedComplex& c, const TorsionOptions& options) {
    const double s = effective_scale(c, options);
    return RankOptions{options.tol_rel, s > 0.0 ? options.tol_rel * s : options.tol_rel};
}

CMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) out(i, j) = Complex(gauss(rng), gauss(rng));
    return out;
}

struct DegreeData {
    std::vector<RankResult> ranks;       // of d^i, i = 0..top
    std::vector<CMatrix> complements;    // t_i, a basis of a complement of ker d^i
    std::vector<CMatrix> harmonic;       // orthonormal harmonic cocycles
    bool ambiguous = false;
};

DegreeData analyse(const BasedComplex& c, const TorsionOptions& options) {
    const double s = effective_scale(c, options);
    if (const double defect = c.square_defect(); defect > kComplexTolerance * std::max(s * s, 1e-300)) {
        std::ostringstream msg;
        msg << "d^2 != 0 (max entry " << defect << " at scale " << s << ")";
        throw Error(ErrorCode::NotAComplex, msg.str());
    }
    const RankOptions ropts = complex_rank_options(c, options);
    const int top = c.top_degree();

    DegreeData out;
    out.ranks.reserve(static_cast<std::size_t>(top + 1));
    for (int i = 0; i <= top; ++i) {
        out.ranks.push_back(rank_nullspace(c.d(i), ropts));
        out.ambiguous = out.ambiguous || out.ranks.back().ambiguous_rank;
    }

    std::optional<std::mt19937_64> rng;
    if (options.complement_seed) rng.emplace(*options.complement_seed);
    for (int i = 0; i <= top; ++i) {
        const RankResult& rr = out.ranks[static_cast<std::size_t>(i)];
        if (!rng) {
            out.complements.push_back(rr.coimage_basis);
            continue;
        }
        const Index k = rr.rank;
        const CMatrix mix = CMatrix::Identity(k, k) + 0.5 * random_matrix(*rng, k, k);
        const CMatrix drift = random_matrix(*rng, rr.kernel_basis.cols(), k);
        out.complements.push_back(rr.coimage_basis * mix + rr.kernel_basis * drift);
    }

    for (int i = 0; i <= top; ++i) {
        const Index n = c.dim(i);
        const CMatrix di = c.d(i);
        const CMatrix prev_adj = c.d(i - 1).adjoint();
        CMatrix stacked(di.rows() + prev_adj.rows(), n);
        stacked << di, prev_adj;
        const RankResult hr = rank_nullspace(stacked, ropts);
        const Index expected = n - out.ranks[static_cast<std::size_t>(i)].rank -
                               (i > 0 ? out.ranks[static_cast<std::size_t>(i - 1)].rank : 0);
        if (hr.kernel_basis.cols() != expected) {
            std::ostringstream msg;
            msg << "degree " << i << ": harmonic dimension " << hr.kernel_basis.cols()
                << " disagrees with rank count " << expected;
            throw Error(ErrorCode::NotAComplex, msg.str());
        }
        out.harmonic.push_back(hr.kernel_basis);
    }
    return out;
}

// Cocycles h are a cohomology basis iff their components orthogonal to the
// boundaries are linearly independent.
bool independent_mod_boundaries(const CMatrix& h, const DegreeData& data, int degree, double tol_rel) {
    CMatrix residual = h;
    if (degree > 0) {
        const CMatrix& b = data.ranks[static_cast<std::size_t>(degree - 1)].image_basis;
        residual -= b * (b.adjoint() * h);
    }
    const RankOptions ropts{tol_rel, 1e-8 * std::max(max_abs(h), 1e-300)};
    return rank_nullspace(residual, ropts).rank == h.cols();
}

TorsionResult assemble(const BasedComplex& c, const DegreeData& data, const std::vector<CMatrix>& h,
                       bool supplied, const TorsionOptions& options) {
    const int top = c.top_degree();
    TorsionResult out;
    out.ambiguous_rank = data.ambiguous;
    bool acyclic = true;
    double log_tau = 0.0;

    for (int i = 0; i <= top; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const Index n = c.dim(i);
        const CMatrix boundary =
            i > 0 ? CMatrix(c.d(i - 1) * data.complements[ui - 1]) : CMatrix(n, 0);
        const CMatrix block = hstack(n, {&boundary, &h[ui], &data.complements[ui]});
        if (block.cols() != n) {
            std::ostringstream msg;
            msg << "degree " << i << ": " << block.cols() << " basis vectors for dimension " << n;
            throw Error(ErrorCode::BasisMismatch, msg.str());
        }
        if (supplied && h[ui].cols() > 0 && !independent_mod_boundaries(h[ui], data, i, options.tol_rel)) {
            std::ostringstream msg;
            msg << "degree " << i << ": supplied cohomology basis does not complete the boundaries";
            throw Error(ErrorCode::BasisMismatch, msg.str());
        }
        const double ld = log_det_modulus(block);
        // Odd degrees sit in the numerator, even degrees in the denominator.
        log_tau += (i % 2 == 1) ? ld : -ld;
        out.cohomology_dims.push_back(h[ui].cols());
        if (h[ui].cols() > 0) acyclic = false;
    }

    out.torsion.log_modulus = log_tau;
    out.torsion.note = acyclic ? BasisNote::AcyclicCanonical
                               : (supplied ? BasisNote::RelativeToSuppliedBases
                                           : BasisNote::RelativeToComputedBases);
    out.cohomology_bases = h;
    return out;
}

}  // namespace

std::vector<CMatrix> harmonic_cohomology(const BasedComplex& c, const TorsionOptions& options) {
    return analyse(c, options).harmonic;
}

TorsionResult complex_torsion(const BasedComplex& c, const TorsionOptions& options) {
    const DegreeData data = analyse(c, options);
    return assemble(c, data, data.harmonic, false, options);
}

TorsionResult complex_torsion(const BasedComplex& c, const std::vector<CMatrix>& cohomology_bases,
                              const TorsionOptions& options) {
    const DegreeData data = analyse(c, options);
    if (cohomology_bases.size() != static_cast<std::size_t>(c.degree_count())) {
        throw Error(ErrorCode::BasisMismatch, "need one cohomology basis per degree");
    }
    const double s = std::max(c.scale(), 1.0);
    for (int i = 0; i <= c.top_degree(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const CMatrix& h = cohomology_bases[ui];
        if (h.rows() != c.dim(i) || h.cols() != data.harmonic[ui].cols()) {
            std::ostringstream msg;
            msg << "degree " << i << ": cohomology basis is " << h.rows() << "x" << h.cols()
                << ", expected " << c.dim(i) << "x" << data.harmonic[ui].cols();
            throw Error(ErrorCode::BasisMismatch, msg.str());
        }
        if (h.cols() > 0 && max_abs(c.d(i) * h) > 1e-8 * s * std::max(max_abs(h), 1e-300)) {
            std::ostringstream msg;
            msg << "degree " << i << ": cohomology representatives are not cocycles";
            throw Error(ErrorCode::BasisMismatch, msg.str());
        }
    }
    return assemble(c, data, cohomology_bases, true, options);
}

TorsionScalar map_torsion(const CMatrix& a, const CMatrix& ker_basis, const CMatrix& coker_basis,
                          double tol_rel) {
    const BasedComplex c = BasedComplex::two_term(a);
    TorsionOptions options;
    options.tol_rel = tol_rel;
    return complex_torsion(c, {ker_basis, coker_basis}, options).torsion;
}

// ---------------------------------------------------------------------------

SesTorsion ses_torsion(const ShortExactSequence& ses, const TorsionOptions& options) {
    const int degrees = ses.total.degree_count();
    if (ses.sub.degree_count() != degrees || ses.quotient.degree_count() != degrees ||
        ses.inclusion.size() != static_cast<std::size_t>(degrees) ||
        ses.projection.size() != static_cast<std::size_t>(degrees)) {
        throw Error(ErrorCode::InvalidInput, "short exact sequence: degree ranges disagree");
    }

    const double scale = std::max({ses.total.scale(), ses.sub.scale(), ses.quotient.scale(), 1.0});
    const RankOptions ropts{options.tol_rel, options.tol_rel * scale};
    const double exact_tol = kComplexTolerance * scale;

    std::vector<CMatrix> lifts;  // right inverses of the projections
    for (int k = 0; k < degrees; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const CMatrix& inc = ses.inclusion[uk];
        const CMatrix& proj = ses.projection[uk];
        const Index a = ses.sub.dim(k), n = ses.total.dim(k), b = ses.quotient.dim(k);
        if (inc.rows() != n || inc.cols() != a || proj.rows() != b || proj.cols() != n) {
            throw Error(ErrorCode::NotExact, "degree " + std::to_string(k) + ": map shapes disagree");
        }
        if (a + b != n) {
            throw Error(ErrorCode::NotExact, "degree " + std::to_string(k) + ": dimensions do not add up");
        }
        if (rank_nullspace(inc, ropts).rank != a || rank_nullspace(proj, ropts).rank != b ||
            max_abs(proj * inc) > exact_tol) {
            throw Error(ErrorCode::NotExact, "degree " + std::to_string(k) + ": sequence is not exact");
        }
        // chain map conditions
        if (k + 1 < degrees) {
            const auto un = uk + 1;
            if (max_abs(ses.total.d(k) * inc - ses.inclusion[un] * ses.sub.d(k)) > exact_tol ||
                max_abs(ses.quotient.d(k) * proj - ses.projection[un] * ses.total.d(k)) > exact_tol) {
                throw Error(ErrorCode::NotExact,
                            "degree " + std::to_string(k) + ": maps do not commute with d");
            }
        }
        CMatrix lift = least_squares(proj, CMatrix::Identity(b, b), ropts);
        const CMatrix assembled = hstack(n, {&inc, &lift});
        if (n > 0 && std::abs(log_det_modulus(assembled)) > kProductTolerance) {
            throw Error(ErrorCode::NotExact, "degree " + std::to_string(k) +
                                                 ": sub and quotient bases do not assemble to a unit volume");
        }
        lifts.push_back(std::move(lift));
    }

    TorsionOptions scaled = options;
    scaled.reference_scale = std::max(options.reference_scale, scale);
    const TorsionResult rs = complex_torsion(ses.sub, scaled);
    const TorsionResult rt = complex_torsion(ses.total, scaled);
    const TorsionResult rq = complex_torsion(ses.quotient, scaled);

    // Long exact sequence laid out at positions 3k, 3k+1, 3k+2.
    std::vector<Index> dims;
    for (int k = 0; k < degrees; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        dims.push_back(rs.cohomology_dims[uk]);
        dims.push_back(rt.cohomology_dims[uk]);
        dims.push_back(rq.cohomology_dims[uk]);
    }
    std::vector<CMatrix> maps;
    for (int k = 0; k < degrees; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const CMatrix& hs = rs.cohomology_bases[uk];
        const CMatrix& ht = rt.cohomology_bases[uk];
        const CMatrix& hq = rq.cohomology_bases[uk];
        maps.push_back(ht.adjoint() * (ses.inclusion[uk] * hs));
        maps.push_back(hq.adjoint() * (ses.projection[uk] * ht));
        if (k + 1 < degrees) {
            const auto un = uk + 1;
            const CMatrix lifted = lifts[uk] * hq;
            const CMatrix image = ses.total.d(k) * lifted;
            const CMatrix pre = least_squares(ses.inclusion[un], image, ropts);
            if (max_abs(ses.inclusion[un] * pre - image) > exact_tol * std::max(1.0, max_abs(image))) {
                throw Error(ErrorCode::NotExact, "connecting map does not land in the subcomplex");
            }
            maps.push_back(rs.cohomology_bases[un].adjoint() * pre);
        }
    }

    SesTorsion out;
    out.long_exact = BasedComplex(dims, maps);
    const TorsionResult rh = complex_torsion(out.long_exact, scaled);
    for (Index d : rh.cohomology_dims) {
        if (d != 0) throw Error(ErrorCode::NotExact, "long cohomology sequence is not exact");
    }
    out.sub = rs.torsion;
    out.total = rt.torsion;
    out.quotient = rq.torsion;
    out.homology = rh.torsion;
    out.identity_gap = relative_gap(out.total, out.sub * out.quotient * out.homology);
    out.identity_holds = out.identity_gap <= kProductTolerance;
    return out;
}

}  // namespace torsflow
