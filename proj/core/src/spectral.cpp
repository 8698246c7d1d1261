#include "torsflow/spectral.hpp"

#include <algorithm>
#include <sstream>

#include "torsflow/error.hpp"

namespace torsflow {

FilteredComplex::FilteredComplex(BasedComplex base, std::vector<std::vector<int>> levels)
    : base_(std::move(base)), levels_(std::move(levels)) {
    if (levels_.size() != static_cast<std::size_t>(base_.degree_count())) {
        throw Error(ErrorCode::InvalidFiltration, "need one level list per degree");
    }
    for (int i = 0; i <= base_.top_degree(); ++i) {
        const auto& lv = levels_[static_cast<std::size_t>(i)];
        if (static_cast<Index>(lv.size()) != base_.dim(i)) {
            throw Error(ErrorCode::InvalidFiltration,
                        "degree " + std::to_string(i) + ": level count differs from dimension");
        }
        for (int l : lv) {
            if (l < 0) throw Error(ErrorCode::InvalidFiltration, "levels must be non-negative");
            length_ = std::max(length_, l);
        }
    }
    const double tol = kComplexTolerance * std::max(base_.scale(), 1e-300);
    for (int i = 0; i < base_.top_degree(); ++i) {
        const CMatrix d = base_.d(i);
        const auto& src = levels_[static_cast<std::size_t>(i)];
        const auto& dst = levels_[static_cast<std::size_t>(i + 1)];
        for (Index col = 0; col < d.cols(); ++col) {
            for (Index row = 0; row < d.rows(); ++row) {
                if (dst[static_cast<std::size_t>(row)] < src[static_cast<std::size_t>(col)] &&
                    std::abs(d(row, col)) > tol) {
                    std::ostringstream msg;
                    msg << "d^" << i << " maps basis vector " << col << " (level "
                        << src[static_cast<std::size_t>(col)] << ") onto vector " << row << " (level "
                        << dst[static_cast<std::size_t>(row)] << ")";
                    throw Error(ErrorCode::InvalidFiltration, msg.str());
                }
            }
        }
    }
}

Index Page::dim(const Bidegree& b) const {
    const auto it = dims.find(b);
    return it == dims.end() ? 0 : it->second;
}

Index Page::total_dim(int degree) const {
    Index acc = 0;
    for (const auto& [b, d] : dims)
        if (b.first + b.second == degree) acc += d;
    return acc;
}

bool Page::is_zero() const {
    return std::all_of(dims.begin(), dims.end(), [](const auto& kv) { return kv.second == 0; });
}

// ---------------------------------------------------------------------------

PageStep page_step(const std::map<Bidegree, Index>& dims, const std::map<Bidegree, CMatrix>& differential,
                   int r, const TorsionOptions& options) {
    auto dim_of = [&](const Bidegree& b) -> Index {
        const auto it = dims.find(b);
        return it == dims.end() ? 0 : it->second;
    };
    auto target_of = [r](const Bidegree& b) { return Bidegree{b.first + r, b.second - r + 1}; };

    int top = 0;
    for (const auto& [b, d] : dims) {
        const int k = b.first + b.second;
        if (d > 0 && k < 0) throw Error(ErrorCode::InvalidInput, "page has a negative total degree");
        top = std::max(top, k);
    }
    top += 1;  // room for the image of the top degree

    // Layout: each total degree lists its bidegrees by ascending n.
    std::vector<std::vector<Bidegree>> layout(static_cast<std::size_t>(top + 1));
    std::map<Bidegree, Index> offset;
    std::vector<Index> total(static_cast<std::size_t>(top + 1), 0);
    for (const auto& [b, d] : dims) {
        const int k = b.first + b.second;
        if (k < 0 || d == 0) continue;
        const auto uk = static_cast<std::size_t>(k);
        layout[uk].push_back(b);
        offset[b] = total[uk];
        total[uk] += d;
    }

    std::vector<CMatrix> ds;
    double scale = 0.0;
    for (int k = 0; k < top; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        CMatrix dk = CMatrix::Zero(total[uk + 1], total[uk]);
        for (const Bidegree& b : layout[uk]) {
            const auto it = differential.find(b);
            if (it == differential.end() || it->second.rows() == 0) continue;
            const Bidegree t = target_of(b);
            if (it->second.rows() != dim_of(t) || it->second.cols() != dim_of(b)) {
                std::ostringstream msg;
                msg << "d_" << r << " at (" << b.first << "," << b.second << ") has shape "
                    << it->second.rows() << "x" << it->second.cols();
                throw Error(ErrorCode::InvalidInput, msg.str());
            }
            dk.block(offset.at(t), offset.at(b), it->second.rows(), it->second.cols()) = it->second;
        }
        scale = std::max(scale, max_abs(dk));
        ds.push_back(std::move(dk));
    }
    const BasedComplex complex(total, ds);

    PageStep out;
    out.square_defect = complex.square_defect();
    scale = std::max(scale, options.reference_scale);
    const RankOptions ropts{options.tol_rel, scale > 0.0 ? options.tol_rel * scale : options.tol_rel};

    std::vector<CMatrix> bases;
    for (int k = 0; k <= top; ++k) bases.emplace_back(total[static_cast<std::size_t>(k)], 0);
    for (const auto& [b, d] : dims) {
        if (d == 0) {
            out.next[b] = CMatrix(0, 0);
            out.next_dims[b] = 0;
            continue;
        }
        const Bidegree t = target_of(b);
        const Bidegree s{b.first - r, b.second + r - 1};
        CMatrix outgoing = CMatrix::Zero(dim_of(t), d);
        if (auto it = differential.find(b); it != differential.end() && it->second.rows() > 0) outgoing = it->second;
        CMatrix incoming = CMatrix::Zero(d, dim_of(s));
        if (auto it = differential.find(s); it != differential.end() && it->second.rows() > 0) incoming = it->second;
        CMatrix stacked(outgoing.rows() + incoming.cols(), d);
        stacked << outgoing, incoming.adjoint();
        const RankResult rr = rank_nullspace(stacked, ropts);
        out.ambiguous_rank = out.ambiguous_rank || rr.ambiguous_rank;
        out.next[b] = rr.kernel_basis;
        out.next_dims[b] = rr.kernel_basis.cols();

        const int k = b.first + b.second;
        CMatrix& h = bases[static_cast<std::size_t>(k)];
        CMatrix grown = CMatrix::Zero(h.rows(), h.cols() + rr.kernel_basis.cols());
        grown.leftCols(h.cols()) = h;
        grown.block(offset.at(b), h.cols(), d, rr.kernel_basis.cols()) = rr.kernel_basis;
        h = std::move(grown);
    }

    const TorsionResult tr = complex_torsion(complex, bases, options);
    out.torsion = tr.torsion;
    if (out.torsion.note == BasisNote::RelativeToSuppliedBases) out.torsion.note = BasisNote::RelativeToComputedBases;
    out.ambiguous_rank = out.ambiguous_rank || tr.ambiguous_rank;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

class FiltrationSpaces {
public:
    FiltrationSpaces(const FilteredComplex& fc, RankOptions ropts) : fc_(fc), ropts_(ropts) {}

    Index dim(int i) const { return fc_.base().dim(i); }
    CMatrix d(int i) const { return fc_.base().d(i); }

    std::vector<Index> indices(int i, int min_level, int below_level) const {
        std::vector<Index> out;
        if (i < 0 || i > fc_.base().top_degree()) return out;
        const auto& lv = fc_.levels()[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < lv.size(); ++k)
            if (lv[k] >= min_level && lv[k] < below_level) out.push_back(static_cast<Index>(k));
        return out;
    }

    CMatrix coordinates(int i, const std::vector<Index>& idx) const {
        CMatrix out = CMatrix::Zero(dim(i), static_cast<Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) out(idx[c], static_cast<Index>(c)) = 1.0;
        return out;
    }

    /// Z_r^n in degree i: x in F_n with dx in F_{n+r}; Z_{-1}^n = F_n.
    CMatrix cocycles(int r, int n, int i) const {
        constexpr int kAll = 1 << 30;
        const std::vector<Index> cols = indices(i, n, kAll);
        if (r < 0) return coordinates(i, cols);
        const std::vector<Index> rows = indices(i + 1, -kAll, n + r);
        if (cols.empty() || rows.empty()) return coordinates(i, cols);
        const CMatrix full = d(i);
        CMatrix sub(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < cols.size(); ++b)
                sub(static_cast<Index>(a), static_cast<Index>(b)) = full(rows[a], cols[b]);
        const RankResult rr = rank_nullspace(sub, ropts_);
        ambiguous_ = ambiguous_ || rr.ambiguous_rank;
        return coordinates(i, cols) * rr.kernel_basis;
    }

    /// Z_{r-1}^{n+1} + d Z_{r-1}^{n-r+1} in degree i, the part quotiented out of E_r^n.
    CMatrix denominator(int r, int n, int i) const {
        const CMatrix upper = cocycles(r - 1, n + 1, i);
        const CMatrix below = cocycles(r - 1, n - r + 1, i - 1);
        const CMatrix image = d(i - 1) * below;
        return span_basis(hstack(dim(i), {&upper, &image}), ropts_);
    }

    bool ambiguous() const { return ambiguous_; }

private:
    const FilteredComplex& fc_;
    RankOptions ropts_;
    mutable bool ambiguous_ = false;
};

}  // namespace

SpectralSequence filtered_pages(const FilteredComplex& filtered, const TorsionOptions& options) {
    const BasedComplex& base = filtered.base();
    require_complex(base);
    const double s = base.scale();
    const RankOptions ropts{options.tol_rel, s > 0.0 ? options.tol_rel * s : options.tol_rel};
    const double residual_tol = 1e-7 * std::max(s, 1.0);
    const FiltrationSpaces spaces(filtered, ropts);
    const int big_n = filtered.length();
    const int top = base.top_degree();

    SpectralSequence out;
    Page current;
    current.r = 0;
    for (int i = 0; i <= top; ++i) {
        for (int n = 0; n <= big_n; ++n) {
            const Bidegree b{n, i - n};
            const CMatrix reps = spaces.coordinates(i, spaces.indices(i, n, n + 1));
            current.dims[b] = reps.cols();
            current.representatives[b] = reps;
        }
    }

    for (int r = 0; r <= big_n; ++r) {
        current.r = r;
        current.differential.clear();
        for (const auto& [b, reps] : current.representatives) {
            const int i = b.first + b.second;
            const Bidegree t{b.first + r, b.second - r + 1};
            const Index tdim = current.dim(t);
            if (reps.cols() == 0 || tdim == 0) {
                current.differential[b] = CMatrix::Zero(tdim, reps.cols());
                continue;
            }
            const CMatrix image = base.d(i) * reps;
            const CMatrix& target = current.representatives.at(t);
            const CMatrix quotient = spaces.denominator(r, t.first, i + 1);
            const CMatrix system = hstack(image.rows(), {&target, &quotient});
            const CMatrix sol = least_squares(system, image, ropts);
            if (max_abs(system * sol - image) > residual_tol) {
                throw Error(ErrorCode::NotAComplex, "page " + std::to_string(r) +
                                                        ": differential image leaves the target page");
            }
            current.differential[b] = sol.topRows(target.cols());
        }

        // Page entries are judged against the base complex: a page differential
        // made of rounding residue must not count as rank.
        TorsionOptions page_options = options;
        page_options.reference_scale = std::max(options.reference_scale, s);
        const PageStep step = page_step(current.dims, current.differential, r, page_options);
        current.torsion = step.torsion;
        out.ambiguous_rank = out.ambiguous_rank || step.ambiguous_rank;
        if (step.square_defect > kComplexTolerance * std::max(1.0, s * s)) {
            throw Error(ErrorCode::NotAComplex, "d_" + std::to_string(r) + " does not square to zero");
        }

        Page next;
        next.r = r + 1;
        for (const auto& [b, reps] : current.representatives) {
            const int i = b.first + b.second;
            const CMatrix& w = step.next.at(b);
            next.dims[b] = w.cols();
            if (w.cols() == 0) {
                next.representatives[b] = CMatrix(reps.rows(), 0);
                continue;
            }
            // Shift each class representative by an element of Z_{r-1}^{n+1} so
            // that its coboundary lands in F_{n+r+1}.
            CMatrix x = reps * w;
            const CMatrix y = base.d(i) * x;
            const CMatrix deeper = span_basis(spaces.cocycles(r - 1, b.first + r + 1, i + 1), ropts);
            const CMatrix shifts = spaces.cocycles(r - 1, b.first + 1, i);
            const CMatrix proj_y = y - deeper * (deeper.adjoint() * y);
            const CMatrix shifted_image = base.d(i) * shifts;
            const CMatrix proj_img = shifted_image - deeper * (deeper.adjoint() * shifted_image);
            const CMatrix coef = least_squares(proj_img, proj_y, ropts);
            x -= shifts * coef;
            const CMatrix rest = base.d(i) * x;
            if (max_abs(rest - deeper * (deeper.adjoint() * rest)) > residual_tol) {
                throw Error(ErrorCode::NotAComplex, "page " + std::to_string(r + 1) +
                                                        ": class representative does not survive");
            }
            next.representatives[b] = std::move(x);
        }
        out.pages.push_back(std::move(current));
        current = std::move(next);
    }
    out.limit = std::move(current);
    out.limit.differential.clear();

    out.ambiguous_rank = out.ambiguous_rank || spaces.ambiguous();
    for (const Page& p : out.pages) out.page_product *= p.torsion;

    std::vector<CMatrix> lifted;
    for (int i = 0; i <= top; ++i) {
        CMatrix h(base.dim(i), 0);
        for (int n = 0; n <= big_n; ++n) {
            const CMatrix& reps = out.limit.representatives.at({n, i - n});
            const CMatrix prev = h;
            h = hstack(base.dim(i), {&prev, &reps});
        }
        lifted.push_back(std::move(h));
    }
    const TorsionResult direct = complex_torsion(base, lifted, options);
    out.direct = direct.torsion;
    if (out.direct.note == BasisNote::RelativeToSuppliedBases) out.direct.note = BasisNote::RelativeToComputedBases;
    out.product_gap = relative_gap(out.page_product, out.direct);
    out.product_holds = out.product_gap <= kProductTolerance;
    return out;
}

}  // namespace torsflow
