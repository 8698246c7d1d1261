#include "torsflow/bott_pipeline.hpp"

#include <algorithm>
#include <sstream>

namespace torsflow {

namespace {

Index points_at(const MorseData& morse, int k) {
    return static_cast<Index>(morse.cells[static_cast<std::size_t>(k)].size());
}

}  // namespace

BlockCohomology block_cohomology(const CriticalBlock& block, const Representation& rep, const TorsionOptions& options) {
    const Index m = rep.dim();
    const CMatrix id = CMatrix::Identity(m, m);
    BlockCohomology out;
    out.id = block.id;
    out.kind = block.kind;
    out.level = block.level();
    out.degree = block.degree();
    const int n = out.degree;

    std::vector<Index> dims(4, 0);
    std::vector<CMatrix> ds;
    if (block.is_circle()) {
        out.D = id - static_cast<double>(block.delta) * rep.evaluate(block.holonomy);
        dims[static_cast<std::size_t>(n)] = m;
        dims[static_cast<std::size_t>(n + 1)] = m;
    } else {
        const CMatrix a = rep.evaluate(block.alpha);
        const CMatrix b = rep.evaluate(block.beta);
        const double sign = block.kind == BlockKind::Klein ? 1.0 : -1.0;
        out.D.resize(2 * m, m);
        out.D << id - a, id + sign * b;
        out.D_star.resize(m, 2 * m);
        out.D_star << id + sign * b, a - id;
        dims[static_cast<std::size_t>(n - 1)] = m;
        dims[static_cast<std::size_t>(n)] = 2 * m;
        dims[static_cast<std::size_t>(n + 1)] = m;
    }
    for (int k = 0; k < 3; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        CMatrix d = CMatrix::Zero(dims[uk + 1], dims[uk]);
        if (block.is_circle() && k == n) d = out.D;
        if (!block.is_circle() && k == n - 1) d = out.D;
        if (!block.is_circle() && k == n) d = out.D_star;
        ds.push_back(std::move(d));
    }
    out.local = BasedComplex(dims, ds);

    // D is a difference of unitary terms, so rounding residue of I - rho(g)
    // must be judged against 1 rather than against D itself
    TorsionOptions local_options = options;
    local_options.reference_scale = std::max(options.reference_scale, 1.0);
    const TorsionResult tr = complex_torsion(out.local, local_options);
    out.torsion_factor = tr.torsion;
    out.ambiguous_rank = tr.ambiguous_rank;
    out.acyclic = true;
    for (std::size_t k = 0; k < 4; ++k) {
        out.dims[k] = tr.cohomology_dims[k];
        out.harmonic[k] = tr.cohomology_bases[k];
        if (out.dims[k] != 0) out.acyclic = false;
    }
    return out;
}

CMatrix connection_matrix(const Representation& rep, const std::vector<Orbit>& orbits) {
    CMatrix out = CMatrix::Zero(rep.dim(), rep.dim());
    for (const Orbit& o : orbits) out += static_cast<double>(o.sign) * rep.evaluate(o.holonomy);
    return out;
}

MorseComplex morse_complex(const BottModel& model, const std::vector<BlockCohomology>& blocks) {
    const MorseData morse = expand_morse(model);
    const Index m = model.representation.dim();

    std::vector<Index> dims;
    std::vector<std::vector<int>> levels;
    for (int k = 0; k < 4; ++k) {
        dims.push_back(points_at(morse, k) * m);
        std::vector<int> lv;
        for (const MorsePoint& p : morse.cells[static_cast<std::size_t>(k)])
            for (Index c = 0; c < m; ++c) lv.push_back(p.level);
        levels.push_back(std::move(lv));
    }
    std::vector<CMatrix> ds;
    for (int k = 0; k < 3; ++k) ds.push_back(CMatrix::Zero(dims[static_cast<std::size_t>(k) + 1], dims[static_cast<std::size_t>(k)]));

    // Local block differentials.
    for (std::size_t bi = 0; bi < model.blocks.size(); ++bi) {
        const BasedComplex& local = blocks[bi].local;
        const auto labels = model.blocks[bi].labels();
        for (int k = 0; k < 3; ++k) {
            const CMatrix d = local.d(k);
            if (d.size() == 0) continue;
            // Local coordinates in degree k list the block's index-k points in label order.
            Index col = 0;
            for (const auto& src : labels) {
                const auto s = morse.locate(bi, src);
                if (s->first != k) continue;
                Index row = 0;
                for (const auto& dst : labels) {
                    const auto t = morse.locate(bi, dst);
                    if (t->first != k + 1) continue;
                    ds[static_cast<std::size_t>(k)].block(static_cast<Index>(t->second) * m,
                                                          static_cast<Index>(s->second) * m, m, m) =
                        d.block(row, col, m, m);
                    row += m;
                }
                col += m;
            }
        }
    }

    // Gradient connections: coboundary from the lower point to the upper one.
    std::map<std::pair<std::pair<int, std::size_t>, std::pair<int, std::size_t>>, bool> given;
    for (const GradientConnection& c : model.connections) {
        const std::size_t fb = *model.find_block(c.from_block);
        const std::size_t tb = *model.find_block(c.to_block);
        const int from_level = model.blocks[fb].level();
        const int to_level = model.blocks[tb].level();
        if (to_level >= from_level) {
            throw Error(ErrorCode::IllegalConnection,
                        c.name() + ": connections must run from a higher sublevel group to a lower one");
        }
        const auto up = *morse.locate(fb, c.from_label);
        const auto down = *morse.locate(tb, c.to_label);
        ds[static_cast<std::size_t>(down.first)].block(static_cast<Index>(up.second) * m,
                                                       static_cast<Index>(down.second) * m, m, m) +=
            connection_matrix(model.representation, c.orbits);
        given[{down, up}] = true;
    }

    std::vector<std::string> missing;
    for (int k = 0; k < 3; ++k) {
        const auto& lower = morse.cells[static_cast<std::size_t>(k)];
        const auto& upper = morse.cells[static_cast<std::size_t>(k) + 1];
        for (std::size_t a = 0; a < lower.size(); ++a) {
            for (std::size_t b = 0; b < upper.size(); ++b) {
                if (upper[b].level <= lower[a].level) continue;
                if (given.count({{k, a}, {k + 1, b}})) continue;
                missing.push_back(model.blocks[upper[b].block].id + "." + upper[b].label + "->" +
                                  model.blocks[lower[a].block].id + "." + lower[a].label);
            }
        }
    }
    std::vector<std::string> warnings;
    if (!missing.empty()) {
        std::string msg = "MissingConnection: no orbits given for";
        for (const auto& s : missing) msg += " " + s;
        warnings.push_back(msg + " (taken as zero)");
    }

    BasedComplex base(dims, ds);
    require_complex(base);
    return MorseComplex{morse, m, FilteredComplex(std::move(base), std::move(levels)), std::move(warnings)};
}

PageOne page_one(const MorseComplex& mc, const std::vector<BlockCohomology>& blocks) {
    PageOne out;
    const Index m = mc.rep_dim;
    const BasedComplex& base = mc.filtered.base();
    for (int level = 0; level <= 2; ++level) {
        for (int k = 0; k < 4; ++k) {
            const Bidegree b{level, k - level};
            const auto uk = static_cast<std::size_t>(k);
            Index cols = 0;
            for (const BlockCohomology& bc : blocks)
                if (bc.level == level) cols += bc.dims[uk];
            CMatrix basis = CMatrix::Zero(base.dim(k), cols);
            Index c = 0;
            for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
                const BlockCohomology& bc = blocks[bi];
                if (bc.level != level || bc.dims[uk] == 0) continue;
                // Scatter the local harmonic rows onto the block's points of index k.
                const auto& points = mc.morse.cells[uk];
                Index local_row = 0;
                for (std::size_t j = 0; j < points.size(); ++j) {
                    if (points[j].block != bi) continue;
                    basis.block(static_cast<Index>(j) * m, c, m, bc.dims[uk]) =
                        bc.harmonic[uk].block(local_row, 0, m, bc.dims[uk]);
                    local_row += m;
                }
                c += bc.dims[uk];
            }
            out.dims[b] = cols;
            out.basis[b] = std::move(basis);
        }
    }
    return out;
}

std::map<Bidegree, CMatrix> assemble_d1(const MorseComplex& mc, const PageOne& e1) {
    std::map<Bidegree, CMatrix> out;
    const BasedComplex& base = mc.filtered.base();
    for (const auto& [b, basis] : e1.basis) {
        const Bidegree t{b.first + 1, b.second};
        const auto it = e1.basis.find(t);
        if (it == e1.basis.end()) {
            out[b] = CMatrix::Zero(0, basis.cols());
            continue;
        }
        const int k = b.first + b.second;
        out[b] = it->second.adjoint() * (base.d(k) * basis);
    }
    return out;
}

std::map<Bidegree, CMatrix> assemble_d2(const MorseComplex& mc, const PageOne& e1, const PageStep& after_d1,
                                        const TorsionOptions& options) {
    std::map<Bidegree, CMatrix> out;
    const BasedComplex& base = mc.filtered.base();
    const double s = std::max(base.scale(), 1.0);
    const RankOptions ropts{options.tol_rel, options.tol_rel * s};
    const auto& levels = mc.filtered.levels();

    auto rows_at = [&](int k, int level) {
        std::vector<Index> idx;
        if (k < 0 || k > base.top_degree()) return idx;
        const auto& lv = levels[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j < lv.size(); ++j)
            if (lv[j] == level) idx.push_back(static_cast<Index>(j));
        return idx;
    };
    auto select = [](const CMatrix& a, const std::vector<Index>& rows, const std::vector<Index>& cols) {
        CMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                out(static_cast<Index>(i), static_cast<Index>(j)) = a(rows[i], cols[j]);
        return out;
    };

    for (const auto& [b, w] : after_d1.next) {
        const Bidegree t{b.first + 2, b.second - 1};
        const auto tw = after_d1.next.find(t);
        const Index tdim = tw == after_d1.next.end() ? 0 : tw->second.cols();
        if (b.first != 0 || w.cols() == 0 || tdim == 0) {
            out[b] = CMatrix::Zero(tdim, w.cols());
            continue;
        }
        const int k = b.first + b.second;
        const CMatrix d = base.d(k);
        const CMatrix x = e1.basis.at(b) * w;
        const CMatrix y = d * x;

        // Cancel the level-1 part of dx with a level-1 cochain u.
        const std::vector<Index> mid_src = rows_at(k, 1);
        const std::vector<Index> mid_dst = rows_at(k + 1, 1);
        const std::vector<Index> top_dst = rows_at(k + 1, 2);
        CMatrix ymid(static_cast<Index>(mid_dst.size()), x.cols());
        for (std::size_t i = 0; i < mid_dst.size(); ++i) ymid.row(static_cast<Index>(i)) = y.row(mid_dst[i]);
        const CMatrix local1 = select(d, mid_dst, mid_src);
        CMatrix u = CMatrix::Zero(static_cast<Index>(mid_src.size()), x.cols());
        if (local1.size() > 0) u = least_squares(local1, ymid, ropts);
        if (max_abs(local1 * u - ymid) > 1e-7 * s) {
            throw Error(ErrorCode::NotAComplex, "d_2: E_2 class does not lift past the saddle level");
        }

        CMatrix z(static_cast<Index>(top_dst.size()), x.cols());
        const CMatrix correction = select(d, top_dst, mid_src) * u;
        for (std::size_t i = 0; i < top_dst.size(); ++i)
            z.row(static_cast<Index>(i)) = y.row(top_dst[i]) - correction.row(static_cast<Index>(i));
        CMatrix full = CMatrix::Zero(base.dim(k + 1), x.cols());
        for (std::size_t i = 0; i < top_dst.size(); ++i) full.row(top_dst[i]) = z.row(static_cast<Index>(i));

        const CMatrix coords = e1.basis.at(t).adjoint() * full;
        out[b] = tw->second.adjoint() * coords;
    }
    return out;
}

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::Auto: return "auto";
        case Mode::Fast: return "fast";
        case Mode::Full: return "full";
    }
    return "?";
}

std::optional<TorsionScalar> fast_path_torsion(const BottModel& model, double tol_rel) {
    const Representation& rep = model.representation;
    const CMatrix id = CMatrix::Identity(rep.dim(), rep.dim());
    TorsionScalar total;
    for (const CriticalBlock& b : model.blocks) {
        if (!b.is_circle()) return std::nullopt;
        const CMatrix d = id - static_cast<double>(b.delta) * rep.evaluate(b.holonomy);
        // singular relative to the unit scale of rho, not to d itself
        if (rank_nullspace(d, RankOptions{tol_rel, tol_rel}).rank < d.rows()) return std::nullopt;
        const double det = det_modulus(d, tol_rel);
        if (det == 0.0) return std::nullopt;
        total *= TorsionScalar::from_modulus(det).alternate(b.index);
    }
    return total;
}

namespace {

void run_full(const BottModel& model, const TorsionOptions& options, TorsionReport& report) {
    const MorseComplex mc = morse_complex(model, report.blocks);
    for (const auto& w : mc.warnings) report.warnings.push_back(w);

    // The E_1 complex is graded by total degree with unit-scale entries;
    // judge its ranks against the Morse complex.
    TorsionOptions page_options = options;
    page_options.reference_scale = std::max(options.reference_scale, mc.filtered.base().scale());

    const PageOne e1 = page_one(mc, report.blocks);
    report.e1 = e1.dims;
    report.d1 = assemble_d1(mc, e1);
    const PageStep step1 = page_step(e1.dims, report.d1, 1, page_options);
    report.tau_d1 = step1.torsion;
    report.e2 = step1.next_dims;

    report.d2 = assemble_d2(mc, e1, step1, options);
    const PageStep step2 = page_step(step1.next_dims, report.d2, 2, page_options);
    report.tau_d2 = step2.torsion;
    report.e_inf = step2.next_dims;
    report.ambiguous_rank = report.ambiguous_rank || step1.ambiguous_rank || step2.ambiguous_rank;
    if (step1.square_defect > kComplexTolerance || step2.square_defect > kComplexTolerance) {
        throw Error(ErrorCode::NotAComplex, "page differentials do not square to zero");
    }

    report.acyclic = true;
    for (const auto& [b, d] : report.e_inf)
        if (d != 0) report.acyclic = false;
    report.total = report.tau_d0 * report.tau_d1 * report.tau_d2;
    report.total.note = report.acyclic ? BasisNote::AcyclicCanonical : BasisNote::RelativeToComputedBases;
    report.pages_computed = true;
}

}  // namespace

TorsionReport total_torsion(const BottModel& model, Mode mode, const TorsionOptions& options) {
    require_valid(model);
    TorsionReport report;
    report.warnings = model_warnings(model);
    for (const CriticalBlock& b : model.blocks) {
        report.blocks.push_back(block_cohomology(b, model.representation, options));
        report.tau_d0 *= report.blocks.back().torsion_factor;
        report.ambiguous_rank = report.ambiguous_rank || report.blocks.back().ambiguous_rank;
    }

    const std::optional<TorsionScalar> fast =
        mode == Mode::Full ? std::nullopt : fast_path_torsion(model, options.tol_rel);
    if (mode == Mode::Fast && !fast) {
        std::string why = "fast path needs every block to be a circle with nonsingular D";
        for (const BlockCohomology& bc : report.blocks) {
            if (bc.kind != BlockKind::Circle) {
                why += "; " + bc.id + " is a " + std::string(to_string(bc.kind));
                break;
            }
            if (!bc.acyclic) {
                why += "; " + bc.id + " has singular D";
                break;
            }
        }
        throw Error(ErrorCode::FastPathUnavailable, why);
    }

    if (mode == Mode::Fast) {
        // Connections still have to be legal even though the product ignores them.
        const MorseComplex mc = morse_complex(model, report.blocks);
        (void)mc;
        report.mode_used = Mode::Fast;
        report.total = *fast;
        report.acyclic = true;
    } else {
        run_full(model, options, report);
        report.mode_used = Mode::Full;
        if (fast) {
            report.mode_used = Mode::Fast;
            report.cross_check_gap = relative_gap(*fast, report.total);
            if (*report.cross_check_gap > kProductTolerance) {
                std::ostringstream msg;
                msg << "CrossCheck: fast and full totals differ by " << *report.cross_check_gap << " (relative)";
                report.warnings.push_back(msg.str());
            }
            report.total = *fast;
        }
    }
    if (report.ambiguous_rank) {
        report.warnings.push_back("AmbiguousRank: a singular value sits within a factor of 10 of the rank threshold");
    }
    return report;
}

}  // namespace torsflow
