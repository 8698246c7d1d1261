#include "document.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace torsflow::cli {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing '" + key + "'");
    return *it;
}

std::string get_string(const Json& j, const char* key, const std::string& where, const char* fallback = nullptr) {
    if (fallback && (!j.is_object() || !j.contains(key))) return fallback;
    const Json& v = field(j, key, where);
    if (!v.is_string()) throw ParseError(where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

int get_int(const Json& j, const char* key, const std::string& where, std::optional<int> fallback = std::nullopt) {
    if (fallback && (!j.is_object() || !j.contains(key))) return *fallback;
    const Json& v = field(j, key, where);
    if (!v.is_number_integer()) throw ParseError(where + ": '" + key + "' must be an integer");
    return v.get<int>();
}

double get_double(const Json& j, const char* key, const std::string& where, std::optional<double> fallback) {
    if (fallback && (!j.is_object() || !j.contains(key))) return *fallback;
    const Json& v = field(j, key, where);
    if (!v.is_number()) throw ParseError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

Word get_word(const Json& j, const char* key, const std::string& where) {
    const std::string text = get_string(j, key, where, "");
    try {
        return parse_word(text);
    } catch (const Error& e) {
        throw ParseError(where + ": " + e.what());
    }
}

std::pair<std::string, std::string> split_point(const std::string& s, const std::string& where) {
    const auto dot = s.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == s.size()) {
        throw ParseError(where + ": point '" + s + "' is not of the form block.label");
    }
    return {s.substr(0, dot), s.substr(dot + 1)};
}

Json shape(const CMatrix& m) { return Json::array({m.rows(), m.cols()}); }

}  // namespace

std::string fixed(double x) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(12) << x;
    return out.str();
}

Json read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ParseError(where + ": matrix must be a non-empty array of rows");
    const auto rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) throw ParseError(where + ": matrix rows must be non-empty arrays");
    const auto cols = static_cast<Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw ParseError(where + ": ragged matrix");
        for (Index c = 0; c < cols; ++c) {
            const Json& z = row[static_cast<std::size_t>(c)];
            if (z.is_number()) {
                m(r, c) = Complex(z.get<double>(), 0.0);
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
            } else {
                throw ParseError(where + ": entries must be [re, im] pairs");
            }
        }
    }
    return m;
}

Representation parse_representation(const Json& j) {
    const std::string where = "representation";
    const int dim = get_int(j, "dim", where);
    const Json& gens = field(j, "generators", where);
    if (!gens.is_object()) throw ParseError(where + ": 'generators' must be an object");
    std::map<std::string, CMatrix> g;
    for (const auto& [name, m] : gens.items()) g[name] = matrix_from_json(m, where + "." + name);
    return Representation(dim, std::move(g));
}

Json to_json(const Representation& rep) {
    Json gens = Json::object();
    for (const auto& [name, m] : rep.generators()) gens[name] = to_json(m);
    return Json{{"dim", rep.dim()}, {"generators", gens}};
}

BottModel parse_model(const Json& doc) {
    BottModel model;
    model.representation = parse_representation(field(doc, "representation", "document"));
    const Json& blocks = field(doc, "blocks", "document");
    if (!blocks.is_array()) throw ParseError("document: 'blocks' must be an array");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Json& jb = blocks[i];
        const std::string where = "blocks[" + std::to_string(i) + "]";
        CriticalBlock b;
        b.id = get_string(jb, "id", where);
        const std::string kind = get_string(jb, "kind", where);
        b.critical_value = get_double(jb, "critical_value", where, 0.0);
        if (kind == "circle") {
            b.kind = BlockKind::Circle;
            b.index = get_int(jb, "index", where);
            b.delta = get_int(jb, "delta", where);
            b.holonomy = get_word(jb, "holonomy", where);
        } else if (kind == "torus" || kind == "klein") {
            b.kind = kind == "torus" ? BlockKind::Torus : BlockKind::Klein;
            const std::string ext = get_string(jb, "extremal", where);
            if (ext != "min" && ext != "max") throw ParseError(where + ": 'extremal' must be min or max");
            b.extremal = ext == "min" ? Extremal::Min : Extremal::Max;
            b.alpha = get_word(jb, "alpha", where);
            b.beta = get_word(jb, "beta", where);
        } else {
            throw ParseError(where + ": unknown kind '" + kind + "'");
        }
        model.blocks.push_back(std::move(b));
    }
    if (doc.contains("connections")) {
        const Json& conns = doc["connections"];
        if (!conns.is_array()) throw ParseError("document: 'connections' must be an array");
        for (std::size_t i = 0; i < conns.size(); ++i) {
            const Json& jc = conns[i];
            const std::string where = "connections[" + std::to_string(i) + "]";
            GradientConnection c;
            std::tie(c.from_block, c.from_label) = split_point(get_string(jc, "from", where), where);
            std::tie(c.to_block, c.to_label) = split_point(get_string(jc, "to", where), where);
            const Json& orbits = field(jc, "orbits", where);
            if (!orbits.is_array()) throw ParseError(where + ": 'orbits' must be an array");
            for (const Json& jo : orbits) c.orbits.push_back(Orbit{get_int(jo, "sign", where), get_word(jo, "word", where)});
            model.connections.push_back(std::move(c));
        }
    }
    return model;
}

Json to_json(const BottModel& model) {
    Json blocks = Json::array();
    for (const CriticalBlock& b : model.blocks) {
        Json jb{{"id", b.id}, {"kind", std::string(to_string(b.kind))}};
        if (b.is_circle()) {
            jb["index"] = b.index;
            jb["delta"] = b.delta;
            jb["holonomy"] = format_word(b.holonomy);
        } else {
            jb["extremal"] = std::string(to_string(b.extremal));
            jb["alpha"] = format_word(b.alpha);
            jb["beta"] = format_word(b.beta);
        }
        jb["critical_value"] = b.critical_value;
        blocks.push_back(std::move(jb));
    }
    Json conns = Json::array();
    for (const GradientConnection& c : model.connections) {
        Json orbits = Json::array();
        for (const Orbit& o : c.orbits) orbits.push_back(Json{{"sign", o.sign}, {"word", format_word(o.holonomy)}});
        conns.push_back(Json{{"from", c.from_block + "." + c.from_label},
                             {"to", c.to_block + "." + c.to_label},
                             {"orbits", orbits}});
    }
    return Json{{"representation", to_json(model.representation)}, {"blocks", blocks}, {"connections", conns}};
}

CWComplex parse_cw(const Json& j) {
    const std::string where = "cw";
    CWComplex k;
    k.name = get_string(j, "name", where, "cw");
    const Json& cells = field(j, "cells", where);
    if (!cells.is_array()) throw ParseError(where + ": 'cells' must be an array");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Json& jc = cells[i];
        const std::string cw = where + ".cells[" + std::to_string(i) + "]";
        Cell c;
        c.id = get_string(jc, "id", cw);
        const int dim = get_int(jc, "dim", cw);
        if (dim < 0 || dim > 3) throw ParseError(cw + ": 'dim' must be 0..3");
        if (jc.contains("boundary")) {
            const Json& faces = jc["boundary"];
            if (!faces.is_array()) throw ParseError(cw + ": 'boundary' must be an array");
            for (const Json& jf : faces) {
                c.boundary.push_back(CellFace{get_string(jf, "face", cw), get_int(jf, "incidence", cw),
                                              get_word(jf, "word", cw)});
            }
        }
        k.cells[static_cast<std::size_t>(dim)].push_back(std::move(c));
    }
    return k;
}

Json to_json(const CWComplex& k) {
    Json cells = Json::array();
    for (int d = 0; d < 4; ++d) {
        for (const Cell& c : k.cells[static_cast<std::size_t>(d)]) {
            Json jc{{"id", c.id}, {"dim", d}};
            if (d > 0) {
                Json faces = Json::array();
                for (const CellFace& f : c.boundary)
                    faces.push_back(Json{{"face", f.face}, {"incidence", f.incidence}, {"word", format_word(f.path)}});
                jc["boundary"] = faces;
            }
            cells.push_back(std::move(jc));
        }
    }
    return Json{{"name", k.name}, {"cells", cells}};
}

namespace {

int max_degree(const std::map<Bidegree, Index>& dims) {
    int top = 0;
    for (const auto& [b, d] : dims) top = std::max(top, b.first + b.second);
    return top;
}

void text_table(std::ostream& out, const char* title, const std::map<Bidegree, Index>& dims) {
    out << title << " (row n, columns total degree 0..3):\n";
    for (int n = 0; n <= 2; ++n) {
        out << "  n=" << n << ":";
        for (int k = 0; k <= 3; ++k) {
            const auto it = dims.find({n, k - n});
            out << ' ' << (it == dims.end() ? 0 : it->second);
        }
        out << '\n';
    }
}

Json json_table(const std::map<Bidegree, Index>& dims) {
    Json rows = Json::array();
    for (int n = 0; n <= 2; ++n) {
        Json row = Json::array();
        for (int k = 0; k <= std::max(3, max_degree(dims)); ++k) {
            const auto it = dims.find({n, k - n});
            row.push_back(it == dims.end() ? 0 : it->second);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json json_scalar(const TorsionScalar& t) {
    return Json{{"modulus", t.modulus()}, {"log_modulus", t.log_modulus}, {"basis_note", std::string(to_string(t.note))}};
}

Json json_differential(const std::map<Bidegree, CMatrix>& d) {
    Json out = Json::array();
    for (const auto& [b, m] : d) {
        if (m.size() == 0) continue;
        out.push_back(Json{{"source", Json::array({b.first, b.second})}, {"matrix", to_json(m)}});
    }
    return out;
}

std::string shape_text(const CMatrix& m) {
    if (m.size() == 0) return "-";
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

std::string text_report(const TorsionReport& r) {
    std::ostringstream out;
    out << "mode: " << to_string(r.mode_used) << '\n';
    out << "blocks:\n";
    out << "  " << std::left << std::setw(10) << "id" << std::setw(8) << "kind" << std::setw(7) << "level"
        << std::setw(9) << "D" << std::setw(9) << "D*" << std::setw(18) << "factor" << "dims H^0..H^3\n";
    for (const BlockCohomology& b : r.blocks) {
        out << "  " << std::left << std::setw(10) << b.id << std::setw(8) << to_string(b.kind) << std::setw(7)
            << b.level << std::setw(9) << shape_text(b.D) << std::setw(9) << shape_text(b.D_star) << std::setw(18)
            << fixed(b.torsion_factor.modulus());
        for (Index d : b.dims) out << d << ' ';
        out << '\n';
    }
    if (r.pages_computed) {
        text_table(out, "E1", r.e1);
        text_table(out, "E2", r.e2);
        text_table(out, "Einf", r.e_inf);
        out << "page torsions: tau_d0 = " << fixed(r.tau_d0.modulus()) << ", tau_d1 = " << fixed(r.tau_d1.modulus())
            << ", tau_d2 = " << fixed(r.tau_d2.modulus()) << '\n';
    } else {
        out << "page torsions: tau_d0 = " << fixed(r.tau_d0.modulus()) << " (pages skipped in fast mode)\n";
    }
    if (r.cross_check_gap) out << "fast/full relative gap: " << *r.cross_check_gap << '\n';
    out << "basis note: " << to_string(r.total.note) << '\n';
    if (!r.warnings.empty()) {
        out << "warnings:\n";
        for (const auto& w : r.warnings) out << "  " << w << '\n';
    }
    out << "total torsion modulus: " << fixed(r.total.modulus()) << ", acyclic: " << (r.acyclic ? "yes" : "no")
        << '\n';
    return out.str();
}

Json json_report(const TorsionReport& r, double tolerance) {
    Json blocks = Json::array();
    for (const BlockCohomology& b : r.blocks) {
        blocks.push_back(Json{{"id", b.id},
                              {"kind", std::string(to_string(b.kind))},
                              {"level", b.level},
                              {"degree", b.degree},
                              {"D_shape", shape(b.D)},
                              {"D_star_shape", shape(b.D_star)},
                              {"dims", Json(std::vector<Index>(b.dims.begin(), b.dims.end()))},
                              {"factor", json_scalar(b.torsion_factor)},
                              {"acyclic", b.acyclic}});
    }
    Json out{{"mode", std::string(to_string(r.mode_used))}, {"tolerance", tolerance}, {"blocks", blocks}};
    if (r.pages_computed) {
        out["pages"] = Json{{"E1", json_table(r.e1)}, {"E2", json_table(r.e2)}, {"Einf", json_table(r.e_inf)}};
        out["d1"] = json_differential(r.d1);
        out["d2"] = json_differential(r.d2);
        out["page_torsions"] =
            Json{{"tau_d0", json_scalar(r.tau_d0)}, {"tau_d1", json_scalar(r.tau_d1)}, {"tau_d2", json_scalar(r.tau_d2)}};
    } else {
        out["page_torsions"] = Json{{"tau_d0", json_scalar(r.tau_d0)}};
    }
    if (r.cross_check_gap) out["cross_check_gap"] = *r.cross_check_gap;
    out["total"] = json_scalar(r.total);
    out["acyclic"] = r.acyclic;
    out["warnings"] = r.warnings;
    return out;
}

std::string text_oracle(const CWComplex& k, const CWTorsion& t) {
    std::ostringstream out;
    out << "complex: " << k.name << '\n';
    out << "cells:";
    for (int d = 0; d <= k.top_dimension(); ++d) out << ' ' << k.cells[static_cast<std::size_t>(d)].size();
    out << '\n' << "cohomology dims:";
    for (Index d : t.dims) out << ' ' << d;
    out << '\n';
    out << "basis note: " << to_string(t.torsion.note) << '\n';
    if (t.ambiguous_rank) out << "warnings:\n  AmbiguousRank: a singular value sits within a factor of 10 of the rank threshold\n";
    out << "torsion modulus: " << fixed(t.torsion.modulus()) << ", acyclic: " << (t.acyclic ? "yes" : "no") << '\n';
    return out.str();
}

Json json_oracle(const CWComplex& k, const CWTorsion& t, double tolerance) {
    Json cells = Json::array();
    for (int d = 0; d <= k.top_dimension(); ++d) cells.push_back(k.cells[static_cast<std::size_t>(d)].size());
    return Json{{"complex", k.name},
                {"tolerance", tolerance},
                {"cells", cells},
                {"dims", t.dims},
                {"torsion", json_scalar(t.torsion)},
                {"acyclic", t.acyclic},
                {"ambiguous_rank", t.ambiguous_rank}};
}

}  // namespace torsflow::cli
