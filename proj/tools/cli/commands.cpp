#include "commands.hpp"

#include <cstdlib>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "document.hpp"

namespace torsflow::cli {

namespace {

struct Common {
    std::optional<double> tolerance;
    std::string format = "text";
};

double resolve_tolerance(const Common& c) {
    double tol = kDefaultTolerance;
    if (const char* env = std::getenv("TORSFLOW_TOLERANCE"); env && *env) {
        char* end = nullptr;
        tol = std::strtod(env, &end);
        if (end == env || *end != '\0') throw Error(ErrorCode::InvalidInput, "TORSFLOW_TOLERANCE is not a number");
    }
    if (c.tolerance) tol = *c.tolerance;
    if (!(tol > 0.0 && tol < 1.0)) throw Error(ErrorCode::InvalidInput, "tolerance must lie in (0, 1)");
    return tol;
}

std::pair<int, int> parse_lens(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument("no comma");
        std::size_t a = 0, b = 0;
        const int p = std::stoi(s.substr(0, comma), &a);
        const int q = std::stoi(s.substr(comma + 1), &b);
        if (a != comma || b != s.size() - comma - 1) throw std::invalid_argument("trailing characters");
        return {p, q};
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidInput, "--lens expects p,q, got '" + s + "'");
    }
}

Representation trivial_for(const CWComplex& k) {
    std::set<std::string> names;
    for (const auto& dim : k.cells)
        for (const Cell& c : dim)
            for (const CellFace& f : c.boundary)
                for (const Letter& l : f.path) names.insert(l.generator);
    return Representation::trivial(1, {names.begin(), names.end()});
}

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

int compute(const std::string& input, const std::string& mode_name, const Common& common, std::ostream& out) {
    const double tol = resolve_tolerance(common);
    const Json doc = read_document(input);
    const BottModel model = parse_model(doc);
    const Mode mode = mode_name == "fast" ? Mode::Fast : (mode_name == "full" ? Mode::Full : Mode::Auto);
    TorsionOptions options;
    options.tol_rel = tol;
    const TorsionReport report = total_torsion(model, mode, options);
    if (common.format == "json") {
        emit_json(out, json_report(report, tol));
    } else {
        out << text_report(report);
    }
    return kExitOk;
}

int oracle(const std::string& cw_path, const std::string& lens, const std::string& rep_path, const Common& common,
           std::ostream& out) {
    const double tol = resolve_tolerance(common);
    CWComplex k;
    std::optional<Representation> rep;
    if (!cw_path.empty()) {
        const Json doc = read_document(cw_path);
        if (!doc.is_object() || !doc.contains("cw")) throw ParseError("'" + cw_path + "' has no 'cw' section");
        k = parse_cw(doc["cw"]);
        if (doc.contains("representation")) rep = parse_representation(doc["representation"]);
    } else {
        const auto [p, q] = parse_lens(lens);
        k = lens_space(p, q);
    }
    if (!rep_path.empty()) {
        const Json doc = read_document(rep_path);
        rep = parse_representation(doc.is_object() && doc.contains("representation") ? doc["representation"] : doc);
    }
    if (!rep) rep = trivial_for(k);

    TorsionOptions options;
    options.tol_rel = tol;
    const CWTorsion t = cw_torsion(k, *rep, options);
    if (common.format == "json") {
        emit_json(out, json_oracle(k, t, tol));
    } else {
        out << text_oracle(k, t);
    }
    return kExitOk;
}

int export_corpus(const std::string& name, const std::string& lens, bool list, std::ostream& out) {
    const std::vector<CWComplex> all = corpus();
    if (list) {
        for (const CWComplex& k : all) out << k.name << '\n';
        return kExitOk;
    }
    if (!lens.empty()) {
        const auto [p, q] = parse_lens(lens);
        emit_json(out, Json{{"cw", to_json(lens_space(p, q))}});
        return kExitOk;
    }
    for (const CWComplex& k : all) {
        if (k.name == name) {
            emit_json(out, Json{{"cw", to_json(k)}});
            return kExitOk;
        }
    }
    throw Error(ErrorCode::InvalidInput, "no corpus complex named '" + name + "' (try --list)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reidemeister torsion of Bott-integral models and CW complexes", "torsflow"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--tolerance", common.tolerance, "relative rank tolerance (default 1e-10, env TORSFLOW_TOLERANCE)");
        sub->add_option("--format", common.format, "report format")->check(CLI::IsMember({"text", "json"}));
    };

    std::string input, mode = "auto";
    CLI::App* compute_cmd = app.add_subcommand("compute", "torsion of a Bott model document");
    compute_cmd->add_option("--input", input, "model document (JSON)")->required();
    compute_cmd->add_option("--mode", mode, "auto, fast or full")->check(CLI::IsMember({"auto", "fast", "full"}));
    add_common(compute_cmd);

    std::string cw_path, lens, rep_path;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "twisted cohomology and torsion of a CW complex");
    auto* cw_opt = oracle_cmd->add_option("--cw", cw_path, "document with a 'cw' section");
    auto* lens_opt = oracle_cmd->add_option("--lens", lens, "lens space L(p,q) as p,q");
    cw_opt->excludes(lens_opt);
    oracle_cmd->add_option("--rep", rep_path, "document with a 'representation' section");
    add_common(oracle_cmd);

    std::string name, export_lens;
    bool list = false;
    CLI::App* export_cmd = app.add_subcommand("export", "print a corpus complex as a document");
    auto* name_opt = export_cmd->add_option("--name", name, "corpus complex name");
    auto* export_lens_opt = export_cmd->add_option("--lens", export_lens, "lens space L(p,q) as p,q");
    name_opt->excludes(export_lens_opt);
    export_cmd->add_flag("--list", list, "list corpus names");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*compute_cmd) return compute(input, mode, common, out);
        if (*oracle_cmd) {
            if (cw_path.empty() && lens.empty()) {
                err << "oracle: one of --cw or --lens is required\n";
                return kExitValidation;
            }
            return oracle(cw_path, lens, rep_path, common, out);
        }
        if (*export_cmd) {
            if (name.empty() && export_lens.empty() && !list) {
                err << "export: one of --name, --lens or --list is required\n";
                return kExitValidation;
            }
            return export_corpus(name, export_lens, list, out);
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitValidation;
}

}  // namespace torsflow::cli
