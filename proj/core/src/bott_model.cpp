#include "torsflow/bott_model.hpp"

#include <set>
#include <sstream>

namespace torsflow {

std::string_view to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::Circle: return "circle";
        case BlockKind::Torus: return "torus";
        case BlockKind::Klein: return "klein";
    }
    return "?";
}

std::string_view to_string(Extremal extremal) { return extremal == Extremal::Min ? "min" : "max"; }

int CriticalBlock::tier() const {
    if (is_circle()) return index * 2;
    return extremal == Extremal::Min ? 1 : 3;
}

int CriticalBlock::level() const {
    const int t = tier();
    return t <= 1 ? 0 : (t == 2 ? 1 : 2);
}

int CriticalBlock::degree() const {
    if (is_circle()) return index;
    return extremal == Extremal::Min ? 1 : 2;
}

std::vector<std::string> CriticalBlock::labels() const {
    if (is_circle()) return {"w", "z"};
    return {"p", "q", "r", "s"};
}

std::optional<int> CriticalBlock::point_index(const std::string& label) const {
    if (is_circle()) {
        if (label == "w") return index;
        if (label == "z") return index + 1;
        return std::nullopt;
    }
    const int base = extremal == Extremal::Min ? 0 : 1;
    if (label == "p") return base;
    if (label == "q" || label == "r") return base + 1;
    if (label == "s") return base + 2;
    return std::nullopt;
}

std::optional<std::size_t> BottModel::find_block(const std::string& id) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].id == id) return i;
    return std::nullopt;
}

namespace {

void check_word(const Representation& rep, const Word& word, const std::string& subject,
                std::vector<Diagnostic>& out) {
    for (const Letter& l : word) {
        if (!rep.has(l.generator)) {
            out.push_back({ErrorCode::UnknownGenerator, subject, "unknown generator '" + l.generator + "'"});
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_model(const BottModel& model) {
    std::vector<Diagnostic> out;
    const Representation& rep = model.representation;

    for (const auto& [name, g] : rep.generators()) {
        if (unitarity_defect(g) > Representation::kUnitaryTolerance) {
            out.push_back({ErrorCode::InvalidInput, name, "generator is not unitary"});
        }
    }

    std::set<std::string> seen;
    for (const CriticalBlock& b : model.blocks) {
        if (b.id.empty()) out.push_back({ErrorCode::InvalidModel, "(block)", "empty block id"});
        if (!seen.insert(b.id).second) out.push_back({ErrorCode::InvalidModel, b.id, "duplicate block id"});
        if (b.is_circle()) {
            if (b.index < 0 || b.index > 2)
                out.push_back({ErrorCode::InvalidModel, b.id, "circle index must be 0, 1 or 2"});
            if (b.delta != 1 && b.delta != -1)
                out.push_back({ErrorCode::InvalidModel, b.id, "delta must be +1 or -1"});
            check_word(rep, b.holonomy, b.id, out);
        } else {
            check_word(rep, b.alpha, b.id, out);
            check_word(rep, b.beta, b.id, out);
        }
    }

    for (std::size_t i = 1; i < model.blocks.size(); ++i) {
        const CriticalBlock& prev = model.blocks[i - 1];
        const CriticalBlock& cur = model.blocks[i];
        if (cur.tier() < prev.tier()) {
            out.push_back({ErrorCode::ModelOrderError, cur.id,
                           "listed after " + prev.id + " but belongs to an earlier group"});
        } else if (cur.critical_value < prev.critical_value) {
            out.push_back({ErrorCode::ModelOrderError, cur.id,
                           "critical value decreases after " + prev.id});
        }
    }

    for (const GradientConnection& c : model.connections) {
        const std::string subject = c.name();
        const auto fb = model.find_block(c.from_block);
        const auto tb = model.find_block(c.to_block);
        if (!fb || !tb) {
            out.push_back({ErrorCode::InvalidModel, subject, "unknown block"});
            continue;
        }
        const CriticalBlock& from = model.blocks[*fb];
        const CriticalBlock& to = model.blocks[*tb];
        const auto fi = from.point_index(c.from_label);
        const auto ti = to.point_index(c.to_label);
        if (!fi || !ti) {
            out.push_back({ErrorCode::InvalidModel, subject, "unknown point label"});
            continue;
        }
        if (from.tier() == 2 && to.tier() == 2) {
            out.push_back({ErrorCode::AssumptionViolated, subject, "gradient line between saddle circles"});
        }
        if (*fi != *ti + 1) {
            std::ostringstream msg;
            msg << "index " << *fi << " point cannot flow to an index " << *ti << " point";
            out.push_back({ErrorCode::InvalidModel, subject, msg.str()});
        }
        for (const Orbit& o : c.orbits) {
            if (o.sign != 1 && o.sign != -1)
                out.push_back({ErrorCode::InvalidModel, subject, "intersection number must be +1 or -1"});
            check_word(rep, o.holonomy, subject, out);
        }
    }
    return out;
}

void require_valid(const BottModel& model) {
    const std::vector<Diagnostic> diags = validate_model(model);
    if (diags.empty()) return;
    std::string msg;
    for (const Diagnostic& d : diags) {
        if (!msg.empty()) msg += "; ";
        msg += d.subject + ": " + d.message;
    }
    throw Error(diags.front().code, msg);
}

std::vector<std::string> model_warnings(const BottModel& model) {
    std::vector<std::string> out;
    for (const CriticalBlock& b : model.blocks) {
        if (b.is_circle()) continue;
        const CMatrix a = model.representation.evaluate(b.alpha);
        const CMatrix c = model.representation.evaluate(b.beta);
        const double comm = max_abs(a * c - c * a);
        if (comm > kCommutatorTolerance) {
            std::ostringstream msg;
            msg << "NonCommutingHolonomy: " << b.id << " has |[rho(alpha), rho(beta)]| = " << comm;
            out.push_back(msg.str());
        }
    }
    return out;
}

std::optional<std::pair<int, std::size_t>> MorseData::locate(std::size_t block, const std::string& label) const {
    for (int k = 0; k < 4; ++k) {
        const auto& c = cells[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j < c.size(); ++j)
            if (c[j].block == block && c[j].label == label) return std::make_pair(k, j);
    }
    return std::nullopt;
}

MorseData expand_morse(const BottModel& model) {
    MorseData out;
    for (std::size_t i = 0; i < model.blocks.size(); ++i) {
        const CriticalBlock& b = model.blocks[i];
        for (const std::string& label : b.labels()) {
            const int k = *b.point_index(label);
            out.cells[static_cast<std::size_t>(k)].push_back(MorsePoint{i, label, k, b.level()});
        }
    }
    return out;
}

}  // namespace torsflow
