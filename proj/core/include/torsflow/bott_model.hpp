#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "torsflow/error.hpp"
#include "torsflow/representation.hpp"

namespace torsflow {

enum class BlockKind { Circle, Torus, Klein };
enum class Extremal { Min, Max };

std::string_view to_string(BlockKind kind);
std::string_view to_string(Extremal extremal);

/// A critical submanifold of the Bott integral.
struct CriticalBlock {
    std::string id;
    BlockKind kind = BlockKind::Circle;
    // circles
    int index = 0;    // u in {0, 1, 2}
    int delta = 1;    // +1 when the outgoing separatrix diagram is orientable
    Word holonomy;
    // tori and Klein bottles
    Extremal extremal = Extremal::Min;
    Word alpha;
    Word beta;
    double critical_value = 0.0;

    bool is_circle() const { return kind == BlockKind::Circle; }
    /// 0 min circle, 1 min torus/Klein, 2 saddle circle, 3 max torus/Klein, 4 max circle.
    int tier() const;
    /// Filtration level 0, 1, 2 of the sublevel set the block belongs to.
    int level() const;
    /// Degree n around which the block's cohomology sits: u for circles,
    /// 1 for minimal and 2 for maximal tori/Klein bottles.
    int degree() const;
    /// Morse labels in order: w, z or p, q, r, s.
    std::vector<std::string> labels() const;
    /// Morse index of a label, nullopt when the label does not belong to the block.
    std::optional<int> point_index(const std::string& label) const;
};

struct Orbit {
    int sign = 1;  // intersection number, +1 or -1
    Word holonomy;
};

/// Gradient orbits running from a point of index k+1 down to a point of index k.
struct GradientConnection {
    std::string from_block, from_label;
    std::string to_block, to_label;
    std::vector<Orbit> orbits;

    std::string name() const { return from_block + "." + from_label + "->" + to_block + "." + to_label; }
};

struct BottModel {
    Representation representation;
    std::vector<CriticalBlock> blocks;
    std::vector<GradientConnection> connections;

    std::optional<std::size_t> find_block(const std::string& id) const;
};

struct Diagnostic {
    ErrorCode code;
    std::string subject;
    std::string message;
};

/// All violations found, in a fixed order; empty when the model is valid.
std::vector<Diagnostic> validate_model(const BottModel& model);

/// Throws an Error carrying the first diagnostic's code and every message.
void require_valid(const BottModel& model);

/// Non-fatal remarks: torus/Klein holonomies that fail to commute.
std::vector<std::string> model_warnings(const BottModel& model);

inline constexpr double kCommutatorTolerance = 1e-9;

struct MorsePoint {
    std::size_t block = 0;  // position in BottModel::blocks
    std::string label;
    int index = 0;
    int level = 0;
};

/// Critical points of the perturbed Morse function grouped by index.
struct MorseData {
    std::array<std::vector<MorsePoint>, 4> cells;

    /// (index, position within cells[index]).
    std::optional<std::pair<int, std::size_t>> locate(std::size_t block, const std::string& label) const;
};

/// Points in block-list order within each index, so C_k follows the block ordering.
MorseData expand_morse(const BottModel& model);

}  // namespace torsflow
