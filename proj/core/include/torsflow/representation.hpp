#pragma once

#include <map>
#include <string>
#include <vector>

#include "torsflow/linalg.hpp"

namespace torsflow {

/// One letter of a word: generator name raised to a nonzero integer power.
struct Letter {
    std::string generator;
    int power = 1;
};

using Word = std::vector<Letter>;

/// Parse whitespace-separated letters "a", "a^-1", "b^3". The empty string
/// is the identity word.
Word parse_word(const std::string& text);
std::string format_word(const Word& word);

/// Unitary representation of a finitely generated group, given by the
/// images of its generators.
class Representation {
public:
    static constexpr double kUnitaryTolerance = 1e-9;

    Representation() = default;
    /// Throws InvalidInput on a shape mismatch, a non-finite entry, or a
    /// generator that is not unitary within kUnitaryTolerance.
    Representation(Index dim, std::map<std::string, CMatrix> generators);

    /// 1-dimensional representation sending one generator to a unit scalar.
    static Representation character(const std::string& generator, Complex value);
    static Representation trivial(Index dim, const std::vector<std::string>& generators);

    Index dim() const { return dim_; }
    const std::map<std::string, CMatrix>& generators() const { return generators_; }
    bool has(const std::string& name) const { return generators_.count(name) != 0; }

    /// Product of generator powers, left to right. Unknown names throw
    /// UnknownGenerator.
    CMatrix evaluate(const Word& word) const;
    CMatrix evaluate(const std::string& word) const { return evaluate(parse_word(word)); }

    /// Every generator replaced by V g V^H.
    Representation conjugated(const CMatrix& v) const;

private:
    Index dim_ = 1;
    std::map<std::string, CMatrix> generators_;
};

}  // namespace torsflow
