#include "torsflow/representation.hpp"

#include <cctype>
#include <sstream>

#include "torsflow/error.hpp"

namespace torsflow {

namespace {

bool valid_name(const std::string& name) {
    if (name.empty() || std::isdigit(static_cast<unsigned char>(name.front()))) return false;
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

}  // namespace

Word parse_word(const std::string& text) {
    Word out;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        Letter letter;
        const auto caret = token.find('^');
        letter.generator = token.substr(0, caret);
        if (!valid_name(letter.generator)) {
            throw Error(ErrorCode::InvalidInput, "bad generator name in word '" + text + "'");
        }
        if (caret != std::string::npos) {
            const std::string exponent = token.substr(caret + 1);
            std::size_t used = 0;
            try {
                letter.power = std::stoi(exponent, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != exponent.size()) {
                throw Error(ErrorCode::InvalidInput, "bad exponent in word '" + text + "'");
            }
        }
        if (letter.power != 0) out.push_back(letter);
    }
    return out;
}

std::string format_word(const Word& word) {
    std::string out;
    for (const Letter& l : word) {
        if (!out.empty()) out += ' ';
        out += l.generator;
        if (l.power != 1) out += '^' + std::to_string(l.power);
    }
    return out;
}

Representation::Representation(Index dim, std::map<std::string, CMatrix> generators)
    : dim_(dim), generators_(std::move(generators)) {
    if (dim_ <= 0) throw Error(ErrorCode::InvalidInput, "representation dimension must be positive");
    for (const auto& [name, g] : generators_) {
        if (!valid_name(name)) throw Error(ErrorCode::InvalidInput, "bad generator name '" + name + "'");
        if (g.rows() != dim_ || g.cols() != dim_) {
            throw Error(ErrorCode::InvalidInput, "generator '" + name + "' is not " + std::to_string(dim_) +
                                                     "x" + std::to_string(dim_));
        }
        if (!all_finite(g)) throw Error(ErrorCode::InvalidInput, "generator '" + name + "' has a non-finite entry");
        if (unitarity_defect(g) > kUnitaryTolerance) {
            throw Error(ErrorCode::InvalidInput, "generator '" + name + "' is not unitary");
        }
    }
}

Representation Representation::character(const std::string& generator, Complex value) {
    return Representation(1, {{generator, CMatrix::Constant(1, 1, value)}});
}

Representation Representation::trivial(Index dim, const std::vector<std::string>& generators) {
    std::map<std::string, CMatrix> g;
    for (const auto& name : generators) g[name] = CMatrix::Identity(dim, dim);
    return Representation(dim, std::move(g));
}

CMatrix Representation::evaluate(const Word& word) const {
    CMatrix out = CMatrix::Identity(dim_, dim_);
    for (const Letter& l : word) {
        const auto it = generators_.find(l.generator);
        if (it == generators_.end()) {
            throw Error(ErrorCode::UnknownGenerator, "unknown generator '" + l.generator + "'");
        }
        // Unitary, so the inverse is the adjoint.
        const CMatrix step = l.power > 0 ? it->second : CMatrix(it->second.adjoint());
        for (int k = 0; k < std::abs(l.power); ++k) out = out * step;
    }
    return out;
}

Representation Representation::conjugated(const CMatrix& v) const {
    std::map<std::string, CMatrix> g;
    for (const auto& [name, m] : generators_) g[name] = v * m * v.adjoint();
    return Representation(dim_, std::move(g));
}

}  // namespace torsflow
