#pragma once

#include "gwv/expr/tree.hpp"

#include <string>
#include <vector>

namespace gwv {

enum class Mode { Symbolic, Numeric, Both };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::Symbolic: return "symbolic";
        case Mode::Numeric: return "numeric";
        case Mode::Both: return "both";
    }
    return "?";
}

/// One generator family of the modulus ideal: `name` with covariant
/// derivatives of order min_order..max_order.
struct ModulusEntry {
    std::string name;
    int min_order = 0;
    int max_order = 0;
};

/// lhs = rhs, claimed to hold modulo the algebraic ideal generated by `modulus`.
/// Vector identities compare vector fields componentwise.
struct IdentityStatement {
    std::string name;
    bool vector = false;
    expr::SExpr lhs, rhs;      // scalar identities
    expr::VExpr vlhs, vrhs;    // vector identities
    std::vector<ModulusEntry> modulus;
    Mode mode = Mode::Both;
    std::string note;          // transcription remarks carried into reports

    int max_order(const std::string& gen) const {
        int m = -1;
        for (const auto& e : modulus)
            if (e.name == gen) m = std::max(m, e.max_order);
        return m;
    }
};

}  // namespace gwv
