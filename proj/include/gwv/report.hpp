#pragma once

#include "gwv/identity.hpp"
#include "gwv/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gwv {

enum class Outcome { Pass, Fail, Error };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Pass: return "PASS";
        case Outcome::Fail: return "FAIL";
        case Outcome::Error: return "ERROR";
    }
    return "?";
}

/// Result of one verification run (symbolic or numeric).
struct Report {
    std::string identity;
    std::string mode;      // symbolic | numeric
    Outcome outcome = Outcome::Error;
    std::string path;      // syntactic-zero | certificate | numeric | none
    std::size_t certificate_entries = 0;
    std::size_t residual_terms = 0;
    std::string residual;  // verbatim residual or first nonzero value
    std::vector<Rational> trials;
    std::optional<std::uint64_t> seed;
    double elapsed_ms = 0;
    std::map<std::string, std::string> engine_config;
    std::vector<std::string> notes;
    std::string error;

    bool passed() const { return outcome == Outcome::Pass; }
};

}  // namespace gwv
