#pragma once

#include "tracelab/error.hpp"
#include "tracelab/model.hpp"
#include "tracelab/semantics.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tracelab {

inline constexpr int kFormatVersion = 1;

/// A syntactically correct document describing an invalid model.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Parses and validates a model document. `kind: "mc"` additionally requires
/// one move per state. Throws ParseError or ValidationError.
Mdp parse_model(std::string_view text);
/// Canonical form: labels and states in declaration order (their order
/// defines the indices), object keys sorted, move entries sorted by
/// (label index, target index), zero initial weights omitted, LF endings.
std::string serialize_model(const Mdp& m);

Mdp load_model(const std::string& path);
void save_model(const std::string& path, const Mdp& m);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

using StrategyDocument = std::variant<MemorylessStrategy, FiniteMemoryStrategy>;

/// `kind` is "memoryless" or "finite-memory"; move references are resolved
/// and every distribution checked against `m`.
StrategyDocument parse_strategy(std::string_view text, const Mdp& m);
std::string serialize_strategy(const Mdp& m, const MemorylessStrategy& alpha);

/// Non-bisimilarity certificate: b_0 = 1 and, for j = 1..k-1,
/// b_j = Delta_{strategies[j-1]}(labels[j-1]) b_{back_refs[j-1]}.
/// The vectors live over the states of a disjoint union.
struct Certificate {
    std::size_t k = 1;
    std::vector<std::size_t> back_refs;
    std::vector<LabelId> labels;
    std::vector<std::vector<std::size_t>> strategies;

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Strategies are objects mapping union state names to move indices; states
/// with a single move may be omitted.
Certificate parse_certificate(std::string_view text, const Mdp& union_model);
std::string serialize_certificate(const Certificate& c, const Mdp& union_model);

/// JSON helpers shared with the CLI.
nlohmann::json rational_json(const Rational& r);
nlohmann::json subdist_json(const Mdp& m, const SubDist& d);
nlohmann::json word_json(const Mdp& m, const Word& w);
nlohmann::json strategy_json(const Mdp& m, const MemorylessStrategy& alpha);

} // namespace tracelab
