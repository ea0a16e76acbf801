#pragma once

#include <compare>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmfss/word.hpp"

namespace mmfss {

struct SsdfError : std::runtime_error {
    enum class Kind { Syntax, Duplicate, UnknownReference };
    SsdfError(Kind k, int line, int column, const std::string& msg);
    Kind kind;
    int line, column;
};

// log2 of an additive order; nullopt means infinite.
using OrderExp = std::optional<unsigned>;
std::string order_str(const OrderExp& o);

struct GeneratorDecl {
    std::string name;
    TriDegree degree;
    OrderExp order;
    bool transcribed = false;
    bool operator==(const GeneratorDecl&) const = default;
};

struct SlotDecl {
    int s = 0, f = 0;
    GeneratorWord word;
    OrderExp order;
    bool operator==(const SlotDecl&) const = default;
};

struct ActionDecl {
    std::string generator;
    GeneratorWord source;
    std::vector<GeneratorWord> terms;
    bool operator==(const ActionDecl&) const = default;
};

struct WordDecl {
    GeneratorWord lhs;
    std::vector<GeneratorWord> rhs;  // empty = 0
    bool operator==(const WordDecl&) const = default;
};

struct DifferentialRecord {
    int r = 3;
    GeneratorWord source, target;
    std::string citation;
    bool operator==(const DifferentialRecord&) const = default;
};

struct EinfRecord {
    int s = 0, f = 0;
    bool box = false;
    GeneratorWord label;
    std::optional<int> tau_order;  // nullopt = infinite
    int level = 0;                 // position in the 2-divisibility chain
    bool operator==(const EinfRecord&) const = default;
    std::strong_ordering operator<=>(const EinfRecord& o) const;
    std::string line() const;
};

enum class Provenance { Deduced, Asserted };

struct ExtensionRecord {
    std::string kind;  // "2", "eta", "nu", or a named element
    GeneratorWord source, target;
    Provenance provenance = Provenance::Asserted;
    std::string table;  // hidh0 / hidh1 / hidh2 / hidtaumethod
    std::string citation;
    bool operator==(const ExtensionRecord&) const = default;
};

struct CorrespondenceRecord {
    GeneratorWord anss;
    std::string ass;
    TriDegree ass_degree;
    std::string citation;
    bool operator==(const CorrespondenceRecord&) const = default;
};

struct Dataset {
    std::vector<GeneratorDecl> generators;
    std::vector<SlotDecl> slots;
    std::vector<ActionDecl> actions;
    std::vector<WordDecl> words;
    std::vector<DifferentialRecord> seeds;
    std::vector<EinfRecord> expected_einf;
    std::vector<ExtensionRecord> extensions;
    std::vector<CorrespondenceRecord> correspondence;
    bool operator==(const Dataset&) const = default;
};

// Parses one document into `into` (several files may be merged).
void parse_ssdf(std::string_view text, Dataset& into);
Dataset parse_ssdf(std::string_view text);
std::string serialize_ssdf(const Dataset& d);

// Loads every shipped file present in dir.
Dataset load_dataset_dir(const std::filesystem::path& dir);
std::string read_file(const std::filesystem::path& p);

TriDegree extension_kind_degree(const std::string& kind);

struct Violation {
    std::string kind;  // DegreeViolation, WordConsistencyViolation, ...
    std::string message;
};

// Static checks (a)-(d); the seed indecomposability check (e) needs a
// differential run and lives in engine.hpp.
std::vector<Violation> validate_dataset(const Dataset& d);

}  // namespace mmfss
