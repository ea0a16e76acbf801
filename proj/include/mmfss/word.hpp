#pragma once

#include <array>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mmfss {

struct TriDegree {
    int s = 0, f = 0, w = 0;
    auto operator<=>(const TriDegree&) const = default;
    TriDegree operator+(const TriDegree& o) const { return {s + o.s, f + o.f, w + o.w}; }
    TriDegree operator-(const TriDegree& o) const { return {s - o.s, f - o.f, w - o.w}; }
    std::string str() const;
};

// The nine generators besides tau, in dataset order.
inline constexpr std::size_t kNumGens = 9;
enum Gen : int { H1, H2, H1V1SQ, P, C, A4, D, G, DELTA };

struct GeneratorInfo {
    std::string_view name;
    TriDegree degree;
    unsigned order_exp;  // log2 of the additive order; 0 = infinite
};

// tau is listed first, then the nine generators in Gen order.
extern const std::array<GeneratorInfo, kNumGens + 1> kGenerators;
inline constexpr TriDegree kTauDegree{0, 0, -1};

std::optional<int> generator_index(std::string_view name);  // -1 for tau

using Exps = std::array<int, kNumGens>;

struct UnknownGenerator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// coefficient * tau^t * prod gen^e
struct GeneratorWord {
    long coeff = 1;
    int tau = 0;
    Exps e{};

    bool operator==(const GeneratorWord&) const = default;
    auto operator<=>(const GeneratorWord&) const = default;

    static GeneratorWord parse(std::string_view text);  // throws UnknownGenerator / std::invalid_argument
    std::string str() const;     // canonical SSDF form
    std::string pretty() const;  // e.g. 2tau^2Delta^3h2
    bool is_unit_word() const;
    GeneratorWord monomial() const;  // coefficient 1, same tau and exponents
    GeneratorWord times(const GeneratorWord& o) const;
};

TriDegree degree_of_word(const GeneratorWord& w);
TriDegree degree_of_exps(const Exps& e);
bool is_v1_periodic(const GeneratorWord& w);

// Leibniz/commutation sign for classes in stems s1 and s2.
inline int koszul_sign(int s1, int s2) { return ((s1 & 1) && (s2 & 1)) ? -1 : 1; }

}  // namespace mmfss
