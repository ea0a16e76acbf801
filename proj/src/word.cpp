#include "mmfss/word.hpp"

#include <charconv>

namespace mmfss {

const std::array<GeneratorInfo, kNumGens + 1> kGenerators{{
    {"tau", {0, 0, -1}, 0},
    {"h1", {1, 1, 1}, 1},
    {"h2", {3, 1, 2}, 2},
    {"h1v1sq", {5, 1, 3}, 1},
    {"P", {8, 0, 4}, 0},
    {"c", {8, 2, 5}, 1},
    {"4a", {12, 0, 6}, 0},
    {"d", {14, 2, 8}, 1},
    {"g", {20, 4, 12}, 3},
    {"Delta", {24, 0, 12}, 0},
}};

std::string TriDegree::str() const {
    return "(" + std::to_string(s) + "," + std::to_string(f) + "," + std::to_string(w) + ")";
}

std::optional<int> generator_index(std::string_view name) {
    for (std::size_t i = 0; i < kGenerators.size(); ++i)
        if (kGenerators[i].name == name) return static_cast<int>(i) - 1;
    return std::nullopt;
}

namespace {

long parse_long(std::string_view t) {
    long v = 0;
    const char* b = t.data();
    if (!t.empty() && t[0] == '+') ++b;
    auto [p, ec] = std::from_chars(b, t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw std::invalid_argument("bad integer '" + std::string(t) + "'");
    return v;
}

}  // namespace

GeneratorWord GeneratorWord::parse(std::string_view text) {
    GeneratorWord w;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
        std::size_t star = text.find('*', pos);
        std::string_view part = text.substr(pos, star == std::string_view::npos ? std::string_view::npos : star - pos);
        if (part.empty()) throw std::invalid_argument("empty factor in word '" + std::string(text) + "'");
        if (first) {
            w.coeff = parse_long(part);
            first = false;
        } else {
            std::size_t caret = part.find('^');
            if (caret == std::string_view::npos)
                throw std::invalid_argument("factor '" + std::string(part) + "' lacks an exponent");
            std::string_view name = part.substr(0, caret);
            long e = parse_long(part.substr(caret + 1));
            if (e < 0) throw std::invalid_argument("negative exponent in '" + std::string(text) + "'");
            auto gi = generator_index(name);
            if (!gi) throw UnknownGenerator("unknown generator '" + std::string(name) + "'");
            if (*gi < 0)
                w.tau += static_cast<int>(e);
            else
                w.e[*gi] += static_cast<int>(e);
        }
        if (star == std::string_view::npos) break;
        pos = star + 1;
    }
    return w;
}

std::string GeneratorWord::str() const {
    std::string out = std::to_string(coeff);
    if (tau) out += "*tau^" + std::to_string(tau);
    for (std::size_t i = 0; i < kNumGens; ++i)
        if (e[i]) out += "*" + std::string(kGenerators[i + 1].name) + "^" + std::to_string(e[i]);
    return out;
}

std::string GeneratorWord::pretty() const {
    std::string out;
    if (coeff != 1 || (tau == 0 && is_unit_word())) out += std::to_string(coeff);
    auto add = [&](std::string_view n, int k) {
        if (!k) return;
        out += n;
        if (k > 1) out += "^" + std::to_string(k);
    };
    add("tau", tau);
    // conventional display order: Delta, then the rest
    add("Delta", e[DELTA]);
    for (int i : {H1, H2, H1V1SQ, P, A4, C, D, G}) add(kGenerators[i + 1].name, e[i]);
    return out;
}

bool GeneratorWord::is_unit_word() const {
    for (int x : e)
        if (x) return false;
    return true;
}

GeneratorWord GeneratorWord::monomial() const {
    GeneratorWord m = *this;
    m.coeff = 1;
    return m;
}

GeneratorWord GeneratorWord::times(const GeneratorWord& o) const {
    GeneratorWord r;
    r.coeff = coeff * o.coeff;
    r.tau = tau + o.tau;
    for (std::size_t i = 0; i < kNumGens; ++i) r.e[i] = e[i] + o.e[i];
    return r;
}

TriDegree degree_of_exps(const Exps& e) {
    TriDegree d;
    for (std::size_t i = 0; i < kNumGens; ++i) {
        const TriDegree& g = kGenerators[i + 1].degree;
        d.s += g.s * e[i];
        d.f += g.f * e[i];
        d.w += g.w * e[i];
    }
    return d;
}

TriDegree degree_of_word(const GeneratorWord& w) {
    TriDegree d = degree_of_exps(w.e);
    d.w -= w.tau;
    return d;
}

bool is_v1_periodic(const GeneratorWord& w) {
    for (int i : {H2, H1V1SQ, C, D, G})
        if (w.e[i]) return false;
    if (w.e[A4] > 1) return false;
    return w.e[P] + w.e[A4] > 0;
}

}  // namespace mmfss
