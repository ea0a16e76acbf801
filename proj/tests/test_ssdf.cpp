#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "mmfss/ssdf.hpp"

using namespace mmfss;

namespace {

const Dataset& shipped() {
    static const Dataset d = load_dataset_dir(MMFSS_DATA_DIR);
    return d;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::size_t count_kind(const std::vector<Violation>& v, const std::string& kind) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; }));
}

}  // namespace

TEST_CASE("generator words: parse and print") {
    GeneratorWord w = GeneratorWord::parse("2*tau^3*h2^1*Delta^2");
    CHECK(w.coeff == 2);
    CHECK(w.tau == 3);
    CHECK(w.e[H2] == 1);
    CHECK(w.e[DELTA] == 2);
    CHECK(w.str() == "2*tau^3*h2^1*Delta^2");
    CHECK(w.pretty() == "2tau^3Delta^2h2");
    CHECK(degree_of_word(w) == TriDegree{51, 1, 23});
    CHECK(GeneratorWord::parse("1").is_unit_word());
    CHECK_THROWS_AS(GeneratorWord::parse("1*h7^1"), UnknownGenerator);
}

TEST_CASE("generator words: random round-trip") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> ex(0, 3), tau(0, 11);
    std::uniform_int_distribution<long> co(-64, 64);
    for (int n = 0; n < 5000; ++n) {
        GeneratorWord w;
        w.coeff = co(rng);
        if (w.coeff == 0) w.coeff = 1;
        w.tau = tau(rng);
        for (auto& e : w.e) e = ex(rng) * (ex(rng) == 0);
        REQUIRE(GeneratorWord::parse(w.str()) == w);
    }
}

TEST_CASE("v1-periodic family") {
    CHECK(is_v1_periodic(GeneratorWord::parse("1*h1^3*P^1")));
    CHECK_FALSE(is_v1_periodic(GeneratorWord::parse("1*Delta^2")));
    CHECK_FALSE(is_v1_periodic(GeneratorWord::parse("1*g^1")));
    CHECK(is_v1_periodic(GeneratorWord::parse("1*tau^2*4a^1*Delta^1")));
    CHECK_FALSE(is_v1_periodic(GeneratorWord::parse("1*4a^2")));
    CHECK_FALSE(is_v1_periodic(GeneratorWord::parse("1*h2^1*P^1")));
}

TEST_CASE("generator lines") {
    Dataset d = parse_ssdf("[generators]\ntau 0 0 -1 inf\nh1 1 1 1 2^1\nDelta 24 0 12 inf\n");
    REQUIRE(d.generators.size() == 3);
    CHECK(d.generators[1].name == "h1");
    CHECK(d.generators[1].degree == TriDegree{1, 1, 1});
    CHECK(d.generators[1].order == OrderExp{1});
    CHECK_FALSE(d.generators[2].order.has_value());
}

TEST_CASE("diagnostics carry positions") {
    try {
        parse_ssdf("# header\n[generators]\nh1 1 1\n");
        FAIL("expected a syntax error");
    } catch (const SsdfError& e) {
        CHECK(e.kind == SsdfError::Kind::Syntax);
        CHECK(e.line == 3);
    }
    try {
        parse_ssdf("[generators]\nh1 1 1 1 2^1\nh1 1 1 1 2^1\n");
        FAIL("expected a duplicate");
    } catch (const SsdfError& e) {
        CHECK(e.kind == SsdfError::Kind::Duplicate);
        CHECK(e.line == 3);
    }
    try {
        parse_ssdf("[seed-differentials]\nd3 1*h9^1 1*tau^1*h1^4 \"x\"\n");
        FAIL("expected an unknown reference");
    } catch (const SsdfError& e) {
        CHECK(e.kind == SsdfError::Kind::UnknownReference);
        CHECK(e.line == 2);
        CHECK(e.column == 4);
    }
    CHECK_THROWS_AS(parse_ssdf("[nonsense]\n"), SsdfError);
}

TEST_CASE("empty dataset serializes to empty sections") {
    std::string text = serialize_ssdf(Dataset{});
    for (const char* s : {"[generators]", "[slots]", "[actions]", "[words]", "[seed-differentials]",
                          "[expected-einf]", "[extensions]", "[correspondence]"})
        CHECK(text.find(s) != std::string::npos);
    CHECK(parse_ssdf(text) == Dataset{});
}

TEST_CASE("shipped dataset round-trips") {
    const Dataset& d = shipped();
    CHECK(d.seeds.size() == 21);
    CHECK(d.generators.size() == 10);
    std::string once = serialize_ssdf(d);
    Dataset back = parse_ssdf(once);
    CHECK(back == d);
    CHECK(serialize_ssdf(back) == once);
}

TEST_CASE("one changed differential is one changed line") {
    Dataset d = shipped();
    auto a = lines(serialize_ssdf(d));
    d.seeds[3].citation = "changed";
    auto b = lines(serialize_ssdf(d));
    REQUIRE(a.size() == b.size());
    int diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
    CHECK(diff == 1);
}

TEST_CASE("validation") {
    const Dataset& d = shipped();
    auto v = validate_dataset(d);
    for (const auto& x : v) INFO(x.kind << ": " << x.message);
    CHECK(v.empty());

    SUBCASE("d3 target at the wrong filtration") {
        Dataset bad = d;
        bad.seeds[0].target = GeneratorWord::parse("1*tau^1*h1^3");
        auto w = validate_dataset(bad);
        CHECK(w.size() == 1);
        CHECK(count_kind(w, "DegreeViolation") == 1);
    }
    SUBCASE("h1 c and h2^3 disagree") {
        Dataset bad = d;
        for (auto& w : bad.words)
            if (w.lhs == GeneratorWord::parse("1*h1^1*c^1")) w.rhs.clear();
        CHECK(count_kind(validate_dataset(bad), "WordConsistencyViolation") == 1);
    }
}
