#include "mmfss/ssdf.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mmfss {

SsdfError::SsdfError(Kind k, int line_, int column_, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(column_) + ": " + msg),
      kind(k), line(line_), column(column_) {}

std::string order_str(const OrderExp& o) { return o ? "2^" + std::to_string(*o) : "inf"; }

std::strong_ordering EinfRecord::operator<=>(const EinfRecord& o) const {
    auto key = [](const EinfRecord& r) {
        return std::make_tuple(r.s, r.f, !r.box, r.level, r.label.tau, r.label.e, r.label.coeff,
                               r.tau_order.value_or(1 << 20));
    };
    return key(*this) <=> key(o);
}

std::string EinfRecord::line() const {
    return std::to_string(s) + " " + std::to_string(f) + " " + (box ? "box " : "dot ") + label.str() + " " +
           (tau_order ? std::to_string(*tau_order) : "inf") + " " + std::to_string(level);
}

TriDegree extension_kind_degree(const std::string& kind) {
    if (kind == "2") return {0, 0, 0};
    if (kind == "eta") return {1, 1, 1};
    if (kind == "nu") return {3, 1, 2};
    throw std::invalid_argument("unknown extension kind '" + kind + "'");
}

namespace {

struct Token {
    std::string text;
    int column;
    bool quoted;
};

std::vector<Token> tokenize(const std::string& line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char ch = line[i];
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++i;
            continue;
        }
        if (ch == '#') break;
        if (ch == '"') {
            std::size_t j = line.find('"', i + 1);
            if (j == std::string::npos)
                throw SsdfError(SsdfError::Kind::Syntax, lineno, static_cast<int>(i) + 1, "unterminated string");
            out.push_back({line.substr(i + 1, j - i - 1), static_cast<int>(i) + 1, true});
            i = j + 1;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' && line[j] != '#') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1, false});
        i = j;
    }
    return out;
}

struct Cursor {
    const std::vector<Token>& t;
    int lineno;
    std::size_t i = 0;
    int end_col;

    [[noreturn]] void fail(const std::string& expected) const {
        int col = i < t.size() ? t[i].column : end_col;
        std::string got = i < t.size() ? "'" + t[i].text + "'" : "end of line";
        throw SsdfError(SsdfError::Kind::Syntax, lineno, col, "expected " + expected + ", got " + got);
    }
    bool done() const { return i >= t.size(); }
    const Token& next(const std::string& expected) {
        if (done() || t[i].quoted) fail(expected);
        return t[i++];
    }
    int integer(const std::string& what) {
        const Token& tok = next(what);
        try {
            std::size_t pos = 0;
            int v = std::stoi(tok.text, &pos);
            if (pos != tok.text.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            --i;
            fail(what);
        }
    }
    GeneratorWord word(const std::string& what) {
        const Token& tok = next(what);
        try {
            return GeneratorWord::parse(tok.text);
        } catch (const UnknownGenerator& e) {
            throw SsdfError(SsdfError::Kind::UnknownReference, lineno, tok.column, e.what());
        } catch (const std::exception&) {
            --i;
            fail(what);
        }
    }
    OrderExp order() {
        const Token& tok = next("order (2^k or inf)");
        if (tok.text == "inf") return std::nullopt;
        if (tok.text.rfind("2^", 0) == 0) {
            try {
                std::size_t pos = 0;
                int k = std::stoi(tok.text.substr(2), &pos);
                if (pos == tok.text.size() - 2 && k >= 0) return static_cast<unsigned>(k);
            } catch (const std::exception&) {
            }
        }
        --i;
        fail("order (2^k or inf)");
    }
    std::optional<std::string> citation() {
        if (!done() && t[i].quoted) return t[i++].text;
        return std::nullopt;
    }
    void finish() {
        if (!done()) fail("end of line");
    }
};

}  // namespace

void parse_ssdf(std::string_view text, Dataset& d) {
    std::istringstream in{std::string(text)};
    std::string line, section;
    int lineno = 0;
    std::set<std::string> gen_names;
    for (const auto& g : d.generators) gen_names.insert(g.name);
    std::set<GeneratorWord> slot_words;
    for (const auto& s : d.slots) slot_words.insert(s.word);
    std::set<std::pair<std::string, GeneratorWord>> action_keys;
    for (const auto& a : d.actions) action_keys.insert({a.generator, a.source});

    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line, lineno);
        if (toks.empty()) continue;
        if (!toks[0].quoted && toks[0].text.front() == '[') {
            const std::string& h = toks[0].text;
            static const std::set<std::string> known{"generators", "slots", "actions", "words",
                                                     "seed-differentials", "expected-einf", "extensions",
                                                     "correspondence"};
            if (h.back() != ']' || toks.size() != 1 || !known.count(h.substr(1, h.size() - 2)))
                throw SsdfError(SsdfError::Kind::Syntax, lineno, 1, "unknown section header " + h);
            section = h.substr(1, h.size() - 2);
            continue;
        }
        Cursor c{toks, lineno, 0, static_cast<int>(line.size()) + 1};
        if (section.empty()) c.fail("section header");
        if (section == "generators") {
            GeneratorDecl g;
            g.name = c.next("generator name").text;
            g.degree.s = c.integer("stem");
            g.degree.f = c.integer("filtration");
            g.degree.w = c.integer("weight");
            g.order = c.order();
            c.finish();
            g.transcribed = line.find("# transcribed") != std::string::npos;
            if (!generator_index(g.name))
                throw SsdfError(SsdfError::Kind::UnknownReference, lineno, 1, "unknown generator " + g.name);
            if (!gen_names.insert(g.name).second)
                throw SsdfError(SsdfError::Kind::Duplicate, lineno, 1, "generator " + g.name + " defined twice");
            d.generators.push_back(g);
        } else if (section == "slots") {
            SlotDecl s;
            s.s = c.integer("stem");
            s.f = c.integer("filtration");
            s.word = c.word("basis word");
            s.order = c.order();
            c.finish();
            if (!slot_words.insert(s.word).second)
                throw SsdfError(SsdfError::Kind::Duplicate, lineno, toks[2].column, "basis word repeated");
            d.slots.push_back(s);
        } else if (section == "actions") {
            ActionDecl a;
            const Token& g = c.next("generator");
            a.generator = g.text;
            if (!generator_index(a.generator) || a.generator == "tau")
                throw SsdfError(SsdfError::Kind::UnknownReference, lineno, g.column, "unknown operator " + a.generator);
            a.source = c.word("source word");
            if (!slot_words.empty() && !slot_words.count(a.source))
                throw SsdfError(SsdfError::Kind::UnknownReference, lineno, toks[1].column, "source is not a basis word");
            while (!c.done()) {
                std::size_t at = c.i;
                GeneratorWord t = c.word("term");
                if (!slot_words.empty() && !slot_words.count(t.monomial()))
                    throw SsdfError(SsdfError::Kind::UnknownReference, lineno, toks[at].column, "term is not a basis word");
                a.terms.push_back(t);
            }
            if (!action_keys.insert({a.generator, a.source}).second)
                throw SsdfError(SsdfError::Kind::Duplicate, lineno, 1, "action defined twice");
            d.actions.push_back(std::move(a));
        } else if (section == "words") {
            WordDecl w;
            w.lhs = c.word("word");
            const Token& eq = c.next("'='");
            if (eq.text != "=") {
                --c.i;
                c.fail("'='");
            }
            const Token& first = c.next("value");
            if (first.text != "0") {
                --c.i;
                while (!c.done()) w.rhs.push_back(c.word("term"));
            }
            c.finish();
            d.words.push_back(std::move(w));
        } else if (section == "seed-differentials") {
            DifferentialRecord r;
            const Token& t = c.next("page (d<r>)");
            try {
                if (t.text.size() < 2 || t.text[0] != 'd') throw std::invalid_argument("");
                std::size_t pos = 0;
                r.r = std::stoi(t.text.substr(1), &pos);
                if (pos != t.text.size() - 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                --c.i;
                c.fail("page (d<r>)");
            }
            r.source = c.word("source word");
            r.target = c.word("target word");
            r.citation = c.citation().value_or("");
            c.finish();
            for (const auto& o : d.seeds)
                if (o.r == r.r && o.source == r.source)
                    throw SsdfError(SsdfError::Kind::Duplicate, lineno, 1, "seed defined twice");
            d.seeds.push_back(std::move(r));
        } else if (section == "expected-einf") {
            EinfRecord e;
            e.s = c.integer("stem");
            e.f = c.integer("filtration");
            const Token& k = c.next("box or dot");
            if (k.text != "box" && k.text != "dot") {
                --c.i;
                c.fail("box or dot");
            }
            e.box = k.text == "box";
            e.label = c.word("label");
            const Token& to = c.next("tau order");
            if (to.text != "inf") {
                --c.i;
                e.tau_order = c.integer("tau order");
            }
            e.level = c.integer("level");
            c.finish();
            d.expected_einf.push_back(std::move(e));
        } else if (section == "extensions") {
            ExtensionRecord x;
            x.table = c.next("table name").text;
            const Token& k = c.next("kind");
            x.kind = k.text;
            try {
                extension_kind_degree(x.kind);
            } catch (const std::exception&) {
                throw SsdfError(SsdfError::Kind::UnknownReference, lineno, k.column, "unknown extension kind " + x.kind);
            }
            x.source = c.word("source word");
            x.target = c.word("target word");
            const Token& p = c.next("provenance");
            if (p.text == "deduced")
                x.provenance = Provenance::Deduced;
            else if (p.text == "asserted")
                x.provenance = Provenance::Asserted;
            else {
                --c.i;
                c.fail("deduced or asserted");
            }
            x.citation = c.citation().value_or("");
            c.finish();
            d.extensions.push_back(std::move(x));
        } else if (section == "correspondence") {
            CorrespondenceRecord r;
            r.anss = c.word("element");
            r.ass = c.next("Adams element").text;
            r.ass_degree.s = c.integer("stem");
            r.ass_degree.f = c.integer("filtration");
            r.ass_degree.w = c.integer("weight");
            r.citation = c.citation().value_or("");
            c.finish();
            d.correspondence.push_back(std::move(r));
        }
    }
}

Dataset parse_ssdf(std::string_view text) {
    Dataset d;
    parse_ssdf(text, d);
    return d;
}

std::string serialize_ssdf(const Dataset& d) {
    std::ostringstream o;
    o << "[generators]\n";
    for (const auto& g : d.generators) {
        o << g.name << ' ' << g.degree.s << ' ' << g.degree.f << ' ' << g.degree.w << ' ' << order_str(g.order);
        if (g.transcribed) o << "  # transcribed";
        o << '\n';
    }
    o << "\n[slots]\n";
    for (const auto& s : d.slots) o << s.s << ' ' << s.f << ' ' << s.word.str() << ' ' << order_str(s.order) << '\n';
    o << "\n[actions]\n";
    for (const auto& a : d.actions) {
        o << a.generator << ' ' << a.source.str();
        for (const auto& t : a.terms) o << ' ' << t.str();
        o << '\n';
    }
    o << "\n[words]\n";
    for (const auto& w : d.words) {
        o << w.lhs.str() << " =";
        if (w.rhs.empty()) o << " 0";
        for (const auto& t : w.rhs) o << ' ' << t.str();
        o << '\n';
    }
    o << "\n[seed-differentials]\n";
    for (const auto& r : d.seeds)
        o << 'd' << r.r << ' ' << r.source.str() << ' ' << r.target.str() << " \"" << r.citation << "\"\n";
    o << "\n[expected-einf]\n";
    for (const auto& e : d.expected_einf) o << e.line() << '\n';
    o << "\n[extensions]\n";
    for (const auto& x : d.extensions)
        o << x.table << ' ' << x.kind << ' ' << x.source.str() << ' ' << x.target.str() << ' '
          << (x.provenance == Provenance::Deduced ? "deduced" : "asserted") << " \"" << x.citation << "\"\n";
    o << "\n[correspondence]\n";
    for (const auto& c : d.correspondence)
        o << c.anss.str() << ' ' << c.ass << ' ' << c.ass_degree.s << ' ' << c.ass_degree.f << ' ' << c.ass_degree.w
          << " \"" << c.citation << "\"\n";
    return o.str();
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Dataset load_dataset_dir(const std::filesystem::path& dir) {
    Dataset d;
    bool any = false;
    for (const char* name : {"mmf-e2.ssdf", "mmf-seeds.ssdf", "mmf-expected-einf.ssdf", "mmf-extensions.ssdf"}) {
        auto p = dir / name;
        if (!std::filesystem::exists(p)) continue;
        any = true;
        try {
            parse_ssdf(read_file(p), d);
        } catch (const SsdfError& e) {
            throw SsdfError(e.kind, e.line, e.column, p.filename().string() + ": " + e.what());
        }
    }
    if (!any) throw std::runtime_error("no dataset files in " + dir.string());
    return d;
}

}  // namespace mmfss
