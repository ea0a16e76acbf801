#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmfss/linalg.hpp"
#include "mmfss/ring.hpp"
#include "mmfss/ssdf.hpp"

namespace mmfss {

struct InconsistentDifferential : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonMonomialCycle : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WindowViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnexpectedSurvivor : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnresolvedSeed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EngineOptions {
    int window = 16;    // depth window below the top weight
    int truncate = 0;   // n > 0 computes the mod tau^n sequence
    int smax = 191;
    int last_page = 23;
    bool verify_splits = false;  // compare every Leibniz factorization
};

using LatticePtr = std::shared_ptr<const Lattice>;

// Z^d / B^d is the group in weight top - d.  tau maps depth d to d + 1.
struct SlotState {
    std::vector<LatticePtr> Z, B;
};

class Page {
public:
    int r = 2;  // E_r; even pages are stored under the next odd index
    int window = 16;
    int truncate = 0;
    const E2Ring* ring = nullptr;
    std::map<SlotKey, SlotState> slots;

    const SlotState* state(SlotKey k) const;
    // Depth index used for weight w, or nullopt if the group is zero there.
    std::optional<int> depth_for(SlotKey k, int w) const;
    LocalGroup group(int s, int f, int w) const;
    Subquotient subquotient_at(SlotKey k, int depth) const;
    bool stable_below(SlotKey k) const;
    // Is tau^depth * x a cycle / a boundary on this page?
    bool is_cycle(const Element& x, int depth) const;
    bool is_boundary(const Element& x, int depth) const;
    // Least n with tau^(depth+n) x a boundary; nullopt if never within the window.
    std::optional<int> tau_order(const Element& x, int depth) const;
};

enum class DiffSource { Zero, Seed, Leibniz, Power };
const char* to_string(DiffSource s);

struct LabelDiff {
    int a = -1;  // the label is 2^a e_i; -1 when no multiple of e_i is a cycle
    Element value;
    DiffSource source = DiffSource::Zero;
    int seed = -1;
};

struct LayerEntry {
    SlotKey src, tgt;
    std::vector<LabelDiff> labels;
    LatticePtr target_boundaries;  // B^window(tgt) before the turn
    // d_r of an element of Z^window(src); classical target coordinates.
    Element apply(const E2Ring& ring, const Lattice::Vec& z) const;
    // Nonzero values, reduced modulo the target boundaries.
    std::vector<std::pair<int, Element>> reduced_values(const E2Ring& ring) const;
};

struct DifferentialLayer {
    int r = 3;
    std::map<SlotKey, LayerEntry> entries;
    const LayerEntry* entry(SlotKey src) const;
};

// One differential as displayed: d_r(label) = tau^k * target.
struct DifferentialFact {
    int r;
    SlotKey src;
    GeneratorWord source;  // coefficient 2^a, tau 0
    Element target;
    DiffSource provenance;
    int seed;
};

class SpectralSequence {
public:
    SpectralSequence(const E2Ring& ring, const std::vector<DifferentialRecord>& seeds, EngineOptions opt = {});

    void run();
    const EngineOptions& options() const { return opt_; }
    const E2Ring& ring() const { return ring_; }
    const std::vector<Page>& pages() const { return pages_; }
    // E_r for any r >= 2.
    const Page& page_at(int r) const;
    const Page& einf() const { return pages_.back(); }
    const std::map<int, DifferentialLayer>& layers() const { return layers_; }
    const std::vector<std::string>& flags() const { return flags_; }
    std::size_t dd_checks() const { return dd_checks_; }

    // All nonzero differentials, one per label, modulo earlier boundaries.
    std::vector<DifferentialFact> differentials() const;
    // Seeds whose source was resolved through another rule (should be empty).
    std::vector<int> decomposable_seeds() const;
    std::vector<int> unused_seeds() const;

    // E_infinity glyph decomposition for stems <= smax and filtrations <= fmax.
    std::vector<EinfRecord> classes(const Page& p, int smax, int fmax) const;

    // First page r on which tau^depth x supports a nonzero differential,
    // with d_r(tau^depth x) = tau^(depth+k) y; nullopt for permanent cycles.
    struct FirstDiff {
        int r;
        Element y;
    };
    std::optional<FirstDiff> first_differential(const Element& x, int depth = 0) const;
    // d_r(tau^depth x) for x a tau^depth-cycle on E_r; returns y with value tau^(depth+k) y.
    Element d(int r, const Element& x) const;

private:
    struct Seed {
        int r;
        SlotKey key;
        int index;
        LocalInt coeff;
        Element target;
        int tau;
        bool pure_delta;
        int delta_power;
    };
    struct Memo {
        bool busy = false;
        bool done = false;
        Element value;
        DiffSource source = DiffSource::Zero;
        int seed = -1;
    };

    void turn(int r);
    std::vector<int> labels(SlotKey key, const Lattice& z) const;
    int min_coeff(const Lattice& z, std::size_t n, int i) const;
    std::optional<int> min_depth(SlotKey key, const Lattice::Vec& v) const;
    const Memo& diff_label(SlotKey key, int i, int a);
    std::optional<Element> split_value(SlotKey key, int i, int a, const Exps& e1, int sign_mode, bool* valid);
    bool same_in_target(const Element& a, const Element& b, SlotKey tkey) const;
    void check_window(int r) const;

    const E2Ring& ring_;
    EngineOptions opt_;
    int depth_max_;
    std::vector<Seed> seeds_;
    std::vector<Page> pages_;
    std::map<int, DifferentialLayer> layers_;
    std::vector<std::string> flags_;
    std::size_t dd_checks_ = 0;
    // per-page working state
    int cur_r_ = 0, cur_k_ = 0;
    Page* cur_ = nullptr;
    std::map<std::tuple<int, int, int, int>, Memo> memo_;
    std::map<SlotKey, std::vector<int>> label_cache_;
};

}  // namespace mmfss
