#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmfss/engine.hpp"

namespace mmfss {

struct IsomorphismFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContradictionFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tau^tau * value as a class of the E_infinity page.  zero is set when the
// class vanishes there; value is kept so callers can still print it.
struct Detected {
    SlotKey key{};
    int tau = 0;
    Element value;
    bool zero = true;
};

// Extension kinds: 2, eta, nu.  Returns the detecting classical word.
GeneratorWord extension_operator(const std::string& kind);

struct HiddenExtension {
    std::string kind;
    Detected source, target;
    // route: d_r1(x) = tau^.. g^k b, d_r2(x a) = ...
    Element preimage;
    int r1 = 0, r2 = 0;
    int g_power = 0, tau_shift = 0;
};

struct DeductionReport {
    std::vector<HiddenExtension> extensions;
    std::vector<std::string> diagnostics;  // ambiguous preimages, failed divisions
};

// Coverage of one table row against deduced extensions.
struct RowCheck {
    const ExtensionRecord* row = nullptr;
    bool reproduced = false;
    bool contradicted = false;
    std::string detail;
};

struct ScriptResult {
    bool ok = false;
    std::vector<std::string> steps;
    Detected source, target;
};

// Queries about the E_infinity page and the cofiber of tau.
class Cofiber {
public:
    explicit Cofiber(const SpectralSequence& ss);

    const SpectralSequence& sequence() const { return ss_; }
    const E2Ring& ring() const { return ss_.ring(); }
    const Page& einf() const { return ss_.einf(); }

    // Throws DegreeOutOfRange when the slot lies beyond the computed stems.
    Detected detect(const Element& x, int tau) const;
    Detected detect(const GeneratorWord& w) const;
    bool same(const Detected& a, const Detected& b) const;
    bool same_up_to_unit(const Detected& a, const Detected& b) const;
    Detected add(const Detected& a, const Detected& b) const;
    Detected times(const Detected& x, const Exps& mono, int tau = 0, const LocalInt& c = 1) const;
    // The class z with tau^m * mono * z = y.  Throws IsomorphismFailure when
    // multiplication by tau^m * mono is not injective at z's degree.
    Detected divide(const Detected& y, int m, const Exps& mono) const;
    bool injective(SlotKey src, int depth, int m, const Exps& mono) const;
    std::string str(const Detected& x) const;

    // i: the detecting class, or zero for tau-divisible elements.
    Element inclusion_i(const GeneratorWord& detecting, bool tau_divisible) const;
    // q of a classical class x: detected by -tau^(r-1) y when d_{2r+1}(x) = tau^r y.
    Detected projection_q(const Element& x) const;

    DeductionReport deduce_hidden_extensions(const std::string& kind, int smin, int smax, int gmax = 6) const;
    // Checks table rows (and their g and Delta^8 translates) against deductions.
    std::vector<RowCheck> verify_extension_tables(const std::vector<ExtensionRecord>& rows,
                                                  const std::vector<HiddenExtension>& deduced) const;

private:
    Lattice::Vec as_vec(const Element& x) const;
    const SlotState& state(SlotKey k) const;
    int clamp(int depth) const;

    const SpectralSequence& ss_;
    int depth_max_;
};

// The 110-stem 2 extension, derived through the cofiber of tau^2.
ScriptResult tau_squared_script(const Cofiber& full, const SpectralSequence& truncated,
                                const std::vector<ExtensionRecord>& rows);

}  // namespace mmfss
