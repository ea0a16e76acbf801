#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmfss/cofiber.hpp"

namespace mmfss {

struct ExtensionCycle : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HomotopyGroup {
    int s = 0;
    std::optional<int> w;  // nullopt for the classical group
    LocalGroup group;
    // one line per filtration: "f=1 Z/4: h2"
    std::vector<std::string> pieces;
};

// pi_{s,w} from E_infinity glued along hidden 2 extensions (with their
// tau, g and Delta^8 translates).
HomotopyGroup assemble_homotopy_group(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, int s, int w);
// The tau-inverted group: 2-local pi_s tmf.
HomotopyGroup assemble_classical(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, int s);
// Classical E_infinity by filtration: classes of infinite tau-order only.
std::map<int, LocalGroup> classicalize(const Cofiber& cf, int s);

// 2 * x on homotopy detected by x: the E_infinity multiple, or a hidden 2
// extension when that multiple vanishes.
Detected times_two(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, const Detected& x);

// A class multiplied by M^m (M detected by Delta^8).
struct Periodic {
    Detected cls;
    int m = 0;
};

Periodic q_delta_power(const Cofiber& cf, int k);

struct NuElement {
    int k = 0;
    Periodic detecting;
    int filtration = 0;  // 1, 3, or 0 when nu_k = 0
};

NuElement nu_detect(const Cofiber& cf, int k);

struct NuProduct {
    int j = 0, k = 0;
    long coeff = 0;  // k + 1
    Periodic lhs;    // nu_j nu_k
    Periodic rhs;    // (k+1) nu_{j+k} nu_0
    bool law = false;
};

NuProduct nu_product(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, int j, int k);

struct Identity {
    std::string name;
    bool holds = false;
    std::string detail;
};

// nu_7 = 0, nu_0 D_4 = 2 nu_4, nu_1 nu_5 = 2 nu_0 nu_6, nu_2 nu_4 = 3 nu_0 nu_6,
// nu_4 nu_6 = nu nu_2 M.
std::vector<Identity> nu_identities(const Cofiber& cf, const std::vector<ExtensionRecord>& ext);

std::string str(const Cofiber& cf, const Periodic& p);

}  // namespace mmfss
