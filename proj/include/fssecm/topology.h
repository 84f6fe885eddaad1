#pragma once

#include "fssecm/extraction.h"
#include "fssecm/lumped.h"
#include "fssecm/twoport.h"

#include <variant>
#include <vector>

namespace fssecm {

enum class polarization { te, tm };

struct incidence {
    double theta = 0.0;   // radians, [0, pi/2)
    polarization pol = polarization::te;
};

struct substrate {
    double h = 0.0;
    double eps_r = 1.0;
    double tan_delta = 0.0;
};

void validate(const incidence& inc);
void validate(const substrate& sub);

// Port and line parameters seen by one polarization at one frequency.
struct media {
    double port_z = 0.0;
    complex line_z;
    complex theta_d;   // electrical length of the substrate section
};

// With `lossy` the substrate permittivity becomes eps_r (1 - j tan_delta).
media incidence_media(const incidence& inc, const substrate& sub, double frequency,
                      bool lossy = false);

struct shunt_node {
    lumped_branch branch;
    friend bool operator==(const shunt_node&, const shunt_node&) = default;
};

struct line_section {
    substrate sub;
};

using stack_layer = std::variant<shunt_node, line_section>;

struct fss_stack {
    std::vector<stack_layer> layers;
    incidence inc;
    bool lossy = false;

    std::size_t shunt_count() const;
};

// Throws invalid_input when the layer sequence does not alternate shunt/line
// starting and ending with a shunt node.
void validate(const fss_stack& stack);

// Tank (L_p, C_p) / substrate line / notch (L_s, C_s) with the parasitic
// inductor in parallel with the notch when l_par > 0.
fss_stack build_first_order(const extracted_circuit& circuit, const substrate& sub,
                            const incidence& inc, bool lossy = false);

// One outer layer of the second-order stack: two series-LC branches sharing a
// shunt node.
struct outer_layer {
    double l_a = 0.0;
    double c_a = 0.0;
    double l_b = 0.0;
    double c_b = 0.0;

    friend bool operator==(const outer_layer&, const outer_layer&) = default;
};

struct second_order_circuit {
    outer_layer outer;
    double l_p = 0.0;   // middle tank
    double c_p = 0.0;
};

// Outer / line / tank / line / outer. The two outer layers must match.
fss_stack build_second_order(const outer_layer& top, const outer_layer& bottom, double l_p,
                             double c_p, const substrate& sub, const incidence& inc,
                             bool lossy = false);
fss_stack build_second_order(const second_order_circuit& circuit, const substrate& sub,
                             const incidence& inc, bool lossy = false);

// Reference impedance of both (free-space) ports for this stack's incidence.
double port_impedance(const fss_stack& stack);

two_port network(const fss_stack& stack, double frequency);
s_params evaluate(const fss_stack& stack, double frequency);
full_s_params evaluate_full(const fss_stack& stack, double frequency);

// Frequencies where some shunt node holds a lossless series-LC branch at
// resonance; S21 vanishes there exactly. Sorted, duplicates removed.
std::vector<double> transmission_zeros(const fss_stack& stack);

} // namespace fssecm
