#pragma once

#include "fssecm/twoport.h"

namespace fssecm {

// Unit cell of the first-order surface, SI units. `w` is the JC hat length,
// `s` the JC slot width, `s1` the cross-slot width on the bandpass layer and
// `g` the gap between adjacent JC elements.
struct first_order_geometry {
    double a = 0.0;
    double w = 0.0;
    double s = 0.0;
    double s1 = 0.0;
    double g = 0.0;
    double h = 0.0;
    double eps_r = 1.0;
    double tan_delta = 0.0;
    double mu_reff = 1.0;
};

// Throws invalid_geometry naming the first violated constraint.
void validate(const first_order_geometry& geom);

struct extracted_circuit {
    double l_s = 0.0;
    double c_s = 0.0;
    double l_p = 0.0;
    double c_p = 0.0;
    double l_par = 0.0;   // parasitic inductance; 0 when ignored
};

void validate(const extracted_circuit& circuit);

struct resonance_prediction {
    double f0 = 0.0;   // transmission zero
    double f_u = 0.0;
    double f_l = 0.0;
};

struct pole_pair {
    double lower = 0.0;
    double upper = 0.0;
};

double effective_permittivity(double eps_r);

// ln(csc(x)), the grid-reactance kernel shared by all four extraction formulas.
double log_csc(double x);

// Closed-form lumped values of the two layers. l_par is left at 0.
extracted_circuit extract_circuit(const first_order_geometry& geom);

// Surface impedance of the tank (L_p, C_p) in parallel with the notch
// (L_s, C_s). Returns the open marker exactly on a pole.
impedance surface_impedance(const extracted_circuit& circuit, double frequency);

resonance_prediction predict_resonances(const extracted_circuit& circuit);

// Positive roots of the surface-impedance denominator, ascending.
pole_pair exact_poles(const extracted_circuit& circuit);

} // namespace fssecm
