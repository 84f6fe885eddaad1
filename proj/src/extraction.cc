#include "fssecm/extraction.h"

#include "fssecm/constants.h"
#include "fssecm/errors.h"

#include <cmath>
#include <sstream>

namespace fssecm {

namespace {

using constants::pi;

[[noreturn]] void bad_geometry(const std::string& what) {
    throw fss_error(error_category::invalid_geometry, what);
}

double frequency_of(double lc) { return 1.0 / (2.0 * pi * std::sqrt(lc)); }

} // namespace

void validate(const first_order_geometry& geom) {
    if (!(geom.a > 0.0)) bad_geometry("period a must be positive");
    if (!(geom.s > 0.0 && geom.s < geom.a)) bad_geometry("slot width s must lie in (0, a)");
    if (!(geom.g > 0.0 && geom.g < geom.a)) bad_geometry("gap g must lie in (0, a)");
    if (!(geom.s1 > 0.0 && geom.s1 < geom.a - geom.g - geom.s1)) {
        bad_geometry("cross-slot width s1 must lie in (0, a - g - s1)");
    }
    if (!(geom.w > 0.0 && geom.w < geom.a)) bad_geometry("hat length w must lie in (0, a)");
    if (!(geom.h > 0.0)) bad_geometry("substrate thickness h must be positive");
    if (!(geom.eps_r >= 1.0)) bad_geometry("relative permittivity must be >= 1");
    if (!(geom.tan_delta >= 0.0)) bad_geometry("loss tangent must be non-negative");
    if (!(geom.mu_reff > 0.0)) bad_geometry("effective permeability must be positive");
}

void validate(const extracted_circuit& circuit) {
    if (!(circuit.l_s > 0.0 && circuit.c_s > 0.0 && circuit.l_p > 0.0 && circuit.c_p > 0.0)) {
        throw fss_error(error_category::invalid_parameter,
                        "L_s, C_s, L_p and C_p must be strictly positive");
    }
    if (!(circuit.l_par >= 0.0)) {
        throw fss_error(error_category::invalid_parameter,
                        "parasitic inductance must be non-negative");
    }
}

double effective_permittivity(double eps_r) { return (eps_r + 1.0) / 2.0; }

double log_csc(double x) {
    if (!(x > 0.0 && x < pi)) {
        std::ostringstream os;
        os << "csc argument " << x << " outside (0, pi)";
        bad_geometry(os.str());
    }
    return -std::log(std::sin(x));
}

extracted_circuit extract_circuit(const first_order_geometry& geom) {
    validate(geom);
    const double eps_eff = effective_permittivity(geom.eps_r);
    const double mu = constants::mu0 * geom.mu_reff;
    const double eps = constants::eps0 * eps_eff;
    const double a = geom.a;
    // The bandpass-layer aperture (a - g - s1) sets both the C_p prefactor and
    // the csc argument, which carries no factor 2.
    const double aperture = a - geom.g - geom.s1;

    extracted_circuit c;
    c.l_s = a / (2.0 * pi) * mu * log_csc(pi * geom.s / (2.0 * a));
    c.c_s = 2.0 * geom.w / pi * eps * log_csc(pi * geom.g / (2.0 * a));
    c.l_p = a / (2.0 * pi) * mu * log_csc(pi * geom.g / (2.0 * a));
    c.c_p = aperture / pi * eps * log_csc(pi * geom.s1 / aperture);
    if (!(c.c_p > 0.0)) {
        bad_geometry("s1 places the C_p kernel at its zero (s1 = aperture / 2)");
    }
    return c;
}

impedance surface_impedance(const extracted_circuit& circuit, double frequency) {
    if (!(frequency > 0.0)) {
        throw fss_error(error_category::invalid_parameter, "frequency must be positive");
    }
    const double w = 2.0 * pi * frequency;
    const double w2 = w * w;
    const double lpcp = circuit.l_p * circuit.c_p;
    const double lscs = circuit.l_s * circuit.c_s;
    const double lpcs = circuit.l_p * circuit.c_s;
    const double den = 1.0 - w2 * (lpcp + lscs + lpcs) + w2 * w2 * lpcp * lscs;
    if (den == 0.0) {
        return impedance::open();
    }
    const complex num{0.0, w * circuit.l_p * (1.0 - w2 * lscs)};
    return impedance{num / den};
}

resonance_prediction predict_resonances(const extracted_circuit& circuit) {
    resonance_prediction p;
    p.f0 = frequency_of(circuit.l_s * circuit.c_s);
    p.f_u = frequency_of(circuit.l_p * circuit.c_p);
    p.f_l = frequency_of((circuit.l_p + circuit.l_s) * circuit.c_s);
    return p;
}

pole_pair exact_poles(const extracted_circuit& circuit) {
    validate(circuit);
    // 1 - x S + x^2 P = 0 in x = w^2.
    const double lpcp = circuit.l_p * circuit.c_p;
    const double lscs = circuit.l_s * circuit.c_s;
    const double sum = lpcp + lscs + circuit.l_p * circuit.c_s;
    const double prod = lpcp * lscs;
    const double disc = sum * sum - 4.0 * prod;
    if (!(disc >= 0.0)) {
        throw fss_error(error_category::no_real_poles,
                        "surface impedance denominator has no real poles");
    }
    const double q = sum + std::sqrt(disc);
    const double x_lo = 2.0 / q;
    const double x_hi = q / (2.0 * prod);
    return {std::sqrt(x_lo) / (2.0 * pi), std::sqrt(x_hi) / (2.0 * pi)};
}

} // namespace fssecm
