#include "fssecm/lumped.h"

#include "fssecm/constants.h"
#include "fssecm/errors.h"

#include <array>
#include <cmath>
#include <sstream>

namespace fssecm {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw fss_error(error_category::invalid_parameter, what);
    }
}

double omega(double frequency) {
    if (!(frequency > 0.0)) {
        throw fss_error(error_category::invalid_parameter, "frequency must be positive");
    }
    return 2.0 * constants::pi * frequency;
}

} // namespace

lumped_branch series_lc(double inductance, double capacitance, double resistance) {
    require(inductance > 0.0, "series LC inductance must be positive");
    require(capacitance > 0.0, "series LC capacitance must be positive");
    require(resistance >= 0.0, "series resistance must be non-negative");
    return {branch_kind::series_lc, inductance, capacitance, resistance, {}};
}

lumped_branch tank(double inductance, double capacitance, double conductance) {
    require(inductance > 0.0, "tank inductance must be positive");
    require(capacitance > 0.0, "tank capacitance must be positive");
    require(conductance >= 0.0, "tank conductance must be non-negative");
    return {branch_kind::tank, inductance, capacitance, conductance, {}};
}

lumped_branch inductor(double inductance) {
    require(inductance >= 0.0, "inductance must be non-negative");
    return {branch_kind::inductor, inductance, 0.0, 0.0, {}};
}

lumped_branch parallel_of(std::vector<lumped_branch> branches) {
    return {branch_kind::parallel_of, 0.0, 0.0, 0.0, std::move(branches)};
}

impedance branch_impedance(const lumped_branch& branch, double frequency) {
    const double w = omega(frequency);
    const complex j{0.0, 1.0};
    switch (branch.kind) {
    case branch_kind::series_lc:
        return impedance{branch.loss + j * w * branch.inductance +
                         1.0 / (j * w * branch.capacitance)};
    case branch_kind::tank:
        return impedance::from_admittance(branch.loss + 1.0 / (j * w * branch.inductance) +
                                          j * w * branch.capacitance);
    case branch_kind::inductor:
        return impedance{j * w * branch.inductance};
    case branch_kind::parallel_of: {
        complex y{};
        for (const auto& child : branch.children) {
            const impedance z = branch_impedance(child, frequency);
            if (z.is_short()) {
                return impedance{complex{}};
            }
            if (!z.is_open()) {
                y += 1.0 / z.value();
            }
        }
        return impedance::from_admittance(y);
    }
    }
    return impedance::open();
}

complex branch_admittance(const lumped_branch& branch, double frequency) {
    return branch_impedance(branch, frequency).admittance();
}

double resonance_frequency(const lumped_branch& branch) {
    if (branch.kind != branch_kind::series_lc && branch.kind != branch_kind::tank) {
        throw fss_error(error_category::invalid_input,
                        "resonance frequency is defined for series_lc and tank branches only");
    }
    return 1.0 / (2.0 * constants::pi * std::sqrt(branch.inductance * branch.capacitance));
}

impedance hybrid_impedance(const hybrid_circuit& h, double frequency) {
    const double w = omega(frequency);
    const complex j{0.0, 1.0};
    const impedance tank_z =
        impedance::from_admittance(1.0 / (j * w * h.l_sa) + j * w * h.c_sa);
    if (tank_z.is_open()) {
        return tank_z;
    }
    return impedance{j * w * h.l_sb + 1.0 / (j * w * h.c_sb) + tank_z.value()};
}

hybrid_circuit foster_transform(double l1, double c1, double l2, double c2) {
    require(l1 > 0.0 && c1 > 0.0 && l2 > 0.0 && c2 > 0.0,
            "foster transform needs positive element values");

    // Z(s) = (1 + s^2 L1C1)(1 + s^2 L2C2) / (s [Ct + s^2 C1 C2 Lt]).
    // Partial fractions: s L_sb + 1/(s C_sb) + tank with pole at
    // wp^2 = Ct / (C1 C2 Lt). The tank residue reduces to
    // L_sa = (L1C1 - L2C2)^2 / (Ct^2 Lt).
    const double ct = c1 + c2;
    const double lt = l1 + l2;
    const double tau1 = l1 * c1;
    const double tau2 = l2 * c2;
    const double spread = tau1 - tau2;
    if (std::abs(spread) <= 1e-9 * std::max(tau1, tau2)) {
        throw fss_error(error_category::degenerate_transform,
                        "branches share a resonance; the parallel pair is a single series LC");
    }

    hybrid_circuit h;
    h.c_sb = ct;
    h.l_sb = l1 * l2 / lt;
    h.l_sa = spread * spread / (ct * ct * lt);
    h.c_sa = c1 * c2 * ct * lt * lt / (spread * spread);

    // Check the identity against the direct parallel combination around both
    // resonances before handing it out.
    const double f1 = 1.0 / (2.0 * constants::pi * std::sqrt(tau1));
    const double f2 = 1.0 / (2.0 * constants::pi * std::sqrt(tau2));
    const double fp = 1.0 / (2.0 * constants::pi * std::sqrt(h.l_sa * h.c_sa));
    const lumped_branch pair = parallel_of({series_lc(l1, c1), series_lc(l2, c2)});
    for (double f : std::array{0.37 * f1, 0.61 * f2, 1.73 * f1, 2.9 * f2, 0.83 * fp, 1.21 * fp}) {
        const impedance zp = branch_impedance(pair, f);
        const impedance zh = hybrid_impedance(h, f);
        if (zp.is_open() || zh.is_open()) {
            continue;
        }
        const double scale = std::abs(zp.value());
        if (scale > 0.0 && std::abs(zh.value() - zp.value()) > 1e-9 * scale) {
            std::ostringstream os;
            os << "hybrid network does not reproduce the branch pair at " << f << " Hz";
            throw fss_error(error_category::degenerate_transform, os.str());
        }
    }
    return h;
}

} // namespace fssecm
