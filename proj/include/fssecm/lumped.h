#pragma once

#include "fssecm/twoport.h"

#include <vector>

namespace fssecm {

enum class branch_kind { series_lc, tank, inductor, parallel_of };

// Shunt branch built from series-LC, tank and inductor pieces. Values are SI.
// `loss` is a series resistance for series_lc and a parallel conductance for
// tanks; both default to lossless.
struct lumped_branch {
    branch_kind kind = branch_kind::parallel_of;
    double inductance = 0.0;
    double capacitance = 0.0;
    double loss = 0.0;
    std::vector<lumped_branch> children;

    friend bool operator==(const lumped_branch&, const lumped_branch&) = default;
};

lumped_branch series_lc(double inductance, double capacitance, double resistance = 0.0);
lumped_branch tank(double inductance, double capacitance, double conductance = 0.0);
lumped_branch inductor(double inductance);
lumped_branch parallel_of(std::vector<lumped_branch> branches);

// Empty parallel_of: no branch at all.
inline lumped_branch open_branch() { return parallel_of({}); }

impedance branch_impedance(const lumped_branch& branch, double frequency);
complex branch_admittance(const lumped_branch& branch, double frequency);

// Series resonance 1/(2 pi sqrt(LC)) of a series_lc or tank branch.
double resonance_frequency(const lumped_branch& branch);

// Series connection of a series-LC (L_sb, C_sb) and a tank (L_sa, C_sa).
struct hybrid_circuit {
    double l_sa = 0.0;
    double c_sa = 0.0;
    double l_sb = 0.0;
    double c_sb = 0.0;
};

impedance hybrid_impedance(const hybrid_circuit& h, double frequency);

// Rewrites two parallel series-LC branches (L1, C1) || (L2, C2) as the
// equivalent hybrid resonator. Throws invalid_parameter for non-positive
// values and degenerate_transform when both branches resonate together.
hybrid_circuit foster_transform(double l1, double c1, double l2, double c2);

} // namespace fssecm
