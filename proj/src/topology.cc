#include "fssecm/topology.h"

#include "fssecm/constants.h"
#include "fssecm/errors.h"

#include <algorithm>
#include <cmath>

namespace fssecm {

namespace {

using constants::pi;

void collect_zeros(const lumped_branch& branch, std::vector<double>& out) {
    if (branch.kind == branch_kind::series_lc && branch.loss == 0.0) {
        out.push_back(resonance_frequency(branch));
    } else if (branch.kind == branch_kind::parallel_of) {
        for (const auto& child : branch.children) {
            collect_zeros(child, out);
        }
    }
}

} // namespace

void validate(const incidence& inc) {
    if (!(inc.theta >= 0.0 && inc.theta < pi / 2.0)) {
        throw fss_error(error_category::invalid_parameter,
                        "incidence angle must lie in [0, 90) degrees");
    }
}

void validate(const substrate& sub) {
    if (!(sub.h > 0.0)) {
        throw fss_error(error_category::invalid_parameter, "substrate thickness must be positive");
    }
    if (!(sub.eps_r >= 1.0)) {
        throw fss_error(error_category::invalid_parameter, "substrate eps_r must be >= 1");
    }
    if (!(sub.tan_delta >= 0.0)) {
        throw fss_error(error_category::invalid_parameter,
                        "substrate loss tangent must be non-negative");
    }
}

media incidence_media(const incidence& inc, const substrate& sub, double frequency, bool lossy) {
    validate(inc);
    validate(sub);
    if (!(frequency > 0.0)) {
        throw fss_error(error_category::invalid_parameter, "frequency must be positive");
    }
    const double sin_i = std::sin(inc.theta);
    const double cos_i = std::cos(inc.theta);
    const double k0 = 2.0 * pi * frequency / constants::c0;

    media m;
    if (!lossy || sub.tan_delta == 0.0) {
        const double n = std::sqrt(sub.eps_r);
        const double kz_norm = std::sqrt(sub.eps_r - sin_i * sin_i);   // n cos(theta_t)
        const double cos_t = kz_norm / n;
        const double zd = constants::z0 / n;
        if (inc.pol == polarization::te) {
            m.port_z = constants::z0 / cos_i;
            m.line_z = zd / cos_t;
        } else {
            m.port_z = constants::z0 * cos_i;
            m.line_z = zd * cos_t;
        }
        m.theta_d = k0 * sub.h * kz_norm;
        return m;
    }

    const complex eps{sub.eps_r, -sub.eps_r * sub.tan_delta};
    const complex n = std::sqrt(eps);
    const complex kz_norm = std::sqrt(eps - sin_i * sin_i);
    const complex cos_t = kz_norm / n;
    const complex zd = constants::z0 / n;
    if (inc.pol == polarization::te) {
        m.port_z = constants::z0 / cos_i;
        m.line_z = zd / cos_t;
    } else {
        m.port_z = constants::z0 * cos_i;
        m.line_z = zd * cos_t;
    }
    m.theta_d = k0 * sub.h * kz_norm;
    return m;
}

std::size_t fss_stack::shunt_count() const {
    return static_cast<std::size_t>(std::count_if(layers.begin(), layers.end(), [](const auto& l) {
        return std::holds_alternative<shunt_node>(l);
    }));
}

void validate(const fss_stack& stack) {
    if (stack.layers.empty() || stack.layers.size() % 2 == 0) {
        throw fss_error(error_category::invalid_input,
                        "stack must alternate shunt nodes and line sections");
    }
    for (std::size_t i = 0; i < stack.layers.size(); ++i) {
        const bool want_shunt = i % 2 == 0;
        if (std::holds_alternative<shunt_node>(stack.layers[i]) != want_shunt) {
            throw fss_error(error_category::invalid_input,
                            "stack must alternate shunt nodes and line sections");
        }
        if (!want_shunt) {
            validate(std::get<line_section>(stack.layers[i]).sub);
        }
    }
    validate(stack.inc);
}

fss_stack build_first_order(const extracted_circuit& circuit, const substrate& sub,
                            const incidence& inc, bool lossy) {
    validate(circuit);
    validate(sub);
    validate(inc);
    std::vector<lumped_branch> notch{series_lc(circuit.l_s, circuit.c_s)};
    if (circuit.l_par > 0.0) {
        notch.push_back(inductor(circuit.l_par));
    }
    fss_stack stack;
    stack.layers = {
        shunt_node{tank(circuit.l_p, circuit.c_p)},
        line_section{sub},
        shunt_node{notch.size() == 1 ? notch.front() : parallel_of(std::move(notch))},
    };
    stack.inc = inc;
    stack.lossy = lossy;
    return stack;
}

fss_stack build_second_order(const outer_layer& top, const outer_layer& bottom, double l_p,
                             double c_p, const substrate& sub, const incidence& inc, bool lossy) {
    if (!(top == bottom)) {
        throw fss_error(error_category::invalid_input,
                        "second-order stack requires identical outer layers");
    }
    validate(sub);
    validate(inc);
    const auto outer = [&] {
        return shunt_node{
            parallel_of({series_lc(top.l_a, top.c_a), series_lc(top.l_b, top.c_b)})};
    };
    fss_stack stack;
    stack.layers = {
        outer(), line_section{sub}, shunt_node{tank(l_p, c_p)}, line_section{sub}, outer(),
    };
    stack.inc = inc;
    stack.lossy = lossy;
    return stack;
}

fss_stack build_second_order(const second_order_circuit& circuit, const substrate& sub,
                             const incidence& inc, bool lossy) {
    return build_second_order(circuit.outer, circuit.outer, circuit.l_p, circuit.c_p, sub, inc,
                              lossy);
}

double port_impedance(const fss_stack& stack) {
    const double cos_i = std::cos(stack.inc.theta);
    return stack.inc.pol == polarization::te ? constants::z0 / cos_i : constants::z0 * cos_i;
}

two_port network(const fss_stack& stack, double frequency) {
    validate(stack);
    two_port total = identity(frequency);
    for (const auto& layer : stack.layers) {
        if (const auto* node = std::get_if<shunt_node>(&layer)) {
            total = total * shunt(branch_impedance(node->branch, frequency), frequency);
        } else {
            const auto& sec = std::get<line_section>(layer);
            const media m = incidence_media(stack.inc, sec.sub, frequency, stack.lossy);
            if (m.line_z.imag() == 0.0 && m.theta_d.imag() == 0.0) {
                total = total * line(m.line_z.real(), m.theta_d.real(), frequency);
            } else {
                total = total * line(m.line_z, m.theta_d, frequency);
            }
        }
    }
    return total;
}

s_params evaluate(const fss_stack& stack, double frequency) {
    const double z = port_impedance(stack);
    return to_sparams(network(stack, frequency), z, z);
}

full_s_params evaluate_full(const fss_stack& stack, double frequency) {
    const double z = port_impedance(stack);
    return to_full_sparams(network(stack, frequency), z, z);
}

std::vector<double> transmission_zeros(const fss_stack& stack) {
    std::vector<double> zeros;
    for (const auto& layer : stack.layers) {
        if (const auto* node = std::get_if<shunt_node>(&layer)) {
            collect_zeros(node->branch, zeros);
        }
    }
    std::sort(zeros.begin(), zeros.end());
    zeros.erase(std::unique(zeros.begin(), zeros.end()), zeros.end());
    return zeros;
}

} // namespace fssecm
