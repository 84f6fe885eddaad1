#include "fssecm/twoport.h"

#include "fssecm/errors.h"

#include <cmath>
#include <sstream>

namespace fssecm {

namespace {

constexpr double singular_threshold = 1e-30;
constexpr double frequency_match_rtol = 1e-12;

bool same_frequency(double f1, double f2) {
    return std::abs(f1 - f2) <= frequency_match_rtol * std::max(std::abs(f1), std::abs(f2));
}

} // namespace

complex impedance::value() const {
    if (m_open) {
        throw fss_error(error_category::invalid_input, "open-circuit impedance has no finite value");
    }
    return m_value;
}

complex impedance::admittance() const {
    if (m_open) {
        return {};
    }
    if (m_value == complex{}) {
        return {short_circuit_admittance, 0.0};
    }
    return 1.0 / m_value;
}

impedance impedance::from_admittance(complex y) {
    if (y == complex{}) {
        return open();
    }
    return impedance{1.0 / y};
}

two_port identity(double frequency) {
    two_port p;
    p.frequency = frequency;
    return p;
}

two_port shunt(complex admittance, double frequency) {
    two_port p;
    p.c = admittance;
    p.frequency = frequency;
    return p;
}

two_port shunt(const impedance& z, double frequency) {
    return shunt(z.admittance(), frequency);
}

two_port line(double zc, double theta, double frequency) {
    if (!(zc > 0.0)) {
        std::ostringstream os;
        os << "line characteristic impedance must be positive, got " << zc;
        throw fss_error(error_category::invalid_parameter, os.str());
    }
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    two_port p;
    p.a = ct;
    p.b = complex{0.0, zc * st};
    p.c = complex{0.0, st / zc};
    p.d = ct;
    p.frequency = frequency;
    return p;
}

two_port line(complex zc, complex theta, double frequency) {
    if (!(zc.real() > 0.0)) {
        throw fss_error(error_category::invalid_parameter,
                        "line characteristic impedance must have positive real part");
    }
    const complex j{0.0, 1.0};
    const complex ct = std::cos(theta);
    const complex st = std::sin(theta);
    two_port p;
    p.a = ct;
    p.b = j * zc * st;
    p.c = j * st / zc;
    p.d = ct;
    p.frequency = frequency;
    return p;
}

two_port operator*(const two_port& lhs, const two_port& rhs) {
    if (!same_frequency(lhs.frequency, rhs.frequency)) {
        std::ostringstream os;
        os << "cannot cascade two-ports at " << lhs.frequency << " Hz and " << rhs.frequency
           << " Hz";
        throw fss_error(error_category::invalid_input, os.str());
    }
    two_port out;
    out.a = lhs.a * rhs.a + lhs.b * rhs.c;
    out.b = lhs.a * rhs.b + lhs.b * rhs.d;
    out.c = lhs.c * rhs.a + lhs.d * rhs.c;
    out.d = lhs.c * rhs.b + lhs.d * rhs.d;
    out.frequency = lhs.frequency;
    return out;
}

two_port cascade(std::span<const two_port> ports) {
    if (ports.empty()) {
        throw fss_error(error_category::invalid_input, "cascade of an empty sequence");
    }
    two_port out = ports.front();
    for (const auto& p : ports.subspan(1)) {
        out = out * p;
    }
    return out;
}

two_port reverse(const two_port& p) {
    const complex det = p.determinant();
    two_port r;
    r.a = p.d / det;
    r.b = p.b / det;
    r.c = p.c / det;
    r.d = p.a / det;
    r.frequency = p.frequency;
    return r;
}

s_params to_sparams(const two_port& p, double source_z, double load_z) {
    if (!(source_z > 0.0) || !(load_z > 0.0)) {
        throw fss_error(error_category::invalid_parameter,
                        "reference impedances must be positive");
    }
    const complex za = p.a * load_z;
    const complex zc = p.c * source_z * load_z;
    const complex zd = p.d * source_z;
    const complex delta = za + p.b + zc + zd;
    if (std::abs(delta) < singular_threshold) {
        throw fss_error(error_category::singular_network,
                        "two-port to S-parameter conversion is singular");
    }
    s_params s;
    s.s21 = 2.0 * std::sqrt(source_z * load_z) / delta;
    s.s11 = (za + p.b - zc - zd) / delta;
    s.source_z = source_z;
    s.load_z = load_z;
    s.frequency = p.frequency;
    return s;
}

full_s_params to_full_sparams(const two_port& p, double source_z, double load_z) {
    const s_params fwd = to_sparams(p, source_z, load_z);
    const s_params rev = to_sparams(reverse(p), load_z, source_z);
    full_s_params s;
    s.s11 = fwd.s11;
    s.s21 = fwd.s21;
    s.s12 = rev.s21;
    s.s22 = rev.s11;
    s.source_z = source_z;
    s.load_z = load_z;
    s.frequency = p.frequency;
    return s;
}

} // namespace fssecm
