#pragma once

#include <complex>
#include <span>

namespace fssecm {

using complex = std::complex<double>;

// Admittance standing in for a perfect short (zero-impedance shunt branch).
// Large enough that |S21| underflows any practical tolerance, small enough
// that cascading with other sections stays finite.
inline constexpr double short_circuit_admittance = 1e30;

// Impedance value with an explicit open-circuit marker, so that an ideal tank
// at resonance combines in parallel without producing infinities.
class impedance {
public:
    impedance() = default;
    impedance(complex z) : m_value(z) {}

    static impedance open() {
        impedance z;
        z.m_open = true;
        return z;
    }

    bool is_open() const noexcept { return m_open; }
    bool is_short() const noexcept { return !m_open && m_value == complex{}; }

    // Throws invalid_input for an open marker.
    complex value() const;

    // 0 for an open circuit, short_circuit_admittance for a perfect short.
    complex admittance() const;

    static impedance from_admittance(complex y);

private:
    complex m_value{};
    bool m_open = false;
};

// ABCD (transfer) matrix of a two-port at a single frequency.
struct two_port {
    complex a{1.0};
    complex b{0.0};
    complex c{0.0};
    complex d{1.0};
    double frequency = 0.0;

    complex determinant() const { return a * d - b * c; }
};

struct s_params {
    complex s11;
    complex s21;
    double source_z = 0.0;
    double load_z = 0.0;
    double frequency = 0.0;
};

// All four entries; s22 comes from the reversed network.
struct full_s_params {
    complex s11;
    complex s21;
    complex s12;
    complex s22;
    double source_z = 0.0;
    double load_z = 0.0;
    double frequency = 0.0;
};

two_port identity(double frequency);

two_port shunt(complex admittance, double frequency);
two_port shunt(const impedance& z, double frequency);

// Lossless TEM section. Throws invalid_parameter if zc <= 0.
two_port line(double zc, double theta, double frequency);
// Lossy section: complex characteristic impedance and electrical length.
two_port line(complex zc, complex theta, double frequency);

// Matrix product in the given order. Throws invalid_input on frequency mismatch
// or an empty sequence.
two_port cascade(std::span<const two_port> ports);
two_port operator*(const two_port& lhs, const two_port& rhs);

// Same network seen from the other port.
two_port reverse(const two_port& p);

// Throws invalid_parameter for non-positive reference impedances and
// singular_network when the denominator vanishes (|delta| < 1e-30).
s_params to_sparams(const two_port& p, double source_z, double load_z);
full_s_params to_full_sparams(const two_port& p, double source_z, double load_z);

} // namespace fssecm
