#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fssecm {

enum class error_category {
    invalid_parameter,
    invalid_input,
    singular_network,
    degenerate_transform,
    invalid_geometry,
    no_real_poles,
    band_structure,
    truncated_band,
    infeasible_targets,
    unattainable_dimension,
    diverged,
    empty_sweep,
    config,
    io,
};

// Stable machine-readable name, e.g. "singular_network".
std::string_view to_string(error_category category);

class fss_error : public std::runtime_error {
public:
    fss_error(error_category category, const std::string& message);

    error_category category() const noexcept { return m_category; }

private:
    error_category m_category;
};

// Raised when a response does not show exactly two passbands.
class band_structure_error : public fss_error {
public:
    explicit band_structure_error(int band_count);
    int band_count() const noexcept { return m_band_count; }

private:
    int m_band_count;
};

// A -3 dB crossing fell outside the swept range.
class truncated_band_error : public fss_error {
public:
    explicit truncated_band_error(std::string side);
    const std::string& side() const noexcept { return m_side; }

private:
    std::string m_side;
};

class infeasible_targets_error : public fss_error {
public:
    infeasible_targets_error(const std::string& message, double f0_min, double f0_max);
    double f0_min() const noexcept { return m_f0_min; }
    double f0_max() const noexcept { return m_f0_max; }

private:
    double m_f0_min;
    double m_f0_max;
};

class unattainable_dimension_error : public fss_error {
public:
    unattainable_dimension_error(std::string parameter, double target, double lo, double hi);
    const std::string& parameter() const noexcept { return m_parameter; }
    // Attainable interval of the circuit quantity that drives the parameter.
    double attainable_lo() const noexcept { return m_lo; }
    double attainable_hi() const noexcept { return m_hi; }

private:
    std::string m_parameter;
    double m_lo;
    double m_hi;
};

} // namespace fssecm
