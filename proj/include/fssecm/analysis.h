#pragma once

#include "fssecm/errors.h"
#include "fssecm/extraction.h"
#include "fssecm/topology.h"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fssecm {

struct response_row {
    double frequency = 0.0;
    complex s11;
    complex s21;

    friend bool operator==(const response_row&, const response_row&) = default;
};

// Swept two-port response; at least two rows with strictly increasing frequency.
class response_table {
public:
    response_table() = default;
    explicit response_table(std::vector<response_row> rows);

    const std::vector<response_row>& rows() const noexcept { return m_rows; }
    std::size_t size() const noexcept { return m_rows.size(); }
    const response_row& operator[](std::size_t i) const { return m_rows[i]; }

    friend bool operator==(const response_table&, const response_table&) = default;

private:
    std::vector<response_row> m_rows;
};

enum class grid_spacing { linear, log };

struct sweep_grid {
    double start = 1e9;
    double stop = 8e9;
    int points = 1401;
    grid_spacing spacing = grid_spacing::linear;
};

// Throws invalid_input for an empty or inverted range or fewer than 2 points.
std::vector<double> make_grid(const sweep_grid& grid);

// Frequency sweep, evaluated in parallel across frequencies.
response_table sweep(const fss_stack& stack, const sweep_grid& grid);
// Single-threaded reference with identical results.
response_table sweep_serial(const fss_stack& stack, const sweep_grid& grid);

// Centered moving average of the complex samples over a window of
// `window_hz` (total width). Frequencies are preserved.
response_table smooth(const response_table& table, double window_hz);

struct band_report {
    double f_l = 0.0;
    double f_u = 0.0;
    double f0 = 0.0;
    double bw_l = 0.0;   // fractional 3-dB bandwidth
    double bw_u = 0.0;
    double il_l = 0.0;   // dB
    double il_u = 0.0;
    double delta_f = 0.0;
    int poles_l = 0;     // grid peaks grouped into each band
    int poles_u = 0;
};

// Two-band metrics of a response. `known_zeros` are exact transmission-zero
// frequencies of the underlying network (see transmission_zeros); when one
// falls inside the null's grid bracket it is used verbatim.
// Throws band_structure_error / truncated_band_error.
band_report report_bands(const response_table& table, std::span<const double> known_zeros = {});

// Sweep + report, passing the stack's exact zeros.
band_report analyze(const fss_stack& stack, const sweep_grid& grid);

enum class geometry_parameter { a, w, s, s1, g, h, eps_r };

// Accepts "a", "w", "s", "s1", "g", "h", "eps_r". Throws invalid_input.
geometry_parameter parse_geometry_parameter(std::string_view name);
std::string_view to_string(geometry_parameter p);
first_order_geometry with_parameter(first_order_geometry geom, geometry_parameter p, double value);

struct parametric_point {
    double value = 0.0;
    std::optional<band_report> report;
    std::optional<error_category> error;
    std::string message;
};

struct parametric_options {
    sweep_grid grid;
    incidence inc;
    bool lossy = false;
    double l_par = 0.0;
};

// Re-extracts, rebuilds and reports at every value; per-point failures are
// recorded and the sweep continues. Throws empty_sweep for no values.
std::vector<parametric_point> parametric_sweep(const first_order_geometry& base,
                                               geometry_parameter param,
                                               std::span<const double> values,
                                               const parametric_options& options);

std::vector<parametric_point> parametric_sweep(std::span<const double> values,
                                               const std::function<fss_stack(double)>& make_stack,
                                               const sweep_grid& grid);

} // namespace fssecm
