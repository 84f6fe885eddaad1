#include "fssecm/errors.h"

#include <sstream>

namespace fssecm {

std::string_view to_string(error_category category) {
    switch (category) {
    case error_category::invalid_parameter: return "invalid_parameter";
    case error_category::invalid_input: return "invalid_input";
    case error_category::singular_network: return "singular_network";
    case error_category::degenerate_transform: return "degenerate_transform";
    case error_category::invalid_geometry: return "invalid_geometry";
    case error_category::no_real_poles: return "no_real_poles";
    case error_category::band_structure: return "band_structure";
    case error_category::truncated_band: return "truncated_band";
    case error_category::infeasible_targets: return "infeasible_targets";
    case error_category::unattainable_dimension: return "unattainable_dimension";
    case error_category::diverged: return "diverged";
    case error_category::empty_sweep: return "empty_sweep";
    case error_category::config: return "config";
    case error_category::io: return "io";
    }
    return "unknown";
}

fss_error::fss_error(error_category category, const std::string& message)
    : std::runtime_error(message), m_category(category) {}

band_structure_error::band_structure_error(int band_count)
    : fss_error(error_category::band_structure,
                "expected exactly two passbands, found " + std::to_string(band_count)),
      m_band_count(band_count) {}

truncated_band_error::truncated_band_error(std::string side)
    : fss_error(error_category::truncated_band,
                "-3 dB crossing outside the swept range on the " + side + " side"),
      m_side(std::move(side)) {}

infeasible_targets_error::infeasible_targets_error(const std::string& message, double f0_min,
                                                   double f0_max)
    : fss_error(error_category::infeasible_targets, message), m_f0_min(f0_min), m_f0_max(f0_max) {}

namespace {
std::string unattainable_message(const std::string& parameter, double target, double lo,
                                 double hi) {
    std::ostringstream os;
    os << "cannot realize " << parameter << ": target " << target << " outside attainable ["
       << lo << ", " << hi << "]";
    return os.str();
}
} // namespace

unattainable_dimension_error::unattainable_dimension_error(std::string parameter, double target,
                                                           double lo, double hi)
    : fss_error(error_category::unattainable_dimension,
                unattainable_message(parameter, target, lo, hi)),
      m_parameter(std::move(parameter)), m_lo(lo), m_hi(hi) {}

} // namespace fssecm
