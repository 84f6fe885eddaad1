#pragma once

#include "fssecm/analysis.h"
#include "fssecm/topology.h"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace fssecm::io {

inline constexpr std::string_view csv_header = "freq_hz,s11_re,s11_im,s21_re,s21_im,s11_db,s21_db";

// Response CSV, 12 significant digits, dB = 20 log10 |S| (floored at -400).
void write_csv(std::ostream& os, const response_table& table);
response_table read_csv(std::istream& is);

// Touchstone v1 two-port export of `stack` at the table's frequencies.
// S12 and S22 come from the reversed network.
void write_touchstone(std::ostream& os, const fss_stack& stack,
                      const std::vector<double>& frequencies);

struct touchstone_data {
    response_table table;
    double reference_z = 50.0;
};

// Accepts RI, MA and DB data formats and HZ/KHZ/MHZ/GHZ units.
touchstone_data read_touchstone(std::istream& is);

// Picks CSV or Touchstone from the file contents.
response_table import_response(const std::filesystem::path& path);

std::string format_number(double v);

} // namespace fssecm::io
