#include "fssecm/io.h"

#include "fssecm/errors.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

namespace fssecm::io {

namespace {

constexpr double db_floor = -400.0;

[[noreturn]] void io_error(const std::string& what) {
    throw fss_error(error_category::io, what);
}

double to_db(complex v) {
    const double m = std::abs(v);
    return m > 0.0 ? std::max(20.0 * std::log10(m), db_floor) : db_floor;
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& token, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) {
            throw std::invalid_argument(token);
        }
        return v;
    } catch (const std::exception&) {
        io_error("line " + std::to_string(line_no) + ": cannot parse number '" + token + "'");
    }
}

} // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(std::ostream& os, const response_table& table) {
    os << csv_header << '\n';
    for (const auto& row : table.rows()) {
        os << format_number(row.frequency) << ',' << format_number(row.s11.real()) << ','
           << format_number(row.s11.imag()) << ',' << format_number(row.s21.real()) << ','
           << format_number(row.s21.imag()) << ',' << format_number(to_db(row.s11)) << ','
           << format_number(to_db(row.s21)) << '\n';
    }
}

response_table read_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) {
        io_error("empty CSV input");
    }
    ++line_no;
    if (trim(line) != csv_header) {
        io_error("unexpected CSV header '" + trim(line) + "'");
    }
    std::vector<response_row> rows;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(trim(cell));
        }
        if (cells.size() < 5) {
            io_error("line " + std::to_string(line_no) + ": expected 7 columns");
        }
        response_row row;
        row.frequency = parse_double(cells[0], line_no);
        row.s11 = {parse_double(cells[1], line_no), parse_double(cells[2], line_no)};
        row.s21 = {parse_double(cells[3], line_no), parse_double(cells[4], line_no)};
        rows.push_back(row);
    }
    return response_table(std::move(rows));
}

void write_touchstone(std::ostream& os, const fss_stack& stack,
                      const std::vector<double>& frequencies) {
    const double z = port_impedance(stack);
    char zbuf[32];
    // Truncated, not rounded: free space then reads 376.730313.
    std::snprintf(zbuf, sizeof zbuf, "%.6f", std::trunc(z * 1e6) / 1e6);
    char angle[32];
    std::snprintf(angle, sizeof angle, "%.6g", stack.inc.theta * 180.0 / std::numbers::pi);
    os << "! fssecm two-port export\n";
    os << "! reference impedance " << zbuf << " ohm ("
       << (stack.inc.pol == polarization::te ? "TE" : "TM") << ", theta " << angle << " deg)\n";
    os << "# HZ S RI R " << zbuf << '\n';
    for (double f : frequencies) {
        const full_s_params s = evaluate_full(stack, f);
        os << format_number(f);
        for (complex v : {s.s11, s.s21, s.s12, s.s22}) {
            os << ' ' << format_number(v.real()) << ' ' << format_number(v.imag());
        }
        os << '\n';
    }
}

touchstone_data read_touchstone(std::istream& is) {
    double unit = 1e9;   // Touchstone default is GHz
    std::string format = "MA";
    double reference = 50.0;
    bool have_options = false;
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto bang = line.find('!'); bang != std::string::npos) {
            line.erase(bang);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (have_options) {
                continue;   // only the first option line counts
            }
            have_options = true;
            std::stringstream ss(upper(line.substr(1)));
            std::string tok;
            while (ss >> tok) {
                if (tok == "HZ") unit = 1.0;
                else if (tok == "KHZ") unit = 1e3;
                else if (tok == "MHZ") unit = 1e6;
                else if (tok == "GHZ") unit = 1e9;
                else if (tok == "RI" || tok == "MA" || tok == "DB") format = tok;
                else if (tok == "S") continue;
                else if (tok == "R") {
                    std::string r;
                    if (!(ss >> r)) io_error("option line: R without a value");
                    reference = parse_double(r, line_no);
                } else {
                    io_error("option line: unsupported token '" + tok + "'");
                }
            }
            continue;
        }
        if (line.front() == '[') {
            io_error("Touchstone v2 keywords are not supported");
        }
        std::stringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            values.push_back(parse_double(tok, line_no));
        }
    }
    if (values.empty() || values.size() % 9 != 0) {
        io_error("two-port Touchstone data must come in groups of 9 numbers");
    }
    const auto pair = [&](double x, double y) -> complex {
        if (format == "RI") {
            return {x, y};
        }
        const double mag = format == "DB" ? std::pow(10.0, x / 20.0) : x;
        return std::polar(mag, y * std::numbers::pi / 180.0);
    };
    std::vector<response_row> rows;
    for (std::size_t i = 0; i < values.size(); i += 9) {
        response_row row;
        row.frequency = values[i] * unit;
        row.s11 = pair(values[i + 1], values[i + 2]);
        row.s21 = pair(values[i + 3], values[i + 4]);
        rows.push_back(row);
    }
    return {response_table(std::move(rows)), reference};
}

response_table import_response(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        io_error("cannot open '" + path.string() + "'");
    }
    std::string first;
    std::getline(in, first);
    in.clear();
    in.seekg(0);
    if (trim(first) == csv_header) {
        return read_csv(in);
    }
    return read_touchstone(in).table;
}

} // namespace fssecm::io
