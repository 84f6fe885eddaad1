#include "fssecm/analysis.h"

#include "fssecm/constants.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace fssecm {

namespace {

constexpr double db_floor = -400.0;
constexpr double passband_threshold_db = -3.0;
constexpr double band_edge_drop_db = 3.0;

double to_db(complex v) {
    const double m = std::abs(v);
    return m > 0.0 ? std::max(20.0 * std::log10(m), db_floor) : db_floor;
}

response_row evaluate_row(const fss_stack& stack, double f) {
    const s_params s = evaluate(stack, f);
    return {f, s.s11, s.s21};
}

struct vertex {
    double x;
    double y;
};

// Vertex of the parabola through three points with x0 < x1 < x2.
vertex parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (curv == 0.0) {
        return {x1, y1};
    }
    // y = y1 + b (x - x1) + curv (x - x1)^2 with b the centered slope.
    const double b = d01 + curv * (x1 - x0);
    const double dx = -b / (2.0 * curv);
    const double x = std::clamp(x1 + dx, x0, x2);
    const double t = x - x1;
    return {x, y1 + b * t + curv * t * t};
}

struct band {
    std::vector<std::size_t> peaks;
    std::size_t best = 0;
};

struct refined_peak {
    double frequency;
    double level_db;
};

refined_peak refine_peak(const response_table& t, const std::vector<double>& db, std::size_t k) {
    const vertex v = parabola_vertex(t[k - 1].frequency, db[k - 1], t[k].frequency, db[k],
                                     t[k + 1].frequency, db[k + 1]);
    return {v.x, std::max(v.y, db[k])};
}

// Minimizes |S21| over the two grid intervals adjacent to k, with S21 taken
// linear in frequency on each interval.
double refine_null(const response_table& t, std::size_t k, std::span<const double> zeros) {
    const double lo = t[k - 1].frequency;
    const double hi = t[k + 1].frequency;
    double best_f = t[k].frequency;
    double best_dist = std::numeric_limits<double>::infinity();
    for (double z : zeros) {
        if (z >= lo && z <= hi && std::abs(z - t[k].frequency) < best_dist) {
            best_dist = std::abs(z - t[k].frequency);
            best_f = z;
        }
    }
    if (best_dist < std::numeric_limits<double>::infinity()) {
        return best_f;
    }

    double best_mag = std::abs(t[k].s21);
    for (std::size_t i : {k - 1, k}) {
        const complex s0 = t[i].s21;
        const complex ds = t[i + 1].s21 - s0;
        const double n2 = std::norm(ds);
        if (n2 == 0.0) {
            continue;
        }
        const double u = std::clamp(-(std::conj(s0) * ds).real() / n2, 0.0, 1.0);
        const double mag = std::abs(s0 + u * ds);
        if (mag < best_mag) {
            best_mag = mag;
            best_f = t[i].frequency + u * (t[i + 1].frequency - t[i].frequency);
        }
    }
    return best_f;
}

double crossing(const response_table& t, const std::vector<double>& db, std::size_t i,
                std::size_t j, double level) {
    const double f0 = t[i].frequency;
    const double f1 = t[j].frequency;
    const double u = (level - db[i]) / (db[j] - db[i]);
    return f0 + u * (f1 - f0);
}

template <typename Eval>
response_table run_sweep(const sweep_grid& grid, Eval&& eval, bool parallel) {
    const std::vector<double> freqs = make_grid(grid);
    std::vector<response_row> rows(freqs.size());
    const auto n = static_cast<std::ptrdiff_t>(freqs.size());
    if (parallel) {
        std::exception_ptr failure;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                rows[i] = eval(freqs[i]);
            } catch (...) {
#pragma omp critical(fssecm_sweep_failure)
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            rows[i] = eval(freqs[i]);
        }
    }
    return response_table(std::move(rows));
}

} // namespace

response_table::response_table(std::vector<response_row> rows) : m_rows(std::move(rows)) {
    if (m_rows.size() < 2) {
        throw fss_error(error_category::invalid_input, "response table needs at least two rows");
    }
    for (std::size_t i = 1; i < m_rows.size(); ++i) {
        if (!(m_rows[i].frequency > m_rows[i - 1].frequency)) {
            std::ostringstream os;
            os << "response frequencies must be strictly increasing (row " << i << ")";
            throw fss_error(error_category::invalid_input, os.str());
        }
    }
}

std::vector<double> make_grid(const sweep_grid& grid) {
    if (!(grid.start > 0.0 && grid.stop > grid.start)) {
        throw fss_error(error_category::invalid_input, "sweep range must satisfy 0 < start < stop");
    }
    if (grid.points < 2) {
        throw fss_error(error_category::invalid_input, "sweep needs at least two points");
    }
    const auto n = static_cast<std::size_t>(grid.points);
    std::vector<double> f(n);
    const double last = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / last;
        f[i] = grid.spacing == grid_spacing::linear
                   ? grid.start + u * (grid.stop - grid.start)
                   : grid.start * std::pow(grid.stop / grid.start, u);
    }
    f.front() = grid.start;
    f.back() = grid.stop;
    return f;
}

response_table sweep(const fss_stack& stack, const sweep_grid& grid) {
    validate(stack);
    return run_sweep(grid, [&](double f) { return evaluate_row(stack, f); }, true);
}

response_table sweep_serial(const fss_stack& stack, const sweep_grid& grid) {
    validate(stack);
    return run_sweep(grid, [&](double f) { return evaluate_row(stack, f); }, false);
}

response_table smooth(const response_table& table, double window_hz) {
    if (!(window_hz > 0.0)) {
        throw fss_error(error_category::invalid_parameter, "smoothing window must be positive");
    }
    const auto& in = table.rows();
    const double half = window_hz / 2.0;
    std::vector<response_row> out(in.size());
    std::size_t lo = 0;
    std::size_t hi = 0;
    complex sum11{};
    complex sum21{};
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double f = in[i].frequency;
        while (hi < in.size() && in[hi].frequency <= f + half) {
            sum11 += in[hi].s11;
            sum21 += in[hi].s21;
            ++hi;
        }
        while (in[lo].frequency < f - half) {
            sum11 -= in[lo].s11;
            sum21 -= in[lo].s21;
            ++lo;
        }
        const double count = static_cast<double>(hi - lo);
        out[i] = {f, sum11 / count, sum21 / count};
    }
    return response_table(std::move(out));
}

band_report report_bands(const response_table& table, std::span<const double> known_zeros) {
    const std::size_t n = table.size();
    std::vector<double> db(n);
    for (std::size_t i = 0; i < n; ++i) {
        db[i] = to_db(table[i].s21);
    }

    std::vector<std::size_t> peaks;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (db[k] > db[k - 1] && db[k] >= db[k + 1] && db[k] > passband_threshold_db) {
            peaks.push_back(k);
        }
    }

    // Adjacent peaks whose separating dip stays within 3 dB of the weaker one
    // form a single (higher-order) band.
    std::vector<band> bands;
    for (std::size_t k : peaks) {
        if (!bands.empty()) {
            const std::size_t prev = bands.back().peaks.back();
            const double dip = *std::min_element(db.begin() + static_cast<std::ptrdiff_t>(prev),
                                                 db.begin() + static_cast<std::ptrdiff_t>(k));
            const bool zero_between =
                std::any_of(known_zeros.begin(), known_zeros.end(), [&](double z) {
                    return z > table[prev].frequency && z < table[k].frequency;
                });
            if (!zero_between && dip >= std::min(db[prev], db[k]) - band_edge_drop_db) {
                bands.back().peaks.push_back(k);
                if (db[k] > db[bands.back().best]) {
                    bands.back().best = k;
                }
                continue;
            }
        }
        bands.push_back({{k}, k});
    }
    if (bands.size() != 2) {
        throw band_structure_error(static_cast<int>(bands.size()));
    }

    const auto edges = [&](const band& b, const refined_peak& p, const char* name) {
        const double level = p.level_db - band_edge_drop_db;
        std::size_t i = b.best;
        while (i > 0 && db[i] >= level) {
            --i;
        }
        if (db[i] >= level) {
            throw truncated_band_error(std::string(name) + " band low-frequency");
        }
        const double f_lo = crossing(table, db, i, i + 1, level);
        std::size_t j = b.best;
        while (j + 1 < n && db[j] >= level) {
            ++j;
        }
        if (db[j] >= level) {
            throw truncated_band_error(std::string(name) + " band high-frequency");
        }
        const double f_hi = crossing(table, db, j - 1, j, level);
        return (f_hi - f_lo) / p.frequency;
    };

    const band& lower = bands[0];
    const band& upper = bands[1];
    const refined_peak pl = refine_peak(table, db, lower.best);
    const refined_peak pu = refine_peak(table, db, upper.best);

    const auto first = db.begin() + static_cast<std::ptrdiff_t>(lower.peaks.back());
    const auto last = db.begin() + static_cast<std::ptrdiff_t>(upper.peaks.front());
    const auto null_idx = static_cast<std::size_t>(std::min_element(first, last) - db.begin());

    band_report r;
    r.f_l = pl.frequency;
    r.f_u = pu.frequency;
    r.f0 = refine_null(table, null_idx, known_zeros);
    r.bw_l = edges(lower, pl, "lower");
    r.bw_u = edges(upper, pu, "upper");
    r.il_l = std::max(0.0, -pl.level_db);
    r.il_u = std::max(0.0, -pu.level_db);
    r.delta_f = r.f_u - r.f_l;
    r.poles_l = static_cast<int>(lower.peaks.size());
    r.poles_u = static_cast<int>(upper.peaks.size());
    return r;
}

band_report analyze(const fss_stack& stack, const sweep_grid& grid) {
    const std::vector<double> zeros = transmission_zeros(stack);
    return report_bands(sweep(stack, grid), zeros);
}

geometry_parameter parse_geometry_parameter(std::string_view name) {
    if (name == "a") return geometry_parameter::a;
    if (name == "w") return geometry_parameter::w;
    if (name == "s") return geometry_parameter::s;
    if (name == "s1") return geometry_parameter::s1;
    if (name == "g") return geometry_parameter::g;
    if (name == "h") return geometry_parameter::h;
    if (name == "eps_r") return geometry_parameter::eps_r;
    throw fss_error(error_category::invalid_input,
                    "unknown geometry parameter '" + std::string(name) + "'");
}

std::string_view to_string(geometry_parameter p) {
    switch (p) {
    case geometry_parameter::a: return "a";
    case geometry_parameter::w: return "w";
    case geometry_parameter::s: return "s";
    case geometry_parameter::s1: return "s1";
    case geometry_parameter::g: return "g";
    case geometry_parameter::h: return "h";
    case geometry_parameter::eps_r: return "eps_r";
    }
    return "?";
}

first_order_geometry with_parameter(first_order_geometry geom, geometry_parameter p, double value) {
    switch (p) {
    case geometry_parameter::a: geom.a = value; break;
    case geometry_parameter::w: geom.w = value; break;
    case geometry_parameter::s: geom.s = value; break;
    case geometry_parameter::s1: geom.s1 = value; break;
    case geometry_parameter::g: geom.g = value; break;
    case geometry_parameter::h: geom.h = value; break;
    case geometry_parameter::eps_r: geom.eps_r = value; break;
    }
    return geom;
}

std::vector<parametric_point> parametric_sweep(std::span<const double> values,
                                               const std::function<fss_stack(double)>& make_stack,
                                               const sweep_grid& grid) {
    if (values.empty()) {
        throw fss_error(error_category::empty_sweep, "parametric sweep has no values");
    }
    std::vector<parametric_point> out;
    out.reserve(values.size());
    for (double v : values) {
        parametric_point pt;
        pt.value = v;
        try {
            pt.report = analyze(make_stack(v), grid);
        } catch (const fss_error& e) {
            pt.error = e.category();
            pt.message = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<parametric_point> parametric_sweep(const first_order_geometry& base,
                                               geometry_parameter param,
                                               std::span<const double> values,
                                               const parametric_options& options) {
    return parametric_sweep(
        values,
        [&](double v) {
            const first_order_geometry geom = with_parameter(base, param, v);
            extracted_circuit c = extract_circuit(geom);
            c.l_par = options.l_par;
            return build_first_order(c, {geom.h, geom.eps_r, geom.tan_delta}, options.inc,
                                     options.lossy);
        },
        options.grid);
}

} // namespace fssecm
