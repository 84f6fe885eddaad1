#include "commands.h"

#include "job_config.h"

#include "fssecm/constants.h"
#include "fssecm/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace fssecm::cli {

namespace {

namespace fs = std::filesystem;
using io::format_number;

struct output_set {
    fs::path dir;
    std::vector<std::string> written;

    std::ofstream open(const std::string& name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw fss_error(error_category::io, "cannot write '" + (dir / name).string() + "'");
        }
        written.push_back(name);
        return out;
    }
};

incidence first_incidence(const job_config& cfg) {
    return {cfg.thetas.front(), cfg.polarizations.front()};
}

fss_stack design_stack(const job_config& cfg, const incidence& inc) {
    return build_stack(design_model(cfg.design, inc));
}

response_table maybe_smooth(const response_table& t, const run_options& opts) {
    return opts.smooth_ghz > 0.0 ? smooth(t, opts.smooth_ghz * units::ghz) : t;
}

void write_band_report(std::ostream& os, const band_report& r) {
    const auto ghz = [](double f) { return format_number(f / units::ghz); };
    os << "f_l_ghz = " << ghz(r.f_l) << '\n'
       << "f0_ghz = " << ghz(r.f0) << '\n'
       << "f_u_ghz = " << ghz(r.f_u) << '\n'
       << "bw_l = " << format_number(r.bw_l) << '\n'
       << "bw_u = " << format_number(r.bw_u) << '\n'
       << "il_l_db = " << format_number(r.il_l) << '\n'
       << "il_u_db = " << format_number(r.il_u) << '\n'
       << "delta_f_ghz = " << ghz(r.delta_f) << '\n'
       << "poles_l = " << r.poles_l << '\n'
       << "poles_u = " << r.poles_u << '\n';
}

std::string theta_label(double theta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::round(theta / units::deg * 1e6) / 1e6);
    return buf;
}

void run_analyze(const job_config& cfg, const run_options& opts, output_set& out) {
    const fss_stack stack = design_stack(cfg, first_incidence(cfg));
    const response_table table = sweep(stack, cfg.grid);
    {
        auto csv = out.open("response.csv");
        io::write_csv(csv, table);
    }
    {
        auto ts = out.open("response.s2p");
        io::write_touchstone(ts, stack, make_grid(cfg.grid));
    }
    // Smoothing moves the null off the exact zero, so only raw data gets it.
    const std::vector<double> zeros =
        opts.smooth_ghz > 0.0 ? std::vector<double>{} : transmission_zeros(stack);
    const band_report r = report_bands(maybe_smooth(table, opts), zeros);
    auto txt = out.open("band_report.txt");
    write_band_report(txt, r);
}

// Maps a circuit parameter name to its slot in circuit_values() and unit scale.
struct circuit_param {
    std::size_t index;
    double scale;
};

std::optional<circuit_param> lookup_circuit_param(design_order order, const std::string& name) {
    static const std::pair<const char*, circuit_param> first[] = {
        {"Ls_nH", {0, units::nh}}, {"Cs_pF", {1, units::pf}}, {"Lp_nH", {2, units::nh}},
        {"Cp_pF", {3, units::pf}}, {"Lpar_nH", {4, units::nh}}};
    static const std::pair<const char*, circuit_param> second[] = {
        {"La_nH", {0, units::nh}}, {"Ca_pF", {1, units::pf}}, {"Lb_nH", {2, units::nh}},
        {"Cb_pF", {3, units::pf}}, {"Lp_nH", {4, units::nh}}, {"Cp_pF", {5, units::pf}}};
    const auto find = [&](const auto& table) -> std::optional<circuit_param> {
        for (const auto& [key, p] : table) {
            if (name == key) {
                return p;
            }
        }
        return std::nullopt;
    };
    return order == design_order::first ? find(first) : find(second);
}

void run_sweep(const job_config& cfg, output_set& out) {
    if (!cfg.parametric) {
        throw fss_error(error_category::config, "parametric: missing block for the sweep command");
    }
    const parametric_block& pb = *cfg.parametric;
    if (pb.values.empty()) {
        throw fss_error(error_category::empty_sweep, "parametric.values: empty sweep");
    }
    const incidence inc = first_incidence(cfg);
    std::vector<parametric_point> points;
    if (cfg.design.geometry) {
        geometry_parameter param;
        try {
            param = parse_geometry_parameter(pb.param);
        } catch (const fss_error&) {
            throw fss_error(error_category::config,
                            "parametric.param: expected one of a, w, s, s1, g, h, eps_r");
        }
        const double scale = param == geometry_parameter::eps_r ? 1.0 : units::mm;
        std::vector<double> values;
        for (double v : pb.values) {
            values.push_back(v * scale);
        }
        parametric_options po;
        po.grid = cfg.grid;
        po.inc = inc;
        po.lossy = cfg.design.lossy;
        po.l_par = cfg.design.l_par;
        points = parametric_sweep(*cfg.design.geometry, param, values, po);
    } else {
        const auto cp = lookup_circuit_param(cfg.design.order, pb.param);
        if (!cp) {
            throw fss_error(error_category::config,
                            "parametric.param: '" + pb.param + "' is not a circuit value of this design");
        }
        const circuit_model base = design_model(cfg.design, inc);
        points = parametric_sweep(
            pb.values,
            [&](double v) {
                std::vector<double> vals = circuit_values(base);
                vals[cp->index] = v * cp->scale;
                return build_stack(with_circuit_values(base, vals));
            },
            cfg.grid);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].value = pb.values[i];
    }

    auto csv = out.open("parametric.csv");
    csv << "value,f_l_hz,f_u_hz,f0_hz,bw_l,bw_u,il_l_db,il_u_db,delta_f_hz,poles_l,poles_u,error\n";
    for (const auto& p : points) {
        csv << format_number(p.value);
        if (p.report) {
            const band_report& r = *p.report;
            for (double v : {r.f_l, r.f_u, r.f0, r.bw_l, r.bw_u, r.il_l, r.il_u, r.delta_f}) {
                csv << ',' << format_number(v);
            }
            csv << ',' << r.poles_l << ',' << r.poles_u << ",\n";
        } else {
            csv << ",,,,,,,,,,," << to_string(*p.error) << '\n';
        }
    }
}

void run_angular(const job_config& cfg, output_set& out) {
    for (double theta : cfg.thetas) {
        for (polarization pol : cfg.polarizations) {
            const fss_stack stack = design_stack(cfg, {theta, pol});
            const response_table table = sweep(stack, cfg.grid);
            auto csv = out.open("response_theta" + theta_label(theta) + "_" +
                                (pol == polarization::te ? "TE" : "TM") + ".csv");
            io::write_csv(csv, table);
        }
    }
}

void run_synth(const job_config& cfg, output_set& out) {
    if (!cfg.targets) {
        throw fss_error(error_category::config, "targets: missing block for the synth command");
    }
    const extracted_circuit c = circuit_from_targets(cfg.targets->targets);
    const first_order_geometry g = geometry_from_circuit(c, cfg.targets->a, cfg.design.sub);
    const resonance_prediction pred = predict_resonances(c);
    const pole_pair poles = exact_poles(c);
    const auto mm = [](double v) { return format_number(v / units::mm); };
    {
        auto txt = out.open("synth_report.txt");
        txt << "# circuit\n"
            << "Ls_nH = " << format_number(c.l_s / units::nh) << '\n'
            << "Cs_pF = " << format_number(c.c_s / units::pf) << '\n'
            << "Lp_nH = " << format_number(c.l_p / units::nh) << '\n'
            << "Cp_pF = " << format_number(c.c_p / units::pf) << '\n'
            << "# geometry\n"
            << "a_mm = " << mm(g.a) << '\n'
            << "w_mm = " << mm(g.w) << '\n'
            << "s_mm = " << mm(g.s) << '\n'
            << "s1_mm = " << mm(g.s1) << '\n'
            << "g_mm = " << mm(g.g) << '\n'
            << "# resonances\n"
            << "f_l_approx_ghz = " << format_number(pred.f_l / units::ghz) << '\n'
            << "f0_ghz = " << format_number(pred.f0 / units::ghz) << '\n'
            << "f_u_approx_ghz = " << format_number(pred.f_u / units::ghz) << '\n'
            << "f_l_pole_ghz = " << format_number(poles.lower / units::ghz) << '\n'
            << "f_u_pole_ghz = " << format_number(poles.upper / units::ghz) << '\n';
    }
    nlohmann::ordered_json design;
    design["order"] = "first";
    design["geometry"] = {{"a_mm", g.a / units::mm},  {"w_mm", g.w / units::mm},
                          {"s_mm", g.s / units::mm},  {"s1_mm", g.s1 / units::mm},
                          {"g_mm", g.g / units::mm}};
    design["substrate"] = {{"h_mm", cfg.design.sub.h / units::mm},
                           {"eps_r", cfg.design.sub.eps_r},
                           {"tan_delta", cfg.design.sub.tan_delta}};
    auto js = out.open("synth_design.json");
    js << nlohmann::ordered_json{{"design", design}}.dump(2) << '\n';
}

void write_trace(output_set& out, const fit_result& r) {
    auto csv = out.open("fit_trace.csv");
    csv << "iteration,rms,damping,window_hz\n";
    for (const auto& t : r.trace) {
        csv << t.iteration << ',' << format_number(t.rms) << ',' << format_number(t.damping)
            << ',' << format_number(t.window) << '\n';
    }
}

void write_fit_values(output_set& out, const fit_result& r) {
    static const char* first[] = {"Ls_nH", "Cs_pF", "Lp_nH", "Cp_pF", "Lpar_nH"};
    static const char* second[] = {"La_nH", "Ca_pF", "Lb_nH", "Cb_pF", "Lp_nH", "Cp_pF"};
    const bool is_first = std::holds_alternative<first_order_model>(r.fitted);
    const std::vector<double> values = circuit_values(r.fitted);
    auto txt = out.open("fit_result.txt");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const char* name = is_first ? first[i] : second[i];
        const double scale = name[0] == 'L' ? units::nh : units::pf;
        txt << name << " = " << format_number(values[i] / scale) << '\n';
    }
    txt << "rms = " << format_number(r.rms) << '\n'
        << "iterations = " << r.iterations << '\n';
}

void run_fit(const job_config& cfg, const run_options& opts, output_set& out) {
    if (!cfg.fit) {
        throw fss_error(error_category::config, "fit: missing block for the fit command");
    }
    const response_table data = maybe_smooth(io::import_response(cfg.fit->data), opts);
    fit_options fo;
    fo.mode = cfg.fit->mode;
    fo.max_iterations = cfg.fit->max_iterations;
    try {
        const fit_result r = fit_circuit(data, design_model(cfg.design, first_incidence(cfg)), fo);
        write_fit_values(out, r);
        write_trace(out, r);
    } catch (const fit_diverged_error& e) {
        write_fit_values(out, e.best());
        write_trace(out, e.best());
        throw;
    }
}

void write_sidecar(output_set& out, std::string_view command, const fs::path& config_path) {
    nlohmann::ordered_json meta;
    meta["tool"] = "fssecm";
    meta["command"] = std::string(command);
    meta["config"] = config_path.filename().string();
    meta["outputs"] = out.written;
    std::ofstream js(out.dir / "run.json", std::ios::binary);
    js << meta.dump(2) << '\n';
}

} // namespace

int run(std::string_view command, const fs::path& config_path, const fs::path& output_dir,
        const run_options& options, std::ostream& err) {
    try {
        const job_config cfg = load_config(config_path);
        std::error_code ec;
        fs::create_directories(output_dir, ec);
        if (ec) {
            throw fss_error(error_category::io, "cannot create '" + output_dir.string() + "'");
        }
        output_set out{output_dir, {}};
        if (command == "analyze") {
            run_analyze(cfg, options, out);
        } else if (command == "sweep") {
            run_sweep(cfg, out);
        } else if (command == "angular") {
            run_angular(cfg, out);
        } else if (command == "synth") {
            run_synth(cfg, out);
        } else if (command == "fit") {
            run_fit(cfg, options, out);
        } else {
            throw fss_error(error_category::invalid_input,
                            "unknown command '" + std::string(command) + "'");
        }
        write_sidecar(out, command, config_path);
        return 0;
    } catch (const fss_error& e) {
        err << "error: " << to_string(e.category()) << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
    }
    return 1;
}

} // namespace fssecm::cli
