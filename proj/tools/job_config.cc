#include "job_config.h"

#include "fssecm/constants.h"
#include "fssecm/errors.h"

#include <fstream>

namespace fssecm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
    throw fss_error(error_category::config, key + ": " + what);
}

std::string join(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
}

const json& child(const json& obj, const std::string& path, const char* key,
                  const std::string& expected = "") {
    if (!obj.contains(key)) {
        config_error(join(path, key), expected.empty() ? "missing" : "missing, " + expected);
    }
    return obj.at(key);
}

double number(const json& obj, const std::string& path, const char* key, const char* unit,
              double scale) {
    const std::string expected = std::string("expected a number in ") + unit;
    const json& v = child(obj, path, key, expected);
    if (!v.is_number()) {
        config_error(join(path, key), expected);
    }
    return v.get<double>() * scale;
}

double number_or(const json& obj, const std::string& path, const char* key, const char* unit,
                 double scale, double fallback) {
    return obj.contains(key) ? number(obj, path, key, unit, scale) : fallback;
}

const json& object(const json& parent, const std::string& path, const char* key) {
    const json& v = child(parent, path, key, "expected an object");
    if (!v.is_object()) {
        config_error(join(path, key), "expected an object");
    }
    return v;
}

std::vector<double> number_list(const json& obj, const std::string& path, const char* key,
                                const char* unit) {
    const std::string expected = std::string("expected an array of numbers in ") + unit;
    const json& v = child(obj, path, key, expected);
    if (!v.is_array()) {
        config_error(join(path, key), expected);
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            config_error(join(path, key), expected);
        }
        out.push_back(e.get<double>());
    }
    return out;
}

design_block parse_design(const json& doc) {
    const std::string path = "design";
    const json& d = object(doc, "", "design");
    design_block out;
    const std::string order = d.value("order", std::string("first"));
    if (order == "first") {
        out.order = design_order::first;
    } else if (order == "second") {
        out.order = design_order::second;
    } else {
        config_error("design.order", "expected \"first\" or \"second\"");
    }

    const json& sub = object(d, path, "substrate");
    out.sub.h = number(sub, "design.substrate", "h_mm", "mm", units::mm);
    out.sub.eps_r = number(sub, "design.substrate", "eps_r", "dimensionless", 1.0);
    out.sub.tan_delta = number_or(sub, "design.substrate", "tan_delta", "dimensionless", 1.0, 0.0);
    if (d.contains("lossy")) {
        if (!d.at("lossy").is_boolean()) {
            config_error("design.lossy", "expected true or false");
        }
        out.lossy = d.at("lossy").get<bool>();
    }

    const bool has_geometry = d.contains("geometry");
    const bool has_circuit = d.contains("circuit");
    if (has_geometry == has_circuit) {
        config_error("design", "exactly one of \"geometry\" or \"circuit\" is required");
    }
    if (out.order == design_order::second) {
        if (has_geometry) {
            config_error("design.geometry",
                         "second-order designs take circuit values only (L in nH, C in pF)");
        }
        const json& c = object(d, path, "circuit");
        const std::string cp = "design.circuit";
        second_order_circuit circ;
        circ.outer.l_a = number(c, cp, "La_nH", "nH", units::nh);
        circ.outer.c_a = number(c, cp, "Ca_pF", "pF", units::pf);
        circ.outer.l_b = number(c, cp, "Lb_nH", "nH", units::nh);
        circ.outer.c_b = number(c, cp, "Cb_pF", "pF", units::pf);
        circ.l_p = number(c, cp, "Lp_nH", "nH", units::nh);
        circ.c_p = number(c, cp, "Cp_pF", "pF", units::pf);
        out.circuit2 = circ;
        return out;
    }
    if (has_geometry) {
        const json& g = object(d, path, "geometry");
        const std::string gp = "design.geometry";
        first_order_geometry geom;
        geom.a = number(g, gp, "a_mm", "mm", units::mm);
        geom.w = number(g, gp, "w_mm", "mm", units::mm);
        geom.s = number(g, gp, "s_mm", "mm", units::mm);
        geom.s1 = number(g, gp, "s1_mm", "mm", units::mm);
        geom.g = number(g, gp, "g_mm", "mm", units::mm);
        geom.h = out.sub.h;
        geom.eps_r = out.sub.eps_r;
        geom.tan_delta = out.sub.tan_delta;
        out.geometry = geom;
        out.l_par = number_or(d, path, "Lpar_nH", "nH", units::nh, 0.0);
    } else {
        const json& c = object(d, path, "circuit");
        const std::string cp = "design.circuit";
        extracted_circuit circ;
        circ.l_s = number(c, cp, "Ls_nH", "nH", units::nh);
        circ.c_s = number(c, cp, "Cs_pF", "pF", units::pf);
        circ.l_p = number(c, cp, "Lp_nH", "nH", units::nh);
        circ.c_p = number(c, cp, "Cp_pF", "pF", units::pf);
        circ.l_par = number_or(c, cp, "Lpar_nH", "nH", units::nh, 0.0);
        out.circuit = circ;
    }
    return out;
}

} // namespace

job_config parse_config(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) {
        config_error("<root>", "expected a JSON object");
    }
    job_config cfg;
    cfg.design = parse_design(doc);

    if (doc.contains("sweep")) {
        const json& s = object(doc, "", "sweep");
        cfg.grid.start = number(s, "sweep", "start_ghz", "GHz", units::ghz);
        cfg.grid.stop = number(s, "sweep", "stop_ghz", "GHz", units::ghz);
        if (s.contains("points")) {
            if (!s.at("points").is_number_integer()) {
                config_error("sweep.points", "expected an integer count");
            }
            cfg.grid.points = s.at("points").get<int>();
        }
        const std::string spacing = s.value("spacing", std::string("linear"));
        if (spacing == "linear") {
            cfg.grid.spacing = grid_spacing::linear;
        } else if (spacing == "log") {
            cfg.grid.spacing = grid_spacing::log;
        } else {
            config_error("sweep.spacing", "expected \"linear\" or \"log\"");
        }
    }

    if (doc.contains("incidence")) {
        const json& inc = object(doc, "", "incidence");
        if (inc.contains("theta_deg")) {
            cfg.thetas.clear();
            for (double t : number_list(inc, "incidence", "theta_deg", "degrees")) {
                cfg.thetas.push_back(t * units::deg);
            }
        }
        if (inc.contains("polarization")) {
            const json& pols = inc.at("polarization");
            if (!pols.is_array()) {
                config_error("incidence.polarization", "expected an array of \"TE\"/\"TM\"");
            }
            cfg.polarizations.clear();
            for (const auto& p : pols) {
                const std::string name = p.is_string() ? p.get<std::string>() : std::string();
                if (name == "TE") {
                    cfg.polarizations.push_back(polarization::te);
                } else if (name == "TM") {
                    cfg.polarizations.push_back(polarization::tm);
                } else {
                    config_error("incidence.polarization", "expected an array of \"TE\"/\"TM\"");
                }
            }
        }
        if (cfg.thetas.empty() || cfg.polarizations.empty()) {
            config_error("incidence", "needs at least one angle and one polarization");
        }
    }

    if (doc.contains("parametric")) {
        const json& p = object(doc, "", "parametric");
        parametric_block pb;
        const json& name = child(p, "parametric", "param");
        if (!name.is_string()) {
            config_error("parametric.param", "expected a parameter name");
        }
        pb.param = name.get<std::string>();
        pb.values = number_list(p, "parametric", "values", "the parameter's unit");
        cfg.parametric = pb;
    }

    if (doc.contains("targets")) {
        const json& t = object(doc, "", "targets");
        targets_block tb;
        tb.targets.f_l = number(t, "targets", "fl_ghz", "GHz", units::ghz);
        tb.targets.f_u = number(t, "targets", "fu_ghz", "GHz", units::ghz);
        if (t.contains("f0_ghz")) {
            tb.targets.f0 = number(t, "targets", "f0_ghz", "GHz", units::ghz);
        }
        tb.targets.l_p = number_or(t, "targets", "Lp_nH", "nH", units::nh, 4.0 * units::nh);
        tb.a = number(t, "targets", "a_mm", "mm", units::mm);
        cfg.targets = tb;
    }

    if (doc.contains("fit")) {
        const json& f = object(doc, "", "fit");
        fit_block fb;
        const json& data = child(f, "fit", "data");
        if (!data.is_string()) {
            config_error("fit.data", "expected a file path");
        }
        fb.data = data.get<std::string>();
        if (fb.data.is_relative()) {
            fb.data = base_dir / fb.data;
        }
        const std::string mode = f.value("mode", std::string("complex"));
        if (mode == "complex") {
            fb.mode = fit_mode::complex_s21;
        } else if (mode == "magnitude") {
            fb.mode = fit_mode::magnitude;
        } else {
            config_error("fit.mode", "expected \"complex\" or \"magnitude\"");
        }
        if (f.contains("max_iterations")) {
            if (!f.at("max_iterations").is_number_integer()) {
                config_error("fit.max_iterations", "expected an integer count");
            }
            fb.max_iterations = f.at("max_iterations").get<int>();
        }
        cfg.fit = fb;
    }
    return cfg;
}

job_config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw fss_error(error_category::config, "cannot open config '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw fss_error(error_category::config, std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

extracted_circuit first_order_circuit(const design_block& design) {
    if (design.circuit) {
        return *design.circuit;
    }
    extracted_circuit c = extract_circuit(*design.geometry);
    c.l_par = design.l_par;
    return c;
}

circuit_model design_model(const design_block& design, const incidence& inc) {
    if (design.order == design_order::second) {
        return second_order_model{*design.circuit2, design.sub, inc, design.lossy};
    }
    return first_order_model{first_order_circuit(design), design.sub, inc, design.lossy};
}

} // namespace fssecm::cli
