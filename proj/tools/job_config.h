#pragma once

#include "fssecm/analysis.h"
#include "fssecm/synthesis.h"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fssecm::cli {

enum class design_order { first, second };

struct design_block {
    design_order order = design_order::first;
    std::optional<first_order_geometry> geometry;     // first order only
    std::optional<extracted_circuit> circuit;         // first order
    std::optional<second_order_circuit> circuit2;     // second order
    substrate sub;
    bool lossy = false;
    double l_par = 0.0;   // applied to geometry-sourced designs
};

struct parametric_block {
    std::string param;
    std::vector<double> values;   // in the parameter's config unit
};

struct targets_block {
    design_targets targets;
    double a = 0.0;
};

struct fit_block {
    std::filesystem::path data;
    fit_mode mode = fit_mode::complex_s21;
    int max_iterations = 200;
};

struct job_config {
    design_block design;
    sweep_grid grid;
    std::vector<double> thetas{0.0};
    std::vector<polarization> polarizations{polarization::te};
    std::optional<parametric_block> parametric;
    std::optional<targets_block> targets;
    std::optional<fit_block> fit;
};

// Throws fss_error(config) naming the offending key and its expected unit.
job_config parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
job_config load_config(const std::filesystem::path& path);

// Circuit of a first-order design: the explicit circuit, or the extraction of
// its geometry with l_par applied.
extracted_circuit first_order_circuit(const design_block& design);
circuit_model design_model(const design_block& design, const incidence& inc);

} // namespace fssecm::cli
