#pragma once

#include "fssecm/analysis.h"
#include "fssecm/errors.h"
#include "fssecm/extraction.h"
#include "fssecm/topology.h"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace fssecm {

struct design_targets {
    double f_l = 0.0;
    double f_u = 0.0;
    std::optional<double> f0;   // defaults to sqrt(f_l f_u)
    double l_p = 4e-9;          // free impedance-level knob
};

// Inverts the approximate resonance predictors. Throws invalid_parameter for
// malformed targets and infeasible_targets_error when f0 leaves (f_l, f_u).
extracted_circuit circuit_from_targets(const design_targets& targets);

struct geometry_limits {
    // Narrowest slot or gap the inversion may return, and the same margin
    // below the period for the widest.
    double min_feature = 1e-6;
    double tolerance = 1e-12;   // m
    int max_iterations = 60;
};

struct bisection_result {
    double x = 0.0;
    int iterations = 0;
};

// Solves value(x) = target for a strictly decreasing value() on [lo, hi].
// Throws unattainable_dimension_error naming `parameter` when the target is
// outside [value(hi), value(lo)].
bisection_result bisect_decreasing(const std::function<double(double)>& value, double target,
                                   double lo, double hi, const char* parameter,
                                   const geometry_limits& limits = {});

// Dimensions that re-extract to `circuit` for period `a` on `sub`.
// l_par is ignored. s1 is taken on the branch where C_p falls with s1.
first_order_geometry geometry_from_circuit(const extracted_circuit& circuit, double a,
                                           const substrate& sub,
                                           const geometry_limits& limits = {});

struct first_order_model {
    extracted_circuit circuit;
    substrate sub;
    incidence inc;
    bool lossy = false;
};

struct second_order_model {
    second_order_circuit circuit;
    substrate sub;
    incidence inc;
    bool lossy = false;
};

using circuit_model = std::variant<first_order_model, second_order_model>;

fss_stack build_stack(const circuit_model& model);

// Element values the fit adjusts, in a fixed order:
// first order: L_s, C_s, L_p, C_p, L_par; second order: L_a, C_a, L_b, C_b, L_p, C_p.
std::vector<double> circuit_values(const circuit_model& model);
circuit_model with_circuit_values(const circuit_model& model, const std::vector<double>& values);

enum class fit_mode { complex_s21, magnitude };

struct fit_options {
    fit_mode mode = fit_mode::complex_s21;
    int max_iterations = 200;
    double fd_step = 1e-6;          // relative (log-parameter) step
    double initial_damping = 1e-3;
    // Each value stays within this factor of its initial guess. Without a bound
    // an element whose branch stops mattering (a tank inductor far above the
    // band, say) can drift off without limit.
    double bound_factor = 10.0;
    double tolerance = 1e-12;       // relative RMS improvement that ends the fit
    std::vector<double> weights;    // per row; empty means uniform
    // Run coarse-to-fine stages on smoothed model and data before the plain fit.
    bool continuation = true;
};

struct fit_iteration {
    int iteration = 0;
    double rms = 0.0;
    double damping = 0.0;
    double window = 0.0;   // smoothing window of the stage, Hz; 0 for the plain residual
};

struct fit_result {
    circuit_model fitted;
    double rms = 0.0;
    int iterations = 0;
    std::vector<fit_iteration> trace;
};

class fit_diverged_error : public fss_error {
public:
    fit_diverged_error(fit_result best);
    const fit_result& best() const noexcept { return m_best; }

private:
    fit_result m_best;
};

// RMS of the residual between the model's S21 and the data.
double fit_residual(const response_table& data, const circuit_model& model,
                    const fit_options& options = {});

// Damped least squares over log element values. A zero initial L_par stays
// fixed at zero. Throws fit_diverged_error when the iteration cap is reached
// without convergence (a cap of 0 returns the initial guess).
fit_result fit_circuit(const response_table& data, const circuit_model& initial,
                       const fit_options& options = {});

} // namespace fssecm
