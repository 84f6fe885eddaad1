#include "fssecm/synthesis.h"

#include "fssecm/constants.h"

#include <Eigen/Dense>

#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace fssecm {

namespace {

using constants::pi;

double angular(double f) { return 2.0 * pi * f; }

std::string diverged_message(const fit_result& best) {
    std::ostringstream os;
    os << "fit did not converge within " << best.iterations << " iterations (rms " << best.rms
       << ")";
    return os.str();
}

double weight_total(const response_table& data, const fit_options& options) {
    if (options.weights.empty()) {
        return static_cast<double>(data.size());
    }
    double total = 0.0;
    for (double w : options.weights) {
        total += w;
    }
    return total;
}

void check_weights(const response_table& data, const fit_options& options) {
    if (options.weights.empty()) {
        return;
    }
    if (options.weights.size() != data.size()) {
        throw fss_error(error_category::invalid_input, "fit weights must match the data rows");
    }
    for (double w : options.weights) {
        if (!(w >= 0.0)) {
            throw fss_error(error_category::invalid_input, "fit weights must be non-negative");
        }
    }
    if (!(weight_total(data, options) > 0.0)) {
        throw fss_error(error_category::invalid_input, "fit weights sum to zero");
    }
}

} // namespace

extracted_circuit circuit_from_targets(const design_targets& targets) {
    if (!(targets.f_l > 0.0 && targets.f_u > targets.f_l)) {
        throw fss_error(error_category::invalid_parameter, "targets need 0 < f_l < f_u");
    }
    if (!(targets.l_p > 0.0)) {
        throw fss_error(error_category::invalid_parameter, "L_p must be positive");
    }
    const double f0 = targets.f0.value_or(std::sqrt(targets.f_l * targets.f_u));
    if (!(f0 > targets.f_l && f0 < targets.f_u)) {
        std::ostringstream os;
        os << "transmission zero " << f0 << " Hz is not between the bands; attainable f0 range for L_p = "
           << targets.l_p << " H is (" << targets.f_l << ", " << targets.f_u << ") Hz";
        throw infeasible_targets_error(os.str(), targets.f_l, targets.f_u);
    }
    const double wl = angular(targets.f_l);
    const double wu = angular(targets.f_u);
    const double w0 = angular(f0);

    // (L_p + L_s) C_s = 1/wl^2 and L_s C_s = 1/w0^2 give L_p / L_s = (w0/wl)^2 - 1.
    extracted_circuit c;
    c.l_p = targets.l_p;
    c.c_p = 1.0 / (wu * wu * targets.l_p);
    c.l_s = targets.l_p / ((w0 / wl) * (w0 / wl) - 1.0);
    c.c_s = 1.0 / (w0 * w0 * c.l_s);
    return c;
}

bisection_result bisect_decreasing(const std::function<double(double)>& value, double target,
                                   double lo, double hi, const char* parameter,
                                   const geometry_limits& limits) {
    const double v_lo = value(lo);
    const double v_hi = value(hi);
    if (!(target <= v_lo && target >= v_hi)) {
        throw unattainable_dimension_error(parameter, target, v_hi, v_lo);
    }
    bisection_result r;
    while (hi - lo > limits.tolerance && r.iterations < limits.max_iterations) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++r.iterations;
    }
    if (hi - lo > limits.tolerance) {
        std::ostringstream os;
        os << "bisection for " << parameter << " stopped " << (hi - lo) << " m from the tolerance after "
           << r.iterations << " iterations";
        throw fss_error(error_category::diverged, os.str());
    }
    r.x = 0.5 * (lo + hi);
    return r;
}

first_order_geometry geometry_from_circuit(const extracted_circuit& circuit, double a,
                                           const substrate& sub, const geometry_limits& limits) {
    if (!(a > 0.0)) {
        throw fss_error(error_category::invalid_parameter, "period a must be positive");
    }
    if (!(circuit.l_s > 0.0 && circuit.c_s > 0.0 && circuit.l_p > 0.0 && circuit.c_p > 0.0)) {
        throw fss_error(error_category::invalid_parameter,
                        "L_s, C_s, L_p and C_p must be strictly positive");
    }
    validate(sub);
    if (!(limits.min_feature > 0.0 && 3.0 * limits.min_feature < a)) {
        throw fss_error(error_category::invalid_parameter, "minimum feature too large for period");
    }
    const double mu = constants::mu0;
    const double eps = constants::eps0 * effective_permittivity(sub.eps_r);
    const double lo = limits.min_feature;
    const double hi = a - limits.min_feature;

    const auto grid_inductance = [&](double gap) {
        return a / (2.0 * pi) * mu * log_csc(pi * gap / (2.0 * a));
    };

    first_order_geometry geom;
    geom.a = a;
    geom.h = sub.h;
    geom.eps_r = sub.eps_r;
    geom.tan_delta = sub.tan_delta;
    geom.s = bisect_decreasing(grid_inductance, circuit.l_s, lo, hi, "s", limits).x;
    geom.g = bisect_decreasing(grid_inductance, circuit.l_p, lo, hi, "g", limits).x;

    const double per_width = 2.0 / pi * eps * log_csc(pi * geom.g / (2.0 * a));
    geom.w = circuit.c_s / per_width;
    if (!(geom.w < a)) {
        throw unattainable_dimension_error("w", circuit.c_s, 0.0, per_width * a);
    }

    // C_p falls with s1 until the csc argument reaches pi/2 at s1 = (a - g) / 3.
    const double s1_max = (a - geom.g) / 3.0;
    if (!(s1_max > lo)) {
        throw unattainable_dimension_error("s1", circuit.c_p, 0.0, 0.0);
    }
    const auto patch_capacitance = [&](double s1) {
        const double aperture = a - geom.g - s1;
        return aperture / pi * eps * log_csc(std::min(pi * s1 / aperture, pi / 2.0));
    };
    geom.s1 = bisect_decreasing(patch_capacitance, circuit.c_p, lo, s1_max, "s1", limits).x;
    return geom;
}

fss_stack build_stack(const circuit_model& model) {
    return std::visit(
        [](const auto& m) -> fss_stack {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, first_order_model>) {
                return build_first_order(m.circuit, m.sub, m.inc, m.lossy);
            } else {
                return build_second_order(m.circuit, m.sub, m.inc, m.lossy);
            }
        },
        model);
}

std::vector<double> circuit_values(const circuit_model& model) {
    if (const auto* m = std::get_if<first_order_model>(&model)) {
        const auto& c = m->circuit;
        return {c.l_s, c.c_s, c.l_p, c.c_p, c.l_par};
    }
    const auto& c = std::get<second_order_model>(model).circuit;
    return {c.outer.l_a, c.outer.c_a, c.outer.l_b, c.outer.c_b, c.l_p, c.c_p};
}

circuit_model with_circuit_values(const circuit_model& model, const std::vector<double>& v) {
    circuit_model out = model;
    if (auto* m = std::get_if<first_order_model>(&out)) {
        if (v.size() != 5) {
            throw fss_error(error_category::invalid_input, "first-order model has 5 values");
        }
        m->circuit = {v[0], v[1], v[2], v[3], v[4]};
        return out;
    }
    if (v.size() != 6) {
        throw fss_error(error_category::invalid_input, "second-order model has 6 values");
    }
    auto& c = std::get<second_order_model>(out).circuit;
    c.outer = {v[0], v[1], v[2], v[3]};
    c.l_p = v[4];
    c.c_p = v[5];
    return out;
}

fit_diverged_error::fit_diverged_error(fit_result best)
    : fss_error(error_category::diverged, diverged_message(best)), m_best(std::move(best)) {}

namespace {

// Model S21 at the data frequencies, as a magnitude in magnitude mode.
std::vector<complex> model_samples(const response_table& data, const circuit_model& model,
                                   fit_mode mode) {
    const fss_stack stack = build_stack(model);
    std::vector<complex> out(data.size());
    std::exception_ptr failure;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(data.size()); ++i) {
        try {
            const complex s21 = evaluate(stack, data[static_cast<std::size_t>(i)].frequency).s21;
            out[static_cast<std::size_t>(i)] = mode == fit_mode::magnitude ? std::abs(s21) : s21;
        } catch (...) {
#pragma omp critical(fssecm_fit_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

std::vector<complex> smoothed(const response_table& data, const std::vector<complex>& y,
                              double window) {
    if (window <= 0.0) {
        return y;
    }
    std::vector<response_row> rows(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        rows[i] = {data[i].frequency, complex{}, y[i]};
    }
    const response_table s = smooth(response_table(std::move(rows)), window);
    std::vector<complex> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = s[i].s21;
    }
    return out;
}

// Residual of one fitting stage: both model and data pass through the same
// moving average, so the exact circuit stays a zero of every stage.
class fit_stage {
public:
    fit_stage(const response_table& data, const fit_options& options, double window)
        : m_data(data), m_options(options), m_window(window) {
        std::vector<complex> y(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            y[i] = options.mode == fit_mode::magnitude ? complex{std::abs(data[i].s21)}
                                                       : data[i].s21;
        }
        m_target = smoothed(data, y, window);
    }

    double window() const noexcept { return m_window; }

    Eigen::VectorXd operator()(const circuit_model& model) const {
        const std::vector<complex> y =
            smoothed(m_data, model_samples(m_data, model, m_options.mode), m_window);
        const std::size_t n = y.size();
        const bool split = m_options.mode == fit_mode::complex_s21;
        Eigen::VectorXd r(static_cast<Eigen::Index>(split ? 2 * n : n));
        for (std::size_t i = 0; i < n; ++i) {
            const double sw = m_options.weights.empty() ? 1.0 : std::sqrt(m_options.weights[i]);
            const complex e = y[i] - m_target[i];
            const auto k = static_cast<Eigen::Index>(i);
            if (split) {
                r(2 * k) = sw * e.real();
                r(2 * k + 1) = sw * e.imag();
            } else {
                r(k) = sw * e.real();
            }
        }
        return r;
    }

private:
    const response_table& m_data;
    const fit_options& m_options;
    double m_window;
    std::vector<complex> m_target;
};

// Coarse-to-fine windows: a fifth of the span, halved down to four grid steps.
std::vector<double> continuation_windows(const response_table& data) {
    const double span = data.rows().back().frequency - data.rows().front().frequency;
    const double step = span / static_cast<double>(data.size() - 1);
    std::vector<double> out;
    for (double w = span / 5.0; w >= 4.0 * step; w /= 2.0) {
        out.push_back(w);
    }
    return out;
}

struct lm_state {
    Eigen::VectorXd x;
    Eigen::VectorXd lower;   // box on x
    Eigen::VectorXd upper;
    Eigen::VectorXd r;
    double cost = 0.0;
    double damping = 0.0;
};

// Damped Gauss-Newton iterations on one stage. Returns true on convergence.
template <typename Model>
bool levenberg_marquardt(lm_state& s, const fit_stage& stage, const Model& model_at,
                         const fit_options& options, double norm, int& counter,
                         std::vector<fit_iteration>& trace) {
    const Eigen::Index np = s.x.size();
    for (int it = 1; it <= options.max_iterations; ++it) {
        Eigen::MatrixXd jac(s.r.size(), np);
        for (Eigen::Index j = 0; j < np; ++j) {
            Eigen::VectorXd xp = s.x;
            xp(j) += options.fd_step;
            jac.col(j) = (stage(model_at(xp)) - s.r) / options.fd_step;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * s.r;
        Eigen::VectorXd diag = jtj.diagonal();
        const double diag_floor = 1e-12 * std::max(diag.maxCoeff(), 1e-300);
        for (Eigen::Index j = 0; j < np; ++j) {
            diag(j) = std::max(diag(j), diag_floor);
        }

        bool converged = false;
        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal() += s.damping * diag;
            const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
            const Eigen::VectorXd x_new = (s.x + step).cwiseMax(s.lower).cwiseMin(s.upper);
            Eigen::VectorXd r_new;
            double cost_new = std::numeric_limits<double>::infinity();
            try {
                r_new = stage(model_at(x_new));
                cost_new = r_new.squaredNorm();
            } catch (const fss_error&) {
                // Trial point left the model's valid region; treat as a rejected step.
            }
            if (std::isfinite(cost_new) && cost_new < s.cost) {
                const double gain = s.cost - cost_new;
                s.x = x_new;
                s.r = std::move(r_new);
                s.cost = cost_new;
                s.damping = std::max(s.damping / 10.0, 1e-15);
                accepted = true;
                converged = gain <= options.tolerance * s.cost ||
                            step.lpNorm<Eigen::Infinity>() < 1e-13 || s.cost == 0.0;
            } else {
                s.damping *= 10.0;
                if (s.damping > 1e16) {
                    // No descent direction left at working precision.
                    converged = true;
                    break;
                }
            }
        }
        ++counter;
        trace.push_back({counter, std::sqrt(s.cost / norm), s.damping, stage.window()});
        if (converged) {
            return true;
        }
    }
    return false;
}

} // namespace

double fit_residual(const response_table& data, const circuit_model& model,
                    const fit_options& options) {
    check_weights(data, options);
    const Eigen::VectorXd r = fit_stage(data, options, 0.0)(model);
    return std::sqrt(r.squaredNorm() / weight_total(data, options));
}

fit_result fit_circuit(const response_table& data, const circuit_model& initial,
                       const fit_options& options) {
    check_weights(data, options);
    if (!(options.bound_factor > 1.0)) {
        throw fss_error(error_category::invalid_parameter, "fit bound factor must exceed 1");
    }
    const std::vector<double> start = circuit_values(initial);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < start.size(); ++i) {
        if (start[i] > 0.0) {
            active.push_back(i);
        } else if (start[i] < 0.0 || i + 1 != start.size() ||
                   !std::holds_alternative<first_order_model>(initial)) {
            throw fss_error(error_category::invalid_parameter,
                            "initial circuit values must be positive");
        }
    }
    const auto np = static_cast<Eigen::Index>(active.size());
    const double norm = weight_total(data, options);

    const auto model_at = [&](const Eigen::VectorXd& x) {
        std::vector<double> v = start;
        for (Eigen::Index j = 0; j < np; ++j) {
            v[active[static_cast<std::size_t>(j)]] = std::exp(x(j));
        }
        return with_circuit_values(initial, v);
    };

    const fit_stage exact(data, options, 0.0);
    lm_state initial_state;
    initial_state.x.resize(np);
    for (Eigen::Index j = 0; j < np; ++j) {
        initial_state.x(j) = std::log(start[active[static_cast<std::size_t>(j)]]);
    }
    const double reach = std::log(options.bound_factor);
    initial_state.lower = initial_state.x.array() - reach;
    initial_state.upper = initial_state.x.array() + reach;
    initial_state.r = exact(initial);
    initial_state.cost = initial_state.r.squaredNorm();
    initial_state.damping = options.initial_damping;

    fit_result result;
    result.fitted = initial;
    result.rms = std::sqrt(initial_state.cost / norm);
    result.trace.push_back({0, result.rms, initial_state.damping, 0.0});
    if (options.max_iterations <= 0 || initial_state.cost == 0.0) {
        return result;
    }

    int counter = 0;
    lm_state s = initial_state;
    if (options.continuation) {
        for (double w : continuation_windows(data)) {
            const fit_stage stage(data, options, w);
            s.r = stage(model_at(s.x));
            s.cost = s.r.squaredNorm();
            s.damping = options.initial_damping;
            levenberg_marquardt(s, stage, model_at, options, norm, counter, result.trace);
        }
        s.r = exact(model_at(s.x));
        s.cost = s.r.squaredNorm();
        s.damping = options.initial_damping;
        if (!(s.cost <= initial_state.cost)) {
            s = initial_state;
        }
    }
    const bool converged =
        levenberg_marquardt(s, exact, model_at, options, norm, counter, result.trace);

    result.fitted = model_at(s.x);
    result.rms = std::sqrt(s.cost / norm);
    result.iterations = counter;
    if (!converged) {
        throw fit_diverged_error(std::move(result));
    }
    return result;
}

} // namespace fssecm
