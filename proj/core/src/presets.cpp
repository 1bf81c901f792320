#include "voltra/presets.hpp"

#include <cmath>

#include "voltra/errors.hpp"
#include "voltra/grid.hpp"
#include "voltra/kernel_io.hpp"
#include "voltra/operators.hpp"

namespace voltra {

namespace {

// Standard bump scaled to peak 1 on (0,1).
double bump01(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return std::exp(4.0 - 1.0 / (u * (1.0 - u)));
}

// Log modulus |ln tau|^-delta, frozen at 1 once tau passes 1/e so the
// profile stays nondecreasing; behavior near 0 is what matters.
double log_modulus(double tau, double delta) {
    if (tau <= 0.0) return 0.0;
    if (tau >= std::exp(-1.0)) return 1.0;
    return std::pow(-std::log(tau), -delta);
}

std::map<std::string, double> fill_params(const std::string& name,
                                          const std::map<std::string, double>& given) {
    const std::map<std::string, double>& defaults = preset_default_params(name);
    for (const auto& [key, _] : given)
        if (!defaults.count(key))
            throw InvalidInputError("preset '" + name + "' has no parameter '" + key + "'");
    std::map<std::string, double> out = defaults;
    for (const auto& [key, val] : given) out[key] = val;
    return out;
}

}  // namespace

const std::map<std::string, double>& preset_default_params(const std::string& name) {
    static const std::map<std::string, std::map<std::string, double>> table = {
        {"constant-times-lag", {{"c", 1.0}}},
        {"fractional", {{"alpha", 2.0}}},
        {"cesaro", {{"c", 1.0}}},
        {"rank-one-bumps", {{"amp1", 1.0}, {"amp2", 1.0}}},
        {"log-moduli", {{"delta1", 0.3}, {"delta2", 0.3}}},
        {"custom-csv", {}},
    };
    auto it = table.find(name);
    if (it == table.end()) throw InvalidInputError("unknown preset '" + name + "'");
    return it->second;
}

KernelPreset rank_one_kernel(const std::function<double(double)>& phi,
                             const std::function<double(double)>& psi, double a, double b) {
    if (!(a < b)) throw InvalidInputError("rank_one_kernel needs a < b");
    KernelPreset p;
    p.name = "rank-one";
    p.documentation = "separable kernel v(x,t) = phi(x) psi(t) on the causal triangle";
    p.v = [phi, psi](double x, double t) { return phi(x) * psi(t); };
    p.has_product_flag = true;
    Grid probe(4096, a, b);
    double worst = 0.0;
    for (int i = 0; i < probe.size(); ++i)
        worst = std::max(worst, std::abs(phi(probe.node(i)) * psi(probe.node(i))));
    p.product_vanishes = (worst == 0.0);
    return p;
}

KernelPreset make_preset(const std::string& name, const std::map<std::string, double>& params,
                         double a, double b) {
    if (!(a < b)) throw InvalidInputError("make_preset needs a < b");
    KernelPreset p;
    p.name = name;
    if (name == "constant-times-lag") {
        p.params = fill_params(name, params);
        double c = p.params.at("c");
        p.documentation = "v = c (x - t); the majorant kernel is the constant |c|";
        p.v = [c](double x, double t) { return c * (x - t); };
        double ac = std::abs(c);
        p.q = [ac](double) { return ac; };
        p.has_q = true;
        p.v_diag = [ac](double) { return ac; };
        p.omega1 = p.omega2 = [ac](double tau) {
            return tau > 0.0 ? std::sqrt(ac * tau) : 0.0;
        };
        p.has_moduli = true;
    } else if (name == "fractional") {
        p.params = fill_params(name, params);
        double alpha = p.params.at("alpha");
        if (!(alpha > 1.0))
            throw InvalidInputError("fractional preset needs alpha > 1, got " +
                                    std::to_string(alpha));
        double gamma = std::tgamma(alpha);
        p.documentation = "Abel family v = (x - t)^(alpha-1) / Gamma(alpha); the majorant "
                          "kernel has an integrable diagonal singularity for alpha < 2";
        p.v = [alpha, gamma](double x, double t) {
            return std::pow(x - t, alpha - 1.0) / gamma;
        };
        p.q = [alpha, gamma](double tau) { return std::pow(tau, alpha - 2.0) / gamma; };
        p.has_q = true;
        if (alpha >= 2.0)
            p.v_diag = [alpha, gamma](double) { return alpha == 2.0 ? 1.0 / gamma : 0.0; };
        p.omega1 = p.omega2 = [alpha, gamma](double tau) {
            return tau > 0.0 ? std::pow(tau, (alpha - 1.0) / 2.0) / std::sqrt(gamma) : 0.0;
        };
        p.has_moduli = true;
        p.requires_cell_average = alpha < 2.0;
    } else if (name == "cesaro") {
        p.params = fill_params(name, params);
        double c = p.params.at("c");
        if (!(c >= 0.0))
            throw InvalidInputError("cesaro preset needs c >= 0, got " + std::to_string(c));
        p.documentation = "averaging family v = c (x - t) / x; the majorant kernel c / x "
                          "admits no integrable convolution profile";
        p.v = [c](double x, double t) { return c * (x - t) / x; };
        p.q = [c](double tau) { return c / tau; };
        p.has_q = true;
        p.v_diag = [c](double x) { return c / x; };
    } else if (name == "rank-one-bumps") {
        std::map<std::string, double> filled = fill_params(name, params);
        double amp1 = filled.at("amp1"), amp2 = filled.at("amp2");
        double mid = 0.5 * (a + b);
        auto phi = [amp1, mid, b](double x) { return amp1 * bump01((x - mid) / (b - mid)); };
        auto psi = [amp2, a, mid](double t) { return amp2 * bump01((t - a) / (mid - a)); };
        p = rank_one_kernel(phi, psi, a, b);
        p.name = name;
        p.params = std::move(filled);
        p.documentation = "separable bumps with disjoint supports: phi lives on the right "
                          "half interval, psi on the left, so phi psi vanishes identically";
        p.v_diag = [](double) { return 0.0; };
    } else if (name == "log-moduli") {
        p.params = fill_params(name, params);
        double d1 = p.params.at("delta1"), d2 = p.params.at("delta2");
        if (!(d1 > 0.0 && d1 < 1.0 && d2 > 0.0 && d2 < 1.0))
            throw InvalidInputError("log-moduli preset needs delta1, delta2 in (0, 1)");
        p.documentation = "stress family |v| = omega1(x-t) omega2(x-t) with logarithmic "
                          "moduli |ln tau|^-delta; for delta1 + delta2 < 1 the analytic "
                          "machinery breaks down and divergence is the expected observation";
        p.v = [d1, d2](double x, double t) {
            return log_modulus(x - t, d1) * log_modulus(x - t, d2);
        };
        p.q = [d1, d2](double tau) {
            return log_modulus(tau, d1) * log_modulus(tau, d2) / tau;
        };
        p.has_q = true;
        p.omega1 = [d1](double tau) { return log_modulus(tau, d1); };
        p.omega2 = [d2](double tau) { return log_modulus(tau, d2); };
        p.has_moduli = true;
    } else if (name == "custom-csv") {
        throw InvalidInputError(
            "the custom-csv preset is built from a file; use make_csv_preset(path) or set "
            "preset.kernel_csv in the scenario config");
    } else {
        throw InvalidInputError("unknown preset '" + name + "'");
    }
    return p;
}

KernelPreset make_csv_preset(const std::string& path) {
    auto matrix = std::make_shared<Eigen::MatrixXd>(load_dense_csv(path));
    if (!check_triangular(*matrix))
        throw IoError("'" + path + "' is not strictly lower triangular");
    KernelPreset p;
    p.name = "custom-csv";
    p.documentation = "kernel matrix imported from " + path;
    p.v = [](double, double) -> double {
        throw InvalidInputError("custom-csv presets carry a matrix, not a kernel function");
    };
    p.matrix = std::move(matrix);
    return p;
}

const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog = {
        {"constant-times-lag", "c (default 1)",
         "v = c (x - t); constant majorant kernel, Schur profile q = |c|"},
        {"fractional", "alpha > 1 (default 2)",
         "Abel kernel (x - t)^(alpha-1) / Gamma(alpha); cell-averaged entries for alpha < 2"},
        {"cesaro", "c >= 0 (default 1)",
         "v = c (x - t) / x; no integrable convolution profile, certified via the "
         "Gelfand route"},
        {"rank-one-bumps", "amp1, amp2 (default 1)",
         "separable bumps with disjoint supports; the pointwise product vanishes"},
        {"log-moduli", "delta1, delta2 in (0, 1) (default 0.3)",
         "logarithmic moduli stress kernel; expected to defeat every certificate"},
        {"custom-csv", "none (kernel_csv path in config)",
         "dense strictly lower triangular matrix loaded from CSV"},
    };
    return catalog;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& info : preset_catalog()) names.push_back(info.name);
    return names;
}

}  // namespace voltra
