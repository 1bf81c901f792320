#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace voltra {

// A named kernel family with its documented companions: the convolution
// profile q when one is known, modulus-of-continuity factors when the
// kernel is modulus-bounded, and the loaded matrix for csv kernels.
struct KernelPreset {
    std::string name;
    std::map<std::string, double> params;
    std::function<double(double, double)> v;  // zero for t >= x
    std::string documentation;

    std::function<double(double)> q;
    bool has_q = false;

    // Diagonal limit of |v(x,t)|/(x-t) as t -> x, when it is finite; empty
    // otherwise.  Feeds the closed-triangle completion of the majorant's
    // Gelfand estimate, whose corner mass the strict triangle drops.
    std::function<double(double)> v_diag;

    std::function<double(double)> omega1, omega2;
    bool has_moduli = false;

    bool requires_cell_average = false;

    bool has_product_flag = false;  // rank-one families only
    bool product_vanishes = false;

    std::shared_ptr<const Eigen::MatrixXd> matrix;  // custom-csv payload
};

// Families: constant-times-lag (c), fractional (alpha > 1), cesaro (c),
// rank-one-bumps (amp1, amp2), log-moduli (delta1, delta2 in (0,1)),
// custom-csv (via make_csv_preset).  Unknown names or out-of-range
// parameters throw InvalidInputError.
KernelPreset make_preset(const std::string& name,
                         const std::map<std::string, double>& params = {}, double a = 0.0,
                         double b = 1.0);

KernelPreset make_csv_preset(const std::string& path);

// Generic rank-one kernel v(x,t) = phi(x) psi(t); the product flag records
// whether phi * psi vanishes at every probe point of (a, b).
KernelPreset rank_one_kernel(const std::function<double(double)>& phi,
                             const std::function<double(double)>& psi, double a = 0.0,
                             double b = 1.0);

struct PresetInfo {
    std::string name;
    std::string parameters;  // "c (default 1)" style summary
    std::string summary;
};

const std::vector<PresetInfo>& preset_catalog();
std::vector<std::string> preset_names();

// Default parameter map of a named family ({} for custom-csv); throws
// InvalidInputError for unknown names.
const std::map<std::string, double>& preset_default_params(const std::string& name);

}  // namespace voltra
