#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voltra/majorants.hpp"
#include "voltra/operators.hpp"

namespace voltra {

// Result of the successive-approximation construction of K solving
// [S, K] + V K + V = 0, together with its certificates: per-term norms,
// the entrywise majorization chain on the leading terms, the relative
// intertwining residual, and a Gelfand estimate for spr(K).
struct SimilarityTransform {
    KernelOperator K;
    int terms_used = 0;
    std::vector<double> term_norms;
    std::vector<double> ratios;  // ||K_n|| / ||K_{n-1}||, n >= 2
    double residual = 0.0;
    bool chain_ok = false;
    int chain_checked = 0;
    double spr_K_estimate = 0.0;
    std::vector<KernelOperator> leading_terms;  // K_1 .. K_min(N,6)
};

// K_1 = commutator_solve(S, -V), K_n = commutator_solve(S, -V K_{n-1});
// stops once ||K_N|| <= tol (1 - rho) with rho the running term ratio, or
// at n_cap.  Five consecutive ratios >= 1 raise DivergenceError carrying
// the partial norms and ratios.
SimilarityTransform friedrichs_iterate(const MultiplicationOperator& s,
                                       const KernelOperator& v, const KernelOperator& w,
                                       double tol, int n_cap);

enum class Verdict { SimilarByThm1, SimilarByCor1, Inconclusive };

std::string to_string(Verdict v);

// Applicability certificate for the similarity machinery.  The Schur route
// (integrable convolution profile dominating W) certifies that W is a
// Volterra operator with vanishing spectral radius; failing that, a Gelfand
// estimate below the configured margin certifies the spectral-radius
// hypothesis directly; everything else is inconclusive.
struct Certificate {
    bool has_schur = false;        // a profile q was supplied
    double schur_value = 0.0;      // ||q||_1, +infinity when divergent
    bool schur_integrable = false;
    bool majorant_check_ok = false;
    double majorant_margin = 0.0;
    double gelfand_estimate = 0.0;
    int gelfand_terms = 0;
    bool gelfand_corner = false;   // closed-triangle completion was available
    double eigenvalue_spr = 0.0;
    bool volterra_flag = false;    // truncation argument applies
    double spr_margin = 0.45;
    int grid_n = 0;
    Verdict verdict = Verdict::Inconclusive;
};

// q, when given, is classified in place by schur_bound.  w_diag, when given,
// is the diagonal-limit profile of w at the nodes; the Gelfand estimate then
// runs on the completed action matrix, which keeps corner-singular majorants
// (Cesaro type) from losing their spectral radius to the dropped diagonal.
Certificate spr_certificate(const KernelOperator& w, ConvolutionMajorant* q = nullptr,
                            double spr_margin = 0.45, int gelfand_terms = 30,
                            const std::vector<double>* w_diag = nullptr);

struct Inversion {
    KernelOperator M;        // (I+K)^(-1) - I
    double cross_check_gap;  // operator-norm gap between the two routes
    int neumann_terms;
};

// Inverts I + K two ways (truncated Neumann series and direct triangular
// solve), cross-checks them, and returns the direct-solve result.
Inversion invert_transform_checked(const KernelOperator& k);
KernelOperator invert_transform(const KernelOperator& k);

// ||(S+V)(I+K) - (I+K)S|| / max(||V||, 1e-300), which reduces to
// ||[S,K] + V K + V|| on the numerator.
double intertwining_residual(const MultiplicationOperator& s, const KernelOperator& v,
                             const KernelOperator& k);

struct ChainCheck {
    bool holds = true;
    int first_failure = -1;  // 1-based term index, -1 when the chain holds
    double worst_violation = 0.0;
};

// Entrywise |K_n| <= W^n for each supplied term, plus the sharper link
// |K_n| <= W |K_{n-1}|.  Failure is an outcome, not an error.
ChainCheck check_chain(const std::vector<KernelOperator>& terms, const KernelOperator& w);

}  // namespace voltra
