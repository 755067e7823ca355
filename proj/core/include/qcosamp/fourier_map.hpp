#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qcosamp {

/// Finite sine-cosine series f(x) = lambda_0 + sum_n lambda_n cos(nx) +
/// gamma_n sin(nx); lambda[0] is the constant term, gamma[0] is unused and
/// kept 0.
struct FourierSeries {
    std::vector<double> lambda; // lambda_0 .. lambda_N
    std::vector<double> gamma;  // gamma_0 (=0) .. gamma_N

    int order() const { return static_cast<int>(lambda.size()) - 1; }
};

/// Per-component harmonic parameters (n, r_n, s_n) plus the owning tree's
/// depth, which fixes the normalization L_n = 4 * 2^depth.
struct FcosampComponent {
    long long n = 1;
    double r = 0.0;
    double s = 0.0;
    int depth = 0;
};

struct FcosampParams {
    std::vector<FcosampComponent> components;
};

/// First-reconstruction bookkeeping. scale is clamped at 1 so small series
/// are never inflated out of the reachable disk.
struct ReconstructionFactors {
    double scale = 1.0;           // max(1, max_k(lambda_k^2 + gamma_k^2))
    std::vector<double> rho;      // 2 * 2^depth_n * scale per component
    double rho_balanced = 0.0;    // 2 N scale when all depths agree, else 0
};

/// Exact FCoSamp evaluation sum_n [(1+cos(n x + r_n)) + (1+cos(n x + s_n))]/L_n.
double fcosamp_eval(const FcosampParams& params, double x);
/// Same with caller-provided L_n factors.
double fcosamp_eval(const FcosampParams& params, const std::vector<double>& L, double x);

/// Component coefficients reachable from a phase pair:
/// lambda = cos r + cos s, gamma = -sin r - sin s.
std::pair<double, double> phases_to_fourier(double r, double s);

/// Inverse mapping. Interior points of the radius-2 disk return two pairs,
/// the boundary one pair with r = s, and the origin the canonical (0, -pi).
/// Throws on lambda^2 + gamma^2 > 4 (pre-scale the series first).
std::vector<std::pair<double, double>> fourier_to_phases(double lambda, double gamma);

/// Divides coefficients by scale/2 so every component lands inside the
/// reachable disk; returns the factors needed to undo it after sampling.
ReconstructionFactors prescale(FourierSeries& series);
ReconstructionFactors reconstruction_factors(const FourierSeries& series,
                                             const std::vector<int>& depths);

/// Maps a series (already inside the disk after prescale) to component
/// parameters with exact per-component round-trip.
FcosampParams series_to_params(const FourierSeries& scaled, const std::vector<int>& depths);

/// Second reconstruction: f(x) = sum_n rho_n nu_n(x) - N*scale + lambda0.
/// Passing per-component nu values supports unbalanced trees; the balanced
/// shortcut f = rho * mu + (lambda0 - rho/2) is the same arithmetic.
double reconstruct(const std::vector<double>& nu_values, const ReconstructionFactors& factors,
                   double lambda0);
double reconstruct_balanced(double mu_value, const ReconstructionFactors& factors,
                            double lambda0);

/// Direct evaluation of the series including the constant term.
double fourier_eval(const FourierSeries& series, double x);

/// File formats: series {"lambda": [...], "gamma": [...]}; phases
/// {"components": [{"n":..., "r":..., "s":...}]}.
FourierSeries series_from_json_text(const std::string& text);
std::string series_to_json_text(const FourierSeries& series);
FcosampParams phases_from_json_text(const std::string& text);
std::string phases_to_json_text(const FcosampParams& params);

} // namespace qcosamp
