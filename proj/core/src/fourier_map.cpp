#include "qcosamp/fourier_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "qcosamp/errors.hpp"
#include "qcosamp/statevec.hpp"

namespace qcosamp {

using nlohmann::json;

double fcosamp_eval(const FcosampParams& params, double x) {
    double mu = 0.0;
    for (const auto& c : params.components) {
        const double L = 4.0 * std::pow(2.0, c.depth);
        mu += (1.0 + std::cos(static_cast<double>(c.n) * x + c.r)) / L +
              (1.0 + std::cos(static_cast<double>(c.n) * x + c.s)) / L;
    }
    return mu;
}

double fcosamp_eval(const FcosampParams& params, const std::vector<double>& L, double x) {
    if (L.size() != params.components.size()) {
        throw std::invalid_argument("one normalization factor per component required");
    }
    double mu = 0.0;
    for (std::size_t i = 0; i < params.components.size(); ++i) {
        const auto& c = params.components[i];
        mu += (1.0 + std::cos(static_cast<double>(c.n) * x + c.r)) / L[i] +
              (1.0 + std::cos(static_cast<double>(c.n) * x + c.s)) / L[i];
    }
    return mu;
}

std::pair<double, double> phases_to_fourier(double r, double s) {
    return {std::cos(r) + std::cos(s), -std::sin(r) - std::sin(s)};
}

namespace {

double wrap_pi(double a) {
    const double w = std::remainder(a, 2.0 * kPi);
    return w;
}

} // namespace

std::vector<std::pair<double, double>> fourier_to_phases(double lambda, double gamma) {
    const double d2 = lambda * lambda + gamma * gamma;
    if (d2 > 4.0 + 1e-12) {
        throw std::domain_error(
            "coefficient pair outside the radius-2 reachable disk; divide the series by "
            "scale/2 first (see prescale)");
    }
    if (d2 < 1e-24) {
        // Every (r, r - pi) collapses to the origin; return the canonical
        // representative.
        return {{0.0, -kPi}};
    }
    const double d = std::sqrt(std::min(d2, 4.0));
    // Circle centers (cos r, -sin r) lie on the unit circle; candidates
    // satisfy cos(r + phi) = d/2 with phi = atan2(gamma, lambda).
    const double phi = std::atan2(gamma, lambda);
    const double half = std::acos(std::clamp(d / 2.0, -1.0, 1.0));

    auto solve_s = [&](double r) {
        const double cs = lambda - std::cos(r);
        const double sn = -gamma - std::sin(r);
        return std::atan2(sn, cs);
    };
    const double r1 = wrap_pi(half - phi);
    const double r2 = wrap_pi(-half - phi);
    const double s1 = solve_s(r1);
    const double s2 = solve_s(r2);

    // Boundary points collapse the two intersections into one.
    const double gap = std::hypot(std::cos(r1) - std::cos(r2), std::sin(r1) - std::sin(r2));
    if (gap < 1e-9) {
        return {{r1, s1}};
    }
    return {{r1, s1}, {r2, s2}};
}

ReconstructionFactors reconstruction_factors(const FourierSeries& series,
                                             const std::vector<int>& depths) {
    if (series.lambda.size() != series.gamma.size() || series.lambda.size() < 2) {
        throw std::invalid_argument("series needs matching lambda/gamma lists with N >= 1");
    }
    const int order = series.order();
    if (static_cast<int>(depths.size()) != order) {
        throw std::invalid_argument("one depth per harmonic component required");
    }
    ReconstructionFactors f;
    double max_d2 = 0.0;
    for (int n = 1; n <= order; ++n) {
        max_d2 = std::max(max_d2,
                          series.lambda[n] * series.lambda[n] + series.gamma[n] * series.gamma[n]);
    }
    f.scale = std::max(1.0, max_d2);
    for (int n = 0; n < order; ++n) {
        f.rho.push_back(2.0 * std::pow(2.0, depths[n]) * f.scale);
    }
    const bool balanced =
        std::all_of(depths.begin(), depths.end(), [&](int d) { return d == depths.front(); });
    f.rho_balanced = balanced ? 2.0 * std::pow(2.0, depths.front()) * f.scale : 0.0;
    return f;
}

ReconstructionFactors prescale(FourierSeries& series) {
    std::vector<int> depths;
    // Depth of each leaf in the flattest full tree over N components.
    const int order = series.order();
    {
        // ceil(log2) depth profile of the canonical tree: recompute by
        // walking the same halving recursion.
        struct Rec {
            void fill(int count, int depth, std::vector<int>& out) {
                if (count == 1) {
                    out.push_back(depth);
                    return;
                }
                const int left = (count + 1) / 2;
                fill(left, depth + 1, out);
                fill(count - left, depth + 1, out);
            }
        } rec;
        rec.fill(order, 0, depths);
    }
    ReconstructionFactors f = reconstruction_factors(series, depths);
    const double divisor = f.scale / 2.0;
    for (int n = 1; n <= series.order(); ++n) {
        series.lambda[n] /= divisor;
        series.gamma[n] /= divisor;
    }
    return f;
}

FcosampParams series_to_params(const FourierSeries& scaled, const std::vector<int>& depths) {
    if (static_cast<int>(depths.size()) != scaled.order()) {
        throw std::invalid_argument("one depth per harmonic component required");
    }
    FcosampParams params;
    for (int n = 1; n <= scaled.order(); ++n) {
        const auto pairs = fourier_to_phases(scaled.lambda[n], scaled.gamma[n]);
        FcosampComponent c;
        c.n = n;
        c.r = pairs.front().first;
        c.s = pairs.front().second;
        c.depth = depths[n - 1];
        params.components.push_back(c);
    }
    return params;
}

double reconstruct(const std::vector<double>& nu_values, const ReconstructionFactors& factors,
                   double lambda0) {
    if (nu_values.size() != factors.rho.size()) {
        throw std::invalid_argument("one nu value per component required");
    }
    double f = lambda0;
    for (std::size_t i = 0; i < nu_values.size(); ++i) {
        f += factors.rho[i] * nu_values[i] - factors.scale;
    }
    return f;
}

double reconstruct_balanced(double mu_value, const ReconstructionFactors& factors,
                            double lambda0) {
    if (factors.rho_balanced == 0.0) {
        throw std::invalid_argument("balanced shortcut needs a balanced tree");
    }
    const double n_components = static_cast<double>(factors.rho.size());
    return factors.rho_balanced * mu_value + lambda0 - n_components * factors.scale;
}

double fourier_eval(const FourierSeries& series, double x) {
    double f = series.lambda.empty() ? 0.0 : series.lambda[0];
    for (int n = 1; n <= series.order(); ++n) {
        f += series.lambda[n] * std::cos(n * x) + series.gamma[n] * std::sin(n * x);
    }
    return f;
}

FourierSeries series_from_json_text(const std::string& text) {
    try {
        const json j = json::parse(text);
        FourierSeries s;
        s.lambda = j.at("lambda").get<std::vector<double>>();
        s.gamma = j.at("gamma").get<std::vector<double>>();
        if (s.lambda.size() != s.gamma.size() || s.lambda.size() < 2) {
            throw SchemaError("series needs lambda and gamma lists of equal length >= 2");
        }
        return s;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("series file: ") + e.what());
    }
}

std::string series_to_json_text(const FourierSeries& series) {
    return json{{"lambda", series.lambda}, {"gamma", series.gamma}}.dump(2) + "\n";
}

FcosampParams phases_from_json_text(const std::string& text) {
    try {
        const json j = json::parse(text);
        FcosampParams p;
        for (const auto& c : j.at("components")) {
            FcosampComponent fc;
            fc.n = c.at("n").get<long long>();
            fc.r = c.at("r").get<double>();
            fc.s = c.at("s").get<double>();
            if (c.contains("depth")) fc.depth = c.at("depth").get<int>();
            p.components.push_back(fc);
        }
        return p;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("phases file: ") + e.what());
    }
}

std::string phases_to_json_text(const FcosampParams& params) {
    json comps = json::array();
    for (const auto& c : params.components) {
        comps.push_back(json{{"n", c.n}, {"r", c.r}, {"s", c.s}, {"depth", c.depth}});
    }
    return json{{"components", comps}}.dump(2) + "\n";
}

} // namespace qcosamp
