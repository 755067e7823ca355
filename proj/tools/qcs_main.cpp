// Command-line front door: wires spec and data files to the simulation
// pipeline and emits CSV/JSON/PGM artifacts for offline analysis.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcosamp/applications.hpp"
#include "qcosamp/builder.hpp"
#include "qcosamp/errors.hpp"
#include "qcosamp/fourier_map.hpp"
#include "qcosamp/image.hpp"
#include "qcosamp/sampling_engine.hpp"

namespace {

using nlohmann::json;
using namespace qcosamp;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    out << bytes;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Options {
    std::string spec_path, data_path, image_path, series_path, phases_path, out_path;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int grid = 33;
    int iterations = 3;
    int resolution = 2;
    int max_qubits = 26;
    int window = 2;
    long long frequency = 1;
};

void require_seed(const Options& opt) {
    if (opt.shots > 0 && !opt.seed_given) {
        throw SchemaError("--seed is required whenever --shots > 0 (reproducibility)");
    }
}

int cmd_eval(const Options& opt) {
    const QCoSampSpec spec = spec_from_json_text(slurp(opt.spec_path));
    std::ostringstream csv;
    csv << "x,mu\n";
    for (double x : default_grid(opt.grid)) {
        csv << fmt17(x) << ',' << fmt17(closed_form_mu(spec, x)) << '\n';
    }
    spill(opt.out_path, csv.str());
    return 0;
}

int cmd_sweep(const Options& opt) {
    require_seed(opt);
    const QCoSampSpec spec = spec_from_json_text(slurp(opt.spec_path));
    const SweepResult result = sweep(spec, default_grid(opt.grid), opt.shots, opt.seed);
    spill(opt.out_path, sweep_to_csv(result));
    const ErrorReport report = mse(result, spec);
    json j{{"mse", report.mse}, {"points", result.x_grid.size()},
           {"shots", result.shots}, {"seed", result.seed}};
    spill(opt.out_path + ".mse.json", j.dump(2) + "\n");
    return 0;
}

int cmd_sample(const Options& opt) {
    require_seed(opt);
    if (opt.shots == 0) throw SchemaError("sample needs --shots >= 1");
    const QCoSampSpec spec = spec_from_json_text(slurp(opt.spec_path));
    AssembleOptions aopts;
    aopts.max_qubits = opt.max_qubits;
    if (std::holds_alternative<Steerable>(spec.argument)) aopts.uniform_argument = true;
    const AssembledOperator op = assemble(spec, aopts);
    const StateVector state = op.circuit.run_from_zero();
    state.check_normalized(kTolComposed);
    const Histogram h = sample(state, {op.layout.measured_qubit}, opt.shots, opt.seed);
    spill(opt.out_path, histogram_to_csv(h, 1));
    return 0;
}

int cmd_integrate(const Options& opt) {
    const QCoSampSpec spec = spec_from_json_text(slurp(opt.spec_path));
    const IntegrateResult r = integrate(spec, opt.max_qubits);
    json j{{"p00", r.p00},
           {"p00_oracle", r.p00_oracle},
           {"p_last_zero", r.p_last_zero},
           {"integral", r.integral},
           {"argument_qubits", r.argument_qubits}};
    spill(opt.out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_fit(const Options& opt) {
    require_seed(opt);
    const DataSet data = dataset_from_csv(slurp(opt.data_path));
    const FitResult fit = curve_fit(data, 1, opt.resolution, opt.iterations, opt.shots,
                                    opt.seed, opt.frequency);
    const std::string histogram_path = opt.out_path + ".histogram.csv";
    spill(histogram_path, histogram_to_csv(fit.histogram, 2 * opt.resolution));
    spill(opt.out_path, fit_result_to_json_text(fit, histogram_path));
    return 0;
}

int cmd_filter(const Options& opt) {
    GrayImage img = load_pgm(opt.image_path);
    if ((img.width & (img.width - 1)) || (img.height & (img.height - 1))) {
        img = pad_to_pow2(img);
    }
    const WindowSpec win{opt.window, opt.window, opt.window, opt.window};
    save_pgm(opt.out_path, mean_kernel_filter(img, win));
    return 0;
}

int cmd_map(const Options& opt) {
    if (!opt.series_path.empty()) {
        // Coefficients -> phases. A series already inside the radius-2 disk
        // maps directly; otherwise pre-scale and attach the factors.
        FourierSeries series = series_from_json_text(slurp(opt.series_path));
        double max_d2 = 0.0;
        for (int n = 1; n <= series.order(); ++n) {
            max_d2 = std::max(max_d2, series.lambda[n] * series.lambda[n] +
                                          series.gamma[n] * series.gamma[n]);
        }
        FourierSeries scaled = series;
        double scale = 1.0;
        if (max_d2 > 4.0) {
            scale = prescale(scaled).scale;
        }
        FcosampParams params;
        for (int n = 1; n <= scaled.order(); ++n) {
            const auto pairs = fourier_to_phases(scaled.lambda[n], scaled.gamma[n]);
            // Normalize negative zeros for clean artifacts.
            params.components.push_back(
                {n, pairs.front().first + 0.0, pairs.front().second + 0.0, 0});
        }
        json j = json::parse(phases_to_json_text(params));
        j["scale"] = scale;
        spill(opt.out_path, j.dump(2) + "\n");
        return 0;
    }
    if (!opt.phases_path.empty()) {
        const FcosampParams params = phases_from_json_text(slurp(opt.phases_path));
        FourierSeries series;
        series.lambda = {0.5};
        series.gamma = {0.0};
        for (const auto& c : params.components) {
            auto [lambda, gamma] = phases_to_fourier(c.r, c.s);
            series.lambda.push_back(lambda);
            series.gamma.push_back(gamma);
        }
        spill(opt.out_path, series_to_json_text(series));
        return 0;
    }
    throw SchemaError("map needs --series (to phases) or --phases (to coefficients)");
}

int cmd_tree_check(const Options& opt) {
    const QCoSampSpec spec = spec_from_json_text(slurp(opt.spec_path));
    const bool ok = tree_sum_check(spec);
    const NormalizationInfo norm = normalization(spec);
    json depths = json::array();
    for (int d : norm.depth) depths.push_back(d);
    json j{{"sum_is_one", ok}, {"sum", ok ? "1" : "not 1"}, {"depths", depths},
           {"balanced", norm.balanced}};
    const std::string text = j.dump(2) + "\n";
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        spill(opt.out_path, text);
    }
    return ok ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cosine-series quantum sampling toolkit"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub, bool needs_out = true) {
        sub->add_option("--shots", opt.shots, "shot count (0 = exact mode)");
        sub->add_option("--seed", opt.seed, "RNG seed")->each([&](const std::string&) {
            opt.seed_given = true;
        });
        sub->add_option("--max-qubits", opt.max_qubits, "desk-scale guardrail");
        if (needs_out) sub->add_option("--out", opt.out_path, "output path")->required();
    };

    CLI::App* eval = app.add_subcommand("eval", "closed-form mu values over a grid");
    eval->add_option("--spec", opt.spec_path)->required();
    eval->add_option("--grid", opt.grid);
    add_common(eval);

    CLI::App* sw = app.add_subcommand("sweep", "assemble, simulate and sample over a grid");
    sw->add_option("--spec", opt.spec_path)->required();
    sw->add_option("--grid", opt.grid);
    add_common(sw);

    CLI::App* sm = app.add_subcommand("sample", "histogram of the measured ancilla");
    sm->add_option("--spec", opt.spec_path)->required();
    add_common(sm);

    CLI::App* integ = app.add_subcommand("integrate", "quantum summation over the argument register");
    integ->add_option("--spec", opt.spec_path)->required();
    add_common(integ);

    CLI::App* fit = app.add_subcommand("fit", "amplitude-amplified curve fitting");
    fit->add_option("--data", opt.data_path)->required();
    fit->add_option("--resolution", opt.resolution, "qubits per phase register");
    fit->add_option("--iterations", opt.iterations, "amplification rounds");
    fit->add_option("--frequency", opt.frequency, "component frequency n");
    add_common(fit);

    CLI::App* filt = app.add_subcommand("filter", "quantum mean kernel filter");
    filt->add_option("--image", opt.image_path)->required();
    filt->add_option("--window", opt.window, "square window size (power of two)");
    add_common(filt);

    CLI::App* map = app.add_subcommand("map", "Fourier coefficients <-> component phases");
    map->add_option("--series", opt.series_path);
    map->add_option("--phases", opt.phases_path);
    add_common(map);

    CLI::App* tc = app.add_subcommand("tree-check", "leaf-length lemma verdict");
    tc->add_option("--spec", opt.spec_path)->required();
    tc->add_option("--out", opt.out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "E_SCHEMA: " << e.what() << "\n";
        return 2;
    }

    try {
        if (eval->parsed()) return cmd_eval(opt);
        if (sw->parsed()) return cmd_sweep(opt);
        if (sm->parsed()) return cmd_sample(opt);
        if (integ->parsed()) return cmd_integrate(opt);
        if (fit->parsed()) return cmd_fit(opt);
        if (filt->parsed()) return cmd_filter(opt);
        if (map->parsed()) return cmd_map(opt);
        if (tc->parsed()) return cmd_tree_check(opt);
    } catch (const GuardrailError& e) {
        std::cerr << "E_GUARDRAIL: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "E_NUMERIC: " << e.what() << "\n";
        return 4;
    } catch (const SchemaError& e) {
        std::cerr << "E_SCHEMA: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "E_SCHEMA: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
