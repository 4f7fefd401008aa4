#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "sicreg/csv.hpp"
#include "sicreg/inference.hpp"
#include "sicreg/model_file.hpp"
#include "sicreg/report_render.hpp"
#include "sicreg/scenario.hpp"
#include "sicreg/simlab.hpp"
#include "sicreg/solver.hpp"

namespace {

using namespace sicreg;

struct SolverFlags {
    double eps_start = 10.0;
    double eps_end = 1e-5;
    int steps = 100;
    double tol = 1e-8;
    double zero_tol = 1e-8;

    TelescopeSchedule schedule() const { return make_schedule(eps_start, eps_end, steps); }
    SolverConfig config() const {
        SolverConfig cfg;
        cfg.tol = tol;
        cfg.zero_tol = zero_tol;
        return cfg;
    }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--epsilon-start", f.eps_start, "First telescope epsilon");
    cmd->add_option("--epsilon-end", f.eps_end, "Final telescope epsilon");
    cmd->add_option("--steps", f.steps, "Number of telescope steps");
    cmd->add_option("--tol", f.tol, "Inner Newton convergence tolerance");
    cmd->add_option("--zero-tol", f.zero_tol, "Threshold below which a coefficient is zero");
}

struct TrainingData {
    Dataset data;
    std::vector<std::string> predictors;
    std::string file_fingerprint;
};

TrainingData load_training(const std::string& path, const std::string& response,
                           bool standardize) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();

    const CsvTable table = parse_csv(bytes, path);
    const int yi = table.find(response);
    if (yi < 0) throw InputError(path + ": response column '" + response + "' not found");
    if (table.columns.size() < 2) throw InputError(path + ": need at least one predictor");
    if (table.rows() == 0) throw InputError(path + ": no data rows");

    TrainingData td;
    Eigen::MatrixXd raw(table.rows(), static_cast<long>(table.columns.size()) - 1);
    long k = 0;
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (static_cast<int>(j) == yi) continue;
        td.predictors.push_back(table.columns[j]);
        raw.col(k++) = table.values.col(static_cast<long>(j));
    }
    td.data = ingest(raw, table.values.col(yi), standardize);
    td.file_fingerprint = fingerprint(bytes);
    return td;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << text;
}

int cmd_fit(const std::string& data_path, const std::string& response, const std::string& out_path,
            bool spr, bool no_standardize, const SolverFlags& flags) {
    const TrainingData td = load_training(data_path, response, !no_standardize);
    const auto schedule = flags.schedule();
    const auto cfg = flags.config();
    const FitMask mask = spr ? FitMask::spr(td.data.p()) : FitMask::all_free(td.data.p());

    FitTrace trace = telescope_fit(td.data, schedule, cfg, mask);
    const FitResult fit = summarize_fit(td.data, std::move(trace), schedule, cfg, mask, true);

    std::cout << render_fit_table(fit, td.predictors);
    if (!fit.trace.converged)
        std::cerr << "warning: final telescope step did not converge within the iteration cap\n";

    if (!out_path.empty()) {
        save_model(make_model_file(fit, response, td.predictors, schedule, cfg, spr,
                                   td.file_fingerprint),
                   out_path);
        std::cout << "model written to " << out_path << "\n";
    }
    return 0;
}

int cmd_path(const std::string& data_path, const std::string& response,
             const std::string& out_path, bool spr, bool no_standardize,
             const SolverFlags& flags) {
    const TrainingData td = load_training(data_path, response, !no_standardize);
    const FitMask mask = spr ? FitMask::spr(td.data.p()) : FitMask::all_free(td.data.p());
    const FitTrace trace = telescope_fit(td.data, flags.schedule(), flags.config(), mask);
    const std::string csv = render_path_csv(trace, td.predictors);
    if (out_path.empty())
        std::cout << csv;
    else
        write_text(out_path, csv);
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, double level, const std::string& actual,
                const std::vector<double>& thresholds) {
    const ModelFile model = load_model(model_path);
    const CsvTable table = read_csv(data_path);
    if (table.rows() == 0) throw InputError(data_path + ": no data rows");

    std::vector<std::string> missing, extra;
    Eigen::MatrixXd X(table.rows(), static_cast<long>(model.predictors.size()));
    for (size_t j = 0; j < model.predictors.size(); ++j) {
        const int idx = table.find(model.predictors[j]);
        if (idx < 0)
            missing.push_back(model.predictors[j]);
        else
            X.col(static_cast<long>(j)) = table.values.col(idx);
    }
    for (const auto& col : table.columns) {
        bool known = col == model.response || (!actual.empty() && col == actual);
        for (const auto& p : model.predictors) known = known || p == col;
        if (!known) extra.push_back(col);
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = data_path + ": predictor columns do not match the model";
        if (!missing.empty()) {
            msg += "; missing:";
            for (const auto& c : missing) msg += " " + c;
        }
        if (!extra.empty()) {
            msg += "; unexpected:";
            for (const auto& c : extra) msg += " " + c;
        }
        throw ColumnMismatch(msg);
    }

    const ParamVector theta = model.coefficients();
    std::ostringstream csv;
    csv << "mean,variance,lower,upper\n";
    Eigen::VectorXd x(X.cols() + 1);
    for (long i = 0; i < X.rows(); ++i) {
        x[0] = 1.0;
        x.tail(X.cols()) = X.row(i);
        const Prediction pr = predict(theta, x, level);
        csv << format_num(pr.mean, 10) << ',' << format_num(pr.variance, 10) << ','
            << format_num(pr.lower, 10) << ',' << format_num(pr.upper, 10) << "\n";
    }

    std::string coverage_text;
    if (!actual.empty()) {
        const int ai = table.find(actual);
        if (ai < 0) throw InputError(data_path + ": column '" + actual + "' not found");
        std::optional<std::pair<double, double>> th;
        if (!thresholds.empty()) {
            if (thresholds.size() != 2 || !(thresholds[0] < thresholds[1]))
                throw InputError("--thresholds needs two increasing values");
            th = {thresholds[0], thresholds[1]};
        }
        coverage_text = render_coverage(
            prediction_coverage(theta, X, table.values.col(ai), level, th));
    }

    if (out_path.empty()) {
        std::cout << csv.str();
        if (!coverage_text.empty()) std::cerr << coverage_text;
    } else {
        write_text(out_path, csv.str());
        if (!coverage_text.empty()) std::cout << coverage_text;
    }
    return 0;
}

std::vector<Method> parse_methods(const std::string& spec) {
    std::vector<Method> methods;
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok == "mpr")
            methods.push_back(Method::mpr_sic);
        else if (tok == "spr")
            methods.push_back(Method::spr_sic);
        else
            throw InputError("unknown method '" + tok + "' (expected mpr and/or spr)");
    }
    if (methods.empty()) throw InputError("no methods requested");
    return methods;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path, int jobs,
                 int reps_override, const std::vector<long>& n_override, uint64_t seed_override,
                 bool seed_given, const std::string& methods_spec, const SolverFlags& flags) {
    Scenario sc = load_scenario(scenario_path);
    if (reps_override > 0) sc.replicates = reps_override;
    if (!n_override.empty()) sc.sample_sizes = n_override;
    if (seed_given) sc.seed = seed_override;

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif

    const StudyReport report =
        run_study(sc, parse_methods(methods_spec), flags.schedule(), flags.config());
    const std::string csv = render_study_csv(report);
    const std::string text = render_study_text(report);
    if (out_path.empty()) {
        std::cout << csv;
        std::cerr << text;
    } else {
        write_text(out_path, csv);
        std::cout << text;
    }
    return 0;
}

int cmd_delta_bic(const std::string& data_path, const std::string& response,
                  const std::string& component_name, const std::string& predictor, bool spr,
                  bool no_standardize, const SolverFlags& flags) {
    const TrainingData td = load_training(data_path, response, !no_standardize);
    const auto schedule = flags.schedule();
    const auto cfg = flags.config();
    const FitMask mask = spr ? FitMask::spr(td.data.p()) : FitMask::all_free(td.data.p());

    FitTrace trace = telescope_fit(td.data, schedule, cfg, mask);
    const FitResult fit = summarize_fit(td.data, std::move(trace), schedule, cfg, mask, false);

    const auto index_of = [&](const std::string& name) {
        for (size_t j = 0; j < td.predictors.size(); ++j)
            if (td.predictors[j] == name) return static_cast<int>(j) + 1;
        throw InputError("predictor '" + name + "' not found");
    };

    std::vector<std::pair<Component, int>> targets;
    if (!predictor.empty()) {
        if (component_name != "location" && component_name != "dispersion")
            throw InputError("--component must be 'location' or 'dispersion'");
        targets.emplace_back(
            component_name == "location" ? Component::location : Component::dispersion,
            index_of(predictor));
    } else {
        for (int j : fit.active.beta)
            if (j >= 1) targets.emplace_back(Component::location, j);
        for (int j : fit.active.alpha)
            if (j >= 1) targets.emplace_back(Component::dispersion, j);
    }

    std::cout << "component,predictor,delta_bic\n";
    for (const auto& [component, j] : targets) {
        const double d = delta_bic(td.data, fit, component, j, schedule, cfg);
        std::cout << (component == Component::location ? "location" : "dispersion") << ','
                  << td.predictors[static_cast<size_t>(j - 1)] << ',' << format_num(d, 6) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable selection for normal location and dispersion regression "
                 "via smooth information criterion optimization"};
    app.require_subcommand(1);

    std::string data_path, response, out_path, model_path, scenario_path;
    std::string actual, component_name, predictor;
    std::string methods_spec = "mpr,spr";
    bool spr = false, no_standardize = false;
    double level = 0.95;
    int jobs = 0, reps = 0;
    uint64_t seed = 0;
    std::vector<double> thresholds;
    std::vector<long> sample_sizes;
    SolverFlags fit_flags, path_flags, sim_flags, dbic_flags;

    auto* fit = app.add_subcommand("fit", "Fit a model to a CSV file");
    fit->add_option("--data", data_path, "Training CSV")->required();
    fit->add_option("--response", response, "Response column name")->required();
    fit->add_option("--out", out_path, "Write the fitted model (JSON)");
    fit->add_flag("--spr", spr, "Constant-dispersion (single parameter) fit");
    fit->add_flag("--no-standardize", no_standardize, "Skip predictor standardization");
    add_solver_flags(fit, fit_flags);

    auto* path = app.add_subcommand("path", "Emit standardized coefficients per telescope step");
    path->add_option("--data", data_path, "Training CSV")->required();
    path->add_option("--response", response, "Response column name")->required();
    path->add_option("--out", out_path, "Output CSV (default stdout)");
    path->add_flag("--spr", spr, "Constant-dispersion (single parameter) fit");
    path->add_flag("--no-standardize", no_standardize, "Skip predictor standardization");
    add_solver_flags(path, path_flags);

    auto* predict = app.add_subcommand("predict", "Prediction intervals for new data");
    predict->add_option("--model", model_path, "Fitted model JSON")->required();
    predict->add_option("--data", data_path, "New-data CSV")->required();
    predict->add_option("--out", out_path, "Output CSV (default stdout)");
    predict->add_option("--level", level, "Interval level (default 0.95)");
    predict->add_option("--actual", actual, "Observed-response column: report coverage");
    predict->add_option("--thresholds", thresholds,
                        "Two sigma cutpoints for the low/medium/high split")
        ->expected(2);

    auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo study from a scenario file");
    simulate->add_option("--scenario", scenario_path, "Scenario file")->required();
    simulate->add_option("--out", out_path, "Report CSV (default stdout)");
    simulate->add_option("--jobs", jobs, "Worker threads (default: all)");
    simulate->add_option("--reps", reps, "Override replicate count");
    simulate->add_option("--n", sample_sizes, "Override the scenario's sample sizes");
    auto* seed_opt = simulate->add_option("--seed", seed, "Override scenario seed");
    simulate->add_option("--methods", methods_spec, "Comma list of mpr,spr (default both)");
    add_solver_flags(simulate, sim_flags);

    auto* dbic = app.add_subcommand("delta-bic", "BIC increase from zeroing a coefficient");
    dbic->add_option("--data", data_path, "Training CSV")->required();
    dbic->add_option("--response", response, "Response column name")->required();
    dbic->add_option("--component", component_name, "location or dispersion");
    dbic->add_option("--predictor", predictor, "Predictor name (default: all active)");
    dbic->add_flag("--spr", spr, "Constant-dispersion (single parameter) fit");
    dbic->add_flag("--no-standardize", no_standardize, "Skip predictor standardization");
    add_solver_flags(dbic, dbic_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed())
            return cmd_fit(data_path, response, out_path, spr, no_standardize, fit_flags);
        if (path->parsed())
            return cmd_path(data_path, response, out_path, spr, no_standardize, path_flags);
        if (predict->parsed())
            return cmd_predict(model_path, data_path, out_path, level, actual, thresholds);
        if (simulate->parsed())
            return cmd_simulate(scenario_path, out_path, jobs, reps, sample_sizes, seed,
                                seed_opt->count() > 0, methods_spec, sim_flags);
        if (dbic->parsed())
            return cmd_delta_bic(data_path, response, component_name, predictor, spr,
                                 no_standardize, dbic_flags);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
