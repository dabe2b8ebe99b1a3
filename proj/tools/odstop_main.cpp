// Command-line front end: train outlier detectors with entropy-based early
// stopping, compare against the full-horizon baseline, correlate entropy
// with AUC, diagnose finished runs and generate synthetic benchmarks.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odstop/data_io.hpp"
#include "odstop/harness.hpp"
#include "odstop/report_io.hpp"

namespace {

using namespace odstop;

struct CommonOpts {
    std::vector<std::string> data_paths;
    std::string synthetic;  // "n_in,n_out,dim,spread"
    std::string model = "ae";
    std::size_t width = 64;
    double lr = 1e-3;
    std::size_t batch_size = 1024;
    std::size_t iters = 0;
    std::size_t epochs = 250;
    std::size_t patience = 100;
    double rdown = 0.1;
    std::size_t neval = 1024;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::size_t jobs = 1;
    bool no_stop = false;
};

void add_model_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--model", o.model, "Detector: ae or svdd")
        ->check(CLI::IsMember({"ae", "svdd"}));
    cmd->add_option("--width", o.width, "Hidden (ae) or latent (svdd) width");
    cmd->add_option("--lr", o.lr, "Learning rate");
    cmd->add_option("--batch-size", o.batch_size, "Mini-batch size");
    cmd->add_option("--iters", o.iters, "Training iterations (0 = use --epochs)");
    cmd->add_option("--epochs", o.epochs, "Epochs when --iters is 0");
    cmd->add_option("--k", o.patience, "Early-stop patience");
    cmd->add_option("--rdown", o.rdown, "Downtrend threshold");
    cmd->add_option("--neval", o.neval, "Entropy evaluation subset size");
    cmd->add_option("--seed", o.seed, "Random seed");
}

TrainConfig to_config(const CommonOpts& o) {
    TrainConfig cfg;
    cfg.model.kind = o.model == "svdd" ? ModelKind::linear_deep_svdd : ModelKind::autoencoder;
    cfg.model.width = o.width;
    cfg.lr = o.lr;
    cfg.batch_size = o.batch_size;
    cfg.iters = o.iters;
    cfg.epochs = o.epochs;
    cfg.seed = o.seed;
    cfg.patience = o.patience;
    cfg.downtrend_threshold = o.rdown;
    cfg.eval_size = o.neval;
    cfg.early_stop = !o.no_stop;
    return cfg;
}

Dataset parse_synthetic(const std::string& spec, std::uint64_t seed) {
    std::istringstream ss(spec);
    std::size_t n_in = 0, n_out = 0, d = 0;
    double spread = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> n_in >> c1 >> n_out >> c2 >> d >> c3 >> spread) || c1 != ',' || c2 != ',' ||
        c3 != ',' || !ss.eof())
        throw CLI::ValidationError("--synthetic", "expected n_in,n_out,dim,spread");
    return gen_synthetic(n_in, n_out, d, spread, seed);
}

// Loads (or generates) and standardizes every requested dataset.
std::vector<Dataset> load_inputs(const CommonOpts& o) {
    std::vector<Dataset> out;
    if (!o.synthetic.empty()) out.push_back(standardize(parse_synthetic(o.synthetic, o.seed)));
    for (const std::string& p : o.data_paths) out.push_back(standardize(load_csv(p)));
    if (out.empty())
        throw CLI::ValidationError("--data", "no input data; pass --data or --synthetic");
    return out;
}

int cmd_gen(const CommonOpts& o, std::size_t n_in, std::size_t n_out, std::size_t dim,
            double spread, const std::string& name) {
    Dataset data = gen_synthetic(n_in, n_out, dim, spread, o.seed);
    data.name = name;
    std::filesystem::create_directories(o.out_dir);
    const auto path = std::filesystem::path(o.out_dir) / (name + ".csv");
    write_csv(data, path);
    std::cout << "wrote " << path.string() << " (" << data.n() << " rows, " << data.dim()
              << " features, outlier ratio " << data.outlier_ratio << ")\n";
    return 0;
}

int cmd_train(const CommonOpts& o) {
    const TrainConfig cfg = to_config(o);
    for (const Dataset& data : load_inputs(o)) {
        const TrainingReport rep = run_training(cfg, data);
        write_report_files(rep, o.out_dir);
        std::cout << data.name << ": stopped at iter " << rep.stop_iter << ", best iter "
                  << rep.best_iter;
        if (rep.has_labels)
            std::cout << ", auc " << rep.selected_auc << ", ap " << rep.selected_ap;
        std::cout << '\n';
    }
    return 0;
}

int cmd_compare(const CommonOpts& o) {
    const CompareSummary s = run_compare(to_config(o), load_inputs(o), o.jobs);
    std::filesystem::create_directories(o.out_dir);
    write_text_file(std::filesystem::path(o.out_dir) / "compare.json", compare_json(s));
    std::cout << compare_table(s);
    return 0;
}

int cmd_correlate(const CommonOpts& o, bool iters_given, bool batch_given) {
    TrainConfig cfg = to_config(o);
    // Protocol defaults for the correlation study: 500 full-batch iterations.
    if (!iters_given) cfg.iters = 500;
    if (!batch_given) cfg.batch_size = std::numeric_limits<std::size_t>::max();
    const CorrelateSummary s = run_correlate(cfg, load_inputs(o), o.jobs);
    std::filesystem::create_directories(o.out_dir);
    write_text_file(std::filesystem::path(o.out_dir) / "correlate.json", correlate_json(s));
    std::cout << correlate_table(s);
    return 0;
}

int cmd_diagnose(const std::string& report_path, const std::string& out_dir) {
    const TrainingReport rep = parse_report_json(read_text_file(report_path));
    if (!rep.has_labels || !rep.curves.has_labels())
        throw std::runtime_error("diagnose: report has no label-based curves");
    const DiagnosticReport diag = classify_run(rep.curves, rep.outlier_ratio);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text_file(std::filesystem::path(out_dir) / (rep.dataset + "_diagnostics.json"),
                        diagnostics_json(diag, rep.dataset));
    }
    std::cout << diagnostics_table(diag, rep.dataset);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outlier-detection training with entropy-based early stopping"};
    app.require_subcommand(1);

    CommonOpts o;
    std::size_t gen_n_in = 950, gen_n_out = 50, gen_dim = 2;
    double gen_spread = 6.0;
    std::string gen_name = "synthetic";
    std::string report_path;

    CLI::App* gen = app.add_subcommand("gen", "Generate a labeled synthetic benchmark CSV");
    gen->add_option("--n-in", gen_n_in, "Inlier count");
    gen->add_option("--n-out", gen_n_out, "Outlier count");
    gen->add_option("--dim", gen_dim, "Feature dimension");
    gen->add_option("--spread", gen_spread, "Outlier uniform range half-width");
    gen->add_option("--name", gen_name, "Dataset name");
    gen->add_option("--seed", o.seed, "Random seed");
    gen->add_option("--out", o.out_dir, "Output directory");

    CLI::App* train = app.add_subcommand("train", "Train one detector with early stopping");
    train->add_option("--data", o.data_paths, "Input CSV (repeatable)");
    train->add_option("--synthetic", o.synthetic, "Inline synthetic spec n_in,n_out,dim,spread");
    add_model_flags(train, o);
    train->add_flag("--no-stop", o.no_stop, "Disable early stopping (full horizon)");
    train->add_option("--out", o.out_dir, "Output directory");

    CLI::App* compare = app.add_subcommand("compare", "Early stopping vs full-horizon baseline");
    compare->add_option("--data", o.data_paths, "Input CSV (repeatable)")->required();
    add_model_flags(compare, o);
    compare->add_option("--jobs", o.jobs, "Concurrent dataset runs");
    compare->add_option("--out", o.out_dir, "Output directory");

    CLI::App* correlate =
        app.add_subcommand("correlate", "Correlate entropy with AUC over full runs");
    correlate->add_option("--data", o.data_paths, "Input CSV (repeatable)")->required();
    add_model_flags(correlate, o);
    correlate->add_option("--jobs", o.jobs, "Concurrent dataset runs");
    correlate->add_option("--out", o.out_dir, "Output directory");

    CLI::App* diagnose = app.add_subcommand("diagnose", "Post-hoc diagnosis of a training report");
    diagnose->add_option("--report", report_path, "report JSON from `train`")->required();
    diagnose->add_option("--out", o.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(o, gen_n_in, gen_n_out, gen_dim, gen_spread, gen_name);
        if (train->parsed()) return cmd_train(o);
        if (compare->parsed()) return cmd_compare(o);
        if (correlate->parsed())
            return cmd_correlate(o, correlate->count("--iters") > 0,
                                 correlate->count("--batch-size") > 0);
        if (diagnose->parsed()) return cmd_diagnose(report_path, o.out_dir);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
