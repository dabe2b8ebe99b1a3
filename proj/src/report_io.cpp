#include "odstop/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace odstop {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json curves_to_json(const MetricCurves& c) {
    json j;
    j["mean_loss"] = c.mean_loss;
    j["entropy"] = c.entropy;
    if (c.has_labels()) {
        j["auc"] = c.auc;
        j["ap"] = c.ap;
        j["l_in"] = c.l_in;
        j["l_out"] = c.l_out;
        j["l_gap"] = c.l_gap;
        j["r_pi"] = c.r_pi;
    }
    return j;
}

MetricCurves curves_from_json(const json& j) {
    MetricCurves c;
    c.mean_loss = j.value("mean_loss", std::vector<double>{});
    c.entropy = j.value("entropy", std::vector<double>{});
    c.auc = j.value("auc", std::vector<double>{});
    c.ap = j.value("ap", std::vector<double>{});
    c.l_in = j.value("l_in", std::vector<double>{});
    c.l_out = j.value("l_out", std::vector<double>{});
    c.l_gap = j.value("l_gap", std::vector<double>{});
    c.r_pi = j.value("r_pi", std::vector<double>{});
    c.validate();
    return c;
}

json diag_to_json(const DiagnosticReport& d) {
    json j;
    j["rpi_final"] = d.rpi_final;
    j["rpi_curve"] = d.rpi_curve;
    j["label_misleading"] = d.label_misleading;
    j["auc_converged"] = d.auc_converged;
    j["decomposition_residual"] = d.decomposition_residual;
    return j;
}

DiagnosticReport diag_from_json(const json& j) {
    DiagnosticReport d;
    d.rpi_final = j.at("rpi_final").get<double>();
    d.rpi_curve = j.value("rpi_curve", std::vector<double>{});
    d.label_misleading = j.at("label_misleading").get<bool>();
    d.auc_converged = j.at("auc_converged").get<bool>();
    d.decomposition_residual = j.at("decomposition_residual").get<double>();
    return d;
}

const char* kind_name(ModelKind k) {
    return k == ModelKind::autoencoder ? "ae" : "svdd";
}

ModelKind kind_from_name(const std::string& s) {
    if (s == "ae") return ModelKind::autoencoder;
    if (s == "svdd") return ModelKind::linear_deep_svdd;
    throw std::runtime_error("unknown model kind '" + s + "'");
}

json config_to_json(const TrainConfig& c) {
    json j;
    j["model"] = kind_name(c.model.kind);
    j["width"] = c.model.width;
    j["lr"] = c.lr;
    j["batch_size"] = c.batch_size;
    j["iters"] = c.iters;
    j["epochs"] = c.epochs;
    j["seed"] = c.seed;
    j["patience"] = c.patience;
    j["downtrend_threshold"] = c.downtrend_threshold;
    j["eval_size"] = c.eval_size;
    j["early_stop"] = c.early_stop;
    return j;
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.model.kind = kind_from_name(j.at("model").get<std::string>());
    c.model.width = j.at("width").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.iters = j.at("iters").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.downtrend_threshold = j.at("downtrend_threshold").get<double>();
    c.eval_size = j.at("eval_size").get<std::size_t>();
    c.early_stop = j.at("early_stop").get<bool>();
    return c;
}

}  // namespace

std::string curves_csv(const MetricCurves& curves) {
    curves.validate();
    std::ostringstream out;
    out << "iter,mean_loss,entropy,auc,ap,l_gap,r_pi\n";
    auto cell = [](const std::vector<double>& v, std::size_t i) {
        return v.empty() ? std::string() : fmt(v[i]);
    };
    for (std::size_t i = 0; i < curves.size(); ++i)
        out << i << ',' << cell(curves.mean_loss, i) << ',' << fmt(curves.entropy[i]) << ','
            << cell(curves.auc, i) << ',' << cell(curves.ap, i) << ','
            << cell(curves.l_gap, i) << ',' << cell(curves.r_pi, i) << '\n';
    return out.str();
}

std::string report_json(const TrainingReport& rep) {
    json j;
    j["schema_version"] = rep.schema_version;
    j["dataset"] = {{"name", rep.dataset},
                    {"n", rep.n},
                    {"dim", rep.dim},
                    {"has_labels", rep.has_labels},
                    {"outlier_ratio", num_or_null(rep.outlier_ratio)}};
    j["config"] = config_to_json(rep.config);
    j["result"] = {{"stop_iter", rep.stop_iter},
                   {"best_iter", rep.best_iter},
                   {"selected_auc", num_or_null(rep.selected_auc)},
                   {"selected_ap", num_or_null(rep.selected_ap)},
                   {"final_auc", num_or_null(rep.final_auc)},
                   {"final_ap", num_or_null(rep.final_ap)},
                   {"pearson_r", rep.pearson_defined ? json(rep.pearson_r) : json(nullptr)},
                   {"auc_flat", rep.auc_flat},
                   {"score_tie_count", rep.score_tie_count}};
    j["timing"] = {{"train_seconds", rep.timings.train_seconds},
                   {"entropy_eval_seconds", rep.timings.eval_seconds},
                   {"total_seconds", rep.timings.total_seconds}};
    j["curves"] = curves_to_json(rep.curves);
    if (rep.diagnostics) j["diagnostics"] = diag_to_json(*rep.diagnostics);
    return j.dump(2) + "\n";
}

TrainingReport parse_report_json(const std::string& text) {
    const json j = json::parse(text);
    TrainingReport rep;
    rep.schema_version = j.at("schema_version").get<int>();
    if (rep.schema_version != 1)
        throw std::runtime_error("unsupported report schema_version " +
                                 std::to_string(rep.schema_version));
    const json& d = j.at("dataset");
    rep.dataset = d.at("name").get<std::string>();
    rep.n = d.at("n").get<std::size_t>();
    rep.dim = d.at("dim").get<std::size_t>();
    rep.has_labels = d.at("has_labels").get<bool>();
    rep.outlier_ratio = d.at("outlier_ratio").is_null()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : d.at("outlier_ratio").get<double>();
    rep.config = config_from_json(j.at("config"));
    const json& r = j.at("result");
    rep.stop_iter = r.at("stop_iter").get<std::size_t>();
    rep.best_iter = r.at("best_iter").get<std::size_t>();
    auto opt_num = [](const json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    rep.selected_auc = opt_num(r.at("selected_auc"));
    rep.selected_ap = opt_num(r.at("selected_ap"));
    rep.final_auc = opt_num(r.at("final_auc"));
    rep.final_ap = opt_num(r.at("final_ap"));
    rep.pearson_defined = !r.at("pearson_r").is_null();
    rep.pearson_r = opt_num(r.at("pearson_r"));
    rep.auc_flat = r.at("auc_flat").get<bool>();
    rep.score_tie_count = r.at("score_tie_count").get<std::size_t>();
    const json& t = j.at("timing");
    rep.timings.train_seconds = t.at("train_seconds").get<double>();
    rep.timings.eval_seconds = t.at("entropy_eval_seconds").get<double>();
    rep.timings.total_seconds = t.at("total_seconds").get<double>();
    rep.curves = curves_from_json(j.at("curves"));
    if (j.contains("diagnostics")) rep.diagnostics = diag_from_json(j.at("diagnostics"));
    return rep;
}

std::string compare_json(const CompareSummary& s) {
    json rows = json::array();
    for (const CompareRow& r : s.rows)
        rows.push_back({{"dataset", r.dataset},
                        {"vanilla_auc", r.vanilla_auc},
                        {"vanilla_ap", r.vanilla_ap},
                        {"stopped_auc", r.stopped_auc},
                        {"stopped_ap", r.stopped_ap},
                        {"vanilla_seconds", r.vanilla_seconds},
                        {"stopped_seconds", r.stopped_seconds},
                        {"stop_iter", r.stop_iter},
                        {"best_iter", r.best_iter},
                        {"horizon", r.horizon}});
    json j;
    j["schema_version"] = 1;
    j["rows"] = rows;
    j["summary"] = {{"mean_auc", {{"vanilla", s.mean_auc_vanilla}, {"stopped", s.mean_auc_stopped}}},
                    {"mean_ap", {{"vanilla", s.mean_ap_vanilla}, {"stopped", s.mean_ap_stopped}}},
                    {"mean_rank_auc",
                     {{"vanilla", s.mean_rank_auc_vanilla}, {"stopped", s.mean_rank_auc_stopped}}},
                    {"avg_train_time", {{"vanilla", s.avg_time_vanilla}, {"stopped", s.avg_time_stopped}}},
                    {"total_train_time",
                     {{"vanilla", s.total_time_vanilla}, {"stopped", s.total_time_stopped}}}};
    return j.dump(2) + "\n";
}

std::string compare_table(const CompareSummary& s) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %12s %12s %12s %12s %10s\n", "dataset",
                  "vanilla_auc", "stopped_auc", "vanilla_ap", "stopped_ap", "stop_iter");
    out << line;
    for (const CompareRow& r : s.rows) {
        std::snprintf(line, sizeof line, "%-24s %12.4f %12.4f %12.4f %12.4f %10zu\n",
                      r.dataset.c_str(), r.vanilla_auc, r.stopped_auc, r.vanilla_ap,
                      r.stopped_ap, r.stop_iter);
        out << line;
    }
    std::snprintf(line, sizeof line, "%-24s %12.4f %12.4f %12.4f %12.4f\n", "mean",
                  s.mean_auc_vanilla, s.mean_auc_stopped, s.mean_ap_vanilla, s.mean_ap_stopped);
    out << line;
    std::snprintf(line, sizeof line, "%-24s %12.2f %12.2f\n", "mean rank (auc)",
                  s.mean_rank_auc_vanilla, s.mean_rank_auc_stopped);
    out << line;
    std::snprintf(line, sizeof line, "%-24s %12.3f %12.3f\n", "avg train time",
                  s.avg_time_vanilla, s.avg_time_stopped);
    out << line;
    std::snprintf(line, sizeof line, "%-24s %12.3f %12.3f\n", "total train time",
                  s.total_time_vanilla, s.total_time_stopped);
    out << line;
    return out.str();
}

std::string correlate_json(const CorrelateSummary& s) {
    json rows = json::array();
    for (const CorrelateRow& r : s.rows) {
        json row;
        row["dataset"] = r.dataset;
        row["r"] = r.defined ? json(r.r) : json(nullptr);
        row["defined"] = r.defined;
        row["auc_flat"] = r.auc_flat;
        rows.push_back(row);
    }
    json j;
    j["schema_version"] = 1;
    j["rows"] = rows;
    j["histogram"] = {{"bin_width", 0.25}, {"lo", -1.0}, {"counts", s.histogram}};
    return j.dump(2) + "\n";
}

std::string correlate_table(const CorrelateSummary& s) {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof line, "%-24s %10s\n", "dataset", "pearson_r");
    out << line;
    for (const CorrelateRow& r : s.rows) {
        if (r.defined)
            std::snprintf(line, sizeof line, "%-24s %10.4f\n", r.dataset.c_str(), r.r);
        else
            std::snprintf(line, sizeof line, "%-24s %10s\n", r.dataset.c_str(),
                          r.auc_flat ? "undefined(converged)" : "undefined");
        out << line;
    }
    out << "histogram of r (bins of 0.25 from -1):";
    for (std::size_t c : s.histogram) out << ' ' << c;
    out << '\n';
    return out.str();
}

std::string diagnostics_json(const DiagnosticReport& rep, const std::string& dataset) {
    json j;
    j["schema_version"] = 1;
    j["dataset"] = dataset;
    j["diagnostics"] = diag_to_json(rep);
    return j.dump(2) + "\n";
}

std::string diagnostics_table(const DiagnosticReport& rep, const std::string& dataset) {
    std::ostringstream out;
    out << "dataset: " << dataset << '\n';
    out << "final pseudo-inlier ratio: " << fmt(rep.rpi_final) << '\n';
    out << "label misleading:          " << (rep.label_misleading ? "yes" : "no") << '\n';
    out << "auc converged:             " << (rep.auc_converged ? "yes" : "no") << '\n';
    out << "decomposition residual:    " << fmt(rep.decomposition_residual) << '\n';
    return out.str();
}

void write_report_files(const TrainingReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string base = rep.dataset.empty() ? "run" : rep.dataset;
    write_text_file(dir / (base + "_report.json"), report_json(rep));
    write_text_file(dir / (base + "_curves.csv"), curves_csv(rep.curves));

    std::ostringstream scores;
    scores << "index,score\n";
    for (std::size_t i = 0; i < rep.scores.size(); ++i)
        scores << i << ',' << fmt(rep.scores[i]) << '\n';
    write_text_file(dir / (base + "_scores.csv"), scores.str());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace odstop
