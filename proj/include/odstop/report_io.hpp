#pragma once

#include <filesystem>
#include <string>

#include "odstop/harness.hpp"

namespace odstop {

// Per-iteration curves as CSV text. Header is exactly
// "iter,mean_loss,entropy,auc,ap,l_gap,r_pi"; the label-based columns stay
// blank for unlabeled runs. Number formatting is locale-independent and
// round-trip exact, so a fixed run serialises to identical bytes.
std::string curves_csv(const MetricCurves& curves);

std::string report_json(const TrainingReport& rep);
TrainingReport parse_report_json(const std::string& text);

std::string compare_json(const CompareSummary& s);
std::string compare_table(const CompareSummary& s);

std::string correlate_json(const CorrelateSummary& s);
std::string correlate_table(const CorrelateSummary& s);

std::string diagnostics_json(const DiagnosticReport& rep, const std::string& dataset);
std::string diagnostics_table(const DiagnosticReport& rep, const std::string& dataset);

// Writes report.json, curves.csv and scores.csv under `dir` (created if
// needed), prefixed with the dataset name.
void write_report_files(const TrainingReport& rep, const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace odstop
