#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "odstop/matrix.hpp"

namespace odstop {

struct Dataset {
    std::string name;
    Matrix X;
    std::vector<int> labels;  // empty when unlabeled
    bool has_labels = false;
    double outlier_ratio = 0.0;  // mean(labels) when labeled

    std::size_t n() const { return X.rows; }
    std::size_t dim() const { return X.cols; }
};

/**
 * Loads a UTF-8 CSV with a header row. All columns are numeric features
 * except an optional final column named "label" holding literal 0/1 ground
 * truth. Parse failures report the offending row and column. Non-finite
 * values are rejected.
 */
Dataset load_csv(const std::filesystem::path& path);

// Writes a dataset back to CSV with full round-trip precision (features as
// f0..f{d-1} plus a label column when present).
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Per-column z-score normalisation using population standard deviation.
// Columns with a standard deviation below 1e-12 become all zeros.
Dataset standardize(const Dataset& data);

struct EvalSet {
    std::vector<std::size_t> indices;  // into the parent dataset, unique
    Matrix features;
};

// Uniform sample of min(n_eval, n) distinct rows. With n_eval >= n the whole
// dataset is taken in its original order. Fixed seed gives a fixed subset.
EvalSet sample_eval_set(const Dataset& data, std::size_t n_eval, std::uint64_t seed);

/**
 * Batch index plan for one epoch: a seeded shuffle of [0, n) split into
 * consecutive chunks of batch_size (final short chunk kept). The shuffle
 * depends on (seed, epoch), so every epoch reorders the data differently
 * but reproducibly. batch_size >= n yields one full batch in the original
 * order with no shuffle.
 */
std::vector<std::vector<std::size_t>> batches(std::size_t n, std::size_t batch_size,
                                              std::uint64_t seed, std::size_t epoch);

/**
 * Labeled synthetic benchmark: n_in inliers drawn from a standard normal in
 * d dimensions and n_out outliers uniform in [-spread, spread]^d, shuffled
 * together. The outlier ratio follows from the counts.
 */
Dataset gen_synthetic(std::size_t n_in, std::size_t n_out, std::size_t d, double spread,
                      std::uint64_t seed);

}  // namespace odstop
