/**
 * @file dataset.hpp
 * @brief Labeled feature rows, CSV persistence, stratified splitting
 */
#pragma once

#include <palm/features.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace palm::ml {

struct LabeledDataset {
    std::vector<FeatureVector> features;
    std::vector<LineKind> labels;
    std::vector<std::string> ids;

    std::size_t size() const noexcept { return labels.size(); }
    bool empty() const noexcept { return labels.empty(); }

    void add(std::string id, LineKind label, const FeatureVector& fv);

    /// Row count per kind, indexed by index_of(kind).
    std::array<std::size_t, 4> class_counts() const;

    /// Throws InvalidDataset on ragged columns or non-finite features.
    void validate() const;
};

/// Header "id,label,f0,...,f5"; numbers in shortest round-trip form.
std::string to_csv(const LabeledDataset& ds);
LabeledDataset parse_dataset_csv(const std::string& text);

void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds);
LabeledDataset read_dataset(const std::filesystem::path& path);

struct Split {
    LabeledDataset train;
    LabeledDataset test;
};

/**
 * @brief Stratified split, deterministic in seed
 *
 * The total test count is round(test_fraction * n); it is apportioned to the
 * classes by largest remainder so each class is within one sample of its exact
 * share. Rows keep their original relative order on both sides.
 */
Split train_test_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed);

}  // namespace palm::ml
