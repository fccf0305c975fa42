/**
 * @file pipeline.hpp
 * @brief End-to-end flows: annotated corpus to dataset, raw image to report
 */
#pragma once

#include <palm/features.hpp>
#include <palm/imaging.hpp>
#include <palm/ml/classifier.hpp>
#include <palm/ml/dataset.hpp>
#include <palm/reading.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace palm {

struct PipelineConfig {
    int resize_target = 256;
    double blur_sigma = 1.0;
    std::optional<int> blur_ksize;  // unset: 2*ceil(3*sigma)+1
    double canny_low = 50.0;
    double canny_high = 100.0;

    /// Annotation color ranges, indexed by index_of(kind).
    std::array<HsvRange, 4> line_ranges{
        HsvRange{340.0, 20.0, 0.5, 1.0, 0.4, 1.0, true},
        HsvRange{90.0, 150.0, 0.5, 1.0, 0.3, 1.0, false},
        HsvRange{270.0, 330.0, 0.5, 1.0, 0.3, 1.0, false},
        HsvRange{210.0, 260.0, 0.5, 1.0, 0.4, 1.0, false},
    };

    /// Raw mode keeps only edges inside the eroded skin region, dropping the palm outline.
    bool palm_region = true;
    HsvRange skin_range{0.0, 50.0, 0.15, 0.75, 0.4, 1.0, false};
    int palm_margin = 5;

    std::size_t cleanup_min_size = 10;
    double min_arc_length = 30.0;
    int max_candidates = 8;
    double confidence_floor = 0.4;
    DescriptorThresholds thresholds;

    int overlay_thickness = 3;
    LinePalette palette;

    std::filesystem::path forest_model;
    std::filesystem::path svm_model;
    std::filesystem::path rules_path;

    /// Throws InvalidConfig naming the offending field.
    void validate() const;
};

/// Relative paths in the file resolve against base_dir.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const PipelineConfig& cfg);

/// Parses, validates, and checks that the rule file exists. Model files are
/// checked when they are loaded so a service can start without them.
PipelineConfig load_config(const std::filesystem::path& path);

/// Longest opened contour of one annotation color, if any reaches min_arc_length.
std::optional<Contour> segment_annotated_line(const Image& rgb, LineKind kind, const PipelineConfig& cfg);

/**
 * @brief Builds the training dataset from an annotated corpus
 *
 * Rows are appended in manifest order, kinds in Heart..Fate order, with ids
 * "<filename>#<kind>". Missing images raise IoError; a corpus yielding no
 * rows raises EmptyDataset.
 */
ml::LabeledDataset ingest_annotated_corpus(const std::filesystem::path& manifest_path, const PipelineConfig& cfg);

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct AnalysisResult {
    std::string request_id;
    std::string model_name;
    HandCategory category = HandCategory::MaleLeft;
    std::vector<PalmLine> lines;  // at most one per kind, in kind order
    TraitReport report;
    Image annotated;              // RGB at resize_target x resize_target
    std::vector<StageTiming> timings;
    nlohmann::json config;        // the effective configuration
};

/// Raw-image edge candidates, before classification. Exposed for tests and tooling.
std::vector<Contour> candidate_contours(const Image& resized_rgb, const PipelineConfig& cfg);

AnalysisResult analyze_image(const Image& img, HandCategory category, const ml::Model& model, const RuleTable& rules,
                             const PipelineConfig& cfg, std::string request_id = {});

/// Decodes PNG bytes (BadImage on failure) and runs analyze_image.
AnalysisResult analyze(std::span<const std::uint8_t> png_bytes, HandCategory category, const ml::Model& model,
                       const RuleTable& rules, const PipelineConfig& cfg, std::string request_id = {});

/// Summary used by the HTTP API and `predict --json`.
nlohmann::json summary_json(const AnalysisResult& r, bool include_timings = true);

}  // namespace palm
