/**
 * @file reading.hpp
 * @brief Line descriptors and the rule table that maps them to trait text
 */
#pragma once

#include <palm/category.hpp>
#include <palm/features.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace palm {

enum class LengthClass { Short, Medium, Long };
enum class ShapeClass { Straight, Curved };

std::string_view to_string(LengthClass c);
std::string_view to_string(ShapeClass c);

struct DescriptorThresholds {
    double short_below = 0.25;  // arc_length / diagonal
    double long_above = 0.45;
    double curved_at = 0.12;    // depth / chord

    /// Throws InvalidConfig unless 0 < short_below <= long_above and curved_at >= 0.
    void validate() const;
};

/// length_class and shape_class are meaningful only when present is true.
struct LineDescriptor {
    LineKind kind = LineKind::Heart;
    bool present = false;
    LengthClass length_class = LengthClass::Medium;
    ShapeClass shape_class = ShapeClass::Straight;
    bool operator==(const LineDescriptor&) const = default;
};

LengthClass classify_length(double arc_length_norm, const DescriptorThresholds& t = {});
ShapeClass classify_shape(double depth_ratio, const DescriptorThresholds& t = {});

LineDescriptor describe_line(const PalmLine& line, double img_diagonal, const DescriptorThresholds& t = {});

/// One term of a combination predicate, e.g. "heart.long" or "fate.absent".
struct ComboTerm {
    LineKind kind = LineKind::Heart;
    std::string attribute;  // present, absent, short, medium, long, straight, curved
};

struct ComboRule {
    std::string name;
    std::vector<ComboTerm> when;  // all terms must hold
    std::string text;
};

/**
 * @brief Total mapping from descriptors to trait text
 *
 * Loaded from a key = value file. Required keys: version, disclaimer,
 * greeting.<category> for all four categories, <kind>.<length>.<shape> for all
 * 24 combinations, <kind>.absent for all four kinds. Optional combination
 * rules come in pairs combo.<name>.when / combo.<name>.text, where "when" is
 * a list of terms joined by '&'.
 */
class RuleTable {
public:
    static RuleTable parse(const std::string& text, const std::string& source = "<memory>");
    static RuleTable load(const std::filesystem::path& path);

    const std::string& version() const { return version_; }
    const std::string& disclaimer() const { return disclaimer_; }
    const std::string& greeting(HandCategory c) const { return greetings_[static_cast<int>(c)]; }
    const std::string& text(LineKind kind, LengthClass length, ShapeClass shape) const;
    const std::string& absent_text(LineKind kind) const { return absent_[index_of(kind)]; }
    const std::vector<ComboRule>& combos() const { return combos_; }

    /// Every key a valid table must define (combination keys excluded).
    static std::vector<std::string> required_keys();

private:
    std::string version_;
    std::string disclaimer_;
    std::array<std::string, 4> greetings_;
    std::array<std::array<std::array<std::string, 2>, 3>, 4> texts_;  // [kind][length][shape]
    std::array<std::string, 4> absent_;
    std::vector<ComboRule> combos_;
};

struct ReportEntry {
    LineDescriptor descriptor;
    std::string text;
    double confidence = 0.0;  // 0 for absent lines
};

struct TraitReport {
    HandCategory category = HandCategory::MaleLeft;
    std::string greeting;
    std::array<ReportEntry, 4> entries;  // indexed by index_of(kind)
    std::vector<std::string> combinations;
    std::string disclaimer;
    std::string rules_version;
};

bool combo_matches(const ComboRule& rule, const std::array<LineDescriptor, 4>& descriptors);

/**
 * @brief One entry per kind, absent kinds included
 *
 * If two lines share a kind the higher-confidence one is used.
 */
TraitReport generate_report(const std::vector<PalmLine>& lines, HandCategory category, const RuleTable& rules,
                            double img_diagonal, const DescriptorThresholds& thresholds = {});

/// Plain-text rendering for the CLI.
std::string render_report(const TraitReport& report);

}  // namespace palm
