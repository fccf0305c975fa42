#include <palm/reading.hpp>
#include <palm/error.hpp>
#include <palm/text.hpp>

#include <fmt/format.h>

#include <optional>
#include <set>
#include <sstream>

namespace palm {

namespace {

constexpr std::array<LengthClass, 3> kLengths = {LengthClass::Short, LengthClass::Medium, LengthClass::Long};
constexpr std::array<ShapeClass, 2> kShapes = {ShapeClass::Straight, ShapeClass::Curved};

const std::set<std::string, std::less<>> kAttributes = {"present", "absent", "short", "medium", "long", "straight", "curved"};

std::string lookup_key(LineKind k, LengthClass l, ShapeClass s) {
    return fmt::format("{}.{}.{}", to_string(k), to_string(l), to_string(s));
}

bool term_holds(const ComboTerm& term, const LineDescriptor& d) {
    const auto& a = term.attribute;
    if (a == "present") return d.present;
    if (a == "absent") return !d.present;
    if (!d.present) return false;
    if (a == "short" || a == "medium" || a == "long") return to_string(d.length_class) == a;
    return to_string(d.shape_class) == a;
}

}  // namespace

std::string_view to_string(LengthClass c) {
    switch (c) {
        case LengthClass::Short: return "short";
        case LengthClass::Medium: return "medium";
        case LengthClass::Long: return "long";
    }
    return "medium";
}

std::string_view to_string(ShapeClass c) {
    return c == ShapeClass::Curved ? "curved" : "straight";
}

void DescriptorThresholds::validate() const {
    if (!(short_below > 0.0) || !(short_below <= long_above)) {
        throw InvalidConfig("length thresholds must satisfy 0 < short_below <= long_above");
    }
    if (!(curved_at >= 0.0)) throw InvalidConfig("curved_at must be >= 0");
}

LengthClass classify_length(double arc_length_norm, const DescriptorThresholds& t) {
    if (arc_length_norm < t.short_below) return LengthClass::Short;
    if (arc_length_norm > t.long_above) return LengthClass::Long;
    return LengthClass::Medium;
}

ShapeClass classify_shape(double depth_ratio, const DescriptorThresholds& t) {
    return depth_ratio >= t.curved_at ? ShapeClass::Curved : ShapeClass::Straight;
}

LineDescriptor describe_line(const PalmLine& line, double img_diagonal, const DescriptorThresholds& t) {
    if (!(img_diagonal > 0.0)) throw InvalidArgument("image diagonal must be positive");
    const double chord = chord_length(line.contour);
    LineDescriptor d;
    d.kind = line.kind;
    d.present = true;
    d.length_class = classify_length(line.arc_length / img_diagonal, t);
    d.shape_class = classify_shape(chord > 0.0 ? line.depth / chord : 0.0, t);
    return d;
}

std::vector<std::string> RuleTable::required_keys() {
    std::vector<std::string> keys = {"version", "disclaimer"};
    for (auto c : kAllCategories) keys.push_back(fmt::format("greeting.{}", to_string(c)));
    for (auto k : kAllLineKinds) {
        for (auto l : kLengths) {
            for (auto s : kShapes) keys.push_back(lookup_key(k, l, s));
        }
        keys.push_back(fmt::format("{}.absent", to_string(k)));
    }
    return keys;
}

RuleTable RuleTable::parse(const std::string& text, const std::string& source) {
    std::map<std::string, std::string, std::less<>> values;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidConfig(fmt::format("{}:{}: expected key = value", source, line_no));
        }
        const std::string key(trim(t.substr(0, eq)));
        const std::string value(trim(t.substr(eq + 1)));
        if (key.empty() || value.empty()) {
            throw InvalidConfig(fmt::format("{}:{}: empty key or value", source, line_no));
        }
        if (!values.emplace(key, value).second) {
            throw InvalidConfig(fmt::format("{}:{}: duplicate key '{}'", source, line_no, key));
        }
    }

    std::vector<std::string> missing;
    for (const auto& k : required_keys()) {
        if (!values.contains(k)) missing.push_back(k);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw InvalidConfig(fmt::format("{}: rule table is missing {} key(s): {}", source, missing.size(), list));
    }

    RuleTable table;
    table.version_ = values.at("version");
    table.disclaimer_ = values.at("disclaimer");
    for (auto c : kAllCategories) table.greetings_[static_cast<int>(c)] = values.at(fmt::format("greeting.{}", to_string(c)));
    for (auto k : kAllLineKinds) {
        for (std::size_t l = 0; l < kLengths.size(); ++l) {
            for (std::size_t s = 0; s < kShapes.size(); ++s) {
                table.texts_[index_of(k)][l][s] = values.at(lookup_key(k, kLengths[l], kShapes[s]));
            }
        }
        table.absent_[index_of(k)] = values.at(fmt::format("{}.absent", to_string(k)));
    }

    // Combination rules, in key order so the output order is stable.
    const auto required = required_keys();
    const std::set<std::string, std::less<>> known(required.begin(), required.end());
    for (const auto& [key, value] : values) {
        if (known.contains(key)) continue;
        const auto parts = split(key, '.');
        if (parts.size() != 3 || parts[0] != "combo" || (parts[2] != "when" && parts[2] != "text")) {
            throw InvalidConfig(fmt::format("{}: unknown key '{}'", source, key));
        }
        if (parts[2] == "text") continue;
        const auto text_key = fmt::format("combo.{}.text", parts[1]);
        if (!values.contains(text_key)) throw InvalidConfig(fmt::format("{}: '{}' has no matching text", source, key));
        ComboRule rule;
        rule.name = parts[1];
        rule.text = values.at(text_key);
        for (const auto& raw : split(value, '&')) {
            const auto term = split(trim(raw), '.');
            const auto kind = term.size() == 2 ? parse_line_kind(term[0]) : std::nullopt;
            if (!kind || !kAttributes.contains(term[1])) {
                throw InvalidConfig(fmt::format("{}: bad term '{}' in '{}'", source, trim(raw), key));
            }
            rule.when.push_back({*kind, term[1]});
        }
        table.combos_.push_back(std::move(rule));
    }
    for (const auto& [key, value] : values) {
        const auto parts = split(key, '.');
        if (parts.size() == 3 && parts[0] == "combo" && parts[2] == "text" && !values.contains(fmt::format("combo.{}.when", parts[1]))) {
            throw InvalidConfig(fmt::format("{}: '{}' has no matching predicate", source, key));
        }
    }
    return table;
}

RuleTable RuleTable::load(const std::filesystem::path& path) {
    return parse(read_text_file(path.string()), path.string());
}

const std::string& RuleTable::text(LineKind kind, LengthClass length, ShapeClass shape) const {
    return texts_[index_of(kind)][static_cast<int>(length)][static_cast<int>(shape)];
}

bool combo_matches(const ComboRule& rule, const std::array<LineDescriptor, 4>& descriptors) {
    for (const auto& term : rule.when) {
        if (!term_holds(term, descriptors[index_of(term.kind)])) return false;
    }
    return true;
}

TraitReport generate_report(const std::vector<PalmLine>& lines, HandCategory category, const RuleTable& rules,
                            double img_diagonal, const DescriptorThresholds& thresholds) {
    std::array<const PalmLine*, 4> chosen{};
    for (const auto& line : lines) {
        auto& slot = chosen[index_of(line.kind)];
        if (!slot || line.confidence > slot->confidence) slot = &line;
    }

    TraitReport report;
    report.category = category;
    report.greeting = rules.greeting(category);
    report.disclaimer = rules.disclaimer();
    report.rules_version = rules.version();

    std::array<LineDescriptor, 4> descriptors{};
    for (auto kind : kAllLineKinds) {
        const int k = index_of(kind);
        auto& entry = report.entries[k];
        if (chosen[k]) {
            entry.descriptor = describe_line(*chosen[k], img_diagonal, thresholds);
            entry.text = rules.text(kind, entry.descriptor.length_class, entry.descriptor.shape_class);
            entry.confidence = chosen[k]->confidence;
        } else {
            entry.descriptor.kind = kind;
            entry.descriptor.present = false;
            entry.text = rules.absent_text(kind);
        }
        descriptors[k] = entry.descriptor;
    }
    for (const auto& rule : rules.combos()) {
        if (combo_matches(rule, descriptors)) report.combinations.push_back(rule.text);
    }
    return report;
}

std::string render_report(const TraitReport& report) {
    std::string out = report.greeting + "\n\n";
    for (const auto& e : report.entries) {
        const auto& d = e.descriptor;
        if (d.present) {
            out += fmt::format("{} line ({}, {}, confidence {:.2f}): {}\n", to_string(d.kind), to_string(d.length_class),
                               to_string(d.shape_class), e.confidence, e.text);
        } else {
            out += fmt::format("{} line (not found): {}\n", to_string(d.kind), e.text);
        }
    }
    for (const auto& c : report.combinations) out += "* " + c + "\n";
    out += "\n" + report.disclaimer + "\n";
    return out;
}

}  // namespace palm
