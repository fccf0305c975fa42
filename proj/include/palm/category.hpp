#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace palm {

/// Upload-time hand metadata.
enum class HandCategory { MaleLeft = 0, MaleRight = 1, FemaleLeft = 2, FemaleRight = 3 };

inline constexpr std::array<HandCategory, 4> kAllCategories = {HandCategory::MaleLeft, HandCategory::MaleRight,
                                                               HandCategory::FemaleLeft, HandCategory::FemaleRight};

/// snake_case token used on the wire and in manifests: male_left, ...
std::string_view to_string(HandCategory c);
std::optional<HandCategory> parse_category(std::string_view token);

/// Display label, e.g. "female left hand".
std::string_view display_label(HandCategory c);

inline bool is_left(HandCategory c) { return c == HandCategory::MaleLeft || c == HandCategory::FemaleLeft; }
inline bool is_female(HandCategory c) { return c == HandCategory::FemaleLeft || c == HandCategory::FemaleRight; }

}  // namespace palm
