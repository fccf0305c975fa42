#include <palm/category.hpp>
#include <palm/error.hpp>

namespace palm {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::Io: return "io_error";
        case ErrorCode::InvalidDataset: return "invalid_dataset";
        case ErrorCode::EmptyDataset: return "empty_dataset";
        case ErrorCode::CorruptModel: return "corrupt_model";
        case ErrorCode::BadImage: return "bad_image";
        case ErrorCode::InvalidConfig: return "invalid_config";
    }
    return "error";
}

std::string_view to_string(HandCategory c) {
    switch (c) {
        case HandCategory::MaleLeft: return "male_left";
        case HandCategory::MaleRight: return "male_right";
        case HandCategory::FemaleLeft: return "female_left";
        case HandCategory::FemaleRight: return "female_right";
    }
    return "unknown";
}

std::optional<HandCategory> parse_category(std::string_view token) {
    for (auto c : kAllCategories) {
        if (to_string(c) == token) return c;
    }
    return std::nullopt;
}

std::string_view display_label(HandCategory c) {
    switch (c) {
        case HandCategory::MaleLeft: return "male left hand";
        case HandCategory::MaleRight: return "male right hand";
        case HandCategory::FemaleLeft: return "female left hand";
        case HandCategory::FemaleRight: return "female right hand";
    }
    return "hand";
}

}  // namespace palm
