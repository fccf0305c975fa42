/**
 * @file model_io.hpp
 * @brief Versioned text serialization for .palmmodel files
 *
 * Layout: a "palmmodel" magic line, "format_version N", "kind <name>",
 * hyperparameter lines, the numeric body, then "end". Doubles are written in
 * shortest round-trip form so a reload predicts bit-identically.
 */
#pragma once

#include <palm/ml/classifier.hpp>

#include <filesystem>
#include <string>

namespace palm::ml {

std::string serialize_model(const Model& model);

/// `source` names the origin (usually a path) in CorruptModel messages.
Model deserialize_model(const std::string& text, const std::string& source = "<memory>");

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace palm::ml
