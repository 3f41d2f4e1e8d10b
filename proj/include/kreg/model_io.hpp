#pragma once

#include "kreg/estimators.hpp"

#include <string>

namespace kreg {

/// JSON document
///   {intercept, alpha[], kernel{family, gamma}, lambda, objective, n, d, loss, training_inputs[][]}
/// Numbers are written in shortest round-trip form, so parsing the text back yields
/// bit-identical doubles.
[[nodiscard]] std::string model_to_json(const Model& model);

/// Inverse of model_to_json. Throws ParseError on malformed documents.
[[nodiscard]] Model model_from_json(const std::string& text);

}  // namespace kreg
