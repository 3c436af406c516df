#pragma once

// Flat JSON form of a fitted model:
//   {"flavor": "sslda", "lambda": 0.1, "p": 3, "gamma": [...], "mu1": [...], "mu2": [...]}
// Doubles are written with round-trip precision, so save/load is exact.

#include "sslda/classifier.hpp"

#include "json.hpp"

#include <filesystem>

namespace sslda {

nlohmann::json model_to_json(const DiscriminantModel& model);

// Throws InputError on missing fields, wrong types or inconsistent lengths.
DiscriminantModel model_from_json(const nlohmann::json& doc);

void save_model(const DiscriminantModel& model, const std::filesystem::path& path);
DiscriminantModel load_model(const std::filesystem::path& path);

}  // namespace sslda
