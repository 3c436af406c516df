#include "sslda/model_io.hpp"

#include <fstream>

namespace sslda {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector vector_field(const nlohmann::json& doc, const char* key, std::size_t expected) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw InputError(std::string("model JSON: field '") + key + "' missing or not an array");
  }
  const auto& arr = doc[key];
  if (arr.size() != expected) {
    throw InputError(std::string("model JSON: field '") + key + "' has " + std::to_string(arr.size()) +
                     " entries, expected p=" + std::to_string(expected));
  }
  Vector v(static_cast<Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    if (!arr[i].is_number()) throw InputError(std::string("model JSON: non-numeric entry in '") + key + "'");
    v(static_cast<Index>(i)) = arr[i].get<double>();
  }
  return v;
}

}  // namespace

nlohmann::json model_to_json(const DiscriminantModel& model) {
  return nlohmann::json{{"flavor", std::string(to_string(model.flavor))},
                        {"lambda", model.lambda},
                        {"p", model.dimension()},
                        {"gamma", to_std(model.gamma)},
                        {"mu1", to_std(model.mu1)},
                        {"mu2", to_std(model.mu2)}};
}

DiscriminantModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("model JSON: top level must be an object");
  if (!doc.contains("p") || !doc["p"].is_number_integer() || doc["p"].get<long long>() < 1) {
    throw InputError("model JSON: field 'p' missing or not a positive integer");
  }
  if (!doc.contains("flavor") || !doc["flavor"].is_string()) throw InputError("model JSON: field 'flavor' missing");
  if (!doc.contains("lambda") || !doc["lambda"].is_number()) throw InputError("model JSON: field 'lambda' missing");
  const auto p = static_cast<std::size_t>(doc["p"].get<long long>());
  DiscriminantModel model;
  model.flavor = parse_flavor(doc["flavor"].get<std::string>());
  model.lambda = doc["lambda"].get<double>();
  model.gamma = vector_field(doc, "gamma", p);
  model.mu1 = vector_field(doc, "mu1", p);
  model.mu2 = vector_field(doc, "mu2", p);
  return model;
}

void save_model(const DiscriminantModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file " + path.string());
  out << model_to_json(model).dump(2) << '\n';
}

DiscriminantModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read model file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace sslda
