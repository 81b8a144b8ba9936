#include "riscore/run_config.hpp"

#include <cstdlib>

#include "riscore/errors.hpp"
#include "riscore/io.hpp"

namespace riscore {

GeneratorConfig RunConfig::generator_for(const std::string& model_tag) const {
  GeneratorConfig g{model_tag, registry().default_params(model_tag)};
  g.params.seed = seed;
  return g;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

std::string interpolate_env(std::string_view s, const EnvLookup& env) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto open = s.find("${", i);
    if (open == std::string_view::npos) {
      out.append(s.substr(i));
      break;
    }
    out.append(s.substr(i, open - i));
    const auto close = s.find('}', open + 2);
    if (close == std::string_view::npos) throw Error(ErrorCode::Config, "unterminated ${ in '" + std::string(s) + "'");
    const std::string name(s.substr(open + 2, close - open - 2));
    auto value = env(name);
    if (!value) throw Error(ErrorCode::Config, "environment variable " + name + " is not set");
    out += *value;
    i = close + 1;
  }
  return out;
}

namespace {

nlohmann::json interpolate_all(const nlohmann::json& j, const EnvLookup& env) {
  if (j.is_string()) return interpolate_env(j.get<std::string>(), env);
  if (j.is_object() || j.is_array()) {
    nlohmann::json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) it.value() = interpolate_all(it.value(), env);
    return out;
  }
  return j;
}

EndpointConfig endpoint(const nlohmann::json& j, const EnvLookup& env) {
  EndpointConfig e;
  if (j.is_null()) return e;
  e.base_url = j.value("base_url", std::string());
  e.model = j.value("model", std::string());
  e.timeout_s = j.value("timeout_s", 120);
  e.api_key = j.value("api_key", std::string());
  if (e.api_key.empty()) e.api_key = env("RISCORE_API_KEY").value_or("");
  return e;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& raw, const std::filesystem::path& base_dir, const EnvLookup& env) {
  if (!raw.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
  const nlohmann::json j = interpolate_all(raw, env);
  const auto path = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base_dir / fp;
  };
  const auto opt_path = [&](const nlohmann::json& obj, const char* key) -> std::optional<std::filesystem::path> {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return path(obj.at(key).get<std::string>());
  };

  try {
    RunConfig c;
    c.work_dir = path(j.value("work_dir", std::string("work")));
    c.cache_dir = opt_path(j, "cache_dir");
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();

    c.chat = endpoint(j.value("chat", nlohmann::json()), env);
    c.embedding = endpoint(j.value("embedding", nlohmann::json()), env);
    const auto cls = j.value("classifier", nlohmann::json());
    c.classifier = endpoint(cls, env);
    if (cls.is_object()) c.classifier_kind = cls.value("kind", std::string("chat"));
    if (c.classifier_kind != "chat" && c.classifier_kind != "zero-shot") {
      throw Error(ErrorCode::Config, "classifier.kind must be 'chat' or 'zero-shot'");
    }

    const auto models = j.value("models", nlohmann::json::object());
    for (const auto& [tag, m] : models.items()) {
      c.models[tag] = ModelConfig{m.value("penalized", false), m.value("max_tokens", 512)};
    }
    const auto roles = j.value("roles", nlohmann::json::object());
    c.generator_model = roles.value("generator", std::string());
    c.evaluator_model = roles.value("evaluator", c.generator_model);
    c.classifier_model = roles.value("classifier", c.generator_model);
    for (const auto* tag : {&c.generator_model, &c.evaluator_model, &c.classifier_model}) {
      if (!tag->empty() && !c.models.count(*tag)) throw Error(ErrorCode::Config, "role uses unknown model '" + *tag + "'");
    }

    const auto datasets = j.value("datasets", nlohmann::json::object());
    for (const auto& [name, d] : datasets.items()) {
      if (name != "brainteaser" && name != "riddlesense") throw Error(ErrorCode::Config, "unknown dataset '" + name + "'");
      c.datasets[name] = DatasetPaths{path(d.at("train").get<std::string>()), path(d.at("test").get<std::string>())};
    }
    c.fewshot_pairs = opt_path(j, "fewshot_pairs");
    c.explanations = opt_path(j, "explanations");
    if (j.contains("wordnet")) {
      c.wordnet_index = opt_path(j.at("wordnet"), "index");
      c.wordnet_data = opt_path(j.at("wordnet"), "data");
    }
    c.dedup_threshold = j.value("dedup_threshold", 0.9);
    if (!(c.dedup_threshold > 0.0 && c.dedup_threshold <= 1.0)) throw Error(ErrorCode::Config, "dedup_threshold must be in (0, 1]");
    auto mode = parse_recon_mode(j.value("reconstruction_mode", std::string("zs")));
    if (!mode) throw Error(ErrorCode::Config, "reconstruction_mode must be 'zs' or 'fs'");
    c.reconstruction_mode = *mode;
    c.max_in_flight = j.value("max_in_flight", std::size_t{4});
    c.embed_batch = j.value("embed_batch", std::size_t{32});
    if (c.max_in_flight == 0 || c.embed_batch == 0) throw Error(ErrorCode::Config, "concurrency limits must be positive");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path, const EnvLookup& env) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  return parse_run_config(j, std::filesystem::absolute(path).parent_path(), env);
}

}  // namespace riscore
