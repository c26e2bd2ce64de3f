#include "tft/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tft {

namespace {

using nlohmann::ordered_json;

ordered_json config_to_json(const TftConfig& c) {
  return ordered_json{{"d_model", c.d_model},
                      {"num_heads", c.num_heads},
                      {"lstm_layers", c.lstm_layers},
                      {"full_attention", c.full_attention},
                      {"k", c.k},
                      {"tau_max", c.tau_max},
                      {"m_s", c.m_s},
                      {"m_z", c.m_z},
                      {"m_x", c.m_x},
                      {"quantiles", c.quantiles}};
}

TftConfig config_from_json(const ordered_json& j) {
  TftConfig c;
  c.d_model = j.at("d_model").get<std::size_t>();
  c.num_heads = j.at("num_heads").get<std::size_t>();
  c.lstm_layers = j.at("lstm_layers").get<std::size_t>();
  c.full_attention = j.at("full_attention").get<bool>();
  c.k = j.at("k").get<std::size_t>();
  c.tau_max = j.at("tau_max").get<std::size_t>();
  c.m_s = j.at("m_s").get<std::size_t>();
  c.m_z = j.at("m_z").get<std::size_t>();
  c.m_x = j.at("m_x").get<std::size_t>();
  c.quantiles = j.at("quantiles").get<std::vector<double>>();
  c.validate();
  return c;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& file, Checkpoint& ckpt) {
  ordered_json doc;
  doc["format"] = "tft-checkpoint-v1";
  doc["config"] = config_to_json(ckpt.config);
  doc["target"] = ckpt.target;
  doc["covariates"] = ckpt.covariates;
  doc["init_seed"] = ckpt.init_seed;

  ordered_json norm = ordered_json::object();
  for (const auto& [code, m] : ckpt.norm.by_signal) {
    norm[code] = ordered_json{{"mean", m.mean}, {"std", m.std}};
  }
  doc["normalization"] = norm;

  ordered_json params = ordered_json::object();
  for_each_param(ckpt.params, ckpt.config,
                 [&params](const std::string& path, numerics::Tensor& t) {
                   params[path] = ordered_json{
                       {"shape", t.shape()},
                       {"data", std::vector<double>(t.data().begin(),
                                                    t.data().end())}};
                 });
  doc["params"] = params;

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint " + file.string());
  out << doc.dump(1) << '\n';
  if (!out) throw std::runtime_error("checkpoint write failed: " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + file.string());
  ordered_json doc = ordered_json::parse(in);
  if (doc.at("format").get<std::string>() != "tft-checkpoint-v1") {
    throw std::runtime_error("unsupported checkpoint format in " + file.string());
  }

  Checkpoint ckpt;
  ckpt.config = config_from_json(doc.at("config"));
  ckpt.target = doc.at("target").get<std::string>();
  ckpt.covariates = doc.at("covariates").get<std::vector<std::string>>();
  ckpt.init_seed = doc.at("init_seed").get<std::uint64_t>();
  for (const auto& [code, m] : doc.at("normalization").items()) {
    ckpt.norm.by_signal[code] = {m.at("mean").get<double>(),
                                 m.at("std").get<double>()};
  }

  const auto& params = doc.at("params");
  for_each_param(ckpt.params, ckpt.config,
                 [&params, &file](const std::string& path, numerics::Tensor& t) {
                   if (!params.contains(path)) {
                     throw std::runtime_error("checkpoint " + file.string() +
                                              " lacks parameter " + path);
                   }
                   const auto& entry = params.at(path);
                   auto shape = entry.at("shape").get<numerics::Shape>();
                   auto values = entry.at("data").get<std::vector<double>>();
                   t = numerics::Tensor::from(shape, std::move(values), true);
                 });
  audit_shapes(ckpt.params, ckpt.config);
  return ckpt;
}

}  // namespace tft
