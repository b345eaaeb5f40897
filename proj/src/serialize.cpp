#include "hcd/serialize.hpp"

#include <fstream>

#include <json.hpp>

#include "hcd/version.hpp"

namespace hcd {

namespace {

using nlohmann::json;

json net_to_json(const ConvNet& net) {
  json layers = json::array();
  for (const auto& l : net.layers) {
    json jl;
    jl["weights"] = std::vector<double>(
        l.weights.array().data(),
        l.weights.array().data() + l.weights.size());
    jl["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(jl));
  }
  return json{{"arch", arch_string(net)}, {"layers", std::move(layers)}};
}

ConvNet net_from_json(const json& j) {
  ConvNet net = parse_arch(j.at("arch").get<std::string>());
  const json& layers = j.at("layers");
  if (layers.size() != net.layers.size())
    throw_data("model file: layer count does not match architecture");
  for (size_t i = 0; i < net.layers.size(); ++i) {
    ConvLayer& l = net.layers[i];
    auto w = layers[i].at("weights").get<std::vector<double>>();
    auto b = layers[i].at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != l.weights.size() ||
        static_cast<Eigen::Index>(b.size()) != l.bias.size())
      throw_data("model file: parameter array size mismatch in layer " +
                 std::to_string(i));
    l.weights = Tensor(l.weights.shape(),
                       Eigen::Map<const Eigen::ArrayXd>(w.data(), w.size()));
    l.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  }
  return net;
}

}  // namespace

void save_model(const ModelChain& chain, const std::filesystem::path& path) {
  validate_chain(chain);
  json j;
  j["format"] = "hcd-model";
  j["version"] = kModelFormatVersion;
  j["scale"] = chain.scale;
  if (chain.down_kind == DownscalerKind::bicubic) {
    j["downscaler"] = json{{"kind", "bicubic"}};
  } else {
    json d = net_to_json(chain.down_net);
    d["kind"] = "conv";
    j["downscaler"] = std::move(d);
  }
  j["upscaler"] = net_to_json(chain.up_net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());
  out << j.dump(1) << "\n";
  if (!out) throw_data("write failed: " + path.string());
}

ModelChain load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("model file not found: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw_data("model file is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (j.at("format").get<std::string>() != "hcd-model")
      throw_data("not a model file: " + path.string());
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw_data("unsupported model format version");
    ModelChain chain;
    chain.scale = j.at("scale").get<int>();
    const json& d = j.at("downscaler");
    if (d.at("kind").get<std::string>() == "bicubic") {
      chain.down_kind = DownscalerKind::bicubic;
    } else {
      chain.down_kind = DownscalerKind::learned;
      chain.down_net = net_from_json(d);
    }
    chain.up_net = net_from_json(j.at("upscaler"));
    validate_chain(chain);
    return chain;
  } catch (const json::exception& e) {
    throw_data("malformed model file: " + std::string(e.what()));
  }
}

}  // namespace hcd
