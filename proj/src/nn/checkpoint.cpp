#include "ddff/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "json.hpp"

namespace ddff::nn {

namespace {

constexpr char kMagic[8] = {'D', 'D', 'F', 'F', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw LoadError(path.string() + ": truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const DDFFNet& model, const TrainingMetadata& metadata) {
  using nlohmann::json;
  const auto& spec = model.spec();
  json header;
  header["format"] = "ddff-checkpoint";
  header["spec"] = {{"schema_version", 1},
                    {"variant", to_string(spec.variant)},
                    {"stack_size", spec.stack_size},
                    {"input_channels", spec.input_channels},
                    {"width_multiplier", spec.width_multiplier},
                    {"dropout_p", spec.dropout_p}};
  header["normalization"] = {{"mean", model.normalization().mean}, {"stddev", model.normalization().stddev}};
  header["metadata"] = {{"epochs", metadata.epochs},
                        {"final_loss", metadata.final_loss},
                        {"seed", metadata.seed},
                        {"best_epoch", metadata.best_epoch},
                        {"input", metadata.input},
                        {"dflf_pattern", metadata.dflf_pattern}};
  json tensors = json::array();
  std::uint64_t offset = 0;
  std::vector<const std::vector<float>*> blobs;
  for (const auto* p : model.parameters()) {
    tensors.push_back({{"name", p->name}, {"kind", "parameter"}, {"shape", p->shape}, {"offset", offset}, {"count", p->size()}});
    offset += p->size();
    blobs.push_back(&p->value);
  }
  for (const auto* b : model.buffers()) {
    tensors.push_back({{"name", b->name},
                       {"kind", "buffer"},
                       {"shape", {b->value.size()}},
                       {"offset", offset},
                       {"count", b->value.size()}});
    offset += b->value.size();
    blobs.push_back(&b->value);
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw LoadError(path.string() + ": cannot open for writing");
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint64_t>(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto* v : blobs) os.write(reinterpret_cast<const char*>(v->data()), static_cast<std::streamsize>(v->size() * 4));
  if (!os) throw LoadError(path.string() + ": write failed");
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(path.string() + ": cannot open checkpoint");
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw LoadError(path.string() + ": not a DDFF checkpoint");
  const auto version = get<std::uint32_t>(is, path);
  if (version != kCheckpointVersion)
    throw LoadError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  const auto len = get<std::uint64_t>(is, path);
  std::string text(len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw LoadError(path.string() + ": truncated header");

  TrainedModel out;
  try {
    const json header = json::parse(text);
    const json& s = header.at("spec");
    if (s.at("schema_version").get<int>() != 1) throw LoadError(path.string() + ": unsupported spec schema");
    NetworkSpec spec;
    spec.variant = parse_variant(s.at("variant").get<std::string>());
    spec.stack_size = s.at("stack_size").get<int>();
    spec.input_channels = s.at("input_channels").get<int>();
    spec.width_multiplier = s.at("width_multiplier").get<double>();
    spec.dropout_p = s.at("dropout_p").get<double>();
    out.model = std::make_unique<DDFFNet>(spec);
    out.model->normalization().mean = header.at("normalization").at("mean").get<std::vector<float>>();
    out.model->normalization().stddev = header.at("normalization").at("stddev").get<std::vector<float>>();
    const json& m = header.at("metadata");
    out.metadata.epochs = m.at("epochs").get<int>();
    out.metadata.final_loss = m.at("final_loss").get<double>();
    out.metadata.seed = m.at("seed").get<std::uint64_t>();
    out.metadata.best_epoch = m.at("best_epoch").get<int>();
    out.metadata.input = m.value("input", std::string("focal_stack"));
    if (m.contains("dflf_pattern")) out.metadata.dflf_pattern = m.at("dflf_pattern").get<std::vector<std::pair<int, int>>>();

    std::map<std::string, std::vector<float>*> targets;
    for (auto* p : out.model->parameters()) targets[p->name] = &p->value;
    for (auto* b : out.model->buffers()) targets[b->name] = &b->value;

    const auto data_start = is.tellg();
    std::size_t filled = 0;
    for (const json& t : header.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const auto it = targets.find(name);
      if (it == targets.end()) throw LoadError(path.string() + ": unexpected tensor '" + name + "'");
      const auto count = t.at("count").get<std::uint64_t>();
      if (count != it->second->size())
        throw LoadError(path.string() + ": tensor '" + name + "' has " + std::to_string(count) + " values, expected " +
                        std::to_string(it->second->size()));
      is.seekg(data_start + static_cast<std::streamoff>(t.at("offset").get<std::uint64_t>() * 4));
      if (!is.read(reinterpret_cast<char*>(it->second->data()), static_cast<std::streamsize>(count * 4)))
        throw LoadError(path.string() + ": truncated tensor data for '" + name + "'");
      ++filled;
    }
    if (filled != targets.size()) throw LoadError(path.string() + ": checkpoint is missing tensors");
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": malformed checkpoint header: " + e.what());
  }
  return out;
}

}  // namespace ddff::nn
