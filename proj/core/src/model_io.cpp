#include "lgplan/model_io.hpp"

#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "lgplan/errors.hpp"
#include "lgplan/io.hpp"
#include "lgplan/random.hpp"

namespace lgplan {

namespace {

constexpr char kMagic[8] = {'L', 'G', 'P', 'L', 'M', 'D', 'L', '\0'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t get_u(const std::string& in, size_t at, int bytes) {
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(in[at + static_cast<size_t>(i)])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string serialize_model(const MpnnModel& model) {
  const auto& c = model.config();
  nlohmann::ordered_json header;
  header["format"] = "lgplan-model";
  header["kind"] = std::string(to_string(c.kind));
  header["layers"] = c.layers;
  header["hidden"] = c.hidden;
  header["input_dim"] = c.input_dim();
  header["T"] = c.T;
  header["seed"] = c.seed;
  header["labels"] = label_names(c.kind);
  header["aggregator"] = std::string(to_string(c.aggregator));
  header["readout"] = std::string(to_string(c.readout));
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kModelFormatVersion);
  put_u32(out, static_cast<uint32_t>(text.size()));
  out += text;
  put_u64(out, model.num_parameters());
  for (double p : model.parameters()) put_u64(out, std::bit_cast<uint64_t>(p));
  put_u64(out, hash_bytes(out));
  return out;
}

MpnnModel deserialize_model(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatVersionMismatch("not an lgplan model file");
  }
  const auto version = static_cast<uint32_t>(get_u(bytes, 8, 4));
  if (version != kModelFormatVersion) {
    throw FormatVersionMismatch("model format version " + std::to_string(version) +
                                ", expected " + std::to_string(kModelFormatVersion));
  }
  const size_t header_len = get_u(bytes, 12, 4);
  size_t at = 16;
  if (bytes.size() < at + header_len + 8 + 8) throw ChecksumMismatch("model file is truncated");
  const size_t body_end = bytes.size() - 8;
  if (get_u(bytes, body_end, 8) != hash_bytes(std::string_view(bytes).substr(0, body_end))) {
    throw ChecksumMismatch("model file checksum mismatch (truncated or corrupted)");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(at, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatVersionMismatch(std::string("model header: ") + e.what());
  }
  at += header_len;
  MpnnConfig c;
  try {
    c.kind = parse_graph_kind(header.at("kind").get<std::string>());
    c.layers = header.at("layers").get<int>();
    c.hidden = header.at("hidden").get<int>();
    c.T = header.at("T").get<int>();
    c.seed = header.at("seed").get<uint64_t>();
    c.aggregator = parse_aggregator(header.at("aggregator").get<std::string>());
    c.readout = parse_readout(header.at("readout").get<std::string>());
    if (header.at("labels").get<std::vector<std::string>>() != label_names(c.kind)) {
      throw FormatVersionMismatch("model label set does not match graph kind");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatVersionMismatch(std::string("model header: ") + e.what());
  }

  MpnnModel model(c);
  const uint64_t count = get_u(bytes, at, 8);
  at += 8;
  if (count != model.num_parameters() || at + 8 * count != body_end) {
    throw ChecksumMismatch("model parameter block does not match its header");
  }
  auto params = model.parameters();
  for (size_t i = 0; i < count; ++i, at += 8) params[i] = std::bit_cast<double>(get_u(bytes, at, 8));
  return model;
}

void save_model(const MpnnModel& model, const std::filesystem::path& path) {
  write_text_file(path, serialize_model(model));
}

MpnnModel load_model(const std::filesystem::path& path) {
  return deserialize_model(read_text_file(path));
}

}  // namespace lgplan
