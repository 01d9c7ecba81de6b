#include "bip/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace bip {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian");

namespace {
constexpr char kMagic[8] = {'B', 'I', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr uint32_t kFormatVersion = 1;
}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  nlohmann::json h = header;
  h["format_version"] = kFormatVersion;
  const std::string hs = h.dump();
  const uint64_t hlen = hs.size();
  const uint64_t count = static_cast<uint64_t>(params.size());
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kFormatVersion), 4);
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(hs.data(), static_cast<std::streamsize>(hlen));
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw CheckpointError("short write: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError("not a checkpoint file: " + path);
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != kFormatVersion)
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(version));
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 8);
  Checkpoint ck;
  ck.header = nlohmann::json::parse(hs, nullptr, false);
  if (ck.header.is_discarded())
    throw CheckpointError("corrupt checkpoint header: " + path);
  ck.params.resize(static_cast<Eigen::Index>(count));
  in.read(reinterpret_cast<char*>(ck.params.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw CheckpointError("truncated checkpoint payload: " + path);
  return ck;
}

}  // namespace bip
