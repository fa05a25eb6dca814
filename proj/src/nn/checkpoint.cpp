#include "sarv/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sarv/hash.hpp"

namespace sarv::nn {
namespace {

constexpr char kMagic[8] = {'S', 'A', 'R', 'V', 'C', 'K', 'P', 'T'};

template <typename U>
void put_le(std::string& out, U v) {
  static_assert(std::is_unsigned_v<U>);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }

  std::string take(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::string precision_name(Precision p) { return p == Precision::single ? "single" : "double"; }

std::string describe(const std::vector<std::pair<std::string, Shape>>& items) {
  std::string s;
  for (const auto& [name, shape] : items) s += "  " + name + " " + shape_to_string(shape) + "\n";
  return s;
}

}  // namespace

std::filesystem::path manifest_path_for(const std::filesystem::path& bin) {
  auto p = bin;
  p.replace_extension(".manifest.json");
  return p;
}

template <typename T>
Checkpoint snapshot(const ParameterList<T>& params, nlohmann::json metadata) {
  Checkpoint c;
  c.precision = std::is_same_v<T, float> ? Precision::single : Precision::double_;
  c.metadata = std::move(metadata);
  for (const auto* p : params) {
    c.tensors.push_back({p->name, p->value.shape(), {p->value.values().begin(), p->value.values().end()}});
  }
  return c;
}

template <typename T>
void restore(const Checkpoint& ckpt, const ParameterList<T>& params) {
  bool ok = ckpt.tensors.size() == params.size();
  for (std::size_t i = 0; ok && i < params.size(); ++i) {
    ok = ckpt.tensors[i].name == params[i]->name && ckpt.tensors[i].shape == params[i]->value.shape();
  }
  if (!ok) {
    std::vector<std::pair<std::string, Shape>> expected;
    std::vector<std::pair<std::string, Shape>> found;
    for (const auto* p : params) expected.emplace_back(p->name, p->value.shape());
    for (const auto& t : ckpt.tensors) found.emplace_back(t.name, t.shape);
    throw CheckpointMismatch("checkpoint does not match the model\nexpected:\n" + describe(expected) + "found:\n" +
                             describe(found));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto dst = params[i]->value.values();
    const auto& src = ckpt.tensors[i].values;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = static_cast<T>(src[k]);
  }
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, sizeof(kMagic));
  const std::uint32_t value_bytes = ckpt.precision == Precision::single ? 4 : 8;
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, value_bytes);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put_le<std::uint64_t>(out, d);
    if (t.values.size() != shape_size(t.shape)) throw DimensionError("checkpoint tensor " + t.name + " size mismatch");
    for (double v : t.values) {
      if (value_bytes == 4) {
        put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      } else {
        put_le(out, std::bit_cast<std::uint64_t>(v));
      }
    }
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) throw DataError("not a checkpoint (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto value_bytes = r.get<std::uint32_t>();
  if (value_bytes != 4 && value_bytes != 8) throw DataError("bad checkpoint value width");
  Checkpoint c;
  c.precision = value_bytes == 4 ? Precision::single : Precision::double_;
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.take(r.get<std::uint32_t>());
    const auto rank = r.get<std::uint32_t>();
    for (std::uint32_t k = 0; k < rank; ++k) t.shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
    const std::size_t n = shape_size(t.shape);
    t.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      t.values[k] = value_bytes == 4 ? static_cast<double>(std::bit_cast<float>(r.get<std::uint32_t>()))
                                     : std::bit_cast<double>(r.get<std::uint64_t>());
    }
    c.tensors.push_back(std::move(t));
  }
  if (!r.done()) throw DataError("trailing bytes after checkpoint payload");
  return c;
}

std::string save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& bin) {
  const std::string bytes = encode_checkpoint(ckpt);
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + bin.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing checkpoint " + bin.string());
  }
  const std::string digest = sha256_hex(bytes);
  nlohmann::ordered_json m;
  m["format"] = "sarv-checkpoint";
  m["version"] = kCheckpointVersion;
  m["precision"] = precision_name(ckpt.precision);
  m["binary"] = bin.filename().string();
  m["content_sha256"] = digest;
  m["parameters"] = nlohmann::ordered_json::array();
  for (const auto& t : ckpt.tensors) m["parameters"].push_back({{"name", t.name}, {"shape", t.shape}});
  m["metadata"] = ckpt.metadata;
  std::ofstream man(manifest_path_for(bin));
  if (!man) throw DataError("cannot write checkpoint manifest for " + bin.string());
  man << m.dump(2) << '\n';
  return digest;
}

Checkpoint load_checkpoint(const std::filesystem::path& bin) {
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + bin.string());
  std::ostringstream os;
  os << in.rdbuf();
  const std::string bytes = os.str();

  std::ifstream man_in(manifest_path_for(bin));
  if (!man_in) throw DataError("missing checkpoint manifest " + manifest_path_for(bin).string());
  const auto manifest = nlohmann::json::parse(man_in, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("content_sha256")) {
    throw DataError("corrupt checkpoint manifest " + manifest_path_for(bin).string());
  }
  const std::string digest = sha256_hex(bytes);
  if (manifest["content_sha256"].get<std::string>() != digest) {
    throw DataError("checkpoint hash mismatch for " + bin.string() + ": manifest " +
                    manifest["content_sha256"].get<std::string>() + ", file " + digest);
  }
  Checkpoint c = decode_checkpoint(bytes);
  if (manifest.contains("metadata")) c.metadata = manifest["metadata"];
  return c;
}

template Checkpoint snapshot(const ParameterList<float>&, nlohmann::json);
template Checkpoint snapshot(const ParameterList<double>&, nlohmann::json);
template void restore(const Checkpoint&, const ParameterList<float>&);
template void restore(const Checkpoint&, const ParameterList<double>&);

}  // namespace sarv::nn
