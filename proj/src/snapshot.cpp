#include "ve2d/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ve2d/error.hpp"

namespace ve2d {

namespace {

template <class T>
void put(std::vector<std::uint8_t>& out, std::size_t& pos, T value) {
  std::uint8_t* raw = out.data() + pos;
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  pos += sizeof(T);
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error("snapshot is truncated");
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const PotentialState& s) {
  const Grid& g = s.grid();
  std::vector<std::uint8_t> out(4 + 8 + 24 + 3 * 8 * g.size());
  std::memcpy(out.data(), "VE2D", 4);
  std::size_t pos = 4;
  put<std::uint32_t>(out, pos, kSnapshotVersion);
  put<std::uint32_t>(out, pos, static_cast<std::uint32_t>(g.n()));
  put<double>(out, pos, g.box_len());
  put<double>(out, pos, s.t);
  put<double>(out, pos, s.mu);
  for (const ScalarField* f : {&s.V, &s.H[0], &s.H[1]}) {
    for (double v : f->values()) put<double>(out, pos, v);
  }
  return out;
}

PotentialState decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "VE2D", 4) != 0) {
    throw Error("not a VE2D snapshot (bad magic)");
  }
  Reader in(bytes);
  in.get<std::uint32_t>();  // magic
  const auto version = in.get<std::uint32_t>();
  if (version != kSnapshotVersion) throw Error("unsupported snapshot version");
  const auto n = static_cast<int>(in.get<std::uint32_t>());
  const double box_len = in.get<double>();
  const double t = in.get<double>();
  const double mu = in.get<double>();
  const Grid g(n, box_len);
  ScalarField fields[3] = {ScalarField(g), ScalarField(g), ScalarField(g)};
  for (auto& f : fields) {
    for (double& v : f.values()) v = in.get<double>();
  }
  if (!in.exhausted()) throw Error("snapshot has trailing bytes");
  return PotentialState{fields[0], VectorField2(fields[1], fields[2]), t, mu};
}

void write_snapshot(const std::filesystem::path& path, const PotentialState& s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

PotentialState read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace ve2d
