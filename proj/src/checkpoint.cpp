#include "cbf/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "cbf/errors.hpp"
#include "cbf/grid.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint layout assumes a little-endian host");

namespace cbf {

namespace {

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void update(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  }
};

class Writer {
 public:
  explicit Writer(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw CheckpointError("cannot open '" + path + "' for writing");
  }
  void raw(const void* data, size_t len) {
    out_.write(static_cast<const char*>(data), len);
    sum_.update(data, len);
  }
  template <typename T>
  void put(T v) {
    raw(&v, sizeof v);
  }
  void finish() {
    std::uint64_t h = sum_.h;
    out_.write(reinterpret_cast<const char*>(&h), sizeof h);
    out_.flush();
    if (!out_) throw CheckpointError("write failed on '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ofstream out_;
  Fnv1a sum_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open '" + path + "'");
    buf_.assign(std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>());
    if (buf_.size() < sizeof(kCheckpointMagic) + sizeof(std::uint64_t))
      throw CheckpointError("'" + path + "' is truncated");
    std::uint64_t stored;
    std::memcpy(&stored, buf_.data() + buf_.size() - sizeof stored,
                sizeof stored);
    Fnv1a sum;
    sum.update(buf_.data(), buf_.size() - sizeof stored);
    if (sum.h != stored)
      throw CheckpointError("'" + path + "' failed checksum validation");
    end_ = buf_.size() - sizeof stored;
  }
  void raw(void* data, size_t len) {
    if (pos_ + len > end_)
      throw CheckpointError("'" + path_ + "' is truncated");
    std::memcpy(data, buf_.data() + pos_, len);
    pos_ += len;
  }
  template <typename T>
  T get() {
    T v;
    raw(&v, sizeof v);
    return v;
  }
  bool exhausted() const { return pos_ == end_; }

 private:
  std::string path_;
  std::vector<char> buf_;
  size_t pos_ = 0, end_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const FlowState& state) {
  const MetricField& g = state.g;
  const GridPtr& grid = g.grid();
  if (!grid) throw CheckpointError("cannot checkpoint an empty state");
  const int n = g.dim();
  const std::int64_t np = grid->npoints();

  Writer w(path);
  w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(n));
  for (int a = 0; a < n; ++a)
    w.put<std::uint64_t>(static_cast<std::uint64_t>(grid->sizes()[a]));
  for (int a = 0; a < n; ++a) w.put<double>(grid->periods()[a]);
  w.put<double>(state.s0);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(state.variant));
  w.put<double>(state.t);
  w.put<std::int64_t>(state.step);

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      w.raw(g.g().at(i, j), sizeof(double) * np);

  if (state.p.nvalues() == np) {
    w.raw(state.p.comp(0), sizeof(double) * np);
  } else {
    std::vector<double> zeros(static_cast<size_t>(np), 0.0);
    w.raw(zeros.data(), sizeof(double) * np);
  }
  w.finish();
}

FlowState load_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[sizeof kCheckpointMagic];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw CheckpointError("'" + path + "' is not a checkpoint file");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw CheckpointError("'" + path + "' has unsupported version " +
                          std::to_string(version));
  const int n = static_cast<int>(r.get<std::uint32_t>());
  if (n < 2 || n > 8)
    throw CheckpointError("'" + path + "' has implausible dimension " +
                          std::to_string(n));
  std::vector<std::int64_t> sizes(n);
  for (int a = 0; a < n; ++a)
    sizes[a] = static_cast<std::int64_t>(r.get<std::uint64_t>());
  std::vector<double> periods(n);
  for (int a = 0; a < n; ++a) periods[a] = r.get<double>();

  FlowState st;
  st.s0 = r.get<double>();
  const auto tag = r.get<std::uint32_t>();
  if (tag > static_cast<std::uint32_t>(FlowVariant::bh_bach))
    throw CheckpointError("'" + path + "' has unknown flow variant tag " +
                          std::to_string(tag));
  st.variant = static_cast<FlowVariant>(tag);
  st.t = r.get<double>();
  st.step = r.get<std::int64_t>();

  GridPtr grid = Grid::create(std::move(sizes), std::move(periods));
  const std::int64_t np = grid->npoints();
  TensorField comps = TensorField::zeros(grid, 2, Sym::sym_pair);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      r.raw(comps.at(i, j), sizeof(double) * np);
  comps.fill_from_canonical();
  st.g = MetricField::from_components(std::move(comps));

  TensorField p = TensorField::zeros(grid, 0);
  r.raw(p.comp(0), sizeof(double) * np);
  bool all_zero = true;
  const double* pd = p.comp(0);
  for (std::int64_t q = 0; q < np && all_zero; ++q) all_zero = pd[q] == 0.0;
  if (!all_zero) st.p = std::move(p);

  if (!r.exhausted())
    throw CheckpointError("'" + path + "' has trailing bytes");
  return st;
}

}  // namespace cbf
