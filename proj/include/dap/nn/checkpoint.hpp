#pragma once

// Self-describing binary checkpoint container. Byte layout (little-endian
// throughout, documented in docs/checkpoint_format.md):
//
//   magic            8 bytes   "DAPCKPT\0"
//   format_version   u32       currently 1
//   arch_len         u32       architecture descriptor length
//   arch             bytes     UTF-8 JSON
//   rng_state        u64
//   step             u64       optimizer step count
//   n_params         u32
//   per param:  name_len u32, name bytes, rows u64, cols u64,
//               value f64[rows*cols], m f64[rows*cols], v f64[rows*cols]
//   n_buffers        u32
//   per buffer: name_len u32, name bytes, rows u64, cols u64,
//               value f64[rows*cols]
//
// Loading back yields bit-identical doubles.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dap/nn/layers.hpp"

namespace dap::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint layout assumes a little-endian host");

struct NamedBuffer {
  std::string name;
  Matrix2D* mat = nullptr;
};

namespace ckptdetail {

inline constexpr char kMagic[8] = {'D', 'A', 'P', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) fail(Errc::io, "checkpoint: truncated file");
  return v;
}

inline void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) fail(Errc::io, "checkpoint: truncated string");
  return s;
}

inline void put_matrix(std::ostream& out, const Matrix2D& m) {
  put<std::uint64_t>(out, m.rows());
  put<std::uint64_t>(out, m.cols());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

inline Matrix2D get_matrix(std::istream& in) {
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  Matrix2D m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) fail(Errc::io, "checkpoint: truncated matrix");
  return m;
}

}  // namespace ckptdetail

inline void save_checkpoint(std::ostream& out, const std::string& arch_json,
                            const std::vector<Param*>& params,
                            const std::vector<NamedBuffer>& buffers, std::uint64_t rng_state,
                            std::uint64_t step) {
  using namespace ckptdetail;
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put_string(out, arch_json);
  put<std::uint64_t>(out, rng_state);
  put<std::uint64_t>(out, step);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const Param* p : params) {
    put_string(out, p->name);
    put_matrix(out, p->value);
    // moments share the value's dimensions; written without repeating them
    out.write(reinterpret_cast<const char*>(p->m.data()),
              static_cast<std::streamsize>(p->m.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(p->v.data()),
              static_cast<std::streamsize>(p->v.size() * sizeof(double)));
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(buffers.size()));
  for (const auto& b : buffers) {
    put_string(out, b.name);
    put_matrix(out, *b.mat);
  }
  if (!out) fail(Errc::io, "checkpoint: write failed");
}

struct CheckpointHeader {
  std::uint32_t version = 0;
  std::string arch_json;
  std::uint64_t rng_state = 0;
  std::uint64_t step = 0;
};

inline CheckpointHeader read_checkpoint_header(std::istream& in) {
  using namespace ckptdetail;
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    fail(Errc::io, "checkpoint: bad magic");
  CheckpointHeader h;
  h.version = get<std::uint32_t>(in);
  if (h.version != kVersion)
    fail(Errc::io, "checkpoint: unsupported format version " + std::to_string(h.version));
  h.arch_json = get_string(in);
  h.rng_state = get<std::uint64_t>(in);
  h.step = get<std::uint64_t>(in);
  return h;
}

// Loads parameter blocks and buffers into an already-built model; names and
// shapes must match the file exactly.
inline CheckpointHeader load_checkpoint(std::istream& in, const std::vector<Param*>& params,
                                        const std::vector<NamedBuffer>& buffers) {
  using namespace ckptdetail;
  const CheckpointHeader header = read_checkpoint_header(in);
  const auto n_params = get<std::uint32_t>(in);
  if (n_params != params.size())
    fail(Errc::io, "checkpoint: expected " + std::to_string(params.size()) +
                       " parameter blocks, file has " + std::to_string(n_params));
  for (Param* p : params) {
    const std::string name = get_string(in);
    if (name != p->name)
      fail(Errc::io, "checkpoint: parameter block '" + name + "' does not match '" + p->name + "'");
    Matrix2D value = get_matrix(in);
    if (value.rows() != p->value.rows() || value.cols() != p->value.cols())
      fail(Errc::io, "checkpoint: shape mismatch for '" + name + "'");
    p->value = std::move(value);
    in.read(reinterpret_cast<char*>(p->m.data()),
            static_cast<std::streamsize>(p->m.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(p->v.data()),
            static_cast<std::streamsize>(p->v.size() * sizeof(double)));
    if (!in) fail(Errc::io, "checkpoint: truncated moments for '" + name + "'");
  }
  const auto n_buffers = get<std::uint32_t>(in);
  if (n_buffers != buffers.size())
    fail(Errc::io, "checkpoint: buffer count mismatch");
  for (const auto& b : buffers) {
    const std::string name = get_string(in);
    if (name != b.name)
      fail(Errc::io, "checkpoint: buffer '" + name + "' does not match '" + b.name + "'");
    Matrix2D value = get_matrix(in);
    if (value.rows() != b.mat->rows() || value.cols() != b.mat->cols())
      fail(Errc::io, "checkpoint: buffer shape mismatch for '" + name + "'");
    *b.mat = std::move(value);
  }
  return header;
}

}  // namespace dap::nn
