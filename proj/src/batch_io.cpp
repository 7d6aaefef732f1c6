#include "erw/batch_io.hpp"

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace erw {

namespace {

constexpr char kMagic[4] = {'E', 'R', 'W', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated batch stream");
  return v;
}

void put_real(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_batch_csv(std::ostream& out, const WalkBatch& b) {
  out << "replicate,checkpoint";
  for (const char* name : {"S", "T", "C"})
    for (std::size_t k = 1; k <= b.d; ++k) out << ',' << name << '_' << k;
  if (b.has_W) out << ",W,N_A";
  out << '\n';
  for (std::uint64_t r = 0; r < b.replicates; ++r) {
    for (std::size_t j = 0; j < b.checkpoints.size(); ++j) {
      out << r << ',' << b.checkpoints[j];
      for (std::size_t k = 0; k < b.d; ++k) out << ',' << b.S[b.at(r, j, k)];
      for (std::size_t k = 0; k < b.d; ++k) {
        out << ',';
        put_real(out, b.T[b.at(r, j, k)]);
      }
      for (std::size_t k = 0; k < b.d; ++k) {
        out << ',';
        put_real(out, b.C[b.at(r, j, k)]);
      }
      if (b.has_W)
        out << ',' << b.W[b.at_scalar(r, j)] << ',' << b.NA[b.at_scalar(r, j)];
      out << '\n';
    }
  }
}

void write_batch_binary(std::ostream& out, const WalkBatch& b) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(b.d));
  put<std::uint64_t>(out, b.replicates);
  put<std::uint64_t>(out, b.checkpoints.size());
  put<std::uint8_t>(out, b.has_W ? 1 : 0);
  for (auto t : b.checkpoints) put<std::uint64_t>(out, t);
  for (std::uint64_t r = 0; r < b.replicates; ++r) {
    for (std::size_t j = 0; j < b.checkpoints.size(); ++j) {
      for (std::size_t k = 0; k < b.d; ++k) put<std::int64_t>(out, b.S[b.at(r, j, k)]);
      for (std::size_t k = 0; k < b.d; ++k) put<double>(out, b.T[b.at(r, j, k)]);
      for (std::size_t k = 0; k < b.d; ++k) put<double>(out, b.C[b.at(r, j, k)]);
      if (b.has_W) {
        put<std::int64_t>(out, b.W[b.at_scalar(r, j)]);
        put<std::int64_t>(out, b.NA[b.at_scalar(r, j)]);
      }
    }
  }
}

WalkBatch read_batch_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a walk batch (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported batch version " +
                             std::to_string(version));
  WalkBatch b;
  b.d = get<std::uint32_t>(in);
  b.replicates = get<std::uint64_t>(in);
  const auto K = get<std::uint64_t>(in);
  b.has_W = get<std::uint8_t>(in) != 0;
  b.checkpoints.resize(K);
  for (auto& t : b.checkpoints) t = get<std::uint64_t>(in);
  const std::size_t cells = b.replicates * K;
  b.S.resize(cells * b.d);
  b.T.resize(cells * b.d);
  b.C.resize(cells * b.d);
  if (b.has_W) {
    b.W.resize(cells);
    b.NA.resize(cells);
  }
  for (std::uint64_t r = 0; r < b.replicates; ++r) {
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t k = 0; k < b.d; ++k) b.S[b.at(r, j, k)] = get<std::int64_t>(in);
      for (std::size_t k = 0; k < b.d; ++k) b.T[b.at(r, j, k)] = get<double>(in);
      for (std::size_t k = 0; k < b.d; ++k) b.C[b.at(r, j, k)] = get<double>(in);
      if (b.has_W) {
        b.W[b.at_scalar(r, j)] = get<std::int64_t>(in);
        b.NA[b.at_scalar(r, j)] = get<std::int64_t>(in);
      }
    }
  }
  return b;
}

}  // namespace erw
