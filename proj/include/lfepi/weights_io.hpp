#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "lfepi/cnn.hpp"

namespace lfepi {

namespace detail {

constexpr char kWeightsMagic[7] = {'E', 'P', 'I', 'C', 'N', 'N', '\x01'};
constexpr std::uint32_t kWeightsVersion = 1;

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw std::runtime_error("weights: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f32_block(std::ostream& out, const std::vector<double>& v) {
  std::vector<unsigned char> buf(v.size() * 4);
  for (size_t i = 0; i < v.size(); ++i) {
    const float f = static_cast<float>(v[i]);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    buf[4 * i] = static_cast<unsigned char>(u & 0xFF);
    buf[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xFF);
    buf[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xFF);
    buf[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

inline void get_f32_block(std::istream& in, std::vector<double>& v) {
  std::vector<unsigned char> buf(v.size() * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<size_t>(in.gcount()) != buf.size())
    throw std::runtime_error("weights: truncated file");
  for (size_t i = 0; i < v.size(); ++i) {
    const std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i]) |
                            (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                            (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                            (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    v[i] = static_cast<double>(f);
  }
}

}  // namespace detail

/// Versioned binary weights: magic "EPICNN\x01", little-endian u32
/// {version, n_layers}, then per layer {out,in,kh,kw} u32 followed by
/// weights and biases as little-endian f32 in (out,in,kh,kw) order.
inline void save_weights(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("weights: cannot write " + path.string());
  out.write(detail::kWeightsMagic, sizeof(detail::kWeightsMagic));
  detail::put_u32(out, detail::kWeightsVersion);
  detail::put_u32(out, 3);
  for (const ConvLayer* L : {&net.l1, &net.l2, &net.l3}) {
    detail::put_u32(out, static_cast<std::uint32_t>(L->out_ch));
    detail::put_u32(out, static_cast<std::uint32_t>(L->in_ch));
    detail::put_u32(out, static_cast<std::uint32_t>(L->kh));
    detail::put_u32(out, static_cast<std::uint32_t>(L->kw));
    detail::put_f32_block(out, L->w);
    detail::put_f32_block(out, L->b);
  }
  if (!out) throw std::runtime_error("weights: write failed for " + path.string());
}

inline Network load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("weights: cannot open " + path.string());
  char magic[sizeof(detail::kWeightsMagic)];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) ||
      std::memcmp(magic, detail::kWeightsMagic, sizeof(magic)) != 0)
    throw std::runtime_error("weights: bad magic in " + path.string());
  const std::uint32_t version = detail::get_u32(in);
  if (version != detail::kWeightsVersion)
    throw std::runtime_error("weights: unsupported version " + std::to_string(version));
  const std::uint32_t n_layers = detail::get_u32(in);
  if (n_layers != 3) throw std::runtime_error("weights: expected 3 layers");
  ConvLayer layers[3];
  for (int i = 0; i < 3; ++i) {
    const int oc = static_cast<int>(detail::get_u32(in));
    const int ic = static_cast<int>(detail::get_u32(in));
    const int kh = static_cast<int>(detail::get_u32(in));
    const int kw = static_cast<int>(detail::get_u32(in));
    if (oc < 1 || ic < 1 || kh < 1 || kw < 1 || oc > 4096 || ic > 4096 || kh > 99 || kw > 99)
      throw std::runtime_error("weights: implausible layer shape");
    layers[i] = ConvLayer(oc, ic, kh, kw);
    detail::get_f32_block(in, layers[i].w);
    detail::get_f32_block(in, layers[i].b);
  }
  if (layers[0].in_ch != 1 || layers[2].out_ch != 1 ||
      layers[1].in_ch != layers[0].out_ch || layers[2].in_ch != layers[1].out_ch)
    throw std::runtime_error("weights: inconsistent layer chain");
  Network net(layers[0].out_ch, layers[1].out_ch);
  net.l1 = layers[0];
  net.l2 = layers[1];
  net.l3 = layers[2];
  return net;
}

}  // namespace lfepi
