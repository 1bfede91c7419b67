#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lfepi/light_field.hpp"
#include "lfepi/netpbm.hpp"

namespace lfepi {

namespace detail {

inline std::string view_filename(int t, int s, int channels) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "view_%02d_%02d.%s", t, s, channels == 3 ? "ppm" : "pgm");
  return buf;
}

}  // namespace detail

/// Directory format: manifest.json {T,S,H,W,C,bitdepth,channel_space} plus
/// one P6/P5 view per (t,s). 16-bit views round-trip bit-exactly.
inline void save_lightfield(const LightField4D& lf, const std::filesystem::path& dir,
                            int bitdepth = 16) {
  if (bitdepth != 8 && bitdepth != 16)
    throw std::invalid_argument("save_lightfield: bitdepth must be 8 or 16");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  nlohmann::json manifest = {
      {"T", lf.T},          {"S", lf.S},
      {"H", lf.H},          {"W", lf.W},
      {"C", lf.C},          {"bitdepth", bitdepth},
      {"channel_space", to_string(lf.space)},
  };
  {
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw std::runtime_error("save_lightfield: cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
  }
  const int maxval = bitdepth == 16 ? 65535 : 255;
  std::vector<double> plane(static_cast<size_t>(lf.H) * lf.W * lf.C);
  for (int t = 0; t < lf.T; ++t) {
    for (int s = 0; s < lf.S; ++s) {
      size_t i = 0;
      for (int y = 0; y < lf.H; ++y)
        for (int x = 0; x < lf.W; ++x)
          for (int c = 0; c < lf.C; ++c) plane[i++] = lf.at(t, s, y, x, c);
      write_pnm(dir / detail::view_filename(t, s, lf.C), lf.H, lf.W, lf.C, maxval, plane);
    }
  }
}

inline LightField4D load_lightfield(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("load_lightfield: missing manifest " + manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    throw std::runtime_error("load_lightfield: malformed manifest: " + std::string(e.what()));
  }
  auto req_int = [&](const char* key) -> int {
    if (!manifest.contains(key) || !manifest[key].is_number_integer())
      throw std::runtime_error(std::string("load_lightfield: manifest field '") + key +
                               "' missing or not an integer");
    return manifest[key].get<int>();
  };
  const int T = req_int("T"), S = req_int("S"), H = req_int("H"), W = req_int("W"),
            C = req_int("C");
  const int bitdepth = req_int("bitdepth");
  if (bitdepth != 8 && bitdepth != 16)
    throw std::runtime_error("load_lightfield: manifest field 'bitdepth' must be 8 or 16");
  if (!manifest.contains("channel_space") || !manifest["channel_space"].is_string())
    throw std::runtime_error("load_lightfield: manifest field 'channel_space' missing");
  const ChannelSpace space = channel_space_from_string(manifest["channel_space"].get<std::string>());
  if (T < 1 || S < 1 || H < 1 || W < 1 || (C != 1 && C != 3))
    throw std::runtime_error("load_lightfield: manifest dimensions invalid");

  LightField4D lf(T, S, H, W, C, space);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const auto vp = dir / detail::view_filename(t, s, C);
      if (!std::filesystem::exists(vp))
        throw std::runtime_error("load_lightfield: missing view (" + std::to_string(t) + "," +
                                 std::to_string(s) + "): " + vp.string());
      const PnmImage img = read_pnm(vp);
      if (img.height != H || img.width != W || img.channels != C)
        throw std::runtime_error("load_lightfield: dimension mismatch at view (" +
                                 std::to_string(t) + "," + std::to_string(s) + ")");
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
          for (int c = 0; c < C; ++c) lf.at(t, s, y, x, c) = img.at(y, x, c);
    }
  }
  return lf;
}

}  // namespace lfepi
