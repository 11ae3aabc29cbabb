#ifndef DEADLEAVES_GENERATOR_HPP
#define DEADLEAVES_GENERATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "deadleaves/likelihood.hpp"
#include "deadleaves/rng.hpp"
#include "deadleaves/specfun.hpp"

namespace deadleaves {

struct Leaf {
  Point2 center;
  double radius = 0.0;
};

// Dead-leaves scene on an s x s integer pixel grid. labels[y*side + x] is the
// 1-based index of the leaf visible at pixel (x, y), y = 0 at the bottom.
// Leaves are depth-ordered, 1 = topmost; draws that claimed no pixel are
// discarded without consuming an index.
struct Scene {
  int side = 0;
  RadiusLaw law;
  std::uint64_t seed = 0;
  std::vector<Leaf> leaves;
  std::vector<int> labels;

  int label(int x, int y) const { return labels[static_cast<std::size_t>(y) * side + x]; }
};

inline void validate_scene(const Scene& scene) {
  if (scene.side < 1) throw std::invalid_argument("scene: side must be >= 1");
  if (scene.labels.size() != static_cast<std::size_t>(scene.side) * scene.side)
    throw std::invalid_argument("scene: label grid size mismatch");
  const int n = static_cast<int>(scene.leaves.size());
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int lab : scene.labels) {
    if (lab < 1 || lab > n) throw std::invalid_argument("scene: label out of range");
    used[static_cast<std::size_t>(lab - 1)] = true;
  }
  for (bool u : used)
    if (!u) throw std::invalid_argument("scene: gap in leaf labels");
  for (const Leaf& leaf : scene.leaves)
    if (leaf.radius < scene.law.r_min - kGeomEps || leaf.radius > scene.law.r_max + kGeomEps)
      throw std::invalid_argument("scene: leaf radius outside the law support");
  // occlusion consistency: pixel i inside disk i, outside all disks above it
  for (int y = 0; y < scene.side; ++y)
    for (int x = 0; x < scene.side; ++x) {
      const int lab = scene.label(x, y);
      const Point2 p{static_cast<double>(x), static_cast<double>(y)};
      for (int k = 0; k < lab; ++k) {
        const Leaf& leaf = scene.leaves[static_cast<std::size_t>(k)];
        const bool inside = dist(p, leaf.center) <= leaf.radius;
        if (k == lab - 1 ? !inside : inside)
          throw std::invalid_argument("scene: membership violates occlusion");
      }
    }
}

// Iterative leaf sampling until the grid is covered. Geometry uses its own rng
// stream so recoloring a scene never changes the membership.
inline Scene generate_scene(int side, const RadiusLaw& law, std::uint64_t seed) {
  validate_law(law);
  if (side < 1) throw std::invalid_argument("generate_scene: side must be >= 1");
  Scene scene;
  scene.side = side;
  scene.law = law;
  scene.law.s = static_cast<double>(side);
  scene.seed = seed;
  scene.labels.assign(static_cast<std::size_t>(side) * side, 0);

  Rng geom(derive_stream(seed, 0));
  const double lo = -law.r_max, hi = side + law.r_max;
  long uncovered = static_cast<long>(side) * side;
  constexpr long kMaxDraws = 10'000'000;
  long draws = 0;
  while (uncovered > 0) {
    if (++draws > kMaxDraws)
      throw std::runtime_error("generate_scene: coverage not reached within draw cap");
    const double r = power_law_sample(scene.law, geom);
    const Point2 c{geom.uniform(lo, hi), geom.uniform(lo, hi)};
    const int x0 = std::max(0, static_cast<int>(std::ceil(c.x - r)));
    const int x1 = std::min(side - 1, static_cast<int>(std::floor(c.x + r)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - r)));
    const int y1 = std::min(side - 1, static_cast<int>(std::floor(c.y + r)));
    const double r2 = r * r;
    bool claimed = false;
    const int next = static_cast<int>(scene.leaves.size()) + 1;
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        std::size_t at = static_cast<std::size_t>(y) * side + x;
        if (scene.labels[at] != 0) continue;
        const double dx = x - c.x, dy = y - c.y;
        if (dx * dx + dy * dy <= r2) {
          scene.labels[at] = next;
          claimed = true;
          --uncovered;
        }
      }
    if (claimed) scene.leaves.push_back({c, r});
  }
  return scene;
}

struct Image {
  int side = 0;
  int channels = 3;
  std::vector<double> values;  // [(y*side + x)*channels + c], all in [0,1]

  double at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * side + x) * channels + c];
  }
};

// Per-leaf base colors are drawn once from the color stream, per-pixel texture
// from the texture stream, and the sum is capped to [0,1].
inline Image render_image(const Scene& scene, const ColorTextureModel& model,
                          std::uint64_t seed) {
  validate_model(model);
  Image img;
  img.side = scene.side;
  img.channels = model.channels;
  img.values.assign(static_cast<std::size_t>(scene.side) * scene.side * model.channels, 0.0);

  Rng colors(derive_stream(seed, 1));
  Rng texture(derive_stream(seed, 2));

  const std::size_t n_leaves = scene.leaves.size();
  std::vector<double> base(n_leaves * static_cast<std::size_t>(model.channels));
  for (std::size_t i = 0; i < n_leaves; ++i)
    for (int c = 0; c < model.channels; ++c) {
      double v;
      if (const auto* u = std::get_if<UniformDiscreteModel>(&model.variant)) {
        v = static_cast<double>(colors.uniform_int(0, u->color_levels - 1)) * u->step();
      } else {
        const auto& g = std::get<GaussianModel>(model.variant);
        v = g.mu_c[static_cast<std::size_t>(c)] +
            g.sigma_c[static_cast<std::size_t>(c)] * colors.gaussian();
      }
      base[i * model.channels + c] = v;
    }

  for (int y = 0; y < scene.side; ++y)
    for (int x = 0; x < scene.side; ++x) {
      const std::size_t leaf = static_cast<std::size_t>(scene.label(x, y)) - 1;
      for (int c = 0; c < model.channels; ++c) {
        double t;
        if (const auto* u = std::get_if<UniformDiscreteModel>(&model.variant)) {
          t = static_cast<double>(texture.uniform_int(-u->texture_halfwidth,
                                                      u->texture_halfwidth)) *
              u->step();
        } else {
          const auto& g = std::get<GaussianModel>(model.variant);
          t = g.sigma_t[static_cast<std::size_t>(c)] * texture.gaussian();
        }
        const double v = base[leaf * model.channels + c] + t;
        img.values[(static_cast<std::size_t>(y) * scene.side + x) * model.channels + c] =
            std::clamp(v, 0.0, 1.0);
      }
    }
  return img;
}

// ---- file formats ----------------------------------------------------------

inline void write_scene(const Scene& scene, const std::string& path) {
  nlohmann::json j;
  j["side"] = scene.side;
  j["law"] = {{"r_min", scene.law.r_min}, {"r_max", scene.law.r_max}, {"s", scene.law.s}};
  j["seed"] = scene.seed;
  auto& leaves = j["leaves"] = nlohmann::json::array();
  for (const Leaf& leaf : scene.leaves)
    leaves.push_back({{"x", leaf.center.x}, {"y", leaf.center.y}, {"r", leaf.radius}});
  j["labels"] = scene.labels;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_scene: cannot open " + path);
  out << j.dump() << "\n";
}

inline Scene read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_scene: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("read_scene: parse error at byte " + std::to_string(e.byte) + ": " +
                             e.what());
  }
  Scene scene;
  scene.side = j.at("side").get<int>();
  scene.law.r_min = j.at("law").at("r_min").get<double>();
  scene.law.r_max = j.at("law").at("r_max").get<double>();
  scene.law.s = j.at("law").at("s").get<double>();
  scene.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& l : j.at("leaves"))
    scene.leaves.push_back(
        {Point2{l.at("x").get<double>(), l.at("y").get<double>()}, l.at("r").get<double>()});
  scene.labels = j.at("labels").get<std::vector<int>>();
  validate_scene(scene);
  return scene;
}

// PFM, binary float32, little-endian, bottom-to-top rows ("PF" color / "Pf"
// gray); round-trips [0,1] values at float precision.
inline void write_image_pfm(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("write_image_pfm: channels must be 1 or 3");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_image_pfm: cannot open " + path);
  out << (img.channels == 3 ? "PF" : "Pf") << "\n"
      << img.side << " " << img.side << "\n"
      << "-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(img.side) * img.channels);
  for (int y = 0; y < img.side; ++y) {  // PFM stores bottom row first, as we do
    for (int x = 0; x < img.side; ++x)
      for (int c = 0; c < img.channels; ++c)
        row[static_cast<std::size_t>(x) * img.channels + c] =
            static_cast<float>(img.at(x, y, c));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

inline Image read_image_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_image_pfm: cannot open " + path);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if ((magic != "PF" && magic != "Pf") || w < 1 || h < 1)
    throw std::runtime_error("read_image_pfm: malformed header in " + path);
  if (w != h) throw std::runtime_error("read_image_pfm: only square images supported");
  if (scale > 0.0) throw std::runtime_error("read_image_pfm: big-endian files not supported");
  in.get();  // single whitespace after the scale line
  Image img;
  img.side = w;
  img.channels = magic == "PF" ? 3 : 1;
  img.values.resize(static_cast<std::size_t>(w) * h * img.channels);
  std::vector<float> row(static_cast<std::size_t>(w) * img.channels);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw std::runtime_error("read_image_pfm: truncated pixel data");
    for (std::size_t k = 0; k < row.size(); ++k)
      img.values[static_cast<std::size_t>(y) * row.size() + k] = static_cast<double>(row[k]);
  }
  return img;
}

// 16-bit PPM/PGM preview (big-endian samples per the netpbm spec), top row
// first; lossy quantized export for viewers.
inline void write_image_quant16(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_image_quant16: cannot open " + path);
  out << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.side << " " << img.side << "\n65535\n";
  for (int y = img.side - 1; y >= 0; --y)
    for (int x = 0; x < img.side; ++x)
      for (int c = 0; c < img.channels; ++c) {
        const double v = std::clamp(img.at(x, y, c), 0.0, 1.0);
        const std::uint16_t q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        const unsigned char bytes[2] = {static_cast<unsigned char>(q >> 8),
                                        static_cast<unsigned char>(q & 0xff)};
        out.write(reinterpret_cast<const char*>(bytes), 2);
      }
}

}  // namespace deadleaves

#endif  // DEADLEAVES_GENERATOR_HPP
