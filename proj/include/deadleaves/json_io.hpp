#ifndef DEADLEAVES_JSON_IO_HPP
#define DEADLEAVES_JSON_IO_HPP

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "deadleaves/generator.hpp"
#include "deadleaves/likelihood.hpp"
#include "deadleaves/oracle.hpp"
#include "deadleaves/partitions.hpp"

namespace deadleaves {

using nlohmann::json;

// coordinates are integers on the wire whenever they are integral
inline json coord_to_json(double v) {
  const double r = std::round(v);
  if (r == v && std::abs(v) < 1e15) return json(static_cast<long long>(r));
  return json(v);
}

inline json point_to_json(const Point2& p) {
  return json::array({coord_to_json(p.x), coord_to_json(p.y)});
}

// partition wire format: array of blocks, each block an array of [x, y]
// pairs, blocks in canonical order
inline json partition_to_json(const Partition& m, const PixelSet& a) {
  json blocks = json::array();
  for (SubsetMask b : canonicalize(m).blocks) {
    json blk = json::array();
    for (int k = 0; k < a.size(); ++k)
      if (b >> k & 1u) blk.push_back(point_to_json(a[k]));
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

inline int pixel_index(const PixelSet& a, double x, double y) {
  for (int k = 0; k < a.size(); ++k)
    if (a[k].x == x && a[k].y == y) return k;
  throw std::invalid_argument("partition references a point outside the pixel set (" +
                              std::to_string(x) + "," + std::to_string(y) + ")");
}

inline Partition partition_from_json(const json& j, const PixelSet& a) {
  if (!j.is_array()) throw std::invalid_argument("partition json: expected an array of blocks");
  Partition m;
  for (const auto& blk : j) {
    SubsetMask mask = 0;
    for (const auto& pt : blk) {
      if (!pt.is_array() || pt.size() != 2)
        throw std::invalid_argument("partition json: points must be [x, y] pairs");
      mask |= SubsetMask{1} << pixel_index(a, pt[0].get<double>(), pt[1].get<double>());
    }
    if (mask == 0) throw std::invalid_argument("partition json: empty block");
    m.blocks.push_back(mask);
  }
  validate_partition(m, m.union_mask());
  return m;
}

inline json pixel_set_to_json(const PixelSet& a) {
  json out = json::array();
  for (const Point2& p : a.points) out.push_back(point_to_json(p));
  return out;
}

inline PixelSet pixel_set_from_json(const json& j) {
  PixelSet a;
  for (const auto& pt : j) {
    if (!pt.is_array() || pt.size() != 2)
      throw std::invalid_argument("pixel set json: points must be [x, y] pairs");
    a.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  validate_pixel_set(a);
  return a;
}

// window restriction of an image to a pixel set of integer coordinates
inline ObservationWindow window_from_image(const Image& img, const PixelSet& pixels) {
  ObservationWindow w;
  w.pixels = pixels;
  w.channels = img.channels;
  for (const Point2& p : pixels.points) {
    const int x = static_cast<int>(std::lround(p.x)), y = static_cast<int>(std::lround(p.y));
    if (p.x != x || p.y != y || x < 0 || y < 0 || x >= img.side || y >= img.side)
      throw std::invalid_argument("window pixel outside the image grid");
    std::vector<double> row(static_cast<std::size_t>(img.channels));
    for (int c = 0; c < img.channels; ++c) row[static_cast<std::size_t>(c)] = img.at(x, y, c);
    w.values.push_back(std::move(row));
  }
  validate_window(w);
  return w;
}

inline json estimate_to_json(const Estimate& e) {
  return json{{"value", e.value}, {"std_error", e.std_error}, {"n_samples", e.n_samples}};
}

inline json window_to_json(const ObservationWindow& w) {
  json out;
  out["pixels"] = pixel_set_to_json(w.pixels);
  out["channels"] = w.channels;
  out["values"] = w.values;
  return out;
}

inline ObservationWindow window_from_json(const json& j) {
  ObservationWindow w;
  w.pixels = pixel_set_from_json(j.at("pixels"));
  w.channels = j.at("channels").get<int>();
  w.values = j.at("values").get<std::vector<std::vector<double>>>();
  validate_window(w);
  return w;
}

inline std::string mask_to_hex(SubsetMask v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%x", v);
  return buf;
}

inline json leaf_table_to_json(const LeafProbTable& table) {
  json masses = json::object();
  for (std::size_t v = 1; v < table.masses.size(); ++v)
    if (table.masses[v] != 0.0)
      masses[mask_to_hex(static_cast<SubsetMask>(v))] = table.masses[v];
  return json{{"n", table.n}, {"masses", masses}, {"nonempty_mass", table.nonempty_mass}};
}

}  // namespace deadleaves

#endif  // DEADLEAVES_JSON_IO_HPP
