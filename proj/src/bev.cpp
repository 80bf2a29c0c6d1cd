#include "spatialforge/bev.hpp"

#include <algorithm>
#include <cmath>

#include "spatialforge/errors.hpp"

namespace spatialforge {

const std::array<std::array<uint8_t, 3>, 12> kBevPalette = {{
    {230, 80, 60},   {60, 130, 230},  {70, 180, 90},   {240, 170, 50},
    {160, 90, 200},  {50, 190, 190},  {220, 100, 170}, {140, 140, 60},
    {90, 100, 220},  {200, 130, 90},  {100, 170, 140}, {170, 70, 90},
}};

namespace {

// 3x5 digit glyphs, row-major bits
constexpr uint8_t kDigits[10][5] = {
    {0b111, 0b101, 0b101, 0b101, 0b111}, {0b010, 0b110, 0b010, 0b010, 0b111},
    {0b111, 0b001, 0b111, 0b100, 0b111}, {0b111, 0b001, 0b111, 0b001, 0b111},
    {0b101, 0b101, 0b111, 0b001, 0b001}, {0b111, 0b100, 0b111, 0b001, 0b111},
    {0b111, 0b100, 0b111, 0b101, 0b111}, {0b111, 0b001, 0b010, 0b010, 0b010},
    {0b111, 0b101, 0b111, 0b101, 0b111}, {0b111, 0b101, 0b111, 0b001, 0b111},
};

void put_pixel(BevRaster& img, int x, int y, const std::array<uint8_t, 3>& c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  uint8_t* p = &img.rgb[(static_cast<size_t>(y) * img.width + x) * 3];
  p[0] = c[0];
  p[1] = c[1];
  p[2] = c[2];
}

void draw_number(BevRaster& img, int cx, int cy, int value,
                 const std::array<uint8_t, 3>& ink) {
  std::string s = std::to_string(value);
  int total_w = static_cast<int>(s.size()) * 4 - 1;
  int x0 = cx - total_w / 2;
  int y0 = cy - 2;
  for (char ch : s) {
    int d = ch - '0';
    for (int ry = 0; ry < 5; ++ry)
      for (int rx = 0; rx < 3; ++rx)
        if (kDigits[d][ry] & (1 << (2 - rx))) put_pixel(img, x0 + rx, y0 + ry, ink);
    x0 += 4;
  }
}

bool inside_quad(const std::array<Vec2, 4>& q, double x, double y) {
  // convex quad, consistent winding: same-side test on all edges
  double sign = 0.0;
  for (int i = 0; i < 4; ++i) {
    Vec2 a = q[i], b = q[(i + 1) % 4];
    double cross = (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x());
    if (cross == 0.0) continue;
    if (sign == 0.0)
      sign = cross;
    else if ((sign > 0) != (cross > 0))
      return false;
  }
  return true;
}

}  // namespace

BevRaster render_bev(const std::vector<SceneObject>& objects,
                     double meters_per_pixel,
                     const std::vector<std::array<uint8_t, 3>>& palette) {
  if (!(meters_per_pixel > 0)) throw ValidationError("render_bev: scale must be > 0");
  auto color_of = [&](size_t i) {
    if (!palette.empty()) return palette[i % palette.size()];
    return kBevPalette[i % kBevPalette.size()];
  };

  // yaw-projected footprint corners on the ground plane (x, z)
  std::vector<std::array<Vec2, 4>> world_quads;
  for (const auto& obj : objects) {
    double yaw = obj.box.angles.yaw * M_PI;
    double c = std::cos(yaw), s = std::sin(yaw);
    double hx = 0.5 * obj.box.size.x(), hz = 0.5 * obj.box.size.z();
    std::array<Vec2, 4> q;
    const double sx[4] = {-1, 1, 1, -1}, sz[4] = {-1, -1, 1, 1};
    for (int k = 0; k < 4; ++k) {
      // box local (x, z) rotated by yaw: world x = c*lx + s*lz, z = -s*lx + c*lz
      double lx = sx[k] * hx, lz = sz[k] * hz;
      q[k] = Vec2(obj.box.center.x() + c * lx + s * lz,
                  obj.box.center.z() - s * lx + c * lz);
    }
    world_quads.push_back(q);
  }

  // canvas bounds: all footprints plus the camera origin, with margin
  double min_x = -0.25, max_x = 0.25, min_z = -0.25, max_z = 0.25;
  for (const auto& q : world_quads)
    for (const auto& p : q) {
      min_x = std::min(min_x, p.x());
      max_x = std::max(max_x, p.x());
      min_z = std::min(min_z, p.y());
      max_z = std::max(max_z, p.y());
    }
  double margin = 16.0 * meters_per_pixel;
  min_x -= margin;
  min_z -= margin;
  max_x += margin;
  max_z += margin;

  BevRaster img;
  img.meters_per_pixel = meters_per_pixel;
  img.width = std::max(1, static_cast<int>(std::ceil((max_x - min_x) / meters_per_pixel)));
  img.height = std::max(1, static_cast<int>(std::ceil((max_z - min_z) / meters_per_pixel)));
  if (static_cast<int64_t>(img.width) * img.height > 64LL * 1000 * 1000)
    throw ValidationError("render_bev: raster exceeds 64 Mpx; raise meters_per_pixel");
  img.rgb.assign(static_cast<size_t>(img.width) * img.height * 3, 255);

  auto to_px = [&](const Vec2& w) {
    return Vec2((w.x() - min_x) / meters_per_pixel,
                (max_z - w.y()) / meters_per_pixel);
  };
  img.origin_px = to_px(Vec2(0, 0));

  for (size_t i = 0; i < world_quads.size(); ++i) {
    Footprint fp;
    fp.object_index = static_cast<int>(i);
    fp.color = color_of(i);
    double px_min_x = 1e18, px_max_x = -1e18, px_min_y = 1e18, px_max_y = -1e18;
    for (int k = 0; k < 4; ++k) {
      fp.corners_px[k] = to_px(world_quads[i][k]);
      px_min_x = std::min(px_min_x, fp.corners_px[k].x());
      px_max_x = std::max(px_max_x, fp.corners_px[k].x());
      px_min_y = std::min(px_min_y, fp.corners_px[k].y());
      px_max_y = std::max(px_max_y, fp.corners_px[k].y());
    }
    for (int y = std::max(0, static_cast<int>(px_min_y));
         y <= std::min(img.height - 1, static_cast<int>(px_max_y) + 1); ++y)
      for (int x = std::max(0, static_cast<int>(px_min_x));
           x <= std::min(img.width - 1, static_cast<int>(px_max_x) + 1); ++x)
        if (inside_quad(fp.corners_px, x + 0.5, y + 0.5))
          put_pixel(img, x, y, fp.color);

    Vec2 center = to_px(Vec2(objects[i].box.center.x(), objects[i].box.center.z()));
    draw_number(img, static_cast<int>(center.x()), static_cast<int>(center.y()),
                static_cast<int>(i), {0, 0, 0});
    img.footprints.push_back(fp);
  }

  // camera origin marker: cross plus a forward (+Z on screen: up) tick
  int ox = static_cast<int>(img.origin_px.x());
  int oy = static_cast<int>(img.origin_px.y());
  const std::array<uint8_t, 3> ink{0, 0, 0};
  for (int d = -4; d <= 4; ++d) {
    put_pixel(img, ox + d, oy, ink);
    put_pixel(img, ox, oy + d, ink);
  }
  for (int d = 5; d <= 9; ++d) put_pixel(img, ox, oy - d, ink);
  return img;
}

}  // namespace spatialforge
