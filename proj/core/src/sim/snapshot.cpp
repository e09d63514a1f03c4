#include "kum/sim/snapshot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>

#include "kum/core/error.hpp"
#include "kum/sim/sim.hpp"

namespace kum::sim {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 9> kScalars = {"tick", "status", "command", "active",       "width",
                                                 "height", "cell_mm", "dt", "chemo_quantum"};
constexpr std::array<const char*, 4> kCollections = {"flakes", "nodes", "veins", "tips"};

json opt(const std::optional<std::uint32_t>& v) { return v ? json(*v) : json(nullptr); }

std::array<std::uint8_t, 3> color_rgb(std::string_view c) {
  if (c == "Green") return {40, 200, 60};
  if (c == "Yellow") return {240, 220, 40};
  if (c == "Blue") return {50, 90, 230};
  if (c == "Red") return {220, 40, 40};
  return {235, 235, 220};
}

std::string hex(std::array<std::uint8_t, 3> c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

}  // namespace

json snapshot(const SimState& st) {
  json s;
  s["tick"] = st.tick;
  s["status"] = std::string(to_string(st.status));
  s["command"] = std::string(to_string(st.command));
  s["active"] = st.active;
  s["width"] = st.width;
  s["height"] = st.height;
  s["cell_mm"] = st.scenario.cell_mm;
  s["dt"] = st.scenario.dt;
  s["chemo_quantum"] = kChemoQuantum;
  json chemo = json::array();
  for (double c : st.chemo) chemo.push_back(static_cast<std::int64_t>(std::llround(c / kChemoQuantum)));
  s["chemo"] = std::move(chemo);
  json lights = json::array();
  for (const auto& r : st.lights)
    lights.push_back({{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}, {"intensity", r.intensity}});
  s["lights"] = std::move(lights);

  std::vector<const Flake*> flakes;
  for (const auto& f : st.flakes) flakes.push_back(&f);
  std::sort(flakes.begin(), flakes.end(), [](auto* a, auto* b) { return a->id < b->id; });
  json fl = json::array();
  for (const Flake* f : flakes)
    fl.push_back({{"id", f->id},
                  {"x", f->pos.x},
                  {"y", f->pos.y},
                  {"color", std::string(to_string(f->color))},
                  {"mass", f->mass},
                  {"label", f->label},
                  {"node", opt(f->node)}});
  s["flakes"] = std::move(fl);

  json nodes = json::array();
  for (const auto& [id, n] : st.nodes)
    nodes.push_back({{"id", id},
                     {"kind", n.kind == NodeKind::Stationary ? "Stationary" : "Dynamic"},
                     {"flake", opt(n.flake)},
                     {"x", n.pos.x},
                     {"y", n.pos.y},
                     {"label", n.label}});
  s["nodes"] = std::move(nodes);

  json veins = json::array();
  for (const auto& [id, v] : st.veins) {
    json cells = json::array();
    for (const auto& c : v.cells) cells.push_back({c.x, c.y});
    veins.push_back({{"id", id},
                     {"a", v.a},
                     {"b", v.b},
                     {"cells", std::move(cells)},
                     {"flow_speed", v.flow_speed},
                     {"period", v.period},
                     {"phase", v.phase},
                     {"sign", v.sign},
                     {"flips", v.flips}});
  }
  s["veins"] = std::move(veins);

  json tips = json::array();
  for (const auto& t : st.tips)
    tips.push_back({{"id", t.id}, {"x", t.pos.x}, {"y", t.pos.y}, {"heading", t.heading}, {"origin", t.origin}});
  s["tips"] = std::move(tips);
  return s;
}

json diff_snapshots(const json& before, const json& after) {
  json d;
  for (const char* k : kScalars) d[k] = after.at(k);
  const auto& a = before.at("chemo");
  const auto& b = after.at("chemo");
  json cells = json::array();
  if (a.size() != b.size()) {
    d["chemo_full"] = b;
  } else {
    for (std::size_t i = 0; i < b.size(); ++i)
      if (a[i] != b[i]) cells.push_back({i, b[i]});
  }
  d["chemo"] = std::move(cells);
  if (before.at("lights") != after.at("lights")) d["lights"] = after.at("lights");
  for (const char* k : kCollections) {
    std::map<std::uint64_t, const json*> old;
    for (const auto& item : before.at(k)) old[item.at("id").get<std::uint64_t>()] = &item;
    json upsert = json::array();
    for (const auto& item : after.at(k)) {
      const auto id = item.at("id").get<std::uint64_t>();
      auto it = old.find(id);
      if (it == old.end() || *it->second != item) upsert.push_back(item);
      if (it != old.end()) old.erase(it);
    }
    json remove = json::array();
    for (const auto& [id, _] : old) remove.push_back(id);
    d[k] = {{"upsert", std::move(upsert)}, {"remove", std::move(remove)}};
  }
  return d;
}

void apply_delta(json& snap, const json& delta) {
  try {
    for (const char* k : kScalars) snap[k] = delta.at(k);
    if (delta.contains("chemo_full")) snap["chemo"] = delta.at("chemo_full");
    auto& chemo = snap.at("chemo");
    for (const auto& c : delta.at("chemo")) chemo.at(c.at(0).get<std::size_t>()) = c.at(1);
    if (delta.contains("lights")) snap["lights"] = delta.at("lights");
    for (const char* k : kCollections) {
      std::map<std::uint64_t, json> items;
      for (auto& item : snap.at(k)) {
        const auto id = item.at("id").get<std::uint64_t>();
        items[id] = std::move(item);
      }
      for (const auto& id : delta.at(k).at("remove")) items.erase(id.get<std::uint64_t>());
      for (const auto& item : delta.at(k).at("upsert")) items[item.at("id").get<std::uint64_t>()] = item;
      json arr = json::array();
      for (auto& [_, item] : items) arr.push_back(std::move(item));
      snap[k] = std::move(arr);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadMessage, std::string("malformed delta: ") + e.what());
  }
}

void render_ppm(const json& snap, std::ostream& out, int scale) {
  const int w = snap.at("width").get<int>();
  const int h = snap.at("height").get<int>();
  scale = std::max(1, scale);
  std::vector<std::array<std::uint8_t, 3>> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  const auto at = [&](int x, int y) -> std::array<std::uint8_t, 3>& {
    return px[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
  };
  const auto& chemo = snap.at("chemo");
  const double q = snap.at("chemo_quantum").get<double>();
  double top = 0;
  for (const auto& c : chemo) top = std::max(top, c.get<double>() * q);
  const double norm = std::log1p(top / q);
  for (int i = 0; i < w * h; ++i) {
    const double v = norm > 0 ? std::log1p(chemo[static_cast<std::size_t>(i)].get<double>()) / norm : 0.0;
    const auto g = static_cast<std::uint8_t>(std::clamp(v, 0.0, 1.0) * 160.0);
    px[static_cast<std::size_t>(i)] = {static_cast<std::uint8_t>(g / 3), g, static_cast<std::uint8_t>(g / 2)};
  }
  for (const auto& r : snap.at("lights")) {
    const double k = r.at("intensity").get<double>();
    for (int y = r.at("y0").get<int>(); y <= r.at("y1").get<int>(); ++y)
      for (int x = r.at("x0").get<int>(); x <= r.at("x1").get<int>(); ++x) {
        auto& p = at(x, y);
        p[0] = static_cast<std::uint8_t>(p[0] + (255 - p[0]) * k * 0.5);
        p[1] = static_cast<std::uint8_t>(p[1] + (255 - p[1]) * k * 0.4);
      }
  }
  for (const auto& v : snap.at("veins"))
    for (const auto& c : v.at("cells")) at(c.at(0).get<int>(), c.at(1).get<int>()) = {250, 200, 30};
  for (const auto& f : snap.at("flakes")) {
    const int fx = f.at("x").get<int>();
    const int fy = f.at("y").get<int>();
    auto rgb = color_rgb(f.at("color").get<std::string>());
    if (f.at("mass").get<double>() <= 0)
      for (auto& ch : rgb) ch = static_cast<std::uint8_t>(ch / 3);
    for (int y = std::max(0, fy - 1); y <= std::min(h - 1, fy + 1); ++y)
      for (int x = std::max(0, fx - 1); x <= std::min(w - 1, fx + 1); ++x) at(x, y) = rgb;
  }
  for (const auto& t : snap.at("tips")) {
    const int x = std::clamp(static_cast<int>(t.at("x").get<double>()), 0, w - 1);
    const int y = std::clamp(static_cast<int>(t.at("y").get<double>()), 0, h - 1);
    at(x, y) = {255, 255, 255};
  }
  out << "P6\n" << w * scale << ' ' << h * scale << "\n255\n";
  for (int y = 0; y < h; ++y)
    for (int sy = 0; sy < scale; ++sy)
      for (int x = 0; x < w; ++x)
        for (int sx = 0; sx < scale; ++sx) out.write(reinterpret_cast<const char*>(at(x, y).data()), 3);
}

void render_svg(const json& snap, std::ostream& out) {
  const int w = snap.at("width").get<int>();
  const int h = snap.at("height").get<int>();
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * 4 << "\" height=\"" << h * 4
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#1e241e\"/>\n";
  for (const auto& r : snap.at("lights"))
    out << "<rect x=\"" << r.at("x0").get<int>() << "\" y=\"" << r.at("y0").get<int>() << "\" width=\""
        << r.at("x1").get<int>() - r.at("x0").get<int>() + 1 << "\" height=\""
        << r.at("y1").get<int>() - r.at("y0").get<int>() + 1 << "\" fill=\"#fff6b0\" fill-opacity=\""
        << r.at("intensity").get<double>() * 0.4 << "\"/>\n";
  for (const auto& f : snap.at("flakes"))
    out << "<rect x=\"" << f.at("x").get<int>() - 1 << "\" y=\"" << f.at("y").get<int>() - 1
        << "\" width=\"3\" height=\"3\" fill=\"" << hex(color_rgb(f.at("color").get<std::string>()))
        << "\" fill-opacity=\"" << (f.at("mass").get<double>() > 0 ? 1.0 : 0.35) << "\"/>\n";
  for (const auto& v : snap.at("veins")) {
    out << "<polyline fill=\"none\" stroke=\"#f5c21b\" stroke-width=\"0.8\" points=\"";
    for (const auto& c : v.at("cells")) out << c.at(0).get<int>() + 0.5 << ',' << c.at(1).get<int>() + 0.5 << ' ';
    out << "\"/>\n";
  }
  const auto active = snap.at("active").get<std::uint64_t>();
  for (const auto& n : snap.at("nodes")) {
    const bool is_active = n.at("id").get<std::uint64_t>() == active;
    out << "<circle cx=\"" << n.at("x").get<double>() << "\" cy=\"" << n.at("y").get<double>() << "\" r=\""
        << (is_active ? 2.0 : 1.2) << "\" fill=\"" << (n.at("kind") == "Stationary" ? "#ffffff" : "#f58b1b")
        << "\"" << (is_active ? " stroke=\"#ff3030\" stroke-width=\"0.6\"" : "") << "><title>"
        << n.at("id").get<std::uint64_t>() << ':' << n.at("label").get<std::string>() << "</title></circle>\n";
  }
  for (const auto& t : snap.at("tips"))
    out << "<circle cx=\"" << t.at("x").get<double>() << "\" cy=\"" << t.at("y").get<double>()
        << "\" r=\"0.7\" fill=\"#e0e0ff\"/>\n";
  out << "<text x=\"2\" y=\"6\" font-size=\"5\" fill=\"#cccccc\">tick " << snap.at("tick").get<std::uint64_t>()
      << ' ' << snap.at("command").get<std::string>() << "</text>\n";
  out << "</svg>\n";
}

}  // namespace kum::sim
