#include <algorithm>
#include <array>
#include <cmath>

#include "kum/sim/sim.hpp"

namespace kum::sim {

namespace {

double total(const std::vector<double>& v) {
  // Independent partial sums; all terms are non-negative so the relative
  // error stays near n * epsilon.
  std::array<double, 8> part{};
  std::size_t i = 0;
  for (; i + 8 <= v.size(); i += 8)
    for (std::size_t k = 0; k < 8; ++k) part[k] += v[i + k];
  double sum = 0;
  for (; i < v.size(); ++i) sum += v[i];
  for (double p : part) sum += p;
  return sum;
}

void diffuse_row(const double* __restrict row, const double* __restrict up, const double* __restrict down,
                 double* __restrict out, int w, double k) {
  const auto at = [&](const double* r, int x, double c) { return r ? r[x] : c; };
  if (w == 1) {
    out[0] = row[0] + k * ((at(up, 0, row[0]) - row[0]) + (at(down, 0, row[0]) - row[0]));
    return;
  }
  const auto edge = [&](int x, int nx) {
    const double c = row[x];
    out[x] = c + k * ((row[nx] - c) + (at(up, x, c) - c) + (at(down, x, c) - c));
  };
  edge(0, 1);
  edge(w - 1, w - 2);
  if (up && down) {
    for (int x = 1; x + 1 < w; ++x)
      out[x] = row[x] + k * (row[x - 1] + row[x + 1] + up[x] + down[x] - 4.0 * row[x]);
  } else {
    for (int x = 1; x + 1 < w; ++x) {
      const double c = row[x];
      out[x] = c + k * ((row[x - 1] - c) + (row[x + 1] - c) + (at(up, x, c) - c) + (at(down, x, c) - c));
    }
  }
}

void diffuse(const std::vector<double>& cur, std::vector<double>& nxt, int w, int h, double k) {
  const auto W = static_cast<std::size_t>(w);
  for (int y = 0; y < h; ++y) {
    const double* row = cur.data() + static_cast<std::size_t>(y) * W;
    diffuse_row(row, y > 0 ? row - W : nullptr, y + 1 < h ? row + W : nullptr,
                nxt.data() + static_cast<std::size_t>(y) * W, w, k);
  }
}

}  // namespace

FieldBalance field_step(std::vector<double>& chemo, int width, int height, std::span<const Flake> flakes,
                        const Params& params, std::span<const std::size_t> sinks) {
  FieldBalance b;
  b.before = total(chemo);
  if (params.kappa > 0) {
    thread_local std::vector<double> scratch;
    scratch.resize(chemo.size());
    for (int s = 0; s < params.diffusion_substeps; ++s) {
      diffuse(chemo, scratch, width, height, params.kappa);
      chemo.swap(scratch);
    }
  }
  if (params.lambda > 0) {
    b.decayed = params.lambda * total(chemo);
    const double keep = 1.0 - params.lambda;
    for (double& c : chemo) c *= keep;
  }
  if (params.absorb > 0)
    for (std::size_t i : sinks) {
      b.decayed += params.absorb * chemo[i];
      chemo[i] *= 1.0 - params.absorb;
    }
  for (const Flake& f : flakes) {
    if (f.exhausted() || f.occupied()) continue;
    const double q = params.sigma * params.attract_of(f.color);
    chemo[static_cast<std::size_t>(f.pos.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(f.pos.x)] +=
        q;
    b.injected += q;
  }
  b.after = total(chemo);
  return b;
}

double sample(const std::vector<double>& field, int width, int height, Vec2 p) noexcept {
  const double u = std::clamp(p.x - 0.5, 0.0, static_cast<double>(width - 1));
  const double v = std::clamp(p.y - 0.5, 0.0, static_cast<double>(height - 1));
  const int x0 = static_cast<int>(u);
  const int y0 = static_cast<int>(v);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const auto at = [&](int x, int y) {
    return field[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  };
  return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x1, y0)) + fy * ((1 - fx) * at(x0, y1) + fx * at(x1, y1));
}

}  // namespace kum::sim
