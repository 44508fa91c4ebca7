#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kvl/clearance.hpp"

using namespace kvl;

namespace {
const Box unit_box(Point(0, 0), Point(1, 1));
}

TEST_CASE("empty obstacle set gives capped field") {
  ClearanceField f = clearance_field({}, unit_box, 128);
  const double cap = std::sqrt(2.0);
  CHECK(f.at(10, 10) == doctest::Approx(cap));
  CHECK(f.at(100, 60) == doctest::Approx(cap));
}

TEST_CASE("resolution below 64 rejected") {
  CHECK_THROWS(clearance_field({}, unit_box, 32));
}

TEST_CASE("distance to a vertical wall") {
  std::vector<Polyline> obs{Polyline{Point(0.5, 0), Point(0.5, 1)}};
  ClearanceField f = clearance_field(obs, unit_box, 256);
  const GridSpec& g = f.grid;
  const double v = f.at(g.xindex(0.25), g.yindex(0.5));
  CHECK(v == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("distance transform matches exact distance on random points") {
  std::vector<Polyline> obs{Polyline{Point(0.1, 0.2), Point(0.8, 0.3), Point(0.4, 0.9)},
                            Polyline{Point(0.7, 0.1), Point(0.7, 0.8)}};
  const int res = 128;
  ClearanceField f = clearance_field(obs, unit_box, res);
  const GridSpec& g = f.grid;
  const double celldiag = std::sqrt(2.0) / res;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int it = 0; it < 200; ++it) {
    const Point p(u(rng), u(rng));
    double exact = std::numeric_limits<double>::infinity();
    for (const auto& poly : obs) exact = std::min(exact, dist_point_polyline(p, poly));
    const int ix = g.xindex(p.x()), iy = g.yindex(p.y());
    const Point c = g.center(ix, iy);
    double exact_center = std::numeric_limits<double>::infinity();
    for (const auto& poly : obs) exact_center = std::min(exact_center, dist_point_polyline(c, poly));
    CHECK(std::abs(f.at(ix, iy) - exact_center) <= celldiag + 1e-9);
  }
}

TEST_CASE("gap walls and widest paths") {
  // two horizontal walls at y = 0.4 and 0.6, each with a width-0.1 gap at x = 0.5
  std::vector<Polyline> obs{
      Polyline{Point(0, 0.4), Point(0.45, 0.4)}, Polyline{Point(0.55, 0.4), Point(1, 0.4)},
      Polyline{Point(0, 0.6), Point(0.45, 0.6)}, Polyline{Point(0.55, 0.6), Point(1, 0.6)}};
  const int res = 512;
  ClearanceField f = clearance_field(obs, unit_box, res);
  const GridSpec& g = f.grid;
  const double at_center = f.at(g.xindex(0.5), g.yindex(0.5));
  CHECK(at_center == doctest::Approx(0.1).epsilon(1.5 / (0.1 * res)));

  // widest path from the domain boundary to a disc at the center: the
  // bottleneck is set by the gap half-width.
  auto source = [](int ix, int iy, const GridSpec& gs) {
    return ix == 0 || iy == 0 || ix == gs.nx - 1 || iy == gs.ny - 1;
  };
  auto target = [](int ix, int iy, const GridSpec& gs) {
    return (gs.center(ix, iy) - Point(0.5, 0.5)).norm() <= 0.03;
  };
  const WidestPathResult r = widest_path(f, source, target);
  CHECK(r.reachable);
  CHECK(r.bottleneck == doctest::Approx(0.05).epsilon(0.15));

  // brute-force oracle on a coarse grid: exhaustive bottleneck search
  {
    const int cres = 64;
    ClearanceField cf = clearance_field(obs, unit_box, cres);
    const GridSpec& cg = cf.grid;
    std::vector<double> best(static_cast<std::size_t>(cg.nx) * cg.ny, -1.0);
    bool changed = true;
    for (int ix = 0; ix < cg.nx; ++ix)
      for (int iy = 0; iy < cg.ny; ++iy)
        if (ix == 0 || iy == 0 || ix == cg.nx - 1 || iy == cg.ny - 1)
          best[static_cast<std::size_t>(cg.id(ix, iy))] = cf.at(ix, iy);
    while (changed) {
      changed = false;
      for (int iy = 0; iy < cg.ny; ++iy)
        for (int ix = 0; ix < cg.nx; ++ix) {
          const int id = cg.id(ix, iy);
          for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const int jx = ix + dx, jy = iy + dy;
            if (!cg.inside(jx, jy)) continue;
            const double cand =
                std::min(best[static_cast<std::size_t>(cg.id(jx, jy))], cf.at(ix, iy));
            if (cand > best[static_cast<std::size_t>(id)]) {
              best[static_cast<std::size_t>(id)] = cand;
              changed = true;
            }
          }
        }
    }
    double oracle = -1;
    for (int ix = 0; ix < cg.nx; ++ix)
      for (int iy = 0; iy < cg.ny; ++iy)
        if ((cg.center(ix, iy) - Point(0.5, 0.5)).norm() <= 0.03)
          oracle = std::max(oracle, best[static_cast<std::size_t>(cg.id(ix, iy))]);
    const WidestPathResult rc = widest_path(cf, source, target);
    CHECK(rc.bottleneck == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("solid wall separates") {
  std::vector<Polyline> obs{Polyline{Point(0.5, -0.01), Point(0.5, 1.01)}};
  ClearanceField f = clearance_field(obs, unit_box, 128);
  auto left = [](int ix, int iy, const GridSpec& gs) { (void)iy; (void)gs; return ix == 0; };
  auto right = [](int ix, int iy, const GridSpec& gs) { (void)iy; return ix == gs.nx - 1; };
  const WidestPathResult r = widest_path(f, left, right);
  CHECK(!r.reachable);
  CHECK(r.bottleneck == 0.0);
}

TEST_CASE("adding an obstacle never increases the bottleneck") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  auto left = [](int ix, int iy, const GridSpec& gs) { (void)iy; (void)gs; return ix == 0; };
  auto right = [](int ix, int iy, const GridSpec& gs) { (void)iy; return ix == gs.nx - 1; };
  std::vector<Polyline> obs;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 6; ++it) {
    obs.push_back(Polyline{Point(u(rng), u(rng)), Point(u(rng), u(rng))});
    ClearanceField f = clearance_field(obs, unit_box, 96);
    const WidestPathResult r = widest_path(f, left, right);
    CHECK(r.bottleneck <= prev + 1e-12);
    prev = r.bottleneck;
  }
}
