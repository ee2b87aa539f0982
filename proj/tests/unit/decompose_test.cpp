#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "topothermo/decompose.hpp"
#include "topothermo/errors.hpp"
#include "topothermo/neckgeom.hpp"

using namespace topothermo;

namespace {

DecompositionConfig config(std::size_t n, std::uint64_t seed) {
  DecompositionConfig c;
  c.sampler.n_samples = n;
  c.sampler.seed = seed;
  return c;
}

CriticalCatalog search(const PotentialModel& m, double vmax) {
  SearchConfig sc;
  sc.seed = 1;
  return find_critical_points(m, vmax, sc);
}

bool has(const std::vector<std::string>& w, const char* name) { return std::find(w.begin(), w.end(), name) != w.end(); }

}  // namespace

TEST_SUITE("decompose") {

TEST_CASE("quadratic well: topological term equals the cylinder oracle") {
  const auto m = make_builtin({ModelKind::harmonic, 3, {}}, std::vector<Interval>(3, Interval{-1.0, 1.0}));
  const auto cat = search(m, 0.5);
  REQUIRE(cat.points.size() == 1);
  const double eps0 = 0.2;
  const auto rep = assemble_entropy_decomposition(m, cat, eps0 / 2, eps0, 0.3, config(400000, 3));
  CHECK(rep.regime == Regime::band);
  CHECK(rep.nu == 1);
  // inside the minimum's band, the whole sub-level set is the cylinder
  CHECK(rep.excised_volume.mean == 0.0);
  CHECK(rep.residual_vs_mc_sigma <= 3.0);
  CHECK(std::abs(rep.direct_volume.mean - rep.topo_term) <= 3.0 * rep.direct_volume.std_error);
  CHECK(rep.topo_term == doctest::Approx(coefficient_B(3, 0, eps0 / 2, eps0, 0.3, cat.points[0].jacobian)));
}

TEST_CASE("empty catalog: decomposed and direct entropy coincide") {
  const auto m = make_builtin({ModelKind::harmonic, 2, {}}, std::vector<Interval>(2, Interval{-1.5, 1.5}));
  const auto cat = build_catalog(2, 2.0, false, {});
  const auto rep = assemble_entropy_decomposition(m, cat, 1.0, 0.1, 0.3, config(200000, 2));
  CHECK(rep.topo_term == 0.0);
  CHECK(rep.S_decomposed == rep.S_direct);
  CHECK(rep.residual_rel == 0.0);
  CHECK(rep.cylinders_included == 0);
}

TEST_CASE("plateau regime and wall parameter cap") {
  const auto m = make_builtin({ModelKind::uncoupled_double_well, 2, {}});
  const auto cat = search(m, 0.6);
  const auto rep = assemble_entropy_decomposition(m, cat, 0.3, 0.05, 1.0, config(300000, 4));
  CHECK(rep.regime == Regime::plateau);
  CHECK(rep.r <= 0.4 * min_pairwise_distance(cat) + 1e-15);
  CHECK(rep.r_requested == 1.0);
  CHECK(rep.cylinders_included == 9);
  CHECK(rep.residual_rel == doctest::Approx(decomposition_residual(rep)));
  CHECK(std::isfinite(rep.S_decomposed));
}

TEST_CASE("overlap and incomplete catalog") {
  const auto m = make_builtin({ModelKind::uncoupled_double_well, 2, {}});
  const auto cat = search(m, 0.25);
  auto strict = config(200000, 5);
  strict.strict_overlap = true;
  strict.max_r_halvings = 0;
  // ε₀ = 0.2 > half the level gap: minimum and saddle bands overlap
  try {
    assemble_entropy_decomposition(m, cat, 0.0, 0.2, 0.4, strict);
    FAIL("expected OverlapDetected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::overlap_detected);
  }
  auto lenient = strict;
  lenient.strict_overlap = false;
  const auto rep = assemble_entropy_decomposition(m, cat, 0.1, 0.2, 0.4, lenient);
  CHECK(has(rep.warnings, "OverlapDetected"));
  CHECK(has(rep.warnings, "IncompleteCatalog"));
}

TEST_CASE("sweeps hold r fixed") {
  const auto m = make_builtin({ModelKind::uncoupled_double_well, 2, {}});
  const auto cat = search(m, 0.45);
  const auto reps = decomposition_sweep(m, cat, 0.2, {0.2, 0.1, 0.05}, 0.3, config(200000, 6));
  REQUIRE(reps.size() == 3);
  CHECK(reps[0].r == reps[1].r);
  CHECK(reps[1].r == reps[2].r);
  const auto scan = decomposition_scan(m, cat, {0.1, 0.2, 0.3}, 0.05, 0.3, config(100000, 6));
  CHECK(scan[0].r == scan[2].r);
  CHECK(decomposition_sweep(m, cat, 0.2, {}, 0.3).empty());
}

}
