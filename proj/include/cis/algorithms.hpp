#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "cis/dynamics.hpp"
#include "cis/geometry.hpp"
#include "cis/interval.hpp"

namespace cis {

namespace outcome {
struct Disjoint {};
/// inputs is nonempty and lies in U.
struct Inside {
  geometry::PolyUnion inputs;
  Box reach;  ///< bounding box of the over-approximated successor set
};
struct Indeterminate {};
struct Split {
  Box left;
  Box right;
};
}  // namespace outcome

using Classification = std::variant<outcome::Disjoint, outcome::Inside, outcome::Indeterminate, outcome::Split>;

struct ControllerEntry {
  Box box;
  geometry::PolyUnion inputs;  ///< polytopes in R^m
};
using ControllerTable = std::vector<ControllerEntry>;

struct RunStats {
  std::size_t pops = 0;
  std::size_t sweeps = 0;
  double wall_ms = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  double r = 0.0;  ///< rho * epsilon
  double omega_volume = 0.0;
  double cis_volume = 0.0;
  double excluded_volume = 0.0;
  double indeterminate_volume = 0.0;
};

struct RunResult {
  BoxUnion cis;
  ControllerTable controller;
  std::vector<Box> excluded;       ///< classified Disjoint
  std::vector<Box> indeterminate;  ///< reached epsilon without a decision
  RunStats stats;
};

struct Options {
  double epsilon = 1e-3;
  /// Successors must land this far (infinity norm) inside the target.
  double margin_r = 0.0;
  /// Worker threads for one refinement sweep (the accelerated loop is sequential).
  std::size_t threads = 1;
  /// Accelerated loop only. When true, removing a box from omega unchecks
  /// just the verified boxes whose successor set it touches; the outcome of
  /// the containment test depends on nothing else, so the result is the same
  /// as with global invalidation, with fewer re-verifications.
  bool local_checks = true;
};

/// Inputs u in U with P0 + {S u} inside omega (eroded by margin_r when positive).
/// Empty when no such u exists.
geometry::PolyUnion feasible_inputs(const AffineDecomposition& dec, const geometry::Polytope& P0,
                                    const geometry::Polytope& P, const BoxUnion& omega, const Box& U);
geometry::PolyUnion feasible_inputs(const AffineDecomposition& dec, const BoxUnion& omega, const Box& U);

/// One step of the refinement loop on [x] against the current target.
/// `reach_target` decides disjointness, `fit_target` decides containment;
/// they differ only when a robustness margin is in force.
Classification classify(const Box& x, const BoxUnion& reach_target, const BoxUnion& fit_target,
                        const SystemModel& model, double epsilon);
Classification classify(const Box& x, const BoxUnion& omega, const SystemModel& model, double epsilon);

/// One refinement sweep of omega.
RunResult under_I(const BoxUnion& omega, const SystemModel& model, const Options& opt);
/// Repeated sweeps until the set stops changing.
RunResult fixpoint(const BoxUnion& omega, const SystemModel& model, const Options& opt);
/// Single queue; omega shrinks in place and verified boxes are rechecked.
RunResult accelerated(const BoxUnion& omega, const SystemModel& model, const Options& opt);

/// Comparison method: n_u gridded inputs per input axis, pure interval images,
/// same outer fixpoint loop. Controller entries hold the first working input
/// as a point polytope.
RunResult baseline_sampled(const BoxUnion& omega, const SystemModel& model, const Options& opt, std::size_t n_u);

/// n_u evenly spaced values per axis of U (midpoint when n_u == 1), axis 0 fastest.
std::vector<std::vector<double>> input_grid(const Box& U, std::size_t n_u);

/// Grid over the bounding box of omega with `cells` cells per axis. A cell is
/// kept while some gridded input sends its center within the Lipschitz slack
/// of a kept cell, so the kept region over-approximates the maximal invariant
/// set inside omega (up to the grid resolution of omega itself).
struct GridOracle {
  Box frame;
  std::vector<std::size_t> cells;  ///< per axis
  std::vector<char> kept;          ///< axis 0 fastest
  std::vector<double> slack;       ///< per state axis
  std::size_t rounds = 0;

  std::vector<double> cell_size() const;
  BoxUnion region() const;
  /// Infinity-norm distance from p to the closest kept cell (0 inside).
  double distance(std::span<const double> p) const;
};
GridOracle brute_force_cis(const SystemModel& model, const BoxUnion& omega, std::size_t cells_per_axis,
                           std::size_t inputs_per_axis);

struct VerifyReport {
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t uncovered = 0;  ///< failures where no controller box held the state
  std::size_t steps = 0;
  /// Smallest infinity-norm depth of a visited state inside its covering box.
  double worst_margin = 0.0;
};

/// Closed-loop simulation from random initial states in cis, applying the
/// centroid of the first input polytope of a covering controller box.
VerifyReport verify_invariance(const BoxUnion& cis, const ControllerTable& table, const SystemModel& model,
                               std::size_t trials, std::size_t horizon, std::uint64_t seed);

}  // namespace cis
