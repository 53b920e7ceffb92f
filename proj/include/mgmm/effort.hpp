#pragma once

#include <cstdint>

namespace mgmm {

/// Deterministic planning-effort accounting. Collision kernels, the
/// integrator, graph search, and encoder forwards report primitive-operation
/// counts here; planners convert the counts to "instrumented seconds" via
/// fixed per-operation costs. Budgets and reported runtimes use this clock,
/// so a seeded run terminates at exactly the same point on every machine and
/// every repeat. The constants are calibrated generously against a desktop
/// CPU, which keeps wall-clock time at or below the instrumented time.
struct EffortMeter {
  uint64_t rect_tests = 0;     // obstacle-vs-footprint primitive tests
  uint64_t capsule_tests = 0;  // capsule link tests (snake bodies)
  uint64_t dyn_evals = 0;      // dynamics derivative evaluations
  uint64_t trailer_terms = 0;  // extra per-trailer terms in snake models
  uint64_t graph_ops = 0;      // shortest-path edge relaxations / heap ops
  uint64_t net_macs = 0;       // encoder multiply-accumulates

  // Roughly 3x the measured hot-loop costs on a desktop core, so the
  // instrumented clock runs ahead of the wall clock with margin.
  static constexpr double kRectNs = 35.0;
  static constexpr double kCapsuleNs = 220.0;
  static constexpr double kDynNs = 120.0;
  static constexpr double kTrailerNs = 80.0;
  static constexpr double kGraphNs = 50.0;
  static constexpr double kMacNs = 0.7;

  double seconds() const {
    return 1e-9 * (kRectNs * static_cast<double>(rect_tests) +
                   kCapsuleNs * static_cast<double>(capsule_tests) +
                   kDynNs * static_cast<double>(dyn_evals) +
                   kTrailerNs * static_cast<double>(trailer_terms) +
                   kGraphNs * static_cast<double>(graph_ops) +
                   kMacNs * static_cast<double>(net_macs));
  }

  /// Counter-wise difference; elapsed effort is computed on exact counter
  /// deltas so repeated seeded runs report identical times.
  EffortMeter operator-(const EffortMeter& o) const {
    return {rect_tests - o.rect_tests, capsule_tests - o.capsule_tests,
            dyn_evals - o.dyn_evals,   trailer_terms - o.trailer_terms,
            graph_ops - o.graph_ops,   net_macs - o.net_macs};
  }
};

/// Thread-local meter; each planner invocation reads a start mark and
/// reports elapsed instrumented seconds relative to it.
inline EffortMeter& effort() {
  thread_local EffortMeter meter;
  return meter;
}

}  // namespace mgmm
