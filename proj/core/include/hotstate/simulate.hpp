#pragma once

#include <cstdint>
#include <vector>

#include "hotstate/process_model.hpp"
#include "hotstate/rng.hpp"

namespace hotstate {

// Candidate-level instrumentation hook for the thinning engine.
struct ThinningObserver {
  virtual ~ThinningObserver() = default;
  virtual void candidate(double time, bool hot, bool accepted) = 0;
};

// Exact gap-time construction for constant branch rates: the first gap is
// Exp(lambda0); every event opens a hot window, so later gaps follow the
// change-point law (Exp(lambda1) if within tau, else tau + Exp(lambda0)).
// Events beyond `duration` are discarded.
std::vector<double> simulate_constant(double lambda0, double lambda1,
                                      double tau, double duration, Rng& rng);

// Thinning against a constant envelope: candidates arrive at rate
// lambda_bar = 1.001 * sup of both branch intensities on [0, duration];
// a candidate at s uses the hot branch iff s < (last event + tau) and is
// accepted with probability branch(s) / lambda_bar.
std::vector<double> simulate_thinning(const ModelSpec& spec,
                                      const std::vector<double>& z, double tau,
                                      double duration, Rng& rng,
                                      ThinningObserver* observer = nullptr);

// Dispatches to the exact construction when both branches are constant in
// time, thinning otherwise.
std::vector<double> simulate_model_segment(const ModelSpec& spec,
                                           const std::vector<double>& z,
                                           double tau, double duration,
                                           Rng& rng);

struct PlannedSegment {
  SegmentId id;
  double duration = 0.0;
  std::vector<double> covariates;
};

struct SimConfig {
  ModelSpec spec;
  bool draw_tau = true;    // fresh tau per segment from spec.tau_dist
  double fixed_tau = 0.0;  // conditioning value when !draw_tau
  std::vector<PlannedSegment> plan;
  int replications = 1;
  std::uint64_t seed = 1;
  int threads = 1;
};

// plan x replications simulated datasets.  Each (replication, segment) cell
// runs on its own RNG substream, so output is a pure function of the seed
// no matter how work is scheduled.
std::vector<std::vector<Segment>> simulate_season(const SimConfig& cfg);

}  // namespace hotstate
