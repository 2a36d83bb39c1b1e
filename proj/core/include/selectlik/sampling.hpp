#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "selectlik/model.hpp"

namespace selectlik {

/// Reproducible random stream for one study.
///
/// Stream-splitting rule: study i of a run seeded with s draws from a
/// std::mt19937_64 initialised by std::seed_seq{lo32(s), hi32(s), lo32(i), hi32(i)}.
/// Both the engine and seed_seq are fully specified by the C++ standard, and
/// uniforms/normals are derived from raw engine output by fixed formulas, so a
/// given (seed, index) yields the same numbers on every conforming platform.
class StudyStream {
 public:
  StudyStream(std::uint64_t seed, std::uint64_t index);

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by inversion of uniform().
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct SimulationConfig {
  ModelParams params;
  /// One standard error per published study to generate.
  std::vector<double> sigmas;
  std::uint64_t seed = 0;
  std::size_t max_rejections_per_study = 1'000'000;
};

struct SimulationOutput {
  std::vector<StudyObservation> studies;
  /// Submitted studies (accepted or not) needed to publish each study.
  std::vector<std::size_t> attempts;

  std::size_t total_attempts() const;
  /// Published / submitted over the whole run.
  double acceptance_rate() const;
};

/// Runs the editor's accept/reject process until every requested study is
/// published. Throws BudgetExceeded naming the first study that ran out of
/// attempts.
SimulationOutput simulate_hedges(const SimulationConfig& config);

/// Published studies from simulate_hedges, in study order.
std::vector<StudyObservation> sample_hedges(const SimulationConfig& config);

/// n draws from the significance-only model by inversion on the truncated
/// region. Throws Underflow when the publishable mass is below 1e-300.
std::vector<StudyObservation> sample_basic(double theta0, double tau, double sigma,
                                           double alpha_cut, std::size_t n,
                                           std::uint64_t seed);

}  // namespace selectlik
