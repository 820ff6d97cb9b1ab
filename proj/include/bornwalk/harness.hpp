#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bornwalk/blockop.hpp"
#include "bornwalk/geometry.hpp"
#include "bornwalk/io.hpp"
#include "bornwalk/simplexwalk.hpp"
#include "bornwalk/wavepacket.hpp"

namespace bornwalk {

/// Optional stanza: assemble a block Hamiltonian with one sector per
/// detector region, evolve the product state |e_1> (x) (+)_i sqrt(a_i) e_0
/// built from the Born weights, and record the invariance suite and the
/// drift of the simplex coordinates over `times`.
struct BlockCheckConfig {
  Dims dims;
  std::vector<CMatrix> apparatus_blocks;
  std::vector<double> times;
};

struct Scenario {
  std::string name = "scenario";
  DetectorArray array;
  WaveFunction wave;
  WalkKernel kernel = PairTransfer{0.05};
  std::uint64_t walks = 10'000;
  std::uint64_t master_seed = 0;
  std::uint64_t max_steps = kDefaultMaxSteps;
  QuadratureSpec quadrature{};
  std::optional<BlockCheckConfig> block_check{};
};

Json to_json(const Scenario& s);
/// Throws ConfigInvalid naming the offending field path.
Scenario scenario_from_json(const Json& j, const std::string& path = "scenario");

/// Two coherent packets at (+-separation/2, 0, 8 sigma) with widths sigma on
/// every axis, wave vector (0, 0, kz), amplitudes 1 and `second_amplitude`,
/// over `strips` equal strips partitioning [-extent, extent] in x (each
/// unbounded in y).
Scenario two_slit(double separation, double sigma, double kz, int strips, double extent,
                  Complex second_amplitude = {1.0, 0.0});

struct BlockCheckReport {
  bool form_ok = false;
  std::size_t subsets_checked = 0;
  std::size_t subsets_failing = 0;
  double max_simplex_drift = 0.0;
};

struct ScenarioReport {
  std::string name;
  SimplexPoint expected{{1.0}};
  EnsembleResult ensemble;
  std::vector<double> band_lo;  // expected -+ 3 binomial standard errors
  std::vector<double> band_hi;
  std::vector<bool> within_band;
  std::string config_digest;
  std::string weights_digest;
  std::optional<BlockCheckReport> block_check;
};

/// Digest of the Born-weight vector as serialized in reports.
std::string weights_digest(const SimplexPoint& weights);

/// Born weights -> walk ensemble started at them -> statistics.
ScenarioReport run_scenario(const Scenario& s, unsigned threads = 1);

Json to_json(const ScenarioReport& r);

/// Writes report.json, weights.csv, frequencies.csv and manifest.json into
/// `out_dir`; returns the paths written.
std::vector<std::filesystem::path> write_scenario_artifacts(const Scenario& s, const ScenarioReport& r,
                                                            const std::filesystem::path& out_dir);

}  // namespace bornwalk
