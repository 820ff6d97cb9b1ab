#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bornwalk/blockop.hpp"
#include "bornwalk/geometry.hpp"
#include "bornwalk/simplexwalk.hpp"
#include "bornwalk/wavepacket.hpp"

namespace bornwalk {

using Json = nlohmann::json;

// Readers take a field path used in ConfigInvalid messages ("scenario.wave").

Json to_json(const DetectorArray& array);
DetectorArray detector_array_from_json(const Json& j, const std::string& path = "array");

Json to_json(const WaveFunction& psi);
WaveFunction wave_function_from_json(const Json& j, const std::string& path = "wave");

Json to_json(const QuadratureSpec& q);
QuadratureSpec quadrature_from_json(const Json& j, const std::string& path = "quadrature");

Json to_json(const WalkKernel& kernel);
WalkKernel kernel_from_json(const Json& j, const std::string& path = "kernel");

Json to_json(const Dims& dims);
Dims dims_from_json(const Json& j, const std::string& path = "dims");

/// Row-major flat array of [re, im] pairs.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& path);
Json vector_to_json(const CVector& v);
CVector vector_from_json(const Json& j, Eigen::Index size, const std::string& path);

/// { "dims": ..., "apparatus_blocks": [ flat m*m, ... ] }
Json to_json(const BlockHamiltonian& h);
BlockHamiltonian block_hamiltonian_from_json(const Json& j, const std::string& path = "hamiltonian");

/// Full operator from either { "matrix": flat N*N } or a block-Hamiltonian
/// document, validated against `dims`.
CMatrix operator_from_json(const Json& j, const Dims& dims, const std::string& path = "hamiltonian");

/// { "dims": ..., "v": flat } ; the vector is normalized on read.
Json to_json(const JointState& s);
JointState joint_state_from_json(const Json& j, const std::string& path = "state");

Json to_json(const SimplexPoint& a);
Json to_json(const WalkRun& run);
/// { "counts", "freq", "unabsorbed", "chi2", "p", "master_seed", ... }
Json to_json(const EnsembleResult& r);
Json oracle_to_json(const std::vector<double>& start, const std::vector<double>& absorption, std::uint32_t M);

/// "region_index,weight" rows.
std::string weights_csv(const SimplexPoint& a);
/// "step,a_1,...,a_n" rows.
std::string path_csv(const WalkRun& run);
/// "t,a_1,...,a_n" rows.
std::string trajectory_csv(const std::vector<double>& times, const std::vector<SimplexPoint>& points);

/// Shortest decimal that round-trips.
std::string format_real(double v);

Json read_json_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, std::string_view text);
/// Serialized form used for every JSON artifact (sorted keys, 2-space indent).
std::string dump(const Json& j);

std::string sha256_hex(std::string_view data);

}  // namespace bornwalk
