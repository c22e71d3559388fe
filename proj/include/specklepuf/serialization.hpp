#pragma once

#include <filesystem>

#include "json.hpp"
#include "specklepuf/auth.hpp"
#include "specklepuf/hashing.hpp"
#include "specklepuf/metrics.hpp"
#include "specklepuf/optics.hpp"

namespace specklepuf {

inline constexpr int kDescriptorFormatVersion = 1;

void to_json(nlohmann::json& j, const Dims& d);
void from_json(const nlohmann::json& j, Dims& d);
void to_json(nlohmann::json& j, const SurfaceParams& p);
void from_json(const nlohmann::json& j, SurfaceParams& p);
void to_json(nlohmann::json& j, const OpticsConfig& o);
void from_json(const nlohmann::json& j, OpticsConfig& o);
void to_json(nlohmann::json& j, const JitterModel& m);
void from_json(const nlohmann::json& j, JitterModel& m);
void to_json(nlohmann::json& j, const JitterParams& p);
void to_json(nlohmann::json& j, const GaborKernel& k);
void from_json(const nlohmann::json& j, GaborKernel& k);
void to_json(nlohmann::json& j, const Histogram& h);
void to_json(nlohmann::json& j, const Probability& p);
void to_json(nlohmann::json& j, const InterStats& s);
void to_json(nlohmann::json& j, const IntraStats& s);
void to_json(nlohmann::json& j, const EntropyReport& e);
void to_json(nlohmann::json& j, const AuthDecision& d);
void to_json(nlohmann::json& j, const ErrorRates& r);

/// Descriptors carry (seed, params, format version); the grids are
/// regenerated on load.
nlohmann::json puf_descriptor(const VirtualPuf& puf);
VirtualPuf puf_from_descriptor(const nlohmann::json& j);
nlohmann::json challenge_descriptor(const Challenge& challenge);
Challenge challenge_from_descriptor(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed, newline-terminated, written atomically.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace specklepuf
