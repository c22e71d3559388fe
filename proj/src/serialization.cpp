#include "specklepuf/serialization.hpp"

#include "specklepuf/error.hpp"
#include "specklepuf/pgm.hpp"
#include "specklepuf/rng.hpp"

namespace specklepuf {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* name, T& out) {
  if (const auto it = j.find(name); it != j.end()) it->get_to(out);
}

void check_kind(const json& j, const char* kind) {
  if (j.value("kind", std::string{}) != kind) throw FormatError(std::string("descriptor: expected kind ") + kind);
  if (j.value("format_version", 0) != kDescriptorFormatVersion)
    throw FormatError("descriptor: unsupported format version");
}

}  // namespace

void to_json(json& j, const Dims& d) { j = json::array({d.rows, d.cols}); }

void from_json(const json& j, Dims& d) {
  if (!j.is_array() || j.size() != 2) throw ParameterError("dims: expected [rows, cols]");
  d = {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

void to_json(json& j, const SurfaceParams& p) {
  j = {{"grid_dims", p.grid},
       {"pitch_um", p.pitch_um},
       {"correlation_length_um", p.correlation_length_um},
       {"rms_height_um", p.rms_height_um},
       {"refractive_index", p.refractive_index}};
}

void from_json(const json& j, SurfaceParams& p) {
  read_opt(j, "grid_dims", p.grid);
  read_opt(j, "pitch_um", p.pitch_um);
  read_opt(j, "correlation_length_um", p.correlation_length_um);
  read_opt(j, "rms_height_um", p.rms_height_um);
  read_opt(j, "refractive_index", p.refractive_index);
}

void to_json(json& j, const OpticsConfig& o) {
  j = {{"wavelength_um", o.wavelength_um},
       {"z1_um", o.z1_um},
       {"z2_um", o.z2_um},
       {"detector_dims", o.detector},
       {"detector_bits", o.detector_bits}};
}

void from_json(const json& j, OpticsConfig& o) {
  read_opt(j, "wavelength_um", o.wavelength_um);
  read_opt(j, "z1_um", o.z1_um);
  read_opt(j, "z2_um", o.z2_um);
  read_opt(j, "detector_dims", o.detector);
  read_opt(j, "detector_bits", o.detector_bits);
}

void to_json(json& j, const JitterModel& m) {
  j = {{"shift_sigma_um", m.shift_sigma_um}, {"max_shift_um", m.max_shift_um}, {"noise_sigma", m.noise_sigma}};
}

void from_json(const json& j, JitterModel& m) {
  read_opt(j, "shift_sigma_um", m.shift_sigma_um);
  read_opt(j, "max_shift_um", m.max_shift_um);
  read_opt(j, "noise_sigma", m.noise_sigma);
}

void to_json(json& j, const JitterParams& p) {
  j = {{"dx_um", p.dx_um}, {"dy_um", p.dy_um}, {"noise_sigma", p.noise_sigma}, {"noise_seed", p.noise_seed}};
}

void to_json(json& j, const GaborKernel& k) {
  j = {{"size", k.size},
       {"wavelength_px", k.wavelength_px},
       {"sigma_px", k.sigma_px},
       {"orientation", k.orientation}};
}

void from_json(const json& j, GaborKernel& k) {
  read_opt(j, "size", k.size);
  read_opt(j, "wavelength_px", k.wavelength_px);
  read_opt(j, "sigma_px", k.sigma_px);
  read_opt(j, "orientation", k.orientation);
}

void to_json(json& j, const Histogram& h) {
  j = {{"lower", h.lower}, {"bin_width", h.bin_width}, {"counts", h.counts}};
}

void to_json(json& j, const Probability& p) {
  j = {{"linear", p.value}, {"log10", p.log10}};
}

void to_json(json& j, const InterStats& s) {
  j = {{"key_count", s.key_count},
       {"pair_count", s.pair_count},
       {"mean", s.mean},
       {"variance", s.variance},
       {"gaussian_fit", {{"mean", s.gaussian_fit.mean}, {"stddev", s.gaussian_fit.stddev}}},
       {"histogram", s.histogram},
       {"hd_samples", s.hd_samples}};
}

void to_json(json& j, const IntraStats& s) {
  j = {{"sample_count", s.sample_count},
       {"mean", s.mean},
       {"variance", s.variance},
       {"min", s.min},
       {"max", s.max},
       {"binomial_fit", {{"n_eff", s.binomial_fit.n_eff}, {"p_hat", s.binomial_fit.p_hat}}},
       {"histogram", s.histogram},
       {"hd_samples", s.hd_samples}};
}

void to_json(json& j, const EntropyReport& e) {
  j = {{"mean_x", e.mean_x}, {"std_x", e.std_x}, {"mean_y", e.mean_y},
       {"std_y", e.std_y},   {"per_row", e.per_row}, {"per_col", e.per_col}};
}

void to_json(json& j, const AuthDecision& d) {
  j = {{"puf_id", d.puf_id}, {"challenge_id", d.challenge_id}, {"hd", d.hd},
       {"threshold", d.threshold}, {"accept", d.accept}};
}

void to_json(json& j, const ErrorRates& r) {
  j = {{"length", r.length},
       {"threshold", r.threshold},
       {"threshold_count", r.threshold_count},
       {"d_intra", r.d_intra},
       {"d_inter", r.d_inter},
       {"reading", r.reading == RateReading::kStandard ? "standard" : "as_printed"},
       {"far", r.far},
       {"frr", r.frr}};
}

json puf_descriptor(const VirtualPuf& puf) {
  return {{"kind", "virtual_puf"},
          {"format_version", kDescriptorFormatVersion},
          {"generator", kGeneratorName},
          {"puf_id", puf.puf_id},
          {"seed", puf.seed},
          {"params", puf.params}};
}

VirtualPuf puf_from_descriptor(const json& j) {
  check_kind(j, "virtual_puf");
  try {
    if (j.value("generator", std::string(kGeneratorName)) != kGeneratorName)
      throw FormatError("descriptor: generated by a different generator");
    SurfaceParams params;
    j.at("params").get_to(params);
    return mint_puf(j.at("seed").get<std::uint64_t>(), params, j.at("puf_id").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("puf descriptor: ") + e.what());
  }
}

json challenge_descriptor(const Challenge& c) {
  return {{"kind", "challenge"},
          {"format_version", kDescriptorFormatVersion},
          {"generator", kGeneratorName},
          {"challenge_id", c.challenge_id},
          {"seed", c.seed},
          {"dims", c.dims}};
}

Challenge challenge_from_descriptor(const json& j) {
  check_kind(j, "challenge");
  try {
    return make_challenge(j.at("seed").get<std::uint64_t>(), j.at("dims").get<Dims>(),
                          j.at("challenge_id").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("challenge descriptor: ") + e.what());
  }
}

json read_json(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  const std::string text = j.dump(2) + "\n";
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace specklepuf
