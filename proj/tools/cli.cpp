#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

#include "specklepuf/auth.hpp"
#include "specklepuf/crypto.hpp"
#include "specklepuf/error.hpp"
#include "specklepuf/hashing.hpp"
#include "specklepuf/pgm.hpp"
#include "specklepuf/pipeline.hpp"
#include "specklepuf/serialization.hpp"

namespace specklepuf::cli {

namespace {

using nlohmann::json;

void add_surface_options(CLI::App* cmd, SurfaceParams& p) {
  cmd->add_option("--rows", p.grid.rows, "Token grid rows")->capture_default_str();
  cmd->add_option("--cols", p.grid.cols, "Token grid columns")->capture_default_str();
  cmd->add_option("--pitch", p.pitch_um, "Micrometres per pixel")->capture_default_str();
  cmd->add_option("--correlation-length", p.correlation_length_um, "Lateral feature scale (um)")
      ->capture_default_str();
  cmd->add_option("--rms-height", p.rms_height_um, "RMS surface height (um)")->capture_default_str();
  cmd->add_option("--refractive-index", p.refractive_index, "Film refractive index")->capture_default_str();
}

void add_optics_options(CLI::App* cmd, OpticsConfig& o) {
  cmd->add_option("--wavelength", o.wavelength_um, "Wavelength (um)")->capture_default_str();
  cmd->add_option("--z1", o.z1_um, "Modulator to token distance (um)")->capture_default_str();
  cmd->add_option("--z2", o.z2_um, "Token to detector distance (um)")->capture_default_str();
  cmd->add_option("--detector-rows", o.detector.rows, "Detector rows")->capture_default_str();
  cmd->add_option("--detector-cols", o.detector.cols, "Detector columns")->capture_default_str();
  cmd->add_option("--detector-bits", o.detector_bits, "Quantisation depth (8, 12 or 16)")->capture_default_str();
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

int report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
  return kExitError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optical PUF simulation, key extraction, authentication and XOR-pad tools", "specklepuf"};
  app.require_subcommand(1);
  int status = kExitOk;

  // mint
  std::uint64_t seed = 0;
  std::string id, out_path;
  SurfaceParams surface;
  auto* mint = app.add_subcommand("mint", "Mint a virtual token and write its descriptor");
  mint->add_option("--seed", seed, "64-bit token seed")->required();
  mint->add_option("--id", id, "Token identifier (default derived from the seed)");
  mint->add_option("--out", out_path, "Descriptor JSON path")->required();
  add_surface_options(mint, surface);
  mint->callback([&] {
    const VirtualPuf puf = id.empty() ? mint_puf(seed, surface) : mint_puf(seed, surface, id);
    const json d = puf_descriptor(puf);
    write_json(out_path, d);
    emit(out, d);
  });

  // challenge
  Dims ch_dims{256, 256};
  auto* chal = app.add_subcommand("challenge", "Create a random phase challenge descriptor");
  chal->add_option("--seed", seed, "64-bit challenge seed")->required();
  chal->add_option("--id", id, "Challenge identifier (default derived from the seed)");
  chal->add_option("--rows", ch_dims.rows, "Modulator rows")->capture_default_str();
  chal->add_option("--cols", ch_dims.cols, "Modulator columns")->capture_default_str();
  chal->add_option("--out", out_path, "Descriptor JSON path")->required();
  chal->callback([&] {
    const Challenge c = id.empty() ? make_challenge(seed, ch_dims) : make_challenge(seed, ch_dims, id);
    const json d = challenge_descriptor(c);
    write_json(out_path, d);
    emit(out, d);
  });

  // speckle
  std::string puf_path, challenge_path;
  OpticsConfig optics;
  JitterParams jitter;
  double max_shift = JitterModel{}.max_shift_um;
  auto* speckle = app.add_subcommand("speckle", "Render a speckle pattern to PGM");
  speckle->add_option("--puf", puf_path, "Token descriptor")->required();
  speckle->add_option("--challenge", challenge_path, "Challenge descriptor")->required();
  speckle->add_option("--out", out_path, "Output PGM")->required();
  speckle->add_option("--dx", jitter.dx_um, "Token shift along x (um)");
  speckle->add_option("--dy", jitter.dy_um, "Token shift along y (um)");
  speckle->add_option("--noise", jitter.noise_sigma, "Detector noise, fraction of full scale");
  speckle->add_option("--noise-seed", jitter.noise_seed, "Detector noise seed");
  speckle->add_option("--max-shift", max_shift, "Largest accepted shift (um)")->capture_default_str();
  add_optics_options(speckle, optics);
  speckle->callback([&] {
    const VirtualPuf puf = puf_from_descriptor(read_json(puf_path));
    const Challenge ch = challenge_from_descriptor(read_json(challenge_path));
    const SpecklePattern p = remeasure(puf, ch, optics, jitter, max_shift);
    write_pgm(out_path, to_image(p));
    emit(out, {{"pattern", out_path}, {"dims", p.dims}, {"bits", p.bits},
               {"puf_id", p.puf_id}, {"challenge_id", p.challenge_id}, {"jitter", p.jitter}});
  });

  // hash
  std::string pattern_path;
  GaborKernel kernel;
  double wavelength_px = 0.0, sigma_px = 0.0;
  std::size_t stride = 1;
  auto* hash = app.add_subcommand("hash", "Gabor-hash a PGM speckle pattern into a key file");
  hash->add_option("--pattern", pattern_path, "Input PGM")->required();
  hash->add_option("--out", out_path, "Output key file (.bpk)")->required();
  hash->add_option("--size", kernel.size, "Kernel size (odd)")->capture_default_str();
  hash->add_option("--wavelength", wavelength_px, "Carrier period in pixels (default: twice the grain)");
  hash->add_option("--sigma", sigma_px, "Envelope sigma in pixels (default: half the period)");
  hash->add_option("--orientation", kernel.orientation, "Carrier orientation (rad)")->capture_default_str();
  hash->add_option("--stride", stride, "Keep every n-th response sample")->capture_default_str();
  hash->callback([&] {
    const SpecklePattern p = from_image(read_pgm(pattern_path));
    GaborKernel k = wavelength_px > 0.0 ? GaborKernel{kernel.size, wavelength_px, wavelength_px / 2.0, kernel.orientation}
                                        : kernel_for_grain(estimate_grain_px(p), kernel.size, kernel.orientation);
    if (sigma_px > 0.0) k.sigma_px = sigma_px;
    const BinaryKey key = hash_speckle(p, k, stride);
    write_key(out_path, key);
    emit(out, {{"key", out_path}, {"dims", key.dims()}, {"length", key.length()}, {"kernel", k},
               {"ones_fraction", static_cast<double>(key.popcount()) / static_cast<double>(key.length())}});
  });

  // fleet
  std::string config_path, out_dir;
  std::optional<std::size_t> fleet_size, remeasure_count, workers;
  std::optional<std::uint64_t> fleet_seed;
  bool camera_scale = false, no_keys = false;
  auto* fleet = app.add_subcommand("fleet", "Run the fleet experiment and write a metrics report");
  fleet->add_option("--config", config_path, "RunConfig JSON");
  fleet->add_option("--out", out_dir, "Output directory (overrides the config)");
  fleet->add_option("--fleet-size", fleet_size, "Number of tokens");
  fleet->add_option("--remeasure", remeasure_count, "Remeasurements of token 0 (0 disables)");
  fleet->add_option("--seed", fleet_seed, "Fleet seed");
  fleet->add_option("--workers", workers, "Worker threads (0 = all cores)");
  fleet->add_flag("--camera-scale", camera_scale, "Use 1280x1024 grids");
  fleet->add_flag("--no-keys", no_keys, "Skip writing key files");
  fleet->callback([&] {
    RunConfig cfg = config_path.empty() ? RunConfig{} : run_config_from_json(read_json(config_path));
    if (camera_scale) cfg.use_camera_scale();
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (fleet_size) cfg.fleet_size = *fleet_size;
    if (remeasure_count) cfg.remeasure_count = *remeasure_count;
    if (fleet_seed) cfg.fleet_seed = *fleet_seed;
    if (workers) cfg.workers = *workers;
    if (no_keys) cfg.write_keys = false;
    const FleetResult res = run_fleet(cfg);
    json summary = {{"output_dir", cfg.output_dir},
                    {"pairs", res.inter.pair_count},
                    {"inter_mean", res.inter.mean},
                    {"inter_variance", res.inter.variance},
                    {"dof", res.report.at("dof")},
                    {"entropy_x", res.mean_entropy_x},
                    {"entropy_y", res.mean_entropy_y},
                    {"max_inter_correlation", res.max_inter_correlation}};
    if (res.intra) {
      summary["intra_mean"] = res.intra->mean;
      summary["min_intra_correlation"] = res.min_intra_correlation;
      summary["threshold"] = res.report.at("threshold");
    }
    emit(out, summary);
  });

  // enroll
  std::string store_path, key_path, timestamp;
  auto* enroll = app.add_subcommand("enroll", "Register a challenge-response pair");
  enroll->add_option("--store", store_path, "Store directory")->required();
  enroll->add_option("--puf-id", id, "Token identifier")->required();
  enroll->add_option("--challenge", challenge_path, "Challenge descriptor")->required();
  enroll->add_option("--key", key_path, "Enrolled key (.bpk)")->required();
  enroll->add_option("--timestamp", timestamp, "Enrollment time (default: now, UTC)");
  enroll->callback([&] {
    CrpStore store(store_path);
    const Challenge ch = challenge_from_descriptor(read_json(challenge_path));
    const CrpRecord rec = store.enroll(id, ch, read_key(key_path),
                                       timestamp.empty() ? std::nullopt : std::optional(timestamp));
    emit(out, {{"puf_id", rec.puf_id}, {"challenge_id", rec.challenge_id}, {"key_length", rec.key.length()},
               {"enrolled_at", rec.enrolled_at}, {"records", store.size()}});
  });

  // verify
  std::string challenge_id;
  double threshold = 0.388;
  std::optional<std::uint64_t> select_seed;
  auto* ver = app.add_subcommand("verify", "Check a candidate key against an enrolled pair");
  ver->add_option("--store", store_path, "Store directory")->required();
  ver->add_option("--puf-id", id, "Token identifier")->required();
  auto* cid = ver->add_option("--challenge-id", challenge_id, "Enrolled challenge identifier");
  ver->add_option("--select-seed", select_seed, "Pick an enrolled challenge at random with this seed")->excludes(cid);
  ver->add_option("--key", key_path, "Candidate key (.bpk)")->required();
  ver->add_option("--threshold", threshold, "Accept when HD < threshold")->capture_default_str();
  ver->callback([&] {
    const CrpStore store(store_path);
    if (select_seed) {
      challenge_id = select_challenge(store, id, *select_seed).challenge_id;
    } else if (challenge_id.empty()) {
      throw ParameterError("verify: need --challenge-id or --select-seed");
    }
    const AuthDecision d = verify(store, id, challenge_id, read_key(key_path), threshold);
    emit(out, d);
    status = d.accept ? kExitOk : kExitReject;
  });

  // far-frr
  std::int64_t length = 1'310'720;
  double d_intra = 0.016, d_inter = 0.499;
  bool as_printed = false;
  threshold = 0.388;
  auto* rates = app.add_subcommand("far-frr", "Binomial-tail false accept and false reject rates");
  rates->add_option("--length", length, "Key length L in bits")->capture_default_str();
  rates->add_option("--threshold", threshold, "Decision threshold T")->capture_default_str();
  rates->add_option("--d-intra", d_intra, "Mean intra-HD")->capture_default_str();
  rates->add_option("--d-inter", d_inter, "Mean inter-HD")->capture_default_str();
  rates->add_flag("--as-printed", as_printed, "Pair FAR with the intra mean and FRR with the inter mean");
  rates->callback([&] {
    emit(out, far_frr(length, threshold, d_intra, d_inter, as_printed ? RateReading::kAsPrinted : RateReading::kStandard));
  });

  // dict
  std::string key_a_path, key_b_path;
  auto* dict = app.add_subcommand("dict", "Publish the XOR dictionary of two keys");
  dict->add_option("--key-a", key_a_path, "Sender key")->required();
  dict->add_option("--key-b", key_b_path, "Listener key")->required();
  dict->add_option("--out", out_path, "Dictionary file (.bpd)")->required();
  dict->callback([&] {
    const PublicDictionary d = build_dictionary(read_key(key_a_path), read_key(key_b_path));
    write_dictionary(out_path, d);
    emit(out, {{"dictionary", out_path}, {"length", d.bits.length()},
               {"ones_fraction", static_cast<double>(d.bits.popcount()) / static_cast<double>(d.bits.length())}});
  });

  // encrypt
  std::string in_path, cursor_path, key_id = "A", dict_id;
  std::uint32_t challenge_index = 0;
  auto* enc = app.add_subcommand("encrypt", "XOR a file with the sender key");
  enc->add_option("--in", in_path, "Plaintext file")->required();
  enc->add_option("--key", key_path, "Sender key (.bpk)")->required();
  enc->add_option("--out", out_path, "Ciphertext file (.bpc)")->required();
  enc->add_option("--key-id", key_id, "Sender key identifier")->capture_default_str();
  enc->add_option("--dict-id", dict_id, "Dictionary identifier recorded in the header");
  enc->add_option("--challenge-index", challenge_index, "Challenge index recorded in the header");
  enc->add_option("--cursor", cursor_path, "Pad usage cursor; enables multi-message use of one key");
  enc->callback([&] {
    const std::vector<std::uint8_t> message = read_file(in_path);
    const BinaryKey key = read_key(key_path);
    Ciphertext c;
    if (cursor_path.empty()) {
      c = encrypt(message, key, key_id);
      c.challenge_index = challenge_index;
    } else {
      KeyPad pad(key, key_id, KeyPad::load_cursor(cursor_path, key_id));
      c = pad.encrypt(message, challenge_index);
      pad.save_cursor(cursor_path);
    }
    c.dict_id = dict_id;
    write_file_atomic(out_path, encode_ciphertext(c));
    emit(out, {{"ciphertext", out_path}, {"message_bytes", c.message_length},
               {"key_byte_offset", c.chunks.empty() ? 0 : c.chunks.front().key_byte_offset}});
  });

  // decrypt
  std::string dict_path;
  auto* dec = app.add_subcommand("decrypt", "Recover a message with the listener key and the dictionary");
  dec->add_option("--in", in_path, "Ciphertext file (.bpc)")->required();
  dec->add_option("--key", key_path, "Listener key (.bpk)")->required();
  dec->add_option("--dict", dict_path, "Dictionary file (.bpd)")->required();
  dec->add_option("--out", out_path, "Plaintext output")->required();
  dec->callback([&] {
    const Ciphertext c = decode_ciphertext(read_file(in_path));
    const std::vector<std::uint8_t> m = decrypt(c, read_key(key_path), read_dictionary(dict_path));
    write_file_atomic(out_path, m);
    emit(out, {{"plaintext", out_path}, {"message_bytes", m.size()}});
  });

  // demo
  std::string image_path, wrong_key_path;
  auto* demo = app.add_subcommand("demo", "Encrypt, transmit and decrypt a PGM image");
  demo->add_option("--image", image_path, "Input PGM")->required();
  demo->add_option("--key-a", key_a_path, "Sender key")->required();
  demo->add_option("--key-b", key_b_path, "Listener key")->required();
  demo->add_option("--out", out_dir, "Output directory")->required();
  demo->add_option("--wrong-key", wrong_key_path, "Decrypt with this key instead of key B");
  demo->callback([&] {
    std::optional<BinaryKey> wrong;
    if (!wrong_key_path.empty()) wrong = read_key(wrong_key_path);
    const DemoReport rep = demo_encrypt(image_path, read_key(key_a_path), read_key(key_b_path), out_dir, wrong);
    emit(out, rep.to_json());
    status = rep.bytes_equal ? kExitOk : kExitReject;
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage_error", e.what());
  } catch (const Error& e) {
    return report_error(err, error_code_name(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error(err, error_code_name(ErrorCode::kIo), e.what());
  }
  return status;
}

}  // namespace specklepuf::cli
