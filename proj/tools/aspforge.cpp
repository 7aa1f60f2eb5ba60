// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// aspforge: fixture builder, boot runner, attack drivers, and report
// tooling for the secure-processor trust-chain simulator.
//
// Exit codes: 0 success, 1 usage, 2 file/format error, 3 scenario failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aspforge/attack/badfuse.hpp"
#include "aspforge/attack/forge.hpp"
#include "aspforge/attack/milanlaunchy.hpp"
#include "aspforge/attest/kds.hpp"
#include "aspforge/scenario.hpp"

namespace {

using namespace aspforge;
using nlohmann::json;

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ScenarioFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, BytesView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw FileError("write failed: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, str_view(text));
}

json parse_json_file(const std::string& path) {
  auto data = read_file(path);
  json j = json::parse(data.begin(), data.end(), nullptr, false);
  if (j.is_discarded()) throw FileError("invalid JSON in " + path);
  return j;
}

fuse::FuseArray load_fuses(const std::string& path) {
  auto data = read_file(path);
  auto f = fuse::FuseArray::from_json(
      std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
  if (!f) throw FileError("invalid fuse state file: " + path);
  return std::move(*f);
}

fw::FlashImage load_flash(const std::string& path) {
  auto data = read_file(path);
  auto parsed = fw::parse_flash(as_view(data));
  if (std::holds_alternative<fw::ParseError>(parsed))
    throw FileError("invalid flash image: " + path);
  return std::get<fw::FlashImage>(std::move(parsed));
}

ScenarioConfig load_config(const std::string& path, uint64_t rng_seed,
                           bool seed_explicit) {
  ScenarioConfig cfg;
  cfg.rng_seed = rng_seed;
  if (!path.empty()) {
    auto parsed = ScenarioConfig::from_json(parse_json_file(path));
    if (!parsed) throw FileError("invalid scenario config: " + path);
    cfg = *parsed;
    if (seed_explicit) cfg.rng_seed = rng_seed;
  }
  return cfg;
}

attest::TcbVersion parse_tcb(const std::string& text) {
  unsigned a = 0, b = 0, c = 0;
  if (std::sscanf(text.c_str(), "%u,%u,%u", &a, &b, &c) != 3 || a > 255 || b > 255 ||
      c > 255)
    throw FileError("bad --tcb value (want a,b,c with each in 0..255): " + text);
  return {static_cast<uint8_t>(a), static_cast<uint8_t>(b), static_cast<uint8_t>(c)};
}

template <size_t N>
std::array<uint8_t, N> parse_hex_padded(const std::string& hex, const char* what) {
  auto bytes = from_hex(hex);
  if (!bytes || bytes->size() > N)
    throw FileError(std::string("bad hex for ") + what);
  std::array<uint8_t, N> out{};
  std::copy(bytes->begin(), bytes->end(), out.begin());
  return out;
}

json rsa_key_to_json(const crypto::RsaKeyPair& key) {
  return json{{"kind", "rsa4096"},       {"n", to_hex(as_view(key.n))},
              {"e", key.e},              {"d", to_hex(as_view(key.d))},
              {"p", to_hex(as_view(key.p))},   {"q", to_hex(as_view(key.q))},
              {"dp", to_hex(as_view(key.dp))}, {"dq", to_hex(as_view(key.dq))},
              {"qinv", to_hex(as_view(key.qinv))}};
}

crypto::RsaKeyPair rsa_key_from_json(const json& j) {
  if (j.value("kind", "") != "rsa4096") throw FileError("key file is not an rsa4096 key");
  crypto::RsaKeyPair key;
  auto field = [&j](const char* name) {
    auto v = from_hex(j.at(name).get<std::string>());
    if (!v) throw FileError("bad hex in key file");
    return *v;
  };
  key.n = field("n");
  key.e = j.at("e").get<uint32_t>();
  key.d = field("d");
  key.p = field("p");
  key.q = field("q");
  key.dp = field("dp");
  key.dq = field("dq");
  key.qinv = field("qinv");
  return key;
}

attack::ExtractedMaterial load_material(const std::string& path) {
  auto j = parse_json_file(path);
  auto m = attack::ExtractedMaterial::from_json(j);
  if (!m && j.contains("material"))
    m = attack::ExtractedMaterial::from_json(j["material"]);
  if (!m) throw FileError("no usable seed material in " + path);
  return *m;
}

uint64_t env_seed_default() {
  const char* env = std::getenv("ASPFORGE_RNG_SEED");
  if (!env) return 0;
  return std::strtoull(env, nullptr, 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EPYC-Milan-style trust-chain simulator and attack toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  uint64_t rng_seed = env_seed_default();
  auto* seed_opt = app.add_option("--rng-seed", rng_seed,
                                  "Deterministic seed for all randomness (env "
                                  "ASPFORGE_RNG_SEED, default 0)");

  int exit_code = 0;
  std::function<void()> action;

  // ---- fuses init ----
  auto* fuses_cmd = app.add_subcommand("fuses", "Fuse-state fixtures");
  auto* fuses_init = fuses_cmd->add_subcommand("init", "Create a factory fuse file");
  {
    auto vcek_hex = std::make_shared<std::string>();
    auto cek_hex = std::make_shared<std::string>();
    auto random = std::make_shared<bool>(false);
    auto redundancy = std::make_shared<bool>(false);
    auto write_protect = std::make_shared<bool>(false);
    auto out_path = std::make_shared<std::string>();
    fuses_init->add_option("--vcek-seed", *vcek_hex, "VCEK root seed (64 hex chars)");
    fuses_init->add_option("--cek-seed", *cek_hex, "CEK root seed (64 hex chars)");
    fuses_init->add_flag("--random", *random, "Draw seeds from --rng-seed (default)");
    fuses_init->add_flag("--enable-vcek-redundancy", *redundancy,
                         "Provision VCEK ECC + Fletcher-32 + enable bits");
    fuses_init->add_flag("--write-protect", *write_protect,
                         "Enable the secret-region write-protect mitigation");
    fuses_init->add_option("-o,--output", *out_path, "Output fuse file")->required();
    fuses_init->callback([=, &rng_seed, &action] {
      action = [=, &rng_seed] {
        std::optional<attest::Seed32> vcek, cek;
        if (!vcek_hex->empty()) {
          auto v = fixed_from_hex<32>(*vcek_hex);
          if (!v) throw FileError("--vcek-seed must be 64 hex chars");
          vcek = *v;
        }
        if (!cek_hex->empty()) {
          auto v = fixed_from_hex<32>(*cek_hex);
          if (!v) throw FileError("--cek-seed must be 64 hex chars");
          cek = *v;
        }
        auto fuses = make_factory_fuses(rng_seed, *redundancy, *write_protect, vcek, cek);
        write_text(*out_path, fuses.to_json());
        std::printf("wrote %s (popcount=%llu)\n", out_path->c_str(),
                    static_cast<unsigned long long>(fuses.popcount()));
      };
    });
  }

  // ---- flash build ----
  auto* flash_cmd = app.add_subcommand("flash", "Flash-image fixtures");
  auto* flash_build = flash_cmd->add_subcommand("build", "Build a vendor flash image");
  {
    auto arch = std::make_shared<std::string>("zen3");
    auto bl = std::make_shared<unsigned>(0);
    auto sevfw = std::make_shared<unsigned>(0);
    auto ucode = std::make_shared<unsigned>(0);
    auto encrypt = std::make_shared<bool>(false);
    auto out_path = std::make_shared<std::string>();
    flash_build->add_option("--arch", *arch, "zen1|zen3|zen45")->required();
    flash_build->add_option("--bl-svn", *bl, "Bootloader SVN")->required();
    flash_build->add_option("--sevfw-svn", *sevfw, "SEV firmware SVN")->required();
    flash_build->add_option("--ucode-svn", *ucode, "Microcode SVN")->required();
    flash_build->add_flag("--encrypt", *encrypt, "Encrypt firmware bodies");
    flash_build->add_option("-o,--output", *out_path, "Output flash file")->required();
    flash_build->callback([=, &rng_seed, &action] {
      action = [=, &rng_seed] {
        auto scheme = scheme_from_string(*arch);
        if (!scheme) throw FileError("bad --arch (want zen1|zen3|zen45)");
        if (*bl > 255 || *sevfw > 255 || *ucode > 255)
          throw FileError("SVN values must be in 0..255");
        FlashBuildSpec spec;
        spec.arch = *scheme;
        spec.bl_svn = static_cast<uint8_t>(*bl);
        spec.sevfw_svn = static_cast<uint8_t>(*sevfw);
        spec.ucode_svn = static_cast<uint8_t>(*ucode);
        spec.encrypt = *encrypt;
        auto image = build_standard_flash(make_platform(rng_seed), spec);
        write_file(*out_path, as_view(serialize_flash(image)));
        std::printf("wrote %s (%zu entries)\n", out_path->c_str(), image.entries.size());
      };
    });
  }

  // ---- boot ----
  auto* boot_cmd = app.add_subcommand("boot", "Run one cold boot");
  {
    auto fuses_path = std::make_shared<std::string>();
    auto flash_path = std::make_shared<std::string>();
    auto config_path = std::make_shared<std::string>();
    auto as_json = std::make_shared<bool>(false);
    auto save_fuses = std::make_shared<std::string>();
    auto events_path = std::make_shared<std::string>();
    boot_cmd->add_option("--fuses", *fuses_path, "Fuse state file")->required();
    boot_cmd->add_option("--flash", *flash_path, "Flash image file")->required();
    boot_cmd->add_option("--config", *config_path, "Scenario config JSON");
    boot_cmd->add_flag("--json", *as_json, "Print the full BootOutcome JSON");
    boot_cmd->add_option("--save-fuses", *save_fuses, "Write post-boot fuse state");
    boot_cmd->add_option("--events", *events_path,
                         "Write the event log as line-delimited JSON");
    boot_cmd->callback([=, &rng_seed, &action] {
      action = [=, &rng_seed] {
        auto cfg = load_config(*config_path, rng_seed, seed_opt->count() > 0);
        auto fuses = load_fuses(*fuses_path);
        auto flash = load_flash(*flash_path);
        auto bcfg = make_bootrom_config(make_platform(cfg.rng_seed), cfg);
        auto outcome = boot::boot(fuses, flash, bcfg);
        if (*as_json) {
          std::cout << outcome.to_json().dump(2) << "\n";
        } else {
          std::printf("stage=%s x86_boot_ok=%s", to_string(outcome.stage),
                      outcome.x86_boot_ok ? "true" : "false");
          if (outcome.bl_svn) std::printf(" bl_svn=%u", *outcome.bl_svn);
          if (outcome.code_exec_event)
            std::printf(" code_exec@0x%x", outcome.code_exec_event->branch_target);
          std::printf("\n");
        }
        if (!save_fuses->empty()) write_text(*save_fuses, fuses.to_json());
        if (!events_path->empty()) write_text(*events_path, outcome.event_log_ndjson());
      };
    });
  }

  // ---- attack ----
  auto* attack_cmd = app.add_subcommand("attack", "Attack drivers");
  auto* ml_cmd = attack_cmd->add_subcommand(
      "milanlaunchy", "Known-key misdecryption exploit (code execution)");
  {
    auto bits = std::make_shared<unsigned>(16);
    auto fuses_path = std::make_shared<std::string>();
    auto legacy_path = std::make_shared<std::string>();
    auto config_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto save_fuses = std::make_shared<std::string>();
    ml_cmd->add_option("--bits", *bits, "Collision prefix width (default 16; 32 = exact word)")
        ->check(CLI::Range(0u, 32u));
    ml_cmd->add_option("--fuses", *fuses_path, "Fuse state file")->required();
    ml_cmd->add_option("--flash-legacy", *legacy_path, "Legacy encrypted flash image")
        ->required();
    ml_cmd->add_option("--config", *config_path, "Scenario config JSON");
    ml_cmd->add_option("-o,--output", *out_path, "Transcript JSON")->required();
    ml_cmd->add_option("--save-fuses", *save_fuses, "Write post-attack fuse state");
    ml_cmd->callback([=, &rng_seed, &action] {
      action = [=, &rng_seed] {
        auto cfg = load_config(*config_path, rng_seed, seed_opt->count() > 0);
        auto fuses = load_fuses(*fuses_path);
        auto legacy = load_flash(*legacy_path);
        auto bcfg = make_bootrom_config(make_platform(cfg.rng_seed), cfg);

        boot::PayloadRegistry hooks;
        hooks[attack::kExfilPayloadId] = attack::make_exfil_payload();
        auto run = attack::run_milanlaunchy(fuses, legacy, bcfg, *bits, cfg.rng_seed,
                                            attack::kExfilPayloadId, hooks);

        json out = run.transcript;
        if (run.success) {
          auto exfil = attack::ExfilRecord::parse(as_view(run.outcome.dram_out));
          if (exfil) {
            attack::ExtractedMaterial mat;
            mat.layer1_seed = exfil->layer1;
            mat.rollback_seed = exfil->rollback;
            mat.cur = run.outcome.bl_svn.value_or(0);
            mat.chip_id = attest::chip_id_from_cek(as_view(exfil->cek_public));
            out["material"] = mat.to_json();
          }
        }
        write_text(*out_path, out.dump(2) + "\n");
        if (!save_fuses->empty()) write_text(*save_fuses, fuses.to_json());
        if (!run.success) throw ScenarioFailure(run.failure);
        std::printf("code execution at 0x%x after %llu trials; transcript: %s\n",
                    run.outcome.code_exec_event->branch_target,
                    static_cast<unsigned long long>(run.trials), out_path->c_str());
      };
    });
  }

  auto* pk_cmd = attack_cmd->add_subcommand(
      "badfuse-pk", "Attack I: burn an attacker root key digest (Custom_PK)");
  {
    auto bits = std::make_shared<unsigned>(16);
    auto fuses_path = std::make_shared<std::string>();
    auto key_path = std::make_shared<std::string>();
    auto legacy_path = std::make_shared<std::string>();
    auto config_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto save_fuses = std::make_shared<std::string>();
    pk_cmd->add_option("--fuses", *fuses_path, "Fuse state file")->required();
    pk_cmd->add_option("--attacker-key", *key_path, "Attacker RSA key JSON (see keygen)")
        ->required();
    pk_cmd->add_option("--bits", *bits, "Collision prefix width")->check(CLI::Range(0u, 32u));
    pk_cmd->add_option("--flash-legacy", *legacy_path,
                       "Legacy encrypted flash (default: synthesized)");
    pk_cmd->add_option("--config", *config_path, "Scenario config JSON");
    pk_cmd->add_option("-o,--output", *out_path, "Material JSON")->required();
    pk_cmd->add_option("--save-fuses", *save_fuses, "Write post-attack fuse state");
    pk_cmd->callback([=, &rng_seed, &action] {
      action = [=, &rng_seed] {
        auto cfg = load_config(*config_path, rng_seed, seed_opt->count() > 0);
        const auto& platform = make_platform(cfg.rng_seed);
        auto fuses = load_fuses(*fuses_path);
        auto legacy = legacy_path->empty() ? build_legacy_flash(platform, cfg.arch)
                                           : load_flash(*legacy_path);
        auto attacker = rsa_key_from_json(parse_json_file(*key_path));
        auto bcfg = make_bootrom_config(platform, cfg);

        auto result = attack::badfuse_custom_pk(fuses, legacy, bcfg, attacker, *bits,
                                                cfg.rng_seed);
        if (result.error == attack::AttackError::None) {
          attack::ExtractedMaterial mat;
          mat.layer1_seed = result.layer1_at_255;
          mat.rollback_seed = result.rollback_at_255;
          mat.cur = 255;
          mat.chip_id = result.chip_id;
          json out = mat.to_json();
          out["transcript"] = result.transcript;
          write_text(*out_path, out.dump(2) + "\n");
        }
        if (!save_fuses->empty()) write_text(*save_fuses, fuses.to_json());
        if (result.error != attack::AttackError::None)
          throw ScenarioFailure(attack::to_string(result.error));
        std::printf("SVN-255 material extracted; material: %s\n", out_path->c_str());
      };
    });
  }

  auto* oracle_cmd = attack_cmd->add_subcommand(
      "badfuse-oracle", "Attack II: bit-by-bit root seed extraction");
  {
    auto bits = std::make_shared<unsigned>(16);
    auto fuses_path = std::make_shared<std::string>();
    auto legacy_path = std::make_shared<std::string>();
    auto config_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto save_fuses = std::make_shared<std::string>();
    oracle_cmd->add_option("--fuses", *fuses_path, "Fuse state file")->required();
    oracle_cmd->add_option("--bits", *bits, "Collision prefix width")
        ->check(CLI::Range(0u, 32u));
    oracle_cmd->add_option("--flash-legacy", *legacy_path,
                           "Legacy encrypted flash (default: synthesized)");
    oracle_cmd->add_option("--config", *config_path, "Scenario config JSON");
    oracle_cmd->add_option("-o,--output", *out_path, "Material JSON")->required();
    oracle_cmd->add_option("--save-fuses", *save_fuses, "Write post-attack fuse state");
    oracle_cmd->callback([=, &rng_seed, &action] {
      action = [=, &rng_seed] {
        auto cfg = load_config(*config_path, rng_seed, seed_opt->count() > 0);
        const auto& platform = make_platform(cfg.rng_seed);
        auto fuses = load_fuses(*fuses_path);
        auto legacy = legacy_path->empty() ? build_legacy_flash(platform, cfg.arch)
                                           : load_flash(*legacy_path);
        auto bcfg = make_bootrom_config(platform, cfg);

        auto result = attack::badfuse_oracle(fuses, legacy, bcfg, *bits, cfg.rng_seed);
        if (result.error == attack::AttackError::None) {
          attack::ExtractedMaterial mat;
          mat.root_seed = result.recovered;
          mat.chip_id = result.chip_id;
          json out = mat.to_json();
          out["transcript"] = result.transcript;
          write_text(*out_path, out.dump(2) + "\n");
        }
        if (!save_fuses->empty()) write_text(*save_fuses, fuses.to_json());
        if (result.error != attack::AttackError::None)
          throw ScenarioFailure(attack::to_string(result.error));
        std::printf("root seed recovered in %llu reboots; material: %s\n",
                    static_cast<unsigned long long>(result.reboots), out_path->c_str());
      };
    });
  }

  // ---- report forge ----
  auto* report_cmd = app.add_subcommand("report", "Attestation reports");
  auto* forge_cmd = report_cmd->add_subcommand("forge", "Forge a report from material");
  {
    auto material_path = std::make_shared<std::string>();
    auto tcb_text = std::make_shared<std::string>();
    auto measurement_hex = std::make_shared<std::string>();
    auto report_data_hex = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto as_json = std::make_shared<bool>(false);
    forge_cmd->add_option("--material", *material_path, "Material JSON from an attack")
        ->required();
    forge_cmd->add_option("--tcb", *tcb_text, "Target TCB a,b,c")->required();
    forge_cmd->add_option("--measurement", *measurement_hex, "Measurement hex (<=48 bytes)")
        ->required();
    forge_cmd->add_option("--report-data", *report_data_hex, "Report data hex (<=64 bytes)");
    forge_cmd->add_option("-o,--output", *out_path, "Output report file")->required();
    forge_cmd->add_flag("--json", *as_json, "Also print the report as JSON");
    forge_cmd->callback([=, &action] {
      action = [=] {
        auto material = load_material(*material_path);
        auto tcb = parse_tcb(*tcb_text);
        auto measurement = parse_hex_padded<48>(*measurement_hex, "--measurement");
        auto report_data = parse_hex_padded<64>(*report_data_hex, "--report-data");
        auto forged = attack::forge_report(material, tcb, measurement, report_data);
        write_file(*out_path, as_view(forged.report.to_bytes()));
        if (*as_json) std::cout << forged.report.to_json().dump(2) << "\n";
        if (!forged.seed_reachable)
          throw ScenarioFailure(
              "target bl_svn above the material's reach; report written but will not verify");
        std::printf("forged report written: %s\n", out_path->c_str());
      };
    });
  }

  // ---- kds ----
  auto* kds_cmd = app.add_subcommand("kds", "Mock key distribution service");
  auto* issue_cmd = kds_cmd->add_subcommand("issue", "Issue a VCEK certificate");
  {
    auto fuses_path = std::make_shared<std::string>();
    auto tcb_text = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    issue_cmd->add_option("--fuses", *fuses_path, "Fuse file (KDS-side enrollment view)")
        ->required();
    issue_cmd->add_option("--tcb", *tcb_text, "TCB a,b,c")->required();
    issue_cmd->add_option("-o,--output", *out_path, "Output certificate file")->required();
    issue_cmd->callback([=, &action] {
      action = [=] {
        auto fuses = load_fuses(*fuses_path);
        auto tcb = parse_tcb(*tcb_text);
        attest::Seed32 root = take<32>(as_view(fuses.raw_field(fuse::kVcekSeed)));
        attest::Seed32 cek = take<32>(as_view(fuses.raw_field(fuse::kCekSeed)));
        attest::MockKds kds;
        auto chip_id = kds.enroll(root, cek);
        auto cert = kds.issue(chip_id, tcb);
        if (!cert) throw ScenarioFailure("issue failed");
        write_file(*out_path, as_view(cert->to_bytes()));
        std::printf("issued cert for tcb %u,%u,%u: %s\n", tcb.bl_svn, tcb.sevfw_svn,
                    tcb.ucode_svn, out_path->c_str());
      };
    });
  }
  auto* verify_cmd = kds_cmd->add_subcommand("verify", "Verify a report against a cert");
  {
    auto report_path = std::make_shared<std::string>();
    auto cert_path = std::make_shared<std::string>();
    verify_cmd->add_option("--report", *report_path, "Report file")->required();
    verify_cmd->add_option("--cert", *cert_path, "Certificate file")->required();
    verify_cmd->callback([=, &action] {
      action = [=] {
        auto report_bytes = read_file(*report_path);
        auto cert_bytes = read_file(*cert_path);
        auto report = attest::AttestationReport::from_bytes(as_view(report_bytes));
        auto cert = attest::MockKdsCert::from_bytes(as_view(cert_bytes));
        if (!report) throw FileError("invalid report file");
        if (!cert) throw FileError("invalid certificate file");
        if (!attest::verify_report(*report, *cert))
          throw ScenarioFailure("report verification FAILED");
        std::printf("report VERIFIED\n");
      };
    });
  }

  // ---- keygen ----
  auto* keygen_cmd = app.add_subcommand("keygen", "Generate an attacker signing key");
  {
    auto kind = std::make_shared<std::string>("rsa");
    auto out_path = std::make_shared<std::string>();
    keygen_cmd->add_option("--kind", *kind, "Key kind (rsa)");
    keygen_cmd->add_option("-o,--output", *out_path, "Output key JSON")->required();
    keygen_cmd->callback([=, &rng_seed, &action] {
      action = [=, &rng_seed] {
        if (*kind != "rsa") throw FileError("unsupported key kind: " + *kind);
        auto rng = SeededRng::from_seed(rng_seed).fork("attacker_rsa");
        auto key = crypto::rsa4096_generate(rng);
        write_text(*out_path, rsa_key_to_json(key).dump(2) + "\n");
        std::printf("wrote %s\n", out_path->c_str());
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (action) action();
  } catch (const ScenarioFailure& e) {
    std::cerr << "scenario failure: " << e.what() << "\n";
    return 3;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
