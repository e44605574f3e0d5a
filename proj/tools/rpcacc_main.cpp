// rpcacc: schema compiler and simulator driver.
//
//   rpcacc compile <proto> -o <table> [--report <file>]
//   rpcacc run --workload <spec> --schema <table> --mode <strategy> ...
//   rpcacc scenario <name> [--out <json>]
//   rpcacc workload gen --spec <spec> --seed <n> --out <dir>
//
// Exit codes: 0 success, 1 scenario criterion failed, 2 usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpcacc/pipeline.hpp"
#include "rpcacc/proto_parser.hpp"
#include "rpcacc/reference.hpp"
#include "rpcacc/scenario.hpp"
#include "rpcacc/schema_io.hpp"

namespace fs = std::filesystem;
using namespace rpcacc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write '" + path + "'");
  out << data;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

int cmd_compile(const std::string& proto_path, const std::string& out_path,
                const std::string& report_path) {
  CompileResult result = compile_proto_text(read_file(proto_path));
  write_file(out_path, serialize_schema_table(result.table));
  if (!report_path.empty()) {
    write_file(report_path, result.report);
  }
  std::cout << "compiled " << result.table.size() << " message classes -> " << out_path << "\n";
  return 0;
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "cpu-only") return Strategy::kCpuOnly;
  if (name == "accel-only") return Strategy::kAccelOnly;
  if (name == "memory-affinity") return Strategy::kMemoryAffinity;
  throw Error(ErrorCode::kConfigError, "unknown mode '" + name + "'");
}

int cmd_run(const std::string& workload_path, const std::string& schema_path,
            const std::string& mode, const std::string& link, const std::string& deser_mode,
            std::uint64_t seed, bool seed_set, const std::string& out_path,
            const std::string& csv_path) {
  auto kv = parse_kv_file(workload_path);
  WorkloadSpec spec = workload_spec_from_kv(kv);
  if (seed_set) spec.seed = seed;

  SimConfig cfg = sim_config_from_kv(kv);
  if (link != "custom") {
    cfg.link = LinkConfig::profile(link);
  }

  auto image = read_file(schema_path);
  SchemaTable table = load_schema_table(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(image.data()),
                                    image.size()));

  Workload workload = generate_workload(spec, std::move(table));
  Pipeline pipe(cfg, workload.table);
  PipelineOptions opts;
  opts.strategy = strategy_from_name(mode);
  opts.deser_mode =
      deser_mode == "field-by-field" ? DeserMode::kFieldByField : DeserMode::kOneShot;

  SimReport report = pipe.run(workload, opts);
  report.seed = spec.seed;
  report.link_profile = link;

  std::string json = report.to_json();
  if (out_path.empty()) {
    std::cout << json;
  } else {
    write_file(out_path, json);
    std::cout << "wrote " << report.rows.size() << " request rows -> " << out_path << "\n";
  }
  if (!csv_path.empty()) {
    write_file(csv_path, report.to_csv());
  }
  return 0;
}

int cmd_scenario(const std::string& name, const std::string& out_path) {
  SimReport report = run_scenario(name);
  for (const auto& c : report.criteria) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) std::cout << " -- " << c.detail;
    std::cout << "\n";
  }
  if (!out_path.empty()) {
    write_file(out_path, report.to_json());
  }
  return report.all_criteria_pass() ? 0 : 1;
}

int cmd_workload_gen(const std::string& spec_path, std::uint64_t seed, bool seed_set,
                     const std::string& out_dir) {
  auto kv = parse_kv_file(spec_path);
  WorkloadSpec spec = workload_spec_from_kv(kv);
  if (seed_set) spec.seed = seed;

  Workload workload = generate_workload(spec);
  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / "schema.rpcacc").string(),
             serialize_schema_table(workload.table));

  nlohmann::ordered_json manifest;
  manifest["seed"] = spec.seed;
  manifest["request_count"] = workload.messages.size();
  manifest["mean_field_bytes"] = workload.stats.mean_field_bytes;
  manifest["mean_depth"] = workload.stats.mean_depth;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();

  for (std::size_t i = 0; i < workload.messages.size(); ++i) {
    const MessageValue& msg = workload.messages[i];
    wire::Bytes bytes = ref_encode(msg, workload.table);
    char name[32];
    std::snprintf(name, sizeof(name), "msg_%04zu.bin", i);
    write_file((fs::path(out_dir) / name).string(), bytes);
    files.push_back({{"file", name}, {"class_id", msg.class_id}, {"bytes", bytes.size()}});
  }
  manifest["messages"] = std::move(files);
  write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << "materialized " << workload.messages.size() << " messages -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RPC accelerator simulator"};
  app.require_subcommand(1);

  // compile
  std::string proto_path, table_out, report_path;
  auto* compile_cmd = app.add_subcommand("compile", "compile a .proto schema to a table image");
  compile_cmd->add_option("proto", proto_path, "input .proto file")->required();
  compile_cmd->add_option("-o,--output", table_out, "output schema table image")->required();
  compile_cmd->add_option("--report", report_path, "write a human-readable placement report");

  // run
  std::string workload_path, schema_path, out_path, csv_path;
  std::string mode = "memory-affinity";
  std::string link = "pcie";
  std::string deser_mode = "one-shot";
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "simulate a workload end to end");
  run_cmd->add_option("--workload", workload_path, "workload spec file")->required();
  run_cmd->add_option("--schema", schema_path, "compiled schema table image")->required();
  run_cmd->add_option("--mode", mode, "serialization strategy")
      ->check(CLI::IsMember({"cpu-only", "accel-only", "memory-affinity"}));
  run_cmd->add_option("--link", link, "link profile: pcie, upi, onchip-70ns or custom");
  run_cmd->add_option("--deser-mode", deser_mode, "one-shot or field-by-field")
      ->check(CLI::IsMember({"one-shot", "field-by-field"}));
  auto* seed_opt = run_cmd->add_option("--seed", seed, "workload seed override");
  run_cmd->add_option("--out", out_path, "JSON report path (stdout when omitted)");
  run_cmd->add_option("--csv", csv_path, "per-request CSV path");

  // scenario
  std::string scenario_name, scenario_out;
  auto* scen_cmd = app.add_subcommand("scenario", "run a scripted experiment");
  scen_cmd->add_option("name", scenario_name, "scenario name")
      ->required()
      ->check(CLI::IsMember(scenario_names()));
  scen_cmd->add_option("--out", scenario_out, "JSON report path");

  // workload gen
  std::string gen_spec, gen_out;
  std::uint64_t gen_seed = 0;
  auto* wl_cmd = app.add_subcommand("workload", "workload utilities");
  auto* gen_cmd = wl_cmd->add_subcommand("gen", "materialize wire-format message files");
  gen_cmd->add_option("--spec", gen_spec, "workload spec file")->required();
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "workload seed override");
  gen_cmd->add_option("--out", gen_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*compile_cmd) return cmd_compile(proto_path, table_out, report_path);
    if (*run_cmd) {
      return cmd_run(workload_path, schema_path, mode, link, deser_mode, seed,
                     seed_opt->count() > 0, out_path, csv_path);
    }
    if (*scen_cmd) return cmd_scenario(scenario_name, scenario_out);
    if (*gen_cmd) {
      return cmd_workload_gen(gen_spec, gen_seed, gen_seed_opt->count() > 0, gen_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
