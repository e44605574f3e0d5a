#include "rpcacc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpcacc/pipeline.hpp"
#include "rpcacc/proto_parser.hpp"
#include "rpcacc/reference.hpp"

namespace rpcacc {

namespace {

constexpr const char* kImageProtoAcc = R"(
syntax = "proto3";
message User { int64 id = 1; Photo avatar = 2; }
message Photo { bytes image = 1 [Acc]; int64 size = 2; }
)";

constexpr const char* kImageProtoPlain = R"(
syntax = "proto3";
message User { int64 id = 1; Photo avatar = 2; }
message Photo { bytes image = 1; int64 size = 2; }
)";

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

void add_criterion(SimReport& report, const std::string& name, bool pass,
                   const std::string& detail) {
  report.criteria.push_back({name, pass, detail});
}

// Deterministic, RLE-friendly image payload.
wire::Bytes patterned_image(std::size_t len) {
  wire::Bytes out(len);
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = static_cast<std::uint8_t>(i / 64);
  }
  return out;
}

wire::Bytes image_request_wire(const SchemaTable& table, std::size_t image_len) {
  const MessageSchema* user = table.find_by_name("User");
  const MessageSchema* photo = table.find_by_name("Photo");
  MessageValue req(*user);
  req.slots[user->field_index(1)] = ScalarValue(std::int64_t{777});
  SubMessage avatar;
  auto photo_msg = std::make_unique<MessageValue>(*photo);
  photo_msg->slots[photo->field_index(1)] = BytesValue::of(patterned_image(image_len));
  photo_msg->slots[photo->field_index(2)] =
      ScalarValue(static_cast<std::int64_t>(image_len));
  avatar.msg = std::move(photo_msg);
  req.slots[user->field_index(2)] = std::move(avatar);
  return ref_encode(req, table);
}

SimConfig small_pool_config() {
  SimConfig cfg;
  cfg.memory.host_pool_bytes = 8ull << 20;
  cfg.memory.accel_pool_bytes = 8ull << 20;
  return cfg;
}

SimReport scenario_fig2_latency_sweep() {
  SimReport report;
  report.scenario = "fig2-latency-sweep";
  report.seed = 7;
  report.strategy = "accel-only";
  report.deser_mode = "one-shot";
  report.link_profile = "sweep";

  // Nested small-field message and a single large flat message; both fully
  // host resident.
  WorkloadSpec nested_spec;
  nested_spec.seed = 7;
  nested_spec.request_count = 1;
  nested_spec.class_count = 6;
  nested_spec.depth_min = 6;
  nested_spec.depth_max = 6;
  nested_spec.fields_min = 4;
  nested_spec.fields_max = 8;
  nested_spec.field_size_min = 8;
  nested_spec.field_size_max = 256;
  nested_spec.repeated_probability = 0.1;
  Workload nested = generate_workload(nested_spec);
  wire::Bytes nested_wire = ref_encode(nested.messages[0], nested.table);

  CompileResult flat_schema = compile_proto_text("message Blob { bytes data = 1; }");
  MessageValue flat_msg(flat_schema.table.at(1));
  flat_msg.class_id = 1;
  flat_msg.slots[0] = BytesValue::of(patterned_image(512 * 1024));
  wire::Bytes flat_wire = ref_encode(flat_msg, flat_schema.table);

  const double latencies[] = {70.0, 125.0, 250.0, 625.0, 1250.0};
  std::vector<double> nested_times;
  std::vector<double> flat_times;
  std::uint32_t row_id = 0;
  for (double latency : latencies) {
    for (int which = 0; which < 2; ++which) {
      SimConfig cfg = small_pool_config();
      cfg.link.latency_ns = latency;
      cfg.link.mmio_write_ns = latency;
      Pipeline pipe(cfg, which == 0 ? nested.table : flat_schema.table);
      const wire::Bytes& w = which == 0 ? nested_wire : flat_wire;
      std::uint16_t cls = which == 0 ? nested.messages[0].class_id : 1;
      DeserResult d = pipe.deserializer().deserialize(w, cls, DeserMode::kOneShot);
      SerializeResult s = pipe.serializer().serialize(d.root, Strategy::kAccelOnly);
      RequestRow row;
      row.id = row_id++;
      row.strategy = which == 0 ? "accel-only/nested" : "accel-only/flat";
      row.deser_mode = "latency=" + fmt(latency);
      row.elapsed_ns = s.metrics.elapsed_ns;
      row.serialize_ns = s.metrics.elapsed_ns;
      row.link_ns = s.metrics.link_ns;
      row.device_ns = s.metrics.device_ns;
      row.dependent_reads = s.metrics.dependent_reads;
      row.request_wire_bytes = w.size();
      row.response_wire_bytes = s.wire.size();
      row.ledger = s.metrics.ledger_delta;
      report.rows.push_back(row);
      (which == 0 ? nested_times : flat_times).push_back(s.metrics.elapsed_ns);
    }
  }

  double nested_ratio = nested_times.back() / nested_times.front();
  double flat_ratio = flat_times.back() / flat_times.front();
  bool monotone = std::is_sorted(nested_times.begin(), nested_times.end());
  add_criterion(report, "nested serialization time grows >= 2.0x over the sweep",
                nested_ratio >= 2.0, "ratio " + fmt(nested_ratio));
  add_criterion(report, "flat >=512KB message grows <= 1.2x over the sweep", flat_ratio <= 1.2,
                "ratio " + fmt(flat_ratio));
  add_criterion(report, "nested time is monotone in latency", monotone, "");
  report.finalize_aggregates();
  return report;
}

SimReport scenario_oneshot_vs_fieldbyfield() {
  SimReport report;
  report.scenario = "oneshot-vs-fieldbyfield";
  report.seed = 11;
  report.strategy = "none";
  report.link_profile = "pcie";

  WorkloadSpec spec;
  spec.seed = 11;
  spec.request_count = 200;
  spec.class_count = 3;
  spec.depth_min = 1;
  spec.depth_max = 2;
  spec.fields_min = 8;
  spec.fields_max = 16;
  spec.field_size_min = 16;
  spec.field_size_max = 400;
  spec.small_fields = true;
  spec.repeated_probability = 0.05;
  Workload wl = generate_workload(spec);
  report.mean_field_bytes = wl.stats.mean_field_bytes;
  report.mean_depth = wl.stats.mean_depth;

  std::vector<wire::Bytes> wires;
  std::vector<std::uint16_t> classes;
  for (const auto& m : wl.messages) {
    wires.push_back(ref_encode(m, wl.table));
    classes.push_back(m.class_id);
  }

  Pipeline oneshot(small_pool_config(), wl.table);
  auto os = oneshot.deserialize_stream(wires, classes, DeserMode::kOneShot);
  Pipeline fieldwise(small_pool_config(), wl.table);
  auto fbf = fieldwise.deserialize_stream(wires, classes, DeserMode::kFieldByField);

  std::uint64_t chunk = 4096;
  bool oneshot_bound = true;
  bool fieldwise_count = true;
  for (std::size_t i = 0; i < wires.size(); ++i) {
    const DeserMetrics& mo = os.per_message[i];
    std::uint64_t limit = (mo.host_value_bytes + chunk - 1) / chunk + 1;
    if (mo.data_dma_ops + 1 > limit) oneshot_bound = false;
    const DeserMetrics& mf = fbf.per_message[i];
    if (mf.ledger_delta.dma_write.ops != mf.host_field_writes + 1) fieldwise_count = false;

    RequestRow row;
    row.id = static_cast<std::uint32_t>(i);
    row.deser_mode = "one-shot";
    row.request_wire_bytes = wires[i].size();
    row.elapsed_ns = mo.elapsed_ns;
    row.deser_ns = mo.elapsed_ns;
    row.link_ns = mo.link_ns;
    row.device_ns = mo.compute_ns;
    row.host_field_writes = mo.host_field_writes;
    row.host_value_bytes = mo.host_value_bytes;
    row.deser_data_dma_ops = mo.data_dma_ops;
    row.flushes = mo.flushes;
    row.ledger = mo.ledger_delta;
    report.rows.push_back(row);
  }

  double ratio = os.throughput_bytes_per_ns() / fbf.throughput_bytes_per_ns();
  add_criterion(report, "one-shot/field-by-field throughput ratio >= 2.0 on small fields",
                ratio >= 2.0,
                "ratio " + fmt(ratio) + " (one-shot " + fmt(os.throughput_bytes_per_ns()) +
                    " B/ns, field-by-field " + fmt(fbf.throughput_bytes_per_ns()) + " B/ns)");
  add_criterion(report, "one-shot host DMA writes <= ceil(host_bytes/4096) + 1 per message",
                oneshot_bound, "");
  add_criterion(report, "field-by-field host DMA writes == host fields + 1 per message",
                fieldwise_count, "");
  report.finalize_aggregates();
  return report;
}

SimReport scenario_serialization_three_way() {
  SimReport report;
  report.scenario = "serialization-three-way";
  report.seed = 13;
  report.link_profile = "pcie";
  report.deser_mode = "one-shot";

  WorkloadSpec spec;
  spec.seed = 13;
  spec.request_count = 100;
  spec.class_count = 5;
  spec.depth_min = 3;
  spec.depth_max = 5;
  spec.fields_min = 6;
  spec.fields_max = 10;
  spec.field_size_min = 32;
  spec.field_size_max = 1024;
  spec.small_fields = true;
  spec.repeated_probability = 0.1;
  Workload wl = generate_workload(spec);
  report.mean_field_bytes = wl.stats.mean_field_bytes;
  report.mean_depth = wl.stats.mean_depth;

  Pipeline pipe(small_pool_config(), wl.table);
  const Strategy strategies[] = {Strategy::kCpuOnly, Strategy::kAccelOnly,
                                 Strategy::kMemoryAffinity};
  std::vector<double> elapsed_cpu, elapsed_accel, elapsed_ma;
  double proxy_cpu = 0.0, proxy_ma = 0.0;
  bool equal = true;
  bool ma_two_events = true;

  std::uint32_t row_id = 0;
  for (const auto& msg : wl.messages) {
    wire::Bytes request = ref_encode(msg, wl.table);
    DeserResult d = pipe.deserializer().deserialize(request, msg.class_id, DeserMode::kOneShot);
    wire::Bytes expect = ref_encode(materialize(d.root, pipe.sim().memory(), wl.table), wl.table);
    for (Strategy s : strategies) {
      SerializeResult r = pipe.serializer().serialize(d.root, s);
      if (r.wire != expect) equal = false;
      RequestRow row;
      row.id = row_id++;
      row.strategy = strategy_name(s);
      row.request_wire_bytes = request.size();
      row.response_wire_bytes = r.wire.size();
      row.elapsed_ns = r.metrics.elapsed_ns;
      row.serialize_ns = r.metrics.elapsed_ns;
      row.host_ns = r.metrics.host_ns;
      row.device_ns = r.metrics.device_ns;
      row.link_ns = r.metrics.link_ns;
      row.dependent_reads = r.metrics.dependent_reads;
      row.proxy = r.metrics.proxy;
      row.ledger = r.metrics.ledger_delta;
      report.rows.push_back(row);
      switch (s) {
        case Strategy::kCpuOnly:
          elapsed_cpu.push_back(r.metrics.elapsed_ns);
          proxy_cpu += r.metrics.proxy.proxy_ns(pipe.sim().config().host);
          break;
        case Strategy::kAccelOnly:
          elapsed_accel.push_back(r.metrics.elapsed_ns);
          break;
        case Strategy::kMemoryAffinity:
          elapsed_ma.push_back(r.metrics.elapsed_ns);
          proxy_ma += r.metrics.proxy.proxy_ns(pipe.sim().config().host);
          if (r.metrics.ledger_delta.dma_read.ops != 1 ||
              r.metrics.ledger_delta.mmio_write.ops != 1) {
            ma_two_events = false;
          }
          break;
      }
    }
  }

  double g_cpu = geometric_mean(elapsed_cpu);
  double g_accel = geometric_mean(elapsed_accel);
  double g_ma = geometric_mean(elapsed_ma);
  double proxy_ratio = proxy_cpu > 0 ? proxy_ma / proxy_cpu : 0.0;

  add_criterion(report, "all three strategies produce identical wire bytes", equal, "");
  add_criterion(report, "memory-affinity elapsed <= accel-only / 1.5 (geomean)",
                g_ma * 1.5 <= g_accel,
                "ma " + fmt(g_ma) + " ns, accel " + fmt(g_accel) + " ns, cpu " + fmt(g_cpu) + " ns");
  add_criterion(report, "memory-affinity reads per message == 1 MMIO + 1 buffer DMA read",
                ma_two_events, "");
  add_criterion(report, "cpu proxy ratio memory-affinity/cpu-only <= 0.5", proxy_ratio <= 0.5,
                "ratio " + fmt(proxy_ratio));
  report.finalize_aggregates();
  return report;
}

SimReport scenario_auto_field_update() {
  SimReport report;
  report.scenario = "auto-field-update";
  report.seed = 17;
  report.strategy = "memory-affinity";
  report.deser_mode = "one-shot";
  report.link_profile = "pcie";

  CompileResult compiled = compile_proto_text(kImageProtoAcc);
  Pipeline pipe(small_pool_config(), compiled.table);
  pipe.set_cu_kernel("compress");

  constexpr std::size_t kImageLen = 4096;
  wire::Bytes request = image_request_wire(pipe.sim().table(), kImageLen);
  const MessageSchema* user = pipe.sim().table().find_by_name("User");

  PipelineOptions opts;
  opts.app = AppKind::kImageCompression;
  opts.strategy = Strategy::kMemoryAffinity;

  for (std::uint32_t i = 1; i <= 8; ++i) {
    if (i == 4) pipe.set_cu_kernel("none");  // preempted after the 3rd request
    RequestOutcome outcome = pipe.run_request(i, request, user->class_id, opts);
    report.rows.push_back(outcome.row);
  }

  auto elapsed = [&](std::size_t i) { return report.rows[i - 1].elapsed_ns; };
  auto moves = [&](std::size_t i) { return report.rows[i - 1].explicit_moves; };

  bool move_pattern = moves(4) == 1;
  for (std::size_t i : {1, 2, 3, 5, 6, 7, 8}) {
    if (moves(i) != 0) move_pattern = false;
  }

  auto steady_within = [&](std::size_t lo, std::size_t hi) {
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) sum += elapsed(i);
    double mean = sum / static_cast<double>(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      if (std::abs(elapsed(i) - mean) > 0.01 * mean) return false;
    }
    return true;
  };
  double steady_after = (elapsed(5) + elapsed(6) + elapsed(7) + elapsed(8)) / 4.0;

  add_criterion(report, "exactly request 4 performs one explicit cross-link move", move_pattern,
                "");
  add_criterion(report, "request 4 elapsed is elevated over the following steady state",
                elapsed(4) > 1.05 * steady_after,
                "req4 " + fmt(elapsed(4)) + " ns vs steady " + fmt(steady_after) + " ns");
  add_criterion(report, "requests 1-3 form a steady phase (within 1%)", steady_within(1, 3), "");
  add_criterion(report, "requests 5-8 form a steady phase (within 1%)", steady_within(5, 8), "");
  report.finalize_aggregates();
  return report;
}

SimReport scenario_e2e_compression() {
  SimReport report;
  report.scenario = "e2e-compression";
  report.seed = 19;
  report.strategy = "memory-affinity";
  report.deser_mode = "one-shot";
  report.link_profile = "pcie";

  constexpr std::size_t kImageLen = 8192;
  constexpr std::uint32_t kRequests = 8;

  PipelineOptions opts;
  opts.app = AppKind::kImageCompression;
  opts.strategy = Strategy::kMemoryAffinity;

  // Variant A: the payload carries the Acc label and lives its whole life in
  // accelerator memory.
  CompileResult acc_schema = compile_proto_text(kImageProtoAcc);
  Pipeline acc_pipe(small_pool_config(), acc_schema.table);
  acc_pipe.set_cu_kernel("compress");
  wire::Bytes acc_request = image_request_wire(acc_pipe.sim().table(), kImageLen);
  std::uint16_t user_id = acc_pipe.sim().table().find_by_name("User")->class_id;

  std::uint64_t acc_bytes_total = 0;
  bool payload_never_crosses = true;
  for (std::uint32_t i = 1; i <= kRequests; ++i) {
    RequestOutcome outcome = acc_pipe.run_request(i, acc_request, user_id, opts);
    acc_bytes_total += outcome.row.ledger.total_bytes();
    if (outcome.row.ledger.total_bytes() >= kImageLen) payload_never_crosses = false;
    report.rows.push_back(outcome.row);
  }

  // Variant B: no Acc label and no automatic updating; the payload crosses at
  // deserialization and again when moved to the unit.
  SimConfig plain_cfg = small_pool_config();
  plain_cfg.auto_field_update = false;
  CompileResult plain_schema = compile_proto_text(kImageProtoPlain);
  Pipeline plain_pipe(plain_cfg, plain_schema.table);
  plain_pipe.set_cu_kernel("compress");
  wire::Bytes plain_request = image_request_wire(plain_pipe.sim().table(), kImageLen);
  std::uint16_t plain_user_id = plain_pipe.sim().table().find_by_name("User")->class_id;

  std::uint64_t plain_bytes_total = 0;
  for (std::uint32_t i = 1; i <= kRequests; ++i) {
    RequestOutcome outcome =
        plain_pipe.run_request(kRequests + i, plain_request, plain_user_id, opts);
    plain_bytes_total += outcome.row.ledger.total_bytes();
    report.rows.push_back(outcome.row);
  }

  double acc_per_req = static_cast<double>(acc_bytes_total) / kRequests;
  double plain_per_req = static_cast<double>(plain_bytes_total) / kRequests;

  add_criterion(report, "with Acc the payload never crosses the link", payload_never_crosses,
                "per-request link bytes " + fmt(acc_per_req) + " vs payload " +
                    std::to_string(kImageLen));
  add_criterion(report, "dropping Acc adds >= payload bytes of link traffic per request",
                plain_per_req - acc_per_req >= static_cast<double>(kImageLen),
                "delta " + fmt(plain_per_req - acc_per_req) + " bytes");
  report.finalize_aggregates();
  return report;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"fig2-latency-sweep", "oneshot-vs-fieldbyfield", "serialization-three-way",
          "auto-field-update", "e2e-compression"};
}

SimReport run_scenario(const std::string& name) {
  if (name == "fig2-latency-sweep") return scenario_fig2_latency_sweep();
  if (name == "oneshot-vs-fieldbyfield") return scenario_oneshot_vs_fieldbyfield();
  if (name == "serialization-three-way") return scenario_serialization_three_way();
  if (name == "auto-field-update") return scenario_auto_field_update();
  if (name == "e2e-compression") return scenario_e2e_compression();
  throw Error(ErrorCode::kUnknownScenario, name);
}

}  // namespace rpcacc
