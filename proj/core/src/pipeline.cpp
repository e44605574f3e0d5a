#include "rpcacc/pipeline.hpp"

#include <algorithm>

#include "rpcacc/reference.hpp"

namespace rpcacc {

Pipeline::Pipeline(const SimConfig& cfg, SchemaTable table) {
  sim_ = std::make_unique<Simulation>(cfg, std::move(table));
  deser_ = std::make_unique<Deserializer>(*sim_);
  ser_ = std::make_unique<Serializer>(*sim_);
  runtime_ = std::make_unique<HostRuntime>(*sim_);
  for (std::uint32_t i = 0; i < cfg.cu.count; ++i) {
    cus_.push_back(std::make_unique<ComputeUnit>(*sim_, i));
  }
}

void Pipeline::set_cu_kernel(const std::string& type) {
  const Kernel* kernel = nullptr;
  if (type != "none") {
    kernel = find_kernel(type);
    if (kernel == nullptr) {
      throw Error(ErrorCode::kConfigError, "no built-in kernel named '" + type + "'");
    }
  }
  sim_->advance(cu(0).program(kernel));
}

RequestOutcome Pipeline::run_request(std::uint32_t id, wire::ByteView request_wire,
                                     std::uint16_t class_id, const PipelineOptions& opts) {
  if (opts.app == AppKind::kImageCompression) {
    return image_compression_request(id, request_wire, class_id, opts);
  }

  RequestOutcome out;
  RequestRow& row = out.row;
  row.id = id;
  row.strategy = strategy_name(opts.strategy);
  row.deser_mode = opts.deser_mode == DeserMode::kOneShot ? "one-shot" : "field-by-field";
  row.request_wire_bytes = request_wire.size();

  TxnLedger before = sim_->link().ledger();
  std::uint64_t moves_before = runtime_->explicit_moves();

  out.deser = deser_->deserialize(request_wire, class_id, opts.deser_mode);
  row.deser_ns = out.deser.metrics.elapsed_ns;
  row.host_field_writes = out.deser.metrics.host_field_writes;
  row.host_value_bytes = out.deser.metrics.host_value_bytes;
  row.deser_data_dma_ops = out.deser.metrics.data_dma_ops;
  row.flushes = out.deser.metrics.flushes;

  row.app_ns = sim_->config().host.auth_ns;  // host kernel stub

  SerializeResult ser = ser_->serialize(out.deser.root, opts.strategy);
  row.serialize_ns = ser.metrics.elapsed_ns;
  row.host_ns = ser.metrics.host_ns + row.app_ns;
  row.device_ns = ser.metrics.device_ns + out.deser.metrics.compute_ns;
  row.link_ns = ser.metrics.link_ns + out.deser.metrics.link_ns;
  row.dependent_reads = ser.metrics.dependent_reads;
  row.proxy = ser.metrics.proxy;
  row.response_wire_bytes = ser.wire.size();
  row.elapsed_ns = row.deser_ns + row.app_ns + row.serialize_ns;
  row.ledger = sim_->link().ledger().delta_since(before);
  row.explicit_moves = runtime_->explicit_moves() - moves_before;

  sim_->advance(row.elapsed_ns);
  out.response_wire = std::move(ser.wire);
  out.response_class = class_id;
  return out;
}

RequestOutcome Pipeline::image_compression_request(std::uint32_t id, wire::ByteView request_wire,
                                                   std::uint16_t class_id,
                                                   const PipelineOptions& opts) {
  RequestOutcome out;
  RequestRow& row = out.row;
  row.id = id;
  row.strategy = strategy_name(opts.strategy);
  row.deser_mode = opts.deser_mode == DeserMode::kOneShot ? "one-shot" : "field-by-field";
  row.request_wire_bytes = request_wire.size();

  const MessageSchema* user = sim_->table().find_by_name("User");
  const MessageSchema* photo = sim_->table().find_by_name("Photo");
  if (user == nullptr || photo == nullptr || user->class_id != class_id) {
    throw Error(ErrorCode::kConfigError, "image app expects the User/Photo schema pair");
  }

  TxnLedger before = sim_->link().ledger();
  std::uint64_t moves_before = runtime_->explicit_moves();
  double start = sim_->now();

  out.deser = deser_->deserialize(request_wire, class_id, opts.deser_mode);
  row.deser_ns = out.deser.metrics.elapsed_ns;
  row.host_field_writes = out.deser.metrics.host_field_writes;
  row.host_value_bytes = out.deser.metrics.host_value_bytes;
  row.deser_data_dma_ops = out.deser.metrics.data_dma_ops;
  row.flushes = out.deser.metrics.flushes;
  sim_->advance(row.deser_ns);

  // Host kernel: authorization.
  double app_ns = sim_->config().host.auth_ns;
  sim_->advance(sim_->config().host.auth_ns);

  auto& avatar = std::get<SubMessage>(out.deser.root.slots[user->field_index(2)]);
  if (avatar.msg == nullptr) {
    throw Error(ErrorCode::kMalformedWire, "request lacks the avatar field");
  }
  auto& image = std::get<BytesValue>(avatar.msg->slots[photo->field_index(1)]);

  MemHandle result_handle;
  std::uint64_t result_len = 0;

  if (cu(0).type() == "compress") {
    if (!HostRuntime::is_in_acc(image)) {
      MoveResult mv = runtime_->move_to_acc(image, photo->class_id, 1);
      app_ns += mv.elapsed_ns;
      sim_->advance(mv.elapsed_ns);
    }
    // Worst-case RLE expansion is 2x.
    std::uint32_t out_cap = image.handle.len * 2 + 16;
    std::uint64_t out_addr = sim_->memory().space(Region::kAccel).alloc_large(out_cap);
    Descriptor desc{image.handle.addr, image.handle.len, out_addr, out_cap};
    TaskEvent event = cu(0).submit_task(desc, sim_->now());
    double done = cu(0).poll(event, sim_->now());
    app_ns += done - sim_->now();
    sim_->advance(done - sim_->now());
    if (event.error) {
      throw Error(ErrorCode::kDescriptorInvalid, "compression output overflow");
    }
    result_handle = {Region::kAccel, out_addr, event.result_len};
    result_len = event.result_len;
  } else {
    if (HostRuntime::is_in_acc(image)) {
      MoveResult mv = runtime_->move_to_cpu(image, photo->class_id, 1);
      app_ns += mv.elapsed_ns;
      sim_->advance(mv.elapsed_ns);
    }
    auto bytes = sim_->memory().read(image.handle);
    wire::Bytes compressed = rle_compress(bytes);
    double compress_ns =
        static_cast<double>(bytes.size()) / sim_->config().host.compress_bytes_per_ns;
    app_ns += compress_ns;
    sim_->advance(compress_ns);
    std::uint64_t out_addr = sim_->memory().space(Region::kHost).alloc_large(compressed.size());
    sim_->memory().write(Region::kHost, out_addr, compressed);
    result_handle = {Region::kHost, out_addr, static_cast<std::uint32_t>(compressed.size())};
    result_len = compressed.size();
  }
  row.app_ns = app_ns;

  // Fabricate the Photo response: compressed image plus its size.
  MessageValue response(*photo);
  response.slots[photo->field_index(1)] = BytesValue::of(result_handle);
  response.slots[photo->field_index(2)] = ScalarValue(static_cast<std::int64_t>(result_len));

  SerializeResult ser = ser_->serialize(response, opts.strategy);
  row.serialize_ns = ser.metrics.elapsed_ns;
  sim_->advance(ser.metrics.elapsed_ns);

  row.host_ns = ser.metrics.host_ns + app_ns;
  row.device_ns = ser.metrics.device_ns + out.deser.metrics.compute_ns;
  row.link_ns = ser.metrics.link_ns + out.deser.metrics.link_ns;
  row.dependent_reads = ser.metrics.dependent_reads;
  row.proxy = ser.metrics.proxy;
  row.response_wire_bytes = ser.wire.size();
  row.elapsed_ns = sim_->now() - start;
  row.ledger = sim_->link().ledger().delta_since(before);
  row.explicit_moves = runtime_->explicit_moves() - moves_before;

  out.response_wire = std::move(ser.wire);
  out.response_class = photo->class_id;
  return out;
}

SimReport Pipeline::run(const Workload& workload, const PipelineOptions& opts) {
  SimReport report;
  report.strategy = strategy_name(opts.strategy);
  report.deser_mode = opts.deser_mode == DeserMode::kOneShot ? "one-shot" : "field-by-field";
  report.mean_field_bytes = workload.stats.mean_field_bytes;
  report.mean_depth = workload.stats.mean_depth;

  for (std::size_t i = 0; i < workload.messages.size(); ++i) {
    const MessageValue& msg = workload.messages[i];
    wire::Bytes request = ref_encode(msg, sim_->table());
    try {
      RequestOutcome outcome =
          run_request(static_cast<std::uint32_t>(i), request, msg.class_id, opts);
      report.rows.push_back(std::move(outcome.row));
    } catch (const Error& e) {
      // abort the run, naming the request that failed
      throw Error(e.code(), "request " + std::to_string(i) + ": " + e.what());
    }
  }

  report.final_ledger = sim_->link().ledger();
  report.tlb_misses = sim_->memory().tlb().misses();
  std::uint64_t chunk = sim_->memory().chunk_size();
  const auto& hs = deser_->stats(Region::kHost);
  const auto& as = deser_->stats(Region::kAccel);
  report.fragmentation = {hs.chunks_popped, hs.wasted_bytes(chunk), as.chunks_popped,
                          as.wasted_bytes(chunk)};
  report.finalize_aggregates();
  return report;
}

Pipeline::StreamResult Pipeline::deserialize_stream(const std::vector<wire::Bytes>& wires,
                                                    const std::vector<std::uint16_t>& class_ids,
                                                    DeserMode mode) {
  std::uint32_t nlanes = deser_->lanes();
  std::vector<double> lane_free(nlanes, 0.0);
  double link_free = 0.0;
  StreamResult result;

  for (std::size_t i = 0; i < wires.size(); ++i) {
    // Lowest-numbered idle lane; everyone arrives at time zero, so the
    // earliest-free lane is the analogue, ties by lane number.
    std::uint32_t lane = 0;
    for (std::uint32_t l = 1; l < nlanes; ++l) {
      if (lane_free[l] < lane_free[lane]) lane = l;
    }
    DeserResult r = deser_->deserialize(wires[i], class_ids[i], mode, lane);
    double t = lane_free[lane] + r.metrics.compute_ns;
    for (double cost : r.metrics.link_op_costs) {
      double start = std::max(t, link_free);
      t = start + cost;
      link_free = t;
    }
    lane_free[lane] = t;
    result.makespan_ns = std::max(result.makespan_ns, t);
    result.total_wire_bytes += wires[i].size();
    result.per_message.push_back(std::move(r.metrics));
  }
  return result;
}

}  // namespace rpcacc
