#include "rpcacc/report.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace rpcacc {

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

void SimReport::finalize_aggregates() {
  std::vector<double> elapsed;
  total_elapsed_ns = 0.0;
  for (const auto& row : rows) {
    if (row.elapsed_ns > 0) elapsed.push_back(row.elapsed_ns);
    total_elapsed_ns += row.elapsed_ns;
  }
  geomean_elapsed_ns = geometric_mean(elapsed);
}

bool SimReport::all_criteria_pass() const {
  for (const auto& c : criteria) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json ledger_json(const TxnLedger& l) {
  return ordered_json{
      {"dma_read", {{"ops", l.dma_read.ops}, {"txns", l.dma_read.txns}, {"bytes", l.dma_read.bytes}, {"time_ns", l.dma_read.time_ns}}},
      {"dma_write", {{"ops", l.dma_write.ops}, {"txns", l.dma_write.txns}, {"bytes", l.dma_write.bytes}, {"time_ns", l.dma_write.time_ns}}},
      {"mmio_write", {{"ops", l.mmio_write.ops}, {"txns", l.mmio_write.txns}, {"bytes", l.mmio_write.bytes}, {"time_ns", l.mmio_write.time_ns}}},
      {"total_bytes", l.total_bytes()},
  };
}

}  // namespace

std::string SimReport::to_json() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["strategy"] = strategy;
  j["deser_mode"] = deser_mode;
  j["link_profile"] = link_profile;
  j["aggregate"] = ordered_json{
      {"requests", rows.size()},
      {"geomean_elapsed_ns", geomean_elapsed_ns},
      {"total_elapsed_ns", total_elapsed_ns},
      {"mean_field_bytes", mean_field_bytes},
      {"mean_depth", mean_depth},
      {"tlb_misses", tlb_misses},
      {"ledger", ledger_json(final_ledger)},
      {"fragmentation",
       {{"host_chunks", fragmentation.host_chunks},
        {"host_wasted_bytes", fragmentation.host_wasted_bytes},
        {"accel_chunks", fragmentation.accel_chunks},
        {"accel_wasted_bytes", fragmentation.accel_wasted_bytes}}},
  };
  ordered_json rows_json = ordered_json::array();
  for (const auto& row : rows) {
    rows_json.push_back(ordered_json{
        {"id", row.id},
        {"strategy", row.strategy},
        {"deser_mode", row.deser_mode},
        {"request_wire_bytes", row.request_wire_bytes},
        {"response_wire_bytes", row.response_wire_bytes},
        {"elapsed_ns", row.elapsed_ns},
        {"deser_ns", row.deser_ns},
        {"app_ns", row.app_ns},
        {"serialize_ns", row.serialize_ns},
        {"host_ns", row.host_ns},
        {"device_ns", row.device_ns},
        {"link_ns", row.link_ns},
        {"ledger", ledger_json(row.ledger)},
        {"host_field_writes", row.host_field_writes},
        {"host_value_bytes", row.host_value_bytes},
        {"deser_data_dma_ops", row.deser_data_dma_ops},
        {"flushes", row.flushes},
        {"dependent_reads", row.dependent_reads},
        {"explicit_moves", row.explicit_moves},
        {"cpu_proxy",
         {{"bytes_copied_by_cpu", row.proxy.bytes_copied_by_cpu},
          {"bytes_copied_by_memcpy_engine", row.proxy.bytes_copied_by_memcpy_engine},
          {"encode_ops_on_cpu", row.proxy.encode_ops_on_cpu},
          {"encode_bytes_on_cpu", row.proxy.encode_bytes_on_cpu},
          {"fields_visited", row.proxy.fields_visited}}},
    });
  }
  j["requests"] = std::move(rows_json);
  ordered_json crit = ordered_json::array();
  for (const auto& c : criteria) {
    crit.push_back(ordered_json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["criteria"] = std::move(crit);
  return j.dump(2) + "\n";
}

std::string SimReport::to_csv() const {
  std::ostringstream out;
  out << "id,strategy,deser_mode,request_wire_bytes,response_wire_bytes,elapsed_ns,deser_ns,"
         "app_ns,serialize_ns,host_ns,device_ns,link_ns,dma_read_ops,dma_read_txns,"
         "dma_read_bytes,dma_write_ops,dma_write_txns,dma_write_bytes,mmio_ops,mmio_bytes,"
         "host_field_writes,host_value_bytes,deser_data_dma_ops,flushes,dependent_reads,"
         "explicit_moves,cpu_copy_bytes,engine_copy_bytes,encode_ops,fields_visited\n";
  for (const auto& r : rows) {
    out << r.id << ',' << r.strategy << ',' << r.deser_mode << ',' << r.request_wire_bytes << ','
        << r.response_wire_bytes << ',' << r.elapsed_ns << ',' << r.deser_ns << ',' << r.app_ns
        << ',' << r.serialize_ns << ',' << r.host_ns << ',' << r.device_ns << ',' << r.link_ns
        << ',' << r.ledger.dma_read.ops << ',' << r.ledger.dma_read.txns << ','
        << r.ledger.dma_read.bytes << ',' << r.ledger.dma_write.ops << ','
        << r.ledger.dma_write.txns << ',' << r.ledger.dma_write.bytes << ','
        << r.ledger.mmio_write.ops << ',' << r.ledger.mmio_write.bytes << ','
        << r.host_field_writes << ',' << r.host_value_bytes << ',' << r.deser_data_dma_ops << ','
        << r.flushes << ',' << r.dependent_reads << ',' << r.explicit_moves << ','
        << r.proxy.bytes_copied_by_cpu << ',' << r.proxy.bytes_copied_by_memcpy_engine << ','
        << r.proxy.encode_ops_on_cpu << ',' << r.proxy.fields_visited << '\n';
  }
  return out.str();
}

}  // namespace rpcacc
