#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpcacc/interconnect.hpp"
#include "rpcacc/serializer.hpp"

namespace rpcacc {

// One processed request. Every aggregate below is recomputable from these
// rows; the CSV emits them one per line.
struct RequestRow {
  std::uint32_t id = 0;
  std::string strategy;
  std::string deser_mode;
  std::uint64_t request_wire_bytes = 0;
  std::uint64_t response_wire_bytes = 0;
  double elapsed_ns = 0.0;
  double deser_ns = 0.0;
  double app_ns = 0.0;
  double serialize_ns = 0.0;
  double host_ns = 0.0;
  double device_ns = 0.0;
  double link_ns = 0.0;
  TxnLedger ledger;  // per-request delta
  std::uint64_t host_field_writes = 0;
  std::uint64_t host_value_bytes = 0;
  std::uint64_t deser_data_dma_ops = 0;
  std::uint64_t flushes = 0;
  std::uint64_t dependent_reads = 0;
  std::uint64_t explicit_moves = 0;
  CpuCycleProxy proxy;
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct FragmentationStats {
  std::uint64_t host_chunks = 0;
  std::uint64_t host_wasted_bytes = 0;
  std::uint64_t accel_chunks = 0;
  std::uint64_t accel_wasted_bytes = 0;
};

struct SimReport {
  std::string scenario;  // empty for plain runs
  std::uint64_t seed = 0;
  std::string strategy;
  std::string deser_mode;
  std::string link_profile;

  std::vector<RequestRow> rows;

  // aggregates
  double geomean_elapsed_ns = 0.0;
  double total_elapsed_ns = 0.0;
  TxnLedger final_ledger;
  FragmentationStats fragmentation;
  double mean_field_bytes = 0.0;
  double mean_depth = 0.0;
  std::uint64_t tlb_misses = 0;

  std::vector<CriterionResult> criteria;

  void finalize_aggregates();  // recomputes geomean/totals from rows
  bool all_criteria_pass() const;

  std::string to_json() const;  // stable field order, byte-identical per seed
  std::string to_csv() const;
};

double geometric_mean(const std::vector<double>& values);

}  // namespace rpcacc
