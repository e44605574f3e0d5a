#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rpcacc/message.hpp"
#include "rpcacc/schema.hpp"

namespace rpcacc {

// Parameterized synthetic workload: message shape distributions plus a seed.
// (spec, seed) fully determines the generated schemas and message stream.
struct WorkloadSpec {
  std::uint64_t seed = 1;
  std::uint32_t request_count = 100;
  std::uint32_t class_count = 4;
  std::uint32_t depth_min = 1;
  std::uint32_t depth_max = 3;
  std::uint32_t fields_min = 4;
  std::uint32_t fields_max = 12;
  std::uint32_t field_size_min = 1;
  std::uint32_t field_size_max = 4096;
  bool small_fields = false;  // caps dereference field sizes at 1 KiB
  double acc_fraction = 0.0;
  double repeated_probability = 0.1;

  void validate() const;
};

struct WorkloadStats {
  double mean_field_bytes = 0.0;
  double mean_depth = 0.0;
  std::uint64_t total_value_bytes = 0;
  std::uint64_t total_fields = 0;
};

struct Workload {
  SchemaTable table;
  std::vector<MessageValue> messages;  // fully inline graphs
  WorkloadStats stats;
};

// Generates schemas and a deterministic message stream. When `table` is
// given, messages are generated against its classes instead of synthesized
// ones (the compiled-table path of the CLI).
Workload generate_workload(const WorkloadSpec& spec);
Workload generate_workload(const WorkloadSpec& spec, SchemaTable table);

// Generates one message for an existing class; used by tests that need
// tailored schemas.
MessageValue generate_message(const SchemaTable& table, std::uint16_t class_id,
                              std::uint32_t depth_budget, const WorkloadSpec& spec,
                              std::mt19937_64& rng);

// Flat `key = value` config format shared by workload specs and sim config.
// '#' starts a comment; unknown keys are the caller's concern.
std::map<std::string, std::string> parse_kv_text(const std::string& text);
std::map<std::string, std::string> parse_kv_file(const std::string& path);

WorkloadSpec workload_spec_from_kv(const std::map<std::string, std::string>& kv);

}  // namespace rpcacc
