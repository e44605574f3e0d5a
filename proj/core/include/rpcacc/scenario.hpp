#pragma once

#include <string>
#include <vector>

#include "rpcacc/report.hpp"

namespace rpcacc {

// Scripted experiments, each with built-in pass/fail criteria:
//
//   fig2-latency-sweep       accelerator-only serialization time vs link latency
//   oneshot-vs-fieldbyfield  deserialization batching throughput and bounds
//   serialization-three-way  three-strategy cost and equivalence comparison
//   auto-field-update        per-request time across a kernel reconfiguration
//   e2e-compression          compression service; payload locality on the link
//
// All scenarios use fixed seeds: the same name always produces a
// byte-identical report.
std::vector<std::string> scenario_names();

SimReport run_scenario(const std::string& name);

}  // namespace rpcacc
