#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rpcacc/schema.hpp"

namespace rpcacc {

// Binary image of a compiled schema table, the artifact the simulated
// accelerator loads. Layout (little endian):
//
//   u32 magic "RPCA"    u16 version    u16 class count
//   per class:  u16 class id, u16 name len, name bytes, u16 field count
//   per field:  u32 number, u8 type, u8 label, u8 flags (bit0 = acc),
//               u16 referenced class id, u16 name len, name bytes
//
// Compilation is deterministic, so identical sources produce identical
// images.

constexpr std::uint32_t kSchemaTableMagic = 0x41435052;  // "RPCA"
constexpr std::uint16_t kSchemaTableVersion = 1;

std::vector<std::uint8_t> serialize_schema_table(const SchemaTable& table);

// Throws BadMagic / VersionMismatch / Truncated.
SchemaTable load_schema_table(std::span<const std::uint8_t> image);

}  // namespace rpcacc
