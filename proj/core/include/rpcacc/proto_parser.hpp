#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rpcacc/schema.hpp"

namespace rpcacc {

// AST of one .proto source file. Nested message definitions are flattened
// with dotted names; `scope` keeps the enclosing chain for name resolution.
struct ProtoField {
  std::string name;
  std::string type_name;
  std::uint32_t number = 0;
  bool repeated = false;
  bool acc = false;
  int line = 0;
  int col = 0;
};

struct ProtoMessage {
  std::string name;  // qualified, e.g. "Outer.Inner"
  std::vector<std::string> scope;
  std::vector<ProtoField> fields;
};

struct ProtoFile {
  std::string package;
  std::vector<ProtoMessage> messages;  // declaration order
};

// Parses a proto3-dialect schema. The only extension over plain proto3 is the
// field option `[Acc]` (also accepted as `[acc = true]`); unknown bracket
// options are ignored so ordinary proto3 files parse unchanged.
// Throws SyntaxError (with line:col), DuplicateFieldNumber, UnknownType.
ProtoFile parse_proto(std::string_view text);

struct CompileResult {
  SchemaTable table;
  std::string report;  // human-readable placement listing
};

// Assigns class ids in declaration order starting at 1, resolves message
// references, and validates Acc placement. Throws UnresolvedReference and
// AccOnDirectField.
CompileResult compile(const ProtoFile& file);

// Convenience: parse + compile.
CompileResult compile_proto_text(std::string_view text);

}  // namespace rpcacc
