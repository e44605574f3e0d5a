#include "rpcacc/schema.hpp"

#include <algorithm>

namespace rpcacc {

const char* scalar_type_name(ScalarType t) {
  switch (t) {
    case ScalarType::kInt32: return "int32";
    case ScalarType::kInt64: return "int64";
    case ScalarType::kUInt64: return "uint64";
    case ScalarType::kDouble: return "double";
    case ScalarType::kFloat: return "float";
    case ScalarType::kBool: return "bool";
    case ScalarType::kString: return "string";
    case ScalarType::kBytes: return "bytes";
    case ScalarType::kMessage: return "message";
  }
  return "?";
}

std::optional<ScalarType> scalar_type_from_name(const std::string& name) {
  if (name == "int32") return ScalarType::kInt32;
  if (name == "int64") return ScalarType::kInt64;
  if (name == "uint64") return ScalarType::kUInt64;
  if (name == "double") return ScalarType::kDouble;
  if (name == "float") return ScalarType::kFloat;
  if (name == "bool") return ScalarType::kBool;
  if (name == "string") return ScalarType::kString;
  if (name == "bytes") return ScalarType::kBytes;
  return std::nullopt;
}

std::size_t scalar_width(ScalarType t) {
  switch (t) {
    case ScalarType::kInt32: return 4;
    case ScalarType::kInt64: return 8;
    case ScalarType::kUInt64: return 8;
    case ScalarType::kDouble: return 8;
    case ScalarType::kFloat: return 4;
    case ScalarType::kBool: return 1;
    case ScalarType::kString:
    case ScalarType::kBytes:
    case ScalarType::kMessage: return 0;  // dereference kinds have no inline width
  }
  return 0;
}

const FieldDescriptor* MessageSchema::find_field(std::uint32_t number) const {
  for (const auto& f : fields) {
    if (f.number == number) return &f;
  }
  return nullptr;
}

std::size_t MessageSchema::field_index(std::uint32_t number) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].number == number) return i;
  }
  return kNpos;
}

void SchemaTable::add(MessageSchema schema) {
  if (classes_.size() >= kMaxClasses) {
    throw Error(ErrorCode::kInvalidSpec, "schema table capacity exceeded");
  }
  if (schema.fields.size() > kMaxFieldsPerClass) {
    throw Error(ErrorCode::kInvalidSpec,
                "message '" + schema.name + "' exceeds the per-class field limit");
  }
  std::uint16_t id = schema.class_id;
  classes_[id] = std::move(schema);
}

const MessageSchema& SchemaTable::at(std::uint16_t class_id) const {
  auto it = classes_.find(class_id);
  if (it == classes_.end()) {
    throw Error(ErrorCode::kUnknownClassId, "class id " + std::to_string(class_id));
  }
  return it->second;
}

const MessageSchema* SchemaTable::find(std::uint16_t class_id) const {
  auto it = classes_.find(class_id);
  return it == classes_.end() ? nullptr : &it->second;
}

const MessageSchema* SchemaTable::find_by_name(const std::string& name) const {
  for (const auto& [id, schema] : classes_) {
    if (schema.name == name) return &schema;
  }
  return nullptr;
}

bool SchemaTable::placement_bit(std::uint16_t class_id, std::uint32_t field_number) const {
  const FieldDescriptor* f = at(class_id).find_field(field_number);
  if (f == nullptr) {
    throw Error(ErrorCode::kUnknownClassId,
                "field " + std::to_string(field_number) + " not in class " +
                    std::to_string(class_id));
  }
  return f->acc;
}

void SchemaTable::set_placement_bit(std::uint16_t class_id, std::uint32_t field_number, bool acc) {
  auto it = classes_.find(class_id);
  if (it == classes_.end()) {
    throw Error(ErrorCode::kUnknownClassId, "class id " + std::to_string(class_id));
  }
  for (auto& f : it->second.fields) {
    if (f.number == field_number) {
      if (f.addressing() != Addressing::kDereference) {
        throw Error(ErrorCode::kAccOnDirectField,
                    "placement bit on direct field '" + f.name + "'");
      }
      f.acc = acc;
      return;
    }
  }
  throw Error(ErrorCode::kUnknownClassId,
              "field " + std::to_string(field_number) + " not in class " + std::to_string(class_id));
}

bool operator==(const FieldDescriptor& a, const FieldDescriptor& b) {
  return a.name == b.name && a.number == b.number && a.type == b.type && a.label == b.label &&
         a.acc == b.acc && a.message_class_id == b.message_class_id;
}

bool operator==(const MessageSchema& a, const MessageSchema& b) {
  return a.class_id == b.class_id && a.name == b.name && a.fields == b.fields;
}

bool SchemaTable::operator==(const SchemaTable& other) const {
  return classes_ == other.classes_;
}

}  // namespace rpcacc
