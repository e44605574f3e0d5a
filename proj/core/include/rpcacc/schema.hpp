#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rpcacc/error.hpp"

namespace rpcacc {

// Scalar kinds supported on the wire. Message stands for a nested class and
// is carried here so a field descriptor is a single flat record.
enum class ScalarType : std::uint8_t {
  kInt32 = 0,
  kInt64 = 1,
  kUInt64 = 2,
  kDouble = 3,
  kFloat = 4,
  kBool = 5,
  kString = 6,
  kBytes = 7,
  kMessage = 8,
};

enum class Label : std::uint8_t { kSingular = 0, kRepeated = 1 };

// Direct fields live inline in their parent record; dereference fields live
// behind a (region, address, length) handle.
enum class Addressing : std::uint8_t { kDirect = 0, kDereference = 1 };

using ScalarValue = std::variant<std::int32_t, std::int64_t, std::uint64_t, double, float, bool>;

const char* scalar_type_name(ScalarType t);
std::optional<ScalarType> scalar_type_from_name(const std::string& name);

// In-memory width of one direct value (also the packed-array element width).
std::size_t scalar_width(ScalarType t);

inline bool is_len_delimited_type(ScalarType t) {
  return t == ScalarType::kString || t == ScalarType::kBytes || t == ScalarType::kMessage;
}

struct FieldDescriptor {
  std::string name;
  std::uint32_t number = 0;
  ScalarType type = ScalarType::kInt64;
  Label label = Label::kSingular;
  // Placement bit: deserialized value goes to accelerator off-chip memory.
  // Only meaningful for dereference fields.
  bool acc = false;
  // Resolved class id when type == kMessage, 0 otherwise.
  std::uint16_t message_class_id = 0;

  Addressing addressing() const {
    return (is_len_delimited_type(type) || label == Label::kRepeated) ? Addressing::kDereference
                                                                      : Addressing::kDirect;
  }
};

struct MessageSchema {
  std::uint16_t class_id = 0;
  std::string name;
  std::vector<FieldDescriptor> fields;  // ascending field number

  const FieldDescriptor* find_field(std::uint32_t number) const;
  const FieldDescriptor& field_at(std::size_t index) const { return fields.at(index); }

  // Index of `number` in fields, or npos.
  std::size_t field_index(std::uint32_t number) const;

  static constexpr std::size_t kNpos = static_cast<std::size_t>(-1);
};

// Compiled table of message classes, keyed by class id. This is the structure
// the simulated accelerator queries per incoming message; the per-field `acc`
// flag is the placement bit and is the only runtime-mutable part.
class SchemaTable {
 public:
  static constexpr std::size_t kMaxClasses = 65535;
  static constexpr std::size_t kMaxFieldsPerClass = 255;

  void add(MessageSchema schema);

  bool contains(std::uint16_t class_id) const { return classes_.count(class_id) != 0; }
  const MessageSchema& at(std::uint16_t class_id) const;
  const MessageSchema* find(std::uint16_t class_id) const;
  const MessageSchema* find_by_name(const std::string& name) const;

  std::size_t size() const { return classes_.size(); }
  const std::map<std::uint16_t, MessageSchema>& classes() const { return classes_; }

  bool placement_bit(std::uint16_t class_id, std::uint32_t field_number) const;
  void set_placement_bit(std::uint16_t class_id, std::uint32_t field_number, bool acc);

  bool operator==(const SchemaTable& other) const;

 private:
  std::map<std::uint16_t, MessageSchema> classes_;
};

bool operator==(const FieldDescriptor& a, const FieldDescriptor& b);
bool operator==(const MessageSchema& a, const MessageSchema& b);

}  // namespace rpcacc
