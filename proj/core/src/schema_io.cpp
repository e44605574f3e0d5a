#include "rpcacc/schema_io.hpp"

#include <span>

namespace rpcacc {

namespace {

void put_u16(std::uint16_t v, std::vector<std::uint8_t>& out) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::uint32_t v, std::vector<std::uint8_t>& out) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_str(const std::string& s, std::vector<std::uint8_t>& out) {
  put_u16(static_cast<std::uint16_t>(s.size()), out);
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> buf) : buf_(buf) {}

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(buf_[pos_] | (buf_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }

  std::string str() {
    std::uint16_t len = u16();
    need(len);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), len);
    pos_ += len;
    return s;
  }

 private:
  void need(std::size_t n) {
    if (buf_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncated, "schema table image cut short");
    }
  }

  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_schema_table(const SchemaTable& table) {
  std::vector<std::uint8_t> out;
  put_u32(kSchemaTableMagic, out);
  put_u16(kSchemaTableVersion, out);
  put_u16(static_cast<std::uint16_t>(table.size()), out);
  for (const auto& [id, schema] : table.classes()) {
    put_u16(id, out);
    put_str(schema.name, out);
    put_u16(static_cast<std::uint16_t>(schema.fields.size()), out);
    for (const auto& f : schema.fields) {
      put_u32(f.number, out);
      out.push_back(static_cast<std::uint8_t>(f.type));
      out.push_back(static_cast<std::uint8_t>(f.label));
      out.push_back(f.acc ? 1 : 0);
      put_u16(f.message_class_id, out);
      put_str(f.name, out);
    }
  }
  return out;
}

SchemaTable load_schema_table(std::span<const std::uint8_t> image) {
  Reader r(image);
  if (r.u32() != kSchemaTableMagic) {
    throw Error(ErrorCode::kBadMagic, "not a schema table image");
  }
  std::uint16_t version = r.u16();
  if (version != kSchemaTableVersion) {
    throw Error(ErrorCode::kVersionMismatch, "image version " + std::to_string(version));
  }
  SchemaTable table;
  std::uint16_t classes = r.u16();
  for (std::uint16_t c = 0; c < classes; ++c) {
    MessageSchema schema;
    schema.class_id = r.u16();
    schema.name = r.str();
    std::uint16_t nfields = r.u16();
    for (std::uint16_t i = 0; i < nfields; ++i) {
      FieldDescriptor f;
      f.number = r.u32();
      f.type = static_cast<ScalarType>(r.u8());
      f.label = static_cast<Label>(r.u8());
      f.acc = r.u8() != 0;
      f.message_class_id = r.u16();
      f.name = r.str();
      schema.fields.push_back(std::move(f));
    }
    table.add(std::move(schema));
  }
  return table;
}

}  // namespace rpcacc
