#include "rpcacc/wire.hpp"

#include <bit>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace rpcacc;
using namespace rpcacc::wire;
using rpcacc::test::to_hex;

TEST_CASE("varint encodes single-byte values") {
  CHECK(encode_varint(0) == Bytes{0x00});
  CHECK(encode_varint(1) == Bytes{0x01});
  CHECK(encode_varint(127) == Bytes{0x7F});
}

TEST_CASE("varint encodes multi-byte values") {
  CHECK(encode_varint(128) == Bytes{0x80, 0x01});
  CHECK(encode_varint(300) == Bytes{0xAC, 0x02});
  CHECK(encode_varint(std::uint64_t(-1)).size() == 10);
}

TEST_CASE("varint decode inverts encode") {
  for (std::uint64_t v : {0ull, 1ull, 127ull, 128ull, 300ull, 16383ull, 16384ull,
                          (1ull << 32), (1ull << 63), ~0ull}) {
    Bytes enc = encode_varint(v);
    VarintResult r = decode_varint(enc);
    CHECK(r.value == v);
    CHECK(r.consumed == enc.size());
  }
}

TEST_CASE("varint decode errors") {
  CHECK(rpcacc::test::error_code_of([&] { decode_varint(Bytes{0x80}); }) == ErrorCode::kTruncated);
  // 11 continuation bytes
  Bytes too_long(11, 0x80);
  too_long.push_back(0x00);
  CHECK_THROWS_AS(decode_varint(too_long), Error);
  // 10 bytes but value bits beyond 64
  Bytes overflow(9, 0x80);
  overflow.push_back(0x7F);
  CHECK(rpcacc::test::error_code_of([&] { decode_varint(overflow); }) == ErrorCode::kOverflow);
  CHECK_THROWS_AS(decode_varint(Bytes{}), Error);
}

TEST_CASE("canonical varint length matches ceil(bitlen/7)") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t v = rng() >> (rng() % 64);
    std::size_t bitlen = 64 - std::countl_zero(v | 1);
    std::size_t expect = (std::max<std::size_t>(1, bitlen) + 6) / 7;
    CHECK(encode_varint(v).size() == expect);
    CHECK(varint_length(v) == expect);
  }
}

TEST_CASE("tags pack field number and wire type") {
  CHECK(make_tag(1, WireType::kVarint) == 0x08);
  CHECK(make_tag(2, WireType::kLenDelimited) == 0x12);
  TagResult t = decode_tag(Bytes{0x1D});
  CHECK(t.tag.field_number == 3);
  CHECK(t.tag.wire_type == WireType::kFixed32);
}

TEST_CASE("tags reject group wire types and field number zero") {
  CHECK(rpcacc::test::error_code_of([&] { decode_tag(Bytes{0x0B}); }) == ErrorCode::kMalformedTag);  // type 3
  CHECK_THROWS_AS(decode_tag(Bytes{0x0C}), Error);                                          // type 4
  CHECK_THROWS_AS(decode_tag(Bytes{0x07}), Error);  // field 0
}

TEST_CASE("scalar field encoding uses TV layout") {
  Bytes out;
  encode_scalar_field(1, ScalarType::kInt64, ScalarValue(std::int64_t{0}), out);
  CHECK(out == Bytes{0x08, 0x00});

  out.clear();
  encode_scalar_field(1, ScalarType::kInt64, ScalarValue(std::int64_t{150}), out);
  CHECK(out == Bytes{0x08, 0x96, 0x01});

  out.clear();
  encode_scalar_field(5, ScalarType::kFloat, ScalarValue(1.5f), out);
  CHECK(to_hex(out) == "2d0000c03f");
}

TEST_CASE("negative int32 sign-extends to ten bytes") {
  Bytes out;
  encode_scalar_field(1, ScalarType::kInt32, ScalarValue(std::int32_t{-1}), out);
  CHECK(out.size() == 1 + 10);
  VarintResult r = decode_varint(ByteView(out).subspan(1));
  CHECK(static_cast<std::int32_t>(r.value) == -1);
}

TEST_CASE("length-delimited field encoding uses TLV layout") {
  Bytes out;
  encode_len_field(2, Bytes{}, out);
  CHECK(out == Bytes{0x12, 0x00});

  out.clear();
  encode_len_field(2, Bytes{'h', 'i'}, out);
  CHECK(out == Bytes{0x12, 0x02, 0x68, 0x69});
}

TEST_CASE("encode_field rejects mismatched kinds") {
  FieldDescriptor desc;
  desc.name = "x";
  desc.number = 1;
  desc.type = ScalarType::kInt64;
  Bytes out;
  CHECK_THROWS_WITH_AS(encode_scalar_field(1, ScalarType::kInt64, ScalarValue(1.0), out),
                       doctest::Contains("TypeMismatch"), Error);
  CHECK_THROWS_AS(encode_field(desc, ByteView{}, out), Error);
}

namespace {

MessageSchema two_field_schema() {
  MessageSchema schema;
  schema.class_id = 1;
  schema.name = "M";
  FieldDescriptor a;
  a.name = "a";
  a.number = 1;
  a.type = ScalarType::kInt64;
  FieldDescriptor s;
  s.name = "s";
  s.number = 2;
  s.type = ScalarType::kString;
  schema.fields = {a, s};
  return schema;
}

}  // namespace

TEST_CASE("decode_field inverts the TV and TLV layouts") {
  MessageSchema schema = two_field_schema();

  Bytes tv{0x08, 0x00};
  DecodedField f = decode_field(tv, schema);
  CHECK(f.field_number == 1);
  CHECK(std::get<std::int64_t>(f.scalar) == 0);
  CHECK(f.consumed == 2);

  Bytes tlv{0x12, 0x02, 0x68, 0x69};
  f = decode_field(tlv, schema);
  CHECK(f.field_number == 2);
  CHECK(wire::Bytes(f.payload.begin(), f.payload.end()) == Bytes{'h', 'i'});
  CHECK(f.consumed == 4);
}

TEST_CASE("decode_field skips unknown fields by wire type") {
  MessageSchema schema = two_field_schema();
  // field 9, fixed32 payload
  Bytes buf{0x4D, 0x01, 0x02, 0x03, 0x04, /* then field 1 */ 0x08, 0x07};
  DecodedField f = decode_field(buf, schema);
  CHECK(f.desc == nullptr);
  CHECK(f.field_number == 9);
  CHECK(f.consumed == 5);
  DecodedField g = decode_field(ByteView(buf).subspan(f.consumed), schema);
  CHECK(g.field_number == 1);
  CHECK(std::get<std::int64_t>(g.scalar) == 7);
}

TEST_CASE("decode_field reports truncation") {
  MessageSchema schema = two_field_schema();
  // fixed32 tag with only 3 payload bytes, unknown field -> still must not trap
  CHECK_THROWS_WITH_AS(decode_field(Bytes{0x1D, 0x01, 0x02, 0x03}, schema),
                       doctest::Contains("Truncated"), Error);
  // declared string length runs past the buffer
  CHECK_THROWS_AS(decode_field(Bytes{0x12, 0x05, 0x68}, schema), Error);
}

TEST_CASE("packed payload round-trips scalar kinds") {
  std::vector<ScalarValue> elems = {ScalarValue(std::int64_t{-5}), ScalarValue(std::int64_t{0}),
                                    ScalarValue(std::int64_t{1ll << 40})};
  Bytes payload;
  encode_packed_payload(ScalarType::kInt64, elems, payload);
  auto back = decode_packed_payload(ScalarType::kInt64, payload);
  REQUIRE(back.size() == 3);
  CHECK(std::get<std::int64_t>(back[0]) == -5);
  CHECK(std::get<std::int64_t>(back[2]) == (1ll << 40));

  std::vector<ScalarValue> doubles = {ScalarValue(0.5), ScalarValue(-2.25)};
  payload.clear();
  encode_packed_payload(ScalarType::kDouble, doubles, payload);
  CHECK(payload.size() == 16);
  auto dback = decode_packed_payload(ScalarType::kDouble, payload);
  CHECK(std::get<double>(dback[1]) == -2.25);
}
