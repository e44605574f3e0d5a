#include "rpcacc/proto_parser.hpp"

#include "doctest.h"
#include "rpcacc/schema_io.hpp"
#include "test_util.hpp"

using namespace rpcacc;
using rpcacc::test::error_code_of;

TEST_CASE("parses the Acc label on a dereference field") {
  ProtoFile file = parse_proto("message Photo { bytes image = 1 [Acc]; int64 size = 2; }");
  REQUIRE(file.messages.size() == 1);
  REQUIRE(file.messages[0].fields.size() == 2);
  CHECK(file.messages[0].fields[0].acc);
  CHECK_FALSE(file.messages[0].fields[1].acc);
}

TEST_CASE("acc = true spelling is equivalent") {
  ProtoFile file = parse_proto("message M { bytes b = 1 [acc = true]; string s = 2 [acc=false]; }");
  CHECK(file.messages[0].fields[0].acc);
  CHECK_FALSE(file.messages[0].fields[1].acc);
}

TEST_CASE("empty file parses to zero messages") {
  CHECK(parse_proto("").messages.empty());
  CHECK(parse_proto("// just a comment\n").messages.empty());
}

TEST_CASE("plain proto3 files parse unchanged") {
  const char* text = R"(
    syntax = "proto3";
    package demo.app;
    option java_package = "com.example";

    /* request */
    message Req {
      optional int32 flags = 1;
      repeated string tags = 2;
      Req nested_ref = 3;  // self reference
      bytes blob = 4 [deprecated = true];
    }
  )";
  ProtoFile file = parse_proto(text);
  CHECK(file.package == "demo.app");
  REQUIRE(file.messages.size() == 1);
  CHECK(file.messages[0].fields.size() == 4);
  CHECK_FALSE(file.messages[0].fields[3].acc);  // foreign option ignored
}

TEST_CASE("duplicate field numbers are rejected") {
  CHECK(error_code_of([] { parse_proto("message M { int32 a = 1; int32 b = 1; }"); }) ==
        ErrorCode::kDuplicateFieldNumber);
}

TEST_CASE("syntax errors carry position") {
  try {
    parse_proto("message {}");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSyntaxError);
    CHECK(std::string(e.what()).find("1:") != std::string::npos);
  }
}

TEST_CASE("unsupported proto3 scalar names are UnknownType") {
  CHECK(error_code_of([] { parse_proto("message M { sint32 a = 1; }"); }) ==
        ErrorCode::kUnknownType);
  CHECK(error_code_of([] { parse_proto("message M { uint32 a = 1; }"); }) ==
        ErrorCode::kUnknownType);
}

TEST_CASE("compile assigns class ids in declaration order") {
  CompileResult r = compile_proto_text(R"(
    message User { int64 id = 1; Photo avatar = 2; }
    message Photo { bytes image = 1 [Acc]; int64 size = 2; }
  )");
  CHECK(r.table.size() == 2);
  CHECK(r.table.at(1).name == "User");
  CHECK(r.table.at(2).name == "Photo");
  CHECK(r.table.at(1).fields[1].message_class_id == 2);
  CHECK(r.table.placement_bit(2, 1));        // Photo.image -> accelerator
  CHECK_FALSE(r.table.placement_bit(1, 2));  // User.avatar -> host
  CHECK(r.report.find("Photo") != std::string::npos);
}

TEST_CASE("all-direct message compiles with host placement everywhere") {
  CompileResult r = compile_proto_text("message M { int32 a = 1; double d = 2; bool b = 3; }");
  for (const auto& f : r.table.at(1).fields) {
    CHECK_FALSE(f.acc);
    CHECK(f.addressing() == Addressing::kDirect);
  }
}

TEST_CASE("Acc on a direct field is rejected at compile") {
  CHECK(error_code_of([] { compile_proto_text("message M { int64 x = 1 [Acc]; }"); }) ==
        ErrorCode::kAccOnDirectField);
  // repeated scalars are dereference fields, so Acc is allowed there
  CompileResult ok = compile_proto_text("message M { repeated int64 xs = 1 [Acc]; }");
  CHECK(ok.table.at(1).fields[0].acc);
}

TEST_CASE("unresolved message references fail compile") {
  CHECK(error_code_of([] { compile_proto_text("message M { Missing m = 1; }"); }) ==
        ErrorCode::kUnresolvedReference);
}

TEST_CASE("nested message definitions resolve by scope") {
  CompileResult r = compile_proto_text(R"(
    message Outer {
      message Inner { int32 v = 1; }
      Inner inner = 1;
    }
  )");
  CHECK(r.table.size() == 2);
  const MessageSchema* outer = r.table.find_by_name("Outer");
  REQUIRE(outer != nullptr);
  CHECK(r.table.at(outer->fields[0].message_class_id).name == "Outer.Inner");
}

TEST_CASE("fields are ordered by number after compile") {
  CompileResult r = compile_proto_text("message M { int32 z = 9; int32 a = 1; int32 m = 4; }");
  const auto& fields = r.table.at(1).fields;
  CHECK(fields[0].number == 1);
  CHECK(fields[1].number == 4);
  CHECK(fields[2].number == 9);
}

TEST_CASE("schema table image round-trips") {
  CompileResult r = compile_proto_text(R"(
    message User { int64 id = 1; Photo avatar = 2; repeated double ds = 3; }
    message Photo { bytes image = 1 [Acc]; int64 size = 2; }
  )");
  auto image = serialize_schema_table(r.table);
  SchemaTable back = load_schema_table(image);
  CHECK(back == r.table);
  CHECK(back.placement_bit(2, 1));
}

TEST_CASE("compilation is deterministic") {
  const char* text = "message A { int32 a = 1; } message B { A a = 1; bytes b = 2 [Acc]; }";
  auto img1 = serialize_schema_table(compile_proto_text(text).table);
  auto img2 = serialize_schema_table(compile_proto_text(text).table);
  CHECK(img1 == img2);
}

TEST_CASE("corrupted image magic is BadMagic") {
  auto image = serialize_schema_table(compile_proto_text("message M { int32 a = 1; }").table);
  image[0] ^= 0xFF;
  CHECK(error_code_of([&] { load_schema_table(image); }) == ErrorCode::kBadMagic);
}

TEST_CASE("version mismatch is reported") {
  auto image = serialize_schema_table(compile_proto_text("message M { int32 a = 1; }").table);
  image[4] = 0x7F;
  CHECK(error_code_of([&] { load_schema_table(image); }) == ErrorCode::kVersionMismatch);
}

TEST_CASE("truncated image is reported") {
  auto image = serialize_schema_table(compile_proto_text("message M { int32 a = 1; }").table);
  image.resize(image.size() - 3);
  CHECK(error_code_of([&] { load_schema_table(image); }) == ErrorCode::kTruncated);
}

TEST_CASE("placement bit updates reject direct fields") {
  SchemaTable t = rpcacc::test::table_of("message M { int64 a = 1; bytes b = 2; }");
  t.set_placement_bit(1, 2, true);
  CHECK(t.placement_bit(1, 2));
  CHECK(error_code_of([&] { t.set_placement_bit(1, 1, true); }) == ErrorCode::kAccOnDirectField);
  CHECK(error_code_of([&] { t.set_placement_bit(1, 9, true); }) == ErrorCode::kUnknownClassId);
}
