#include "rpcacc/proto_parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace rpcacc {

namespace {

struct Token {
  enum Kind { kIdent, kNumber, kString, kPunct, kEnd } kind = kEnd;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kSyntaxError, what + " at " + std::to_string(tok_.line) + ":" +
                                             std::to_string(tok_.col));
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        pos_ += 2;
        col_ += 2;
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
          if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
          } else {
            ++col_;
          }
          ++pos_;
        }
        if (pos_ + 1 >= src_.size()) {
          throw Error(ErrorCode::kSyntaxError, "unterminated block comment at " +
                                                   std::to_string(line_) + ":" +
                                                   std::to_string(col_));
        }
        pos_ += 2;
        col_ += 2;
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_space();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Token::kEnd, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '.')) {
        ++pos_;
        ++col_;
      }
      tok_.kind = Token::kIdent;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t start = pos_;
      ++pos_;
      ++col_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '.' || src_[pos_] == '-' || src_[pos_] == '+')) {
        ++pos_;
        ++col_;
      }
      tok_.kind = Token::kNumber;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      std::size_t start = ++pos_;
      ++col_;
      while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') {
        ++pos_;
        ++col_;
      }
      if (pos_ >= src_.size() || src_[pos_] != quote) {
        throw Error(ErrorCode::kSyntaxError, "unterminated string at " + std::to_string(line_) +
                                                 ":" + std::to_string(col_));
      }
      tok_.kind = Token::kString;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      ++pos_;
      ++col_;
      return;
    }
    tok_.kind = Token::kPunct;
    tok_.text = std::string(1, c);
    ++pos_;
    ++col_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

// proto3 scalar names that exist in the language but are outside the
// supported subset; naming them gives an UnknownType instead of a dangling
// message reference.
const std::set<std::string> kUnsupportedScalars = {
    "uint32",   "sint32",   "sint64", "fixed32", "fixed64",
    "sfixed32", "sfixed64", "map",    "group",
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  ProtoFile parse() {
    ProtoFile file;
    while (lex_.peek().kind != Token::kEnd) {
      const Token& t = lex_.peek();
      if (t.kind != Token::kIdent) {
        if (t.kind == Token::kPunct && t.text == ";") {
          lex_.next();
          continue;
        }
        lex_.fail("expected top-level declaration");
      }
      if (t.text == "syntax") {
        parse_syntax();
      } else if (t.text == "package") {
        lex_.next();
        Token name = expect(Token::kIdent, "package name");
        file.package = name.text;
        expect_punct(";");
      } else if (t.text == "option") {
        skip_option_stmt();
      } else if (t.text == "message") {
        parse_message(file, {});
      } else if (t.text == "import" || t.text == "service" || t.text == "enum") {
        lex_.fail("'" + t.text + "' is not supported");
      } else {
        lex_.fail("unexpected '" + t.text + "'");
      }
    }
    return file;
  }

 private:
  Token expect(Token::Kind kind, const std::string& what) {
    if (lex_.peek().kind != kind) lex_.fail("expected " + what);
    return lex_.next();
  }

  void expect_punct(const std::string& p) {
    if (lex_.peek().kind != Token::kPunct || lex_.peek().text != p) {
      lex_.fail("expected '" + p + "'");
    }
    lex_.next();
  }

  bool accept_punct(const std::string& p) {
    if (lex_.peek().kind == Token::kPunct && lex_.peek().text == p) {
      lex_.next();
      return true;
    }
    return false;
  }

  void parse_syntax() {
    lex_.next();  // syntax
    expect_punct("=");
    Token v = expect(Token::kString, "syntax string");
    if (v.text != "proto3") {
      lex_.fail("only proto3 syntax is supported");
    }
    expect_punct(";");
  }

  void skip_option_stmt() {
    lex_.next();  // option
    while (lex_.peek().kind != Token::kEnd &&
           !(lex_.peek().kind == Token::kPunct && lex_.peek().text == ";")) {
      lex_.next();
    }
    expect_punct(";");
  }

  void parse_message(ProtoFile& file, std::vector<std::string> scope) {
    lex_.next();  // message
    Token name = expect(Token::kIdent, "message name");
    expect_punct("{");

    std::string qualified;
    for (const auto& s : scope) qualified += s + ".";
    qualified += name.text;

    ProtoMessage msg;
    msg.name = qualified;
    msg.scope = scope;
    std::size_t slot = file.messages.size();
    file.messages.push_back(msg);  // reserve declaration position

    std::vector<std::string> inner_scope = scope;
    inner_scope.push_back(name.text);

    std::set<std::uint32_t> used_numbers;
    std::vector<ProtoField> fields;

    while (!(lex_.peek().kind == Token::kPunct && lex_.peek().text == "}")) {
      const Token& t = lex_.peek();
      if (t.kind == Token::kEnd) lex_.fail("unterminated message '" + qualified + "'");
      if (t.kind == Token::kPunct && t.text == ";") {
        lex_.next();
        continue;
      }
      if (t.kind == Token::kIdent && t.text == "message") {
        parse_message(file, inner_scope);
        continue;
      }
      if (t.kind == Token::kIdent && t.text == "option") {
        skip_option_stmt();
        continue;
      }
      if (t.kind == Token::kIdent &&
          (t.text == "oneof" || t.text == "enum" || t.text == "reserved" || t.text == "extensions")) {
        lex_.fail("'" + t.text + "' is not supported");
      }
      fields.push_back(parse_field(used_numbers, qualified));
    }
    expect_punct("}");
    file.messages[slot].fields = std::move(fields);
  }

  ProtoField parse_field(std::set<std::uint32_t>& used_numbers, const std::string& msg_name) {
    ProtoField f;
    Token first = expect(Token::kIdent, "field type");
    f.line = first.line;
    f.col = first.col;
    if (first.text == "repeated") {
      f.repeated = true;
      first = expect(Token::kIdent, "field type");
    } else if (first.text == "optional") {
      // proto3 explicit presence collapses to singular here
      first = expect(Token::kIdent, "field type");
    }
    if (kUnsupportedScalars.count(first.text)) {
      throw Error(ErrorCode::kUnknownType, "type '" + first.text + "' at " +
                                               std::to_string(first.line) + ":" +
                                               std::to_string(first.col));
    }
    f.type_name = first.text;
    Token name = expect(Token::kIdent, "field name");
    f.name = name.text;
    expect_punct("=");
    Token num = expect(Token::kNumber, "field number");
    long long parsed = 0;
    try {
      parsed = std::stoll(num.text);
    } catch (...) {
      lex_.fail("bad field number '" + num.text + "'");
    }
    if (parsed <= 0 || parsed > static_cast<long long>((1u << 29) - 1)) {
      lex_.fail("field number out of range");
    }
    f.number = static_cast<std::uint32_t>(parsed);
    if (!used_numbers.insert(f.number).second) {
      throw Error(ErrorCode::kDuplicateFieldNumber,
                  "field number " + std::to_string(f.number) + " reused in message '" + msg_name +
                      "'");
    }
    if (accept_punct("[")) {
      parse_field_options(f);
    }
    expect_punct(";");
    return f;
  }

  void parse_field_options(ProtoField& f) {
    while (true) {
      Token opt = expect(Token::kIdent, "field option");
      if (opt.text == "Acc") {
        f.acc = true;
      } else if (opt.text == "acc") {
        expect_punct("=");
        Token v = expect(Token::kIdent, "bool");
        if (v.text == "true") {
          f.acc = true;
        } else if (v.text == "false") {
          f.acc = false;
        } else {
          lex_.fail("acc expects true or false");
        }
      } else {
        // Foreign option: swallow "= value" if present, keep the file parseable.
        if (accept_punct("=")) {
          if (lex_.peek().kind == Token::kEnd) lex_.fail("option value");
          lex_.next();
        }
      }
      if (accept_punct("]")) break;
      expect_punct(",");
    }
  }

  Lexer lex_;
};

std::string resolve_reference(const ProtoMessage& msg, const std::string& type_name,
                              const std::map<std::string, std::uint16_t>& by_name) {
  // The message's own body is the innermost scope, then each enclosing
  // message outward, then the top level.
  std::vector<std::string> chain;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = msg.name.find('.', pos);
    if (dot == std::string::npos) {
      chain.push_back(msg.name.substr(pos));
      break;
    }
    chain.push_back(msg.name.substr(pos, dot - pos));
    pos = dot + 1;
  }
  for (std::size_t n = chain.size() + 1; n-- > 0;) {
    std::string candidate;
    for (std::size_t i = 0; i < n; ++i) candidate += chain[i] + ".";
    candidate += type_name;
    if (by_name.count(candidate)) return candidate;
  }
  return {};
}

}  // namespace

ProtoFile parse_proto(std::string_view text) {
  Parser parser(text);
  return parser.parse();
}

CompileResult compile(const ProtoFile& file) {
  std::map<std::string, std::uint16_t> by_name;
  std::uint16_t next_id = 1;
  for (const auto& m : file.messages) {
    by_name[m.name] = next_id++;
  }

  CompileResult result;
  std::ostringstream report;
  report << "schema table: " << file.messages.size() << " classes\n";

  for (const auto& m : file.messages) {
    MessageSchema schema;
    schema.class_id = by_name[m.name];
    schema.name = m.name;
    for (const auto& pf : m.fields) {
      FieldDescriptor d;
      d.name = pf.name;
      d.number = pf.number;
      d.label = pf.repeated ? Label::kRepeated : Label::kSingular;
      d.acc = pf.acc;
      if (auto scalar = scalar_type_from_name(pf.type_name)) {
        d.type = *scalar;
      } else {
        std::string target = resolve_reference(m, pf.type_name, by_name);
        if (target.empty()) {
          throw Error(ErrorCode::kUnresolvedReference,
                      "type '" + pf.type_name + "' in message '" + m.name + "'");
        }
        d.type = ScalarType::kMessage;
        d.message_class_id = by_name[target];
      }
      if (d.acc && d.addressing() == Addressing::kDirect) {
        throw Error(ErrorCode::kAccOnDirectField,
                    "'Acc' on direct field '" + m.name + "." + pf.name + "'");
      }
      schema.fields.push_back(std::move(d));
    }
    std::sort(schema.fields.begin(), schema.fields.end(),
              [](const FieldDescriptor& a, const FieldDescriptor& b) { return a.number < b.number; });
    report << "  [" << schema.class_id << "] " << schema.name << "\n";
    for (const auto& d : schema.fields) {
      report << "    " << d.number << ": " << (d.label == Label::kRepeated ? "repeated " : "")
             << scalar_type_name(d.type) << " " << d.name << "  ("
             << (d.addressing() == Addressing::kDereference ? "deref" : "direct");
      if (d.addressing() == Addressing::kDereference) {
        report << ", placed " << (d.acc ? "accel" : "host");
      }
      report << ")\n";
    }
    result.table.add(std::move(schema));
  }
  result.report = report.str();
  return result;
}

CompileResult compile_proto_text(std::string_view text) {
  return compile(parse_proto(text));
}

}  // namespace rpcacc
