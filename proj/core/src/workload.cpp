#include "rpcacc/workload.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rpcacc {

void WorkloadSpec::validate() const {
  if (depth_min == 0 || depth_min > depth_max) {
    throw Error(ErrorCode::kInvalidSpec, "depth range must satisfy 1 <= min <= max");
  }
  if (fields_min == 0 || fields_min > fields_max) {
    throw Error(ErrorCode::kInvalidSpec, "fields range must satisfy 1 <= min <= max");
  }
  if (field_size_min == 0 || field_size_min > field_size_max) {
    throw Error(ErrorCode::kInvalidSpec, "field size range must satisfy 1 <= min <= max");
  }
  if (class_count == 0) {
    throw Error(ErrorCode::kInvalidSpec, "class_count must be positive");
  }
  if (acc_fraction < 0.0 || acc_fraction > 1.0 || repeated_probability < 0.0 ||
      repeated_probability > 1.0) {
    throw Error(ErrorCode::kInvalidSpec, "probabilities must lie in [0, 1]");
  }
}

namespace {

std::uint32_t capped_size_max(const WorkloadSpec& spec) {
  return spec.small_fields ? std::min<std::uint32_t>(spec.field_size_max, 1024)
                           : spec.field_size_max;
}

std::uint32_t rand_range(std::mt19937_64& rng, std::uint32_t lo, std::uint32_t hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<std::uint32_t>(rng() % (hi - lo + 1));
}

bool rand_chance(std::mt19937_64& rng, double p) {
  return (rng() >> 11) * 0x1.0p-53 < p;
}

ScalarType random_scalar_type(std::mt19937_64& rng) {
  static const ScalarType kKinds[] = {ScalarType::kInt32,  ScalarType::kInt64,
                                      ScalarType::kUInt64, ScalarType::kDouble,
                                      ScalarType::kFloat,  ScalarType::kBool};
  return kKinds[rng() % 6];
}

ScalarValue random_scalar(ScalarType type, std::mt19937_64& rng) {
  std::uint64_t bits = rng();
  switch (type) {
    case ScalarType::kInt32: return static_cast<std::int32_t>(bits);
    case ScalarType::kInt64: return static_cast<std::int64_t>(bits);
    case ScalarType::kUInt64: return bits;
    case ScalarType::kDouble: {
      // dyadic values round-trip exactly and keep JSON printable
      return static_cast<double>(static_cast<std::int32_t>(bits)) / 16.0;
    }
    case ScalarType::kFloat:
      return static_cast<float>(static_cast<std::int16_t>(bits)) / 8.0f;
    case ScalarType::kBool: return (bits & 1) != 0;
    default: return std::int64_t{0};
  }
}

wire::Bytes random_bytes(std::mt19937_64& rng, std::uint32_t len) {
  wire::Bytes out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

// Synthesized classes form a chain long enough to realize depth_max, with
// leaf-only classes mixed in. Class 1 is the root of every message.
SchemaTable synthesize_schemas(const WorkloadSpec& spec, std::mt19937_64& rng) {
  SchemaTable table;
  std::uint16_t n = static_cast<std::uint16_t>(std::max(spec.class_count, spec.depth_max));
  for (std::uint16_t id = 1; id <= n; ++id) {
    MessageSchema schema;
    schema.class_id = id;
    schema.name = "Class" + std::to_string(id);
    std::uint32_t nfields = rand_range(rng, spec.fields_min, spec.fields_max);
    bool can_nest = id < n;
    std::uint32_t number = 0;
    for (std::uint32_t f = 0; f < nfields; ++f) {
      number += rand_range(rng, 1, 3);  // leave gaps like hand-written schemas
      FieldDescriptor d;
      d.number = number;
      d.name = "f" + std::to_string(number);
      std::uint32_t kind = static_cast<std::uint32_t>(rng() % 10);
      if (kind < 4) {
        d.type = random_scalar_type(rng);
      } else if (kind < 7) {
        d.type = ScalarType::kBytes;
      } else if (kind < 8) {
        d.type = ScalarType::kString;
      } else if (can_nest) {
        d.type = ScalarType::kMessage;
        d.message_class_id = static_cast<std::uint16_t>(rand_range(rng, id + 1, n));
      } else {
        d.type = ScalarType::kBytes;
      }
      if (rand_chance(rng, spec.repeated_probability)) {
        d.label = Label::kRepeated;
      }
      if (d.addressing() == Addressing::kDereference && rand_chance(rng, spec.acc_fraction)) {
        d.acc = true;
      }
      schema.fields.push_back(std::move(d));
    }
    // Chain guarantee: classes below the depth frontier carry a sub-message.
    if (id < spec.depth_max) {
      bool has_sub = false;
      for (const auto& d : schema.fields) has_sub |= d.type == ScalarType::kMessage;
      if (!has_sub) {
        FieldDescriptor d;
        d.number = number + 1;
        d.name = "child";
        d.type = ScalarType::kMessage;
        d.message_class_id = static_cast<std::uint16_t>(id + 1);
        if (rand_chance(rng, spec.acc_fraction)) d.acc = true;
        schema.fields.push_back(std::move(d));
      }
    }
    table.add(std::move(schema));
  }
  return table;
}

struct GenState {
  const WorkloadSpec* spec;
  WorkloadStats stats;
  std::uint32_t realized_depth = 1;
};

void note_field(GenState& st, std::uint64_t bytes) {
  st.stats.total_fields += 1;
  st.stats.total_value_bytes += bytes;
}

MessageValue gen_message(const SchemaTable& table, std::uint16_t class_id,
                         std::uint32_t depth_budget, std::uint32_t depth, GenState& st,
                         std::mt19937_64& rng) {
  const WorkloadSpec& spec = *st.spec;
  const MessageSchema& schema = table.at(class_id);
  MessageValue msg(schema);
  st.realized_depth = std::max(st.realized_depth, depth);
  std::uint32_t size_max = capped_size_max(spec);

  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const FieldDescriptor& desc = schema.fields[i];
    if (desc.type == ScalarType::kMessage) {
      if (depth_budget <= 1) continue;  // prune at the depth frontier
      if (desc.label == Label::kRepeated) {
        RepMessages rep;
        std::uint32_t count = rand_range(rng, 1, 3);
        for (std::uint32_t j = 0; j < count; ++j) {
          SubMessage e;
          e.msg = std::make_unique<MessageValue>(gen_message(
              table, desc.message_class_id, depth_budget - 1, depth + 1, st, rng));
          rep.elems.push_back(std::move(e));
        }
        note_field(st, 0);
        msg.slots[i] = std::move(rep);
      } else {
        SubMessage sub;
        sub.msg = std::make_unique<MessageValue>(
            gen_message(table, desc.message_class_id, depth_budget - 1, depth + 1, st, rng));
        note_field(st, 0);
        msg.slots[i] = std::move(sub);
      }
      continue;
    }
    if (!rand_chance(rng, 0.9)) continue;  // occasional absent field
    if (desc.label == Label::kRepeated) {
      if (is_len_delimited_type(desc.type)) {
        RepBytes rep;
        std::uint32_t count = rand_range(rng, 1, 4);
        for (std::uint32_t j = 0; j < count; ++j) {
          std::uint32_t len = rand_range(rng, spec.field_size_min, size_max);
          rep.elems.push_back(BytesValue::of(random_bytes(rng, len)));
          note_field(st, len);
        }
        msg.slots[i] = std::move(rep);
      } else {
        RepScalars rep;
        std::uint32_t count = rand_range(rng, 1, 8);
        for (std::uint32_t j = 0; j < count; ++j) {
          rep.elems.push_back(random_scalar(desc.type, rng));
        }
        note_field(st, count * scalar_width(desc.type));
        msg.slots[i] = std::move(rep);
      }
    } else if (is_len_delimited_type(desc.type)) {
      std::uint32_t len = rand_range(rng, spec.field_size_min, size_max);
      msg.slots[i] = BytesValue::of(random_bytes(rng, len));
      note_field(st, len);
    } else {
      msg.slots[i] = random_scalar(desc.type, rng);
      note_field(st, scalar_width(desc.type));
    }
  }
  return msg;
}

}  // namespace

MessageValue generate_message(const SchemaTable& table, std::uint16_t class_id,
                              std::uint32_t depth_budget, const WorkloadSpec& spec,
                              std::mt19937_64& rng) {
  GenState st{&spec, {}, 1};
  return gen_message(table, class_id, depth_budget, 1, st, rng);
}

Workload generate_workload(const WorkloadSpec& spec, SchemaTable table) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  Workload wl;
  wl.table = std::move(table);

  // Root classes cycle through the table deterministically.
  std::vector<std::uint16_t> ids;
  for (const auto& [id, schema] : wl.table.classes()) ids.push_back(id);
  if (ids.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "schema table has no classes");
  }

  GenState st{&spec, {}, 1};
  std::uint64_t depth_sum = 0;
  for (std::uint32_t r = 0; r < spec.request_count; ++r) {
    std::uint16_t root = ids[r % ids.size()];
    std::uint32_t depth_budget = rand_range(rng, spec.depth_min, spec.depth_max);
    st.realized_depth = 1;
    wl.messages.push_back(gen_message(wl.table, root, depth_budget, 1, st, rng));
    depth_sum += st.realized_depth;
  }
  wl.stats = st.stats;
  if (st.stats.total_fields > 0) {
    wl.stats.mean_field_bytes = static_cast<double>(st.stats.total_value_bytes) /
                                static_cast<double>(st.stats.total_fields);
  }
  if (spec.request_count > 0) {
    wl.stats.mean_depth = static_cast<double>(depth_sum) / spec.request_count;
  }
  return wl;
}

Workload generate_workload(const WorkloadSpec& spec) {
  spec.validate();
  std::mt19937_64 schema_rng(spec.seed ^ 0x9E3779B97F4A7C15ull);
  SchemaTable table = synthesize_schemas(spec, schema_rng);
  // Synthesized workloads always instantiate the class-1 chain root.
  Workload wl = generate_workload(spec, std::move(table));
  return wl;
}

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfigError,
                  "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::kConfigError, "line " + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kConfigError, "cannot open config file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str());
}

WorkloadSpec workload_spec_from_kv(const std::map<std::string, std::string>& kv) {
  WorkloadSpec spec;
  auto get_u32 = [&](const char* key, std::uint32_t& out) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    try {
      out = static_cast<std::uint32_t>(std::stoul(it->second));
    } catch (...) {
      throw Error(ErrorCode::kConfigError, std::string("bad value for ") + key);
    }
  };
  auto get_f = [&](const char* key, double& out) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    try {
      out = std::stod(it->second);
    } catch (...) {
      throw Error(ErrorCode::kConfigError, std::string("bad value for ") + key);
    }
  };
  auto it = kv.find("workload.seed");
  if (it != kv.end()) spec.seed = std::stoull(it->second);
  get_u32("workload.request_count", spec.request_count);
  get_u32("workload.class_count", spec.class_count);
  get_u32("workload.depth_min", spec.depth_min);
  get_u32("workload.depth_max", spec.depth_max);
  get_u32("workload.fields_min", spec.fields_min);
  get_u32("workload.fields_max", spec.fields_max);
  get_u32("workload.field_size_min", spec.field_size_min);
  get_u32("workload.field_size_max", spec.field_size_max);
  it = kv.find("workload.small_fields");
  if (it != kv.end()) spec.small_fields = (it->second == "true" || it->second == "1");
  get_f("workload.acc_fraction", spec.acc_fraction);
  get_f("workload.repeated_probability", spec.repeated_probability);
  spec.validate();
  return spec;
}

}  // namespace rpcacc
