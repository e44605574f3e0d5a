#!/usr/bin/env python3
"""Regenerates tests/data/golden_vectors.json from the reference protobuf
implementation. Needs protoc and the google.protobuf python package; the
output is vendored so neither is a build dependency.

Usage: python3 tools/gen_golden_vectors.py
"""

import json
import os
import random
import struct
import subprocess
import sys
import tempfile
from pathlib import Path

# The system protoc may be older than the installed python runtime; the pure
# python backend accepts its generated code either way.
os.environ.setdefault("PROTOCOL_BUFFERS_PYTHON_IMPLEMENTATION", "python")

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"
PROTO = DATA / "golden.proto"


def compile_proto(tmp):
    subprocess.run(
        ["protoc", f"--proto_path={DATA}", f"--python_out={tmp}", str(PROTO)],
        check=True,
    )
    sys.path.insert(0, str(tmp))
    import golden_pb2  # noqa: E402

    return golden_pb2


def f32(value):
    """Round a python float to float32 precision."""
    return struct.unpack("<f", struct.pack("<f", value))[0]


def bits64(value):
    return struct.unpack("<Q", struct.pack("<d", value))[0]


def bits32(value):
    return struct.unpack("<I", struct.pack("<f", value))[0]


def leaf_value(rng, size_hint=64):
    v = {}
    if rng.random() < 0.8:
        v["a"] = rng.randint(-(2**31), 2**31 - 1)
    if rng.random() < 0.8:
        v["b"] = rng.randint(-(2**63), 2**63 - 1)
    if rng.random() < 0.8:
        v["c"] = rng.randint(0, 2**64 - 1)
    if rng.random() < 0.7:
        v["d_bits"] = bits64(rng.randint(-(2**40), 2**40) / 16.0)
    if rng.random() < 0.7:
        v["e_bits"] = bits32(f32(rng.randint(-(2**14), 2**14) / 8.0))
    if rng.random() < 0.5:
        v["f"] = rng.random() < 0.5
    if rng.random() < 0.7:
        v["s"] = "".join(rng.choice("abcdefghij xyz") for _ in range(rng.randint(1, size_hint)))
    if rng.random() < 0.7:
        v["bt"] = bytes(rng.randrange(256) for _ in range(rng.randint(1, size_hint))).hex()
    if rng.random() < 0.5:
        v["ra"] = [rng.randint(-(2**31), 2**31 - 1) for _ in range(rng.randint(1, 6))]
    if rng.random() < 0.4:
        v["rs"] = ["".join(rng.choice("pqrst") for _ in range(rng.randint(0, 12)))
                   for _ in range(rng.randint(1, 4))]
    if rng.random() < 0.4:
        v["rd_bits"] = [bits64(rng.randint(-4096, 4096) / 4.0) for _ in range(rng.randint(1, 5))]
    return v


def node_value(rng, depth):
    v = {}
    if rng.random() < 0.8:
        v["leaf"] = leaf_value(rng)
    if rng.random() < 0.5:
        v["leaves"] = [leaf_value(rng, 16) for _ in range(rng.randint(1, 3))]
    if rng.random() < 0.7:
        v["name"] = "node-%d" % rng.randint(0, 999)
    if depth > 1:
        v["child"] = node_value(rng, depth - 1)
    if rng.random() < 0.5:
        v["nums"] = [rng.randint(-(2**62), 2**62) for _ in range(rng.randint(1, 8))]
    return v


def fill_leaf(msg, v):
    for key in ("a", "b", "c", "f", "s"):
        if key in v:
            setattr(msg, key, v[key])
    if "d_bits" in v:
        msg.d = struct.unpack("<d", struct.pack("<Q", v["d_bits"]))[0]
    if "e_bits" in v:
        msg.e = struct.unpack("<f", struct.pack("<I", v["e_bits"]))[0]
    if "bt" in v:
        msg.bt = bytes.fromhex(v["bt"])
    for x in v.get("ra", []):
        msg.ra.append(x)
    for x in v.get("rs", []):
        msg.rs.append(x)
    for b in v.get("rd_bits", []):
        msg.rd.append(struct.unpack("<d", struct.pack("<Q", b))[0])


def fill_node(msg, v):
    if "leaf" in v:
        fill_leaf(msg.leaf, v["leaf"])
    for lv in v.get("leaves", []):
        fill_leaf(msg.leaves.add(), lv)
    if "name" in v:
        msg.name = v["name"]
    if "child" in v:
        fill_node(msg.child, v["child"])
    for x in v.get("nums", []):
        msg.nums.append(x)


def main():
    with tempfile.TemporaryDirectory() as tmp:
        pb = compile_proto(tmp)
        rng = random.Random(20240915)
        vectors = []

        def emit(name, cls, value):
            msg = pb.Leaf() if cls == "Leaf" else pb.Node()
            (fill_leaf if cls == "Leaf" else fill_node)(msg, value)
            vectors.append({
                "name": name,
                "message": cls,
                "value": value,
                "wire": msg.SerializeToString().hex(),
            })

        emit("empty-leaf", "Leaf", {})
        emit("empty-node", "Node", {})
        emit("varint-300", "Leaf", {"b": 300})
        emit("varint-negative-one", "Leaf", {"a": -1})
        emit("int64-min", "Leaf", {"b": -(2**63)})
        emit("uint64-max", "Leaf", {"c": 2**64 - 1})
        emit("double-half", "Leaf", {"d_bits": bits64(0.5)})
        emit("float-neg", "Leaf", {"e_bits": bits32(-2.25)})
        emit("bool-true", "Leaf", {"f": True})
        emit("string-hi", "Leaf", {"s": "hi"})
        emit("bytes-ff00", "Leaf", {"bt": "ff00"})
        emit("packed-int32", "Leaf", {"ra": [1, -1, 150, -(2**31)]})
        emit("repeated-strings", "Leaf", {"rs": ["", "a", "bb"]})
        emit("nested-one", "Node", {"leaf": {"a": 7}, "name": "n"})
        emit("deep-chain", "Node",
             {"child": {"child": {"child": {"child": {"name": "bottom"}}}}, "name": "top"})

        for i in range(45):
            if i % 3 == 0:
                emit(f"rand-node-{i}", "Node", node_value(rng, rng.randint(1, 5)))
            else:
                emit(f"rand-leaf-{i}", "Leaf", leaf_value(rng))

        out = DATA / "golden_vectors.json"
        out.write_text(json.dumps(vectors, indent=1) + "\n")
        print(f"wrote {len(vectors)} vectors to {out}")


if __name__ == "__main__":
    main()
