#!/usr/bin/env python3
"""Regenerates the Wasm fixtures and their expected values.

Modules are assembled from WAT with wasmtime's wat2wasm. Expected function
spans are recovered by a minimal independent reader below, digests use
hashlib, and opcode counts are taken from the flat WAT text (one
instruction per line; each body also ends with an implicit `end`).
"""
import hashlib
import json
import pathlib

import wasmtime

HERE = pathlib.Path(__file__).resolve().parent / "wasm"

FIXTURES = {
    "empty": "(module)",
    "two_funcs": """
(module
  (memory 1)
  (func $add (param i32 i32) (result i32)
    local.get 0
    local.get 1
    i32.add)
  (func $mix (param i32) (result i32) (local i64 i64) (local i32)
    local.get 0
    i32.const 5
    i32.shl
    local.get 0
    i32.xor)
  (data (i32.const 0) "alpha"))
""",
    "two_funcs_other_data": """
(module
  (memory 1)
  (func $add (param i32 i32) (result i32)
    local.get 0
    local.get 1
    i32.add)
  (func $mix (param i32) (result i32) (local i64 i64) (local i32)
    local.get 0
    i32.const 5
    i32.shl
    local.get 0
    i32.xor)
  (data (i32.const 0) "a completely different data segment"))
""",
    "three_xor": """
(module
  (func $x (param i32 i32) (result i32)
    local.get 0
    local.get 1
    i32.xor
    local.get 1
    i32.xor
    local.get 0
    i32.xor))
""",
    "miner_like": """
(module
  (import "env" "log" (func $log (param i32)))
  (memory 1)
  (func $cryptonight_hash (param i32) (result i64)
    local.get 0
    i64.load
    local.get 0
    i64.load offset=8
    i64.xor
    i64.const 13
    i64.rotl
    local.get 0
    i32.load8_u offset=3
    i64.extend_i32_u
    i64.shr_u
    local.get 0
    i64.load32_s offset=16
    i64.xor)
  (func $keccakf (param i32)
    local.get 0
    local.get 0
    i32.load
    i32.const 7
    i32.rotr
    i32.store
    local.get 0
    local.get 0
    i64.load offset=8
    i64.const 1
    i64.shl
    i64.store offset=8
    block
      loop
        local.get 0
        i32.eqz
        br_if 1
        local.get 0
        call $log
        br 0
      end
    end)
  (func $render (param f32) (result f32)
    local.get 0
    f32.const 2.5
    f32.mul)
  (export "hash" (func $cryptonight_hash)))
""",
}

# Per-class counts taken from the WAT above (end opcodes included in total).
EXPECTED_COUNTS = {
    "empty": dict(xor=0, shift=0, load=0, store=0, functions=0, total=0),
    "two_funcs": dict(xor=1, shift=1, load=0, store=0, functions=2, total=3 + 1 + 5 + 1),
    "three_xor": dict(xor=3, shift=0, load=0, store=0, functions=1, total=7 + 1),
    # cryptonight_hash: 14 lines + end; keccakf: 22 lines (incl. two `end`) + end;
    # render: 3 + end
    "miner_like": dict(xor=2, shift=4, load=6, store=2, functions=3, total=15 + 23 + 4),
}


def read_u32(buf, pos):
    result = shift = 0
    while True:
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        shift += 7
        if not b & 0x80:
            return result, pos


def function_spans(module):
    assert module[:4] == b"\0asm"
    pos = 8
    while pos < len(module):
        sid = module[pos]
        size, pos = read_u32(module, pos + 1)
        end = pos + size
        if sid == 10:
            count, p = read_u32(module, pos)
            out = []
            for _ in range(count):
                body_size, p = read_u32(module, p)
                body_end = p + body_size
                local_groups, q = read_u32(module, p)
                for _ in range(local_groups):
                    _, q = read_u32(module, q)
                    q += 1
                out.append((module[p:q], module[q:body_end]))
                p = body_end
            return out
        pos = end
    return []


def main():
    HERE.mkdir(exist_ok=True)
    expected = {}
    for name, wat in FIXTURES.items():
        binary = bytes(wasmtime.wat2wasm(wat))
        (HERE / f"{name}.wasm").write_bytes(binary)
        spans = function_spans(binary)
        concat = b"".join(locals_ + code for locals_, code in spans)
        entry = {
            "functions": [{"locals_hex": l.hex(), "code_hex": c.hex()} for l, c in spans],
            "signature": hashlib.sha256(concat).hexdigest(),
        }
        if name in EXPECTED_COUNTS:
            entry["counts"] = EXPECTED_COUNTS[name]
        expected[name] = entry
    (HERE / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
