#!/usr/bin/env python3
"""Writes captures/harness_sample.jsonl in the capture-harness output schema."""
import base64
import json
import pathlib

HERE = pathlib.Path(__file__).parent


def b64(data):
    return base64.b64encode(data).decode()


def main():
    miner = (HERE / "wasm" / "miner_like.wasm").read_bytes()
    other = (HERE / "wasm" / "three_xor.wasm").read_bytes()
    records = [
        {
            "domain": "miner.example",
            "final_url": "https://www.miner.example/",
            "html_b64": b64(b'<html><head><script src="https://coinhive.com/lib/coinhive.min.js"></script></head></html>'),
            "wasm_modules": [b64(miner)],
            "ws_frames": [
                {"direction": "sent", "timestamp_ms": 1525132800123, "payload_b64": b64(b'{"type":"auth"}')},
                {"direction": "received", "timestamp_ms": 1525132800456, "payload_b64": b64(b'{"type":"job"}')},
            ],
            "load_state": "loaded",
        },
        {
            "domain": "quiet.example",
            "final_url": "http://www.quiet.example/",
            "html_b64": b64(b"<html><body>hello</body></html>"),
            "wasm_modules": [],
            "ws_frames": [],
            "load_state": "timeout",
        },
        {
            "domain": "two.example",
            "final_url": "https://www.two.example/landing",
            "html_b64": b64(b"<script>var x = 1;</script>"),
            "wasm_modules": [b64(other), b64(miner)],
            "ws_frames": [],
            "load_state": "loaded",
            "error": None,
        },
    ]
    with open(HERE / "captures" / "harness_sample.jsonl", "w") as out:
        for r in records:
            out.write(json.dumps(r) + "\n")


if __name__ == "__main__":
    main()
