"""Protocol-faithful stand-in for the definition resolver, used by client
tests. Speaks the same NDJSON request/response contract and serves canned
definitions for the symbols it knows about."""

from __future__ import annotations

import argparse
import json
import sys

CANNED = {
    "formatUser": {
        "symbol": "formatUser", "file": "src/users.ts",
        "byte_range": [0, 52],
        "text": "export function formatUser(user: User): string { ... }",
        "kind": "function", "depth": 0, "parent": None,
    },
    "User": {
        "symbol": "User", "file": "src/types.ts",
        "byte_range": [0, 64],
        "text": "export interface User { name: string; location: Location }",
        "kind": "interface", "depth": 0, "parent": None,
    },
    "Location": {
        "symbol": "Location", "file": "src/types.ts",
        "byte_range": [70, 130],
        "text": "export interface Location { city: string; countryCode: string }",
        "kind": "interface", "depth": 1, "parent": "User",
    },
}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--project", required=True)
    parser.add_argument("--crash-on", type=int, default=None)
    args = parser.parse_args()
    for line in sys.stdin:
        if not line.strip():
            continue
        request = json.loads(line)
        if args.crash_on is not None and request["id"] == args.crash_on:
            return 1
        definitions = []
        warnings = []
        for occ in request.get("occurrences", []):
            record = CANNED.get(occ["symbol"])
            if record is None:
                warnings.append(f"unresolved: {occ['symbol']}")
                continue
            definitions.append(record)
            if record["symbol"] == "User" and request.get("max_depth", 2) >= 1:
                definitions.append(CANNED["Location"])
        definitions.sort(key=lambda d: d["depth"])
        response = {
            "proto_version": 1,
            "id": request["id"],
            "definitions": definitions,
            "warnings": warnings,
        }
        sys.stdout.write(json.dumps(response) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
