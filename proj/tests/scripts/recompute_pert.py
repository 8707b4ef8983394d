#!/usr/bin/env python3
"""Recompute Pert and ASR from raw attack records and compare with a report CSV.

usage: recompute_pert.py REPORT_CSV RESULTS_JSONL [RESULTS_JSONL ...]
Exit status 0 when every row matches within 1e-12 relative, 1 otherwise.
"""

import csv
import json
import sys
from collections import defaultdict

TOLERANCE = 1e-12


def load_groups(paths):
    groups = defaultdict(list)
    for path in paths:
        header = None
        universal_norm = None
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                row = json.loads(line)
                kind = row["type"]
                if kind == "header":
                    header = row
                elif kind == "universal":
                    universal_norm = row["l2_norm"]
                elif kind == "instance":
                    strategy = header["strategy"] or "-"
                    for k_prime, success in row["success_at"].items():
                        key = (header["attack"], header["k"], strategy, int(k_prime))
                        norm = universal_norm if universal_norm is not None else row["l2_norm"]
                        groups[key].append((success, norm, row["input_dim"]))
    return groups


def close(a, b):
    return abs(a - b) <= TOLERANCE * max(abs(a), abs(b), 1e-300)


def main(argv):
    if len(argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    groups = load_groups(argv[2:])
    with open(argv[1], encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))

    bad = 0
    for row in rows:
        key = (row["attack"], int(row["k"]), row["strategy"], int(row["k_prime"]))
        records = groups.pop(key, [])
        n = len(records)
        wins = [norm / dim for success, norm, dim in records if success]
        asr = len(wins) / n if n else float("nan")
        pert = sum(wins) / (n * asr) if wins else None
        reported_pert = float(row["pert"]) if row["pert"] else None
        ok = n == int(row["n"]) and close(asr, float(row["asr"]))
        ok = ok and ((pert is None and reported_pert is None) or
                     (pert is not None and reported_pert is not None and close(pert, reported_pert)))
        print(f"{'ok ' if ok else 'BAD'} {key}: n={n} asr={asr!r} pert={pert!r} "
              f"reported pert={reported_pert!r}")
        bad += not ok
    for key in groups:
        print(f"BAD {key}: present in records but missing from the report")
        bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
