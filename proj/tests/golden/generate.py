#!/usr/bin/env python3
"""Regenerate the golden tables from exact binomials (math.comb); shares no code with the C++ library.

    python3 tests/golden/generate.py tests/golden
"""
import math
import sys
from pathlib import Path

P = 641


def good_table(p):
    rows = []
    for g in range(1, p):
        for k in range(p):
            if math.comb(k, g) % p == p - 1:
                rows.append((g, k))
                break
    return rows


def badbad_table(p, good):
    bad = [d for d in range(p) if d not in good]  # 0 included: C(k,0) = 1 never helps
    values = {d: {math.comb(k, d) % p for k in range(p)} for d in bad}
    rows = []
    for a in bad:
        for b in bad:
            # blocked when no x in V_a has -1/x in V_b
            if not any(x and (-pow(x, -1, p)) % p in values[b] for x in values[a]):
                rows.append((a, b))
    return rows


def write(path, name, rows):
    with open(path, "w") as out:
        out.write(f"covercert-table {name} v1 p={P}\n")
        for row in rows:
            out.write(" ".join(map(str, row)) + "\n")


def main():
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent)
    g = good_table(P)
    write(outdir / "g-641.tbl", "g", g)
    write(outdir / "badbad-641.tbl", "badbad", badbad_table(P, {row[0] for row in g}))


if __name__ == "__main__":
    main()
