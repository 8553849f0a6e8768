#!/usr/bin/env python3
"""Independent sequential word counter: ASCII-alphabetic runs, lowercased.

Produces the oracle JSON used by the test suite.
"""
import json
import re
import sys
from collections import Counter

TOKEN = re.compile(r"[A-Za-z]+")


def count(path: str) -> Counter:
    counts = Counter()
    with open(path) as f:
        for line in f:
            for tok in TOKEN.findall(line):
                counts[tok.lower()] += 1
    return counts


if __name__ == "__main__":
    src, dst = sys.argv[1], sys.argv[2]
    with open(dst, "w") as f:
        json.dump(dict(sorted(count(src).items())), f, indent=1)
        f.write("\n")
