#!/usr/bin/env python3
"""Deterministic ~1 MB ASCII text fixture for word-count tests."""
import random
import sys

VOCAB = (
    "the quick brown fox jumps over a lazy dog while seven wizards brew "
    "strong potions under moonlight and every river flows toward distant "
    "mountains where ancient stones remember forgotten songs of winter "
    "spring summer autumn rain wind fire earth water light shadow time "
    "memory stone bridge castle village market harvest wheat barley oats "
    "miller baker smith weaver shepherd flock wool cloth thread needle"
).split()

PUNCT = ["", "", "", ",", ".", ";", "!", "?"]


def main(out_path: str, seed: int = 42, target_bytes: int = 1_000_000) -> None:
    rng = random.Random(seed)
    lines = []
    size = 0
    while size < target_bytes:
        n = rng.randint(4, 14)
        words = []
        for _ in range(n):
            w = rng.choice(VOCAB)
            if rng.random() < 0.15:
                w = w.capitalize()
            elif rng.random() < 0.05:
                w = w.upper()
            words.append(w + rng.choice(PUNCT))
        line = " ".join(words)
        lines.append(line)
        size += len(line) + 1
    with open(out_path, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "corpus.txt")
