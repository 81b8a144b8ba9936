#!/usr/bin/env python3
"""Cut a small, self-consistent excerpt out of the WordNet 3.0 noun database.

Starting from seed synsets, follow hyponym ("~") pointers breadth-first until
--size synsets are collected. Pointers leaving the excerpt are dropped (and
p_cnt rewritten); index lines keep only offsets inside the excerpt. The
license header is copied verbatim.

    python3 scripts/make_wordnet_excerpt.py --wordnet-dir /path/to/dict \
        --out tests/data/wordnet
"""

import argparse
import collections
import os

DEFAULT_SEEDS = [
    "02958343",  # car, auto, automobile, machine, motorcar
    "13104059",  # tree
    "12268246",  # oak, oak_tree
]


def split_header(lines):
    header = [l for l in lines if l.startswith("  ")]
    body = [l for l in lines if not l.startswith("  ") and l.strip()]
    return header, body


def parse_data(line):
    head, _, gloss = line.partition(" | ")
    tok = head.split()
    w_cnt = int(tok[3], 16)
    words_end = 4 + 2 * w_cnt
    p_cnt = int(tok[words_end])
    ptrs = [tok[words_end + 1 + 4 * i: words_end + 5 + 4 * i] for i in range(p_cnt)]
    rest = tok[words_end + 1 + 4 * p_cnt:]
    return tok[:words_end], ptrs, rest, gloss


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wordnet-dir", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--size", type=int, default=200)
    ap.add_argument("--seed", action="append", help="extra seed synset offsets")
    args = ap.parse_args()

    with open(os.path.join(args.wordnet_dir, "data.noun"), encoding="utf-8") as f:
        data_header, data_body = split_header(f.read().splitlines())
    with open(os.path.join(args.wordnet_dir, "index.noun"), encoding="utf-8") as f:
        index_header, index_body = split_header(f.read().splitlines())

    records = {}
    for line in data_body:
        records[line.split(" ", 1)[0]] = parse_data(line)

    seeds = DEFAULT_SEEDS + (args.seed or [])
    chosen, order = set(), []
    queue = collections.deque(seeds)
    while queue and len(order) < args.size:
        off = queue.popleft()
        if off in chosen:
            continue
        chosen.add(off)
        order.append(off)
        _, ptrs, _, _ = records[off]
        queue.extend(p[1] for p in ptrs if p[0] == "~" and p[2] == "n")

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "data.noun"), "w", encoding="utf-8") as f:
        f.write("\n".join(data_header) + "\n")
        for off in sorted(chosen):
            head, ptrs, rest, gloss = records[off]
            kept = [p for p in ptrs if p[1] in chosen]
            fields = head + ["%03d" % len(kept)] + [x for p in kept for x in p] + rest
            f.write(" ".join(fields) + " | " + gloss + "\n")

    with open(os.path.join(args.out, "index.noun"), "w", encoding="utf-8") as f:
        f.write("\n".join(index_header) + "\n")
        for line in index_body:
            tok = line.split()
            p_cnt = int(tok[3])
            offsets = [o for o in tok[6 + p_cnt:] if o in chosen]
            if not offsets:
                continue
            tagsense = min(int(tok[5 + p_cnt]), len(offsets))
            fields = tok[:2] + [str(len(offsets)), tok[3]] + tok[4:4 + p_cnt] + [str(len(offsets)), str(tagsense)]
            f.write(" ".join(fields + offsets) + "  \n")

    print("wrote %d synsets" % len(chosen))


if __name__ == "__main__":
    main()
