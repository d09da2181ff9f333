#!/usr/bin/env python3
"""Regenerate the bundled data files under crates/core/data/.

Sources (fetch with `pip download jieba opencc-python-reimplemented --no-deps`):
  --jieba   extracted jieba-0.42.1/jieba directory (MIT)
  --opencc  extracted opencc/dictionary directory (Apache-2.0)
"""
import argparse
import ast
import json
import math
import os

FIXTURE_WORDS = os.path.join(os.path.dirname(__file__), "fixture_words.txt")


def read_py_dict(path):
    src = open(path, encoding="utf-8").read()
    return ast.literal_eval(src.split("=", 1)[1].strip())


def build_convert_table(opencc_dir, out):
    lines = ["# traditional -> simplified, derived from OpenCC TSCharacters/TSPhrases",
             "# one target per key: the first OpenCC candidate"]
    for name in ("TSPhrases.txt", "TSCharacters.txt"):
        for line in open(os.path.join(opencc_dir, name), encoding="utf-8"):
            line = line.rstrip("\n")
            if not line:
                continue
            key, targets = line.split("\t")
            lines.append(f"{key}\t{targets.split(' ')[0]}")
    with open(out, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return len(lines) - 2


def build_lexicon(jieba_dir, out, top_n, extra):
    entries = []
    for line in open(os.path.join(jieba_dir, "dict.txt"), encoding="utf-8"):
        parts = line.split()
        entries.append((parts[0], int(parts[1]), parts[2] if len(parts) > 2 else ""))
    by_word = {w: (w, f, t) for w, f, t in entries}
    entries.sort(key=lambda e: (-e[1], e[0]))
    keep = {e[0]: e for e in entries[:top_n]}
    for w in extra:
        if w in by_word:
            keep[w] = by_word[w]
        else:
            keep[w] = (w, 50, "n")
    rows = sorted(keep.values(), key=lambda e: e[0])
    with open(out, "w", encoding="utf-8") as f:
        for w, fr, t in rows:
            f.write(f"{w} {fr} {t}\n" if t else f"{w} {fr}\n")
    return rows


def build_hmm(jieba_dir, out, lexicon_rows, max_chars):
    fin = os.path.join(jieba_dir, "finalseg")
    start = read_py_dict(os.path.join(fin, "prob_start.py"))
    trans = read_py_dict(os.path.join(fin, "prob_trans.py"))
    emit = read_py_dict(os.path.join(fin, "prob_emit.py"))
    counts = {}
    for w, fr, _ in lexicon_rows:
        for ch in w:
            counts[ch] = counts.get(ch, 0) + fr
    chars = set(sorted(counts, key=lambda c: (-counts[c], c))[:max_chars])
    model = {
        "start": {s: p for s, p in start.items() if p > -1e99},
        "trans": trans,
        "emit": {s: {c: p for c, p in sorted(row.items()) if c in chars}
                 for s, row in emit.items()},
        "floor": math.log(1e-12),
    }
    with open(out, "w", encoding="utf-8") as f:
        json.dump(model, f, ensure_ascii=False, sort_keys=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--jieba", required=True)
    ap.add_argument("--opencc", required=True)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data"))
    ap.add_argument("--top-n", type=int, default=30000)
    ap.add_argument("--max-chars", type=int, default=3500)
    args = ap.parse_args()
    extra = [w for line in open(FIXTURE_WORDS, encoding="utf-8")
             if not line.startswith("#") for w in line.split()]
    n = build_convert_table(args.opencc, os.path.join(args.out, "ts_table.txt"))
    rows = build_lexicon(args.jieba, os.path.join(args.out, "lexicon.txt"), args.top_n, extra)
    build_hmm(args.jieba, os.path.join(args.out, "hmm.json"), rows, args.max_chars)
    print(f"conversion pairs: {n}, lexicon words: {len(rows)}")


if __name__ == "__main__":
    main()
