#!/usr/bin/env python3
"""Regenerate the synthetic two-topic fixture corpus (crates/core/data/fixture/).

    python3 scripts/make_fixture.py --st-table opencc/dictionary/STCharacters.txt
"""
import argparse
import json
import os
import random
from datetime import datetime, timedelta, timezone

HERE = os.path.dirname(__file__)
OUT = os.path.join(HERE, "..", "crates", "core", "data", "fixture")


def load_sections(path):
    sections, cur = {}, None
    for line in open(path, encoding="utf-8"):
        line = line.strip()
        if line.startswith("#"):
            cur = line[1:].strip()
            sections[cur] = []
        elif line:
            sections[cur].extend(line.split())
    return sections


def load_st(path):
    table = {}
    for line in open(path, encoding="utf-8"):
        k, v = line.rstrip("\n").split("\t")
        table[k] = v.split(" ")[0]
    return table


def to_traditional(text, st):
    return "".join(st.get(c, c) for c in text)


def make_tweet(rng, topic, noise, st):
    words = [rng.choice(noise) if rng.random() < 0.1 else rng.choice(topic) for _ in range(8)]
    text = "".join(words)
    if rng.random() < 0.3:
        text = to_traditional(text, st)
    r = rng.random()
    if r < 0.15:
        text += " https://t.co/" + "".join(rng.choice("abcdefgh123") for _ in range(8))
    elif r < 0.3:
        text = "@" + rng.choice(["news_cn", "friend01", "someone"]) + " " + text
    elif r < 0.4:
        text += " #" + rng.choice(topic)
    return text


def account(rng, acc_id, label, topic, noise, st, followers, n_in, n_out):
    base = datetime(2021, 1, 1, tzinfo=timezone.utc)
    tweets = []
    for _ in range(n_in):
        ts = base + timedelta(minutes=rng.randrange(0, 104 * 24 * 60))
        tweets.append((ts, make_tweet(rng, topic, noise, st)))
    # a term no other account uses
    tweets[0] = (tweets[0][0], tweets[0][1] + f" #sig{acc_id}")
    for _ in range(n_out):
        ts = datetime(2020, 12, 1, tzinfo=timezone.utc) + timedelta(minutes=rng.randrange(0, 30 * 24 * 60))
        tweets.append((ts, make_tweet(rng, topic, noise, st)))
    tweets.sort()
    return {
        "account_id": acc_id,
        "follower_count": followers,
        "label": label,
        "tweets": [{"text": t, "timestamp": ts.strftime("%Y-%m-%dT%H:%M:%SZ")} for ts, t in tweets],
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--st-table", required=True)
    ap.add_argument("--seed", type=int, default=20210415)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    sec = load_sections(os.path.join(HERE, "fixture_words.txt"))
    st = load_st(args.st_table)
    topics = {"Beijing": sec["topic a"], "Democracy": sec["topic b"]}
    labels = ["Beijing"] * 10 + ["Democracy"] * 10
    rng.shuffle(labels)
    accounts = []
    for i, label in enumerate(labels):
        accounts.append(account(rng, f"user{i:02d}", label, topics[label], sec["noise"], st,
                                rng.randrange(10_000, 500_000), rng.randrange(12, 18), 2))
    # filtered out: too few followers, too few in-window tweets
    accounts.append(account(rng, "user20", "Beijing", topics["Beijing"], sec["noise"], st, 9_999, 15, 0))
    accounts.append(account(rng, "user21", "Democracy", topics["Democracy"], sec["noise"], st, 80_000, 9, 6))
    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "corpus.jsonl"), "w", encoding="utf-8") as f:
        f.write(json.dumps({"label_set": ["Beijing", "Democracy"]}) + "\n")
        for a in accounts:
            f.write(json.dumps(a, ensure_ascii=False) + "\n")
    by_label = {}
    for a in accounts[:20]:
        by_label.setdefault(a["label"], []).append(a["account_id"])
    test_ids = sorted(by_label["Beijing"][:3] + by_label["Democracy"][:3])
    with open(os.path.join(OUT, "test_ids.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(test_ids) + "\n")


if __name__ == "__main__":
    main()
