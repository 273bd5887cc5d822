"""Independent recall scorer for the LEAD-3 fixture.

Writes the mean ROUGE-1/2/L recall of the first three sentences of every
document in tests/data/lead3_corpus.jsonl, candidates truncated to 75 words.

Usage: python3 tools/lead3_oracle.py tests/data/lead3_corpus.jsonl > tests/data/lead3_expected.tsv
"""

import json
import sys
from collections import Counter

PUNCT = set(".,!?;:\"'()[]")


def tokens(text):
    out = []
    for chunk in text.lower().split():
        head = []
        tail = []
        while chunk and chunk[0] in PUNCT:
            head.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in PUNCT:
            tail.insert(0, chunk[-1])
            chunk = chunk[:-1]
        if chunk:
            out.append(chunk)
    return out


def grams(seq, n):
    return Counter(tuple(seq[i:i + n]) for i in range(len(seq) - n + 1))


def lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            table[i + 1][j + 1] = table[i][j] + 1 if x == y else max(table[i][j + 1], table[i + 1][j])
    return table[-1][-1]


def recall_n(cand, refs, n):
    c = grams(cand, n)
    match = sum(sum(min(k, c[g]) for g, k in grams(r, n).items()) for r in refs)
    total = sum(sum(grams(r, n).values()) for r in refs)
    return match / total if total else 0.0


def recall_l(cand, refs):
    best = None
    for r in refs:
        l = lcs(cand, r)
        rec = l / len(r) if r else 0.0
        prec = l / len(cand) if cand else 0.0
        f = 2 * rec * prec / (rec + prec) if rec + prec else 0.0
        if best is None or f > best[0]:
            best = (f, rec)
    return best[1]


def main(path):
    rows = {"ROUGE-1": [], "ROUGE-2": [], "ROUGE-L": []}
    with open(path) as f:
        docs = [json.loads(line) for line in f if line.strip()]
    for doc in sorted(docs, key=lambda d: d["id"]):
        cand = tokens(" ".join(doc["sentences"][:3]))[:75]
        refs = [tokens(r) for r in doc["references"]]
        rows["ROUGE-1"].append(recall_n(cand, refs, 1))
        rows["ROUGE-2"].append(recall_n(cand, refs, 2))
        rows["ROUGE-L"].append(recall_l(cand, refs))
        print(f"# {doc['id']}\t" + "\t".join(f"{rows[m][-1]:.6f}" for m in rows))
    for metric, values in rows.items():
        print(f"{metric}\t{sum(values) / len(values):.4f}")


if __name__ == "__main__":
    main(sys.argv[1])
