# Naive oracle for the 4-query fixture. Writes expected.tsv.
import math
from fractions import Fraction

KS = [1, 3, 5, 10, 25, 50, 100]

qrels = {}
with open("qrels.tsv") as f:
    next(f)
    for line in f:
        q, d, g = line.split("\t")
        qrels.setdefault(q, {})[d] = int(g)

run = {}
with open("run.trec") as f:
    for line in f:
        q, _, d, r, _, _ = line.split()
        run.setdefault(q, []).append((int(r), d))
run = {q: [d for _, d in sorted(v)] for q, v in run.items()}


def metrics(ranking, grades, k):
    rel = {d for d, g in grades.items() if g > 0}
    top = ranking[:k]
    hits = [d in rel for d in top]
    p = Fraction(sum(hits), k)
    r = Fraction(sum(hits), len(rel))
    mrr = Fraction(0)
    for i, h in enumerate(hits):
        if h:
            mrr = Fraction(1, i + 1)
            break
    ap = Fraction(0)
    seen = 0
    for i, h in enumerate(hits):
        if h:
            seen += 1
            ap += Fraction(seen, i + 1)
    ap /= len(rel)
    dcg = sum(grades.get(d, 0) / math.log2(i + 2) for i, d in enumerate(top) if grades.get(d, 0) > 0)
    ideal = sorted((g for g in grades.values() if g > 0), reverse=True)[:k]
    idcg = sum(g / math.log2(i + 2) for i, g in enumerate(ideal))
    return {"ndcg": dcg / idcg, "map": ap, "mrr": mrr, "recall": r, "precision": p}


queries = [q for q in sorted(qrels) if any(g > 0 for g in qrels[q].values())]
with open("expected.tsv", "w") as out:
    out.write("metric\tk\tvalue\n")
    for name in ["ndcg", "map", "mrr", "recall", "precision"]:
        for k in KS:
            vals = [metrics(run.get(q, []), qrels[q], k)[name] for q in queries]
            mean = sum(Fraction(v) if isinstance(v, Fraction) else v for v in vals) / len(vals)
            out.write(f"{name}\t{k}\t{float(mean):.17g}\n")
    for q in queries:
        out.write(f"mrr@{q}\t10\t{float(metrics(run.get(q, []), qrels[q], 10)['mrr']):.17g}\n")
