"""Direct-from-definition reference implementations.

Plain Python loops over edge lists and dicts; nothing here imports the
package's numerical code, so these stay independent of the paths they check.
"""

import itertools
import math
from collections import Counter


def degrees(n, edges):
    d = [0] * n
    for u, v in edges:
        d[u] += 1
        d[v] += 1
    return d


def edge_homophily(edges, labels):
    return sum(1 for u, v in edges if labels[u] == labels[v]) / len(edges)


def p_bar(n, edges, labels):
    d = degrees(n, edges)
    mass = Counter()
    for u in range(n):
        mass[labels[u]] += d[u]
    total = sum(mass.values())
    return {k: m / total for k, m in mass.items()}


def adjusted_homophily(n, edges, labels):
    pb = p_bar(n, edges, labels)
    s = sum(p * p for p in pb.values())
    return (edge_homophily(edges, labels) - s) / (1 - s)


def label_informativeness(n, edges, labels):
    joint = Counter()
    for u, v in edges:
        joint[(labels[u], labels[v])] += 1
        joint[(labels[v], labels[u])] += 1
    total = sum(joint.values())
    num = sum((c / total) * math.log(c / total) for c in joint.values() if c)
    den = sum(p * math.log(p) for p in p_bar(n, edges, labels).values() if p > 0)
    return 2 - num / den


def ccns(n, edges, labels, k):
    nbrs = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    hist = []
    for u in range(n):
        h = [0] * k
        for w in nbrs[u]:
            h[labels[w] - 1] += 1
        hist.append(h)

    def cos(a, b):
        na = math.sqrt(sum(x * x for x in a))
        nb = math.sqrt(sum(x * x for x in b))
        if na == 0 or nb == 0:
            return 0.0
        return sum(x * y for x, y in zip(a, b)) / (na * nb)

    out = [[0.0] * k for _ in range(k)]
    for a in range(1, k + 1):
        for b in range(1, k + 1):
            va = [u for u in range(n) if labels[u] == a]
            vb = [u for u in range(n) if labels[u] == b]
            if va and vb:
                out[a - 1][b - 1] = sum(cos(hist[u], hist[v]) for u in va for v in vb) / (len(va) * len(vb))
    return out


def feature_informativeness(features, labels):
    x = [math.floor(f) for f in features]
    n = len(x)
    px, py, pxy = Counter(x), Counter(labels), Counter(zip(x, labels))
    hx = -sum(c / n * math.log(c / n) for c in px.values())
    mi = sum(c / n * math.log((c / n) / ((px[a] / n) * (py[b] / n))) for (a, b), c in pxy.items())
    return mi / hx


def triangle_counts(n, edges):
    adj = set()
    for u, v in edges:
        adj.add((u, v))
        adj.add((v, u))
    counts = [0] * n
    for a, b, c in itertools.combinations(range(n), 3):
        if (a, b) in adj and (b, c) in adj and (a, c) in adj:
            counts[a] += 1
            counts[b] += 1
            counts[c] += 1
    return counts
