"""Enumerate all S-rings over every abelian group of a given order and tally classification statements."""

import argparse
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass

from schurkit.abelian import abelian_groups_of_order
from schurkit.enumeration import classify, enumerate_srings, lemma_statements


@dataclass
class Config:
    order: int = 45
    mode: str | None = None


def run(cfg: Config) -> dict:
    out = {}
    for G in abelian_groups_of_order(cfg.order):
        t0 = time.perf_counter()
        cat = enumerate_srings(G)
        tally = Counter()
        unexplained = []
        for i, A in enumerate(cat.all):
            st = tuple(lemma_statements(classify(A, mode=cfg.mode)))
            tally[",".join(map(str, st)) or "none"] += 1
            if not st:
                unexplained.append(i)
        out[G.spec()] = {"srings": len(cat.all), "cayley_classes": len(cat.orbits),
                         "statements": dict(sorted(tally.items())), "unexplained": unexplained,
                         "seconds": round(time.perf_counter() - t0, 2)}
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=Config.order)
    ap.add_argument("--mode", choices=("9p", "p2", "circ", "generic"), default=None)
    cfg = Config(**vars(ap.parse_args()))
    res = run(cfg)
    print(json.dumps({"config": asdict(cfg), "result": res}, indent=2))
    raise SystemExit(1 if any(r["unexplained"] for r in res.values()) else 0)


if __name__ == "__main__":
    main()
