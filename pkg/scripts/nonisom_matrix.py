"""Pairwise algebraic isomorphism matrix of the named S-ring families over E9 x Cp."""

import argparse
import json
from dataclasses import asdict, dataclass

from schurkit.batch import nonisom_families, nonisom_matrix


@dataclass
class Config:
    p: int = 13
    lines: tuple[int, ...] = tuple(range(1, 12))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=Config.p)
    ap.add_argument("--lines", type=int, nargs="+", default=list(Config.lines))
    cfg = Config(**vars(ap.parse_args()))
    entries = nonisom_families(cfg.p, lines=cfg.lines)
    M = nonisom_matrix(entries)
    names = [e.name for e in entries]
    clashes = [[names[a], names[b]] for a in range(len(names)) for b in range(a) if M[a, b]]
    for e in entries:
        print(f"{e.name:>12}  rank {e.sring.rank:>3}  sizes {sorted(e.sring.sizes)}")
    print(json.dumps({"config": asdict(cfg), "families": len(names), "isomorphic_pairs": clashes}))
    raise SystemExit(1 if clashes else 0)


if __name__ == "__main__":
    main()
