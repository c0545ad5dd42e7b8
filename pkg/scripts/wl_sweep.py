"""Compare 2-WL equivalence with isomorphism for Cayley graphs over the abelian groups of a given order."""

import argparse
import json
from dataclasses import asdict, dataclass

from schurkit.abelian import abelian_groups_of_order
from schurkit.batch import inverse_closed_sets, sampled_sets, wl_sweep


@dataclass
class Config:
    order: int = 18
    samples: int = 0
    joint_samples: int = 200
    seed: int = 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=Config.order)
    ap.add_argument("--samples", type=int, default=Config.samples,
                    help="random connection sets per group (each with an automorphic image); 0 means all")
    ap.add_argument("--joint-samples", type=int, default=Config.joint_samples)
    ap.add_argument("--seed", type=int, default=Config.seed)
    cfg = Config(**vars(ap.parse_args()))
    items = []
    for G in abelian_groups_of_order(cfg.order):
        sets = sampled_sets(G, cfg.samples, cfg.seed) if cfg.samples else inverse_closed_sets(G)
        items += [(G, X) for X in sets]
    res = wl_sweep(items, joint_samples=cfg.joint_samples, seed=cfg.seed)
    print(json.dumps({"config": asdict(cfg), "result": asdict(res), "ok": res.ok}))
    raise SystemExit(0 if res.ok else 1)


if __name__ == "__main__":
    main()
