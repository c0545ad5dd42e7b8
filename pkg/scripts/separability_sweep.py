"""Check that every S-ring over the abelian groups of a given order is separable, replaying all witnesses."""

import argparse
import json
import time
from dataclasses import asdict, dataclass

from schurkit.batch import SweepConfig, separability_sweep, verify_records


@dataclass
class Config:
    orders: tuple[int, ...] = (18, 45)
    budget_nodes: int | None = None
    representatives_only: bool = False


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orders", type=int, nargs="+", default=list(Config.orders))
    ap.add_argument("--budget-nodes", type=int, default=None)
    ap.add_argument("--representatives-only", action="store_true")
    cfg = Config(**vars(ap.parse_args()))
    bad = 0
    for n in cfg.orders:
        t0 = time.perf_counter()
        recs = list(separability_sweep(SweepConfig(n, cfg.budget_nodes, cfg.representatives_only)))
        srings = [r for r in recs if r["kind"] == "sring"]
        nonsep = [r for r in srings if r["verdict"] != "separable"]
        checked, failed = verify_records(recs)
        bad += len(nonsep) + failed
        print(json.dumps({"order": n, "srings": len(srings), "non_separable": len(nonsep),
                          "witnesses_replayed": checked, "replay_failures": failed,
                          "seconds": round(time.perf_counter() - t0, 1)}))
    print(json.dumps({"config": asdict(cfg), "ok": bad == 0}))
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
