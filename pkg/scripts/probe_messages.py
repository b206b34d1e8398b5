"""Measure repair message counts against J * M * O_max on random instances.

    python scripts/probe_messages.py --sizes 5x3,10x5,20x10,30x15 --trials 10
"""

import argparse
import json

from shoprepair.bench import complexity_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="5x3,10x5,20x10,30x15")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--failures", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="dump every trial record")
    args = ap.parse_args()

    sizes = [tuple(int(x) for x in s.split("x")) for s in args.sizes.split(",")]
    res = complexity_probe(sizes, args.trials, args.seed, args.failures)
    if args.json:
        print(json.dumps(res.to_dict(), indent=2))
        return
    print(f"{'J':>4} {'M':>4} {'scale':>7} {'max msgs':>9} {'max ratio':>10} {'mean ms':>8}")
    for j, m in sizes:
        rs = [r for r in res.records if (r.num_jobs, r.num_machines) == (j, m)]
        print(f"{j:>4} {m:>4} {max(r.scale for r in rs):>7} {max(r.messages for r in rs):>9} "
              f"{max(r.messages / r.scale for r in rs):>10.4f} "
              f"{sum(r.ms for r in rs) / len(rs):>8.2f}")
    print(f"c (max ratio) = {res.c:.4f}; least-squares slope = {res.c_lsq:.4f}")


if __name__ == "__main__":
    main()
