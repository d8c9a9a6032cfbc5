"""Compare the compiled and pure-Python recursion kernels.

    python benchmarks/bench_kernel.py [--g-max 30] [--largest-pivot]

Each workload runs on a cold cache.  Values from both backends are compared
before timings are reported.
"""
import argparse
import time

from psiclass.bounds import verify_theorem
from psiclass.correlator import CorrelatorEngine
from psiclass.kernel import CEvaluator


def one_point(engine, g_max):
    return [engine(g, (3 * g - 2,)) for g in range(1, g_max + 1)]


def sweep(engine, _):
    return [verify_theorem(g, 5, min(3, g - 1), engine).to_json() for g in range(2, 7)]


def timed(fn, **kw):
    engine = CorrelatorEngine(**kw)
    start = time.perf_counter()
    out = fn(engine)
    return time.perf_counter() - start, out, len(engine.cache)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g-max", type=int, default=30)
    ap.add_argument("--largest-pivot", action="store_true",
                    help="also time the largest-part pivot (keep --g-max small)")
    args = ap.parse_args(argv)

    configs = [("python", {"pure_python": True})]
    if CEvaluator is not None:
        configs.insert(0, ("cython", {}))
    else:
        print("compiled kernel not built; timing the pure-Python kernel only")
    if args.largest_pivot:
        configs.append(("python/largest", {"pure_python": True, "largest_pivot": True}))

    workloads = [(f"one-point g<={args.g_max}", lambda e: one_point(e, args.g_max)),
                 ("theorem sweep g<=6 n<=5", lambda e: sweep(e, None))]
    print(f"{'workload':28} {'backend':16} {'seconds':>9} {'keys':>9}")
    for label, fn in workloads:
        ref = None
        for name, kw in configs:
            secs, out, keys = timed(fn, **kw)
            if ref is None:
                ref = out
            elif out != ref:
                raise SystemExit(f"{name} disagrees with {configs[0][0]} on {label}")
            print(f"{label:28} {name:16} {secs:9.3f} {keys:9d}")


if __name__ == "__main__":
    main()
