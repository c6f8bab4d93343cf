"""Benchmark the compiled kernels against the pure-NumPy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py

Times the three per-frame hot kernels (pairwise IoU, soft buffered IoU, and
the assignment solve) at tracker-realistic sizes, and a full synthetic
tracking run through each backend.
"""
import sys
import time

import numpy as np

from boostmot import kernels, kernels_py

try:
    from boostmot import _kernels
except ImportError:
    _kernels = None


def _time(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_matrices(backends, sizes=(20, 80, 200, 400)):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16} {'size':>9} " + "".join(f"{name:>12}" for name, _ in backends)
          + f" {'speedup':>9}")
    for n in sizes:
        dets = np.ascontiguousarray(
            np.hstack([rng.uniform(0, 800, (n, 2)), rng.uniform(10, 80, (n, 2))]))
        trks = np.ascontiguousarray(
            np.hstack([rng.uniform(0, 800, (n, 2)), rng.uniform(10, 80, (n, 2))]))
        conf = np.ascontiguousarray(rng.uniform(0, 1, n))
        for label, args in (("iou_matrix", (dets, trks)),
                            ("soft_biou_matrix", (dets, trks, conf))):
            times = [_time(getattr(mod, label), *args) for _, mod in backends]
            ratio = times[-1] / times[0] if len(times) > 1 and times[0] > 0 else float("nan")
            print(f"{label:<16} {n:>5}x{n:<3} "
                  + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
                  + f" {ratio:>8.1f}x")
    for n in sizes:
        cost = rng.normal(size=(n, n))
        times = [_time(mod.solve_lap, cost) for _, mod in backends]
        ratio = times[-1] / times[0] if len(times) > 1 and times[0] > 0 else float("nan")
        print(f"{'solve_lap':<16} {n:>5}x{n:<3} "
              + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
              + f" {ratio:>8.1f}x")


def bench_tracker():
    from boostmot.dataio import RunConfig
    from boostmot.simulate import SceneConfig, detections_from_rows, generate
    from boostmot.tracker import run_sequence

    scene = SceneConfig(n_objects=25, n_frames=300, n_occlusions=12, n_ghosts=4, seed=0)
    _, det_rows = generate(scene)
    stream = detections_from_rows(det_rows)
    cfg = RunConfig(use_s=True, use_sb=True, use_vt=True)
    start = time.perf_counter()
    run_sequence(stream, cfg)
    elapsed = time.perf_counter() - start
    print(f"\nfull tracker run ({kernels.BACKEND} backend): "
          f"{scene.n_frames} frames, {scene.n_objects} objects -> {elapsed:.2f}s "
          f"({scene.n_frames / elapsed:.0f} fps)")


def main():
    backends = []
    if _kernels is not None:
        backends.append(("cython", _kernels))
    backends.append(("python", kernels_py))
    if _kernels is None:
        print("compiled extension not built; timing the fallback only", file=sys.stderr)
    print(f"active backend at import: {kernels.BACKEND}\n")
    bench_matrices(backends)
    bench_tracker()


if __name__ == "__main__":
    main()
