"""Compare the compiled kernel against the pure-Python fallback.

Runs relative-key extraction and rectangle decomposition over synthetic
workbooks of increasing size and prints a timing table. The pure kernel is
loaded directly; run with SHEETSTRUCT_PURE=1 to confirm the selection switch
gives the same numbers as the direct import.

Usage: python benchmarks/bench_kernel.py [--repeat N]
"""

import argparse
import gc
import statistics
import time

from sheetstruct import kernel
from sheetstruct.kernel import pure


def synthetic_cells(cols: int, rows: int):
    """(col, row, canonical formula) grid in the chained-column style."""
    cells = []
    for col in range(2, cols + 2):
        for row in range(1, rows + 1):
            prev = chr(ord("A") + (col - 2) % 26)
            cells.append((col, row, f"={prev}{row}*1.01+ROUND(B{row},2)"))
    return cells


def bench(func, *args, repeat: int = 7) -> float:
    gc.disable()
    try:
        timings = []
        for _ in range(repeat):
            start = time.perf_counter()
            func(*args)
            timings.append(time.perf_counter() - start)
    finally:
        gc.enable()
    return statistics.median(timings) * 1000


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()

    impls = [("pure", pure)]
    if kernel.NATIVE:
        from sheetstruct.kernel import _native
        impls.append(("native", _native))
    else:
        print("note: compiled kernel unavailable, timing the fallback only")

    sizes = [(10, 100), (50, 100), (100, 100)]
    print(f"{'cells':>8}  {'stage':<12}" +
          "".join(f"{name:>12}" for name, _ in impls) + f"{'speedup':>10}")
    for cols, rows in sizes:
        cells = synthetic_cells(cols, rows)
        row_times = {}
        for name, impl in impls:
            row_times[name] = bench(impl.relative_keys, cells,
                                    repeat=args.repeat)
        _print_row(len(cells), "relative_keys", impls, row_times)

        keyed = {}
        key_ids = {}
        for (col, row, _), (key, _s, _r) in zip(
                cells, impls[-1][1].relative_keys(cells)):
            keyed[(col, row)] = key_ids.setdefault(key, len(key_ids))
        for name, impl in impls:
            row_times[name] = bench(impl.decompose, keyed, repeat=args.repeat)
        _print_row(len(cells), "decompose", impls, row_times)


def _print_row(n_cells, stage, impls, row_times):
    line = f"{n_cells:>8}  {stage:<12}"
    for name, _ in impls:
        line += f"{row_times[name]:>10.2f}ms"
    if len(impls) == 2:
        ratio = row_times["pure"] / max(row_times["native"], 1e-9)
        line += f"{ratio:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
