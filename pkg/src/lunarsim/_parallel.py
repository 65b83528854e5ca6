from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def row_blocks(n_rows, workers):
    """Split ``range(n_rows)`` into at most ``workers`` contiguous ``(lo, hi)`` blocks."""
    workers = max(1, min(int(workers), n_rows))
    base, extra = divmod(n_rows, workers)
    blocks = []
    lo = 0
    for k in range(workers):
        hi = lo + base + (1 if k < extra else 0)
        blocks.append((lo, hi))
        lo = hi
    return blocks


def run_row_blocks(fn, n_rows, workers=1):
    """Call ``fn(lo, hi)`` over disjoint row blocks, threaded when ``workers > 1``.

    ``fn`` must only write rows ``[lo, hi)`` of its outputs; the result is then
    independent of the worker count.
    """
    if n_rows <= 0:
        return
    blocks = row_blocks(n_rows, workers)
    if len(blocks) == 1:
        fn(*blocks[0])
        return
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        for fut in [pool.submit(fn, lo, hi) for lo, hi in blocks]:
            fut.result()
