"""Deterministic summation helpers."""

import numpy as np


def pairwise_sum(values, axis=0):
    """Sum an array along ``axis`` with a fixed-order pairwise tree.

    The reduction order depends only on the input length, so results are
    reproducible regardless of threading or chunking in the caller.
    """
    arr = np.asarray(values)
    arr = np.moveaxis(arr, axis, 0)
    n = arr.shape[0]
    if n == 0:
        return np.zeros(arr.shape[1:], dtype=arr.dtype)
    while n > 1:
        half = n // 2
        folded = arr[0:2 * half:2] + arr[1:2 * half:2]
        if n % 2:
            arr = np.concatenate([folded, arr[n - 1:n]], axis=0)
        else:
            arr = folded
        n = arr.shape[0]
    return arr[0]
