"""Random derivation chains applied identically to a pair of structures."""

import numpy as np

from twopc.derive import CoalescencePlan, KernelList, coalesce, kernel_extend, phase_extend, upsample

MAX_CELLS = 4000


def random_kernels(rng, n, D):
    N = int(rng.integers(max(1, D - 1), D + 2))
    z = tuple(int(v) for v in rng.integers(1, 3, N))
    kernels = []
    for _ in range(n):
        k = rng.integers(0, 2, z)
        k.flat[rng.integers(k.size)] = 1
        kernels.append(k)
    return KernelList(tuple(kernels))


def random_plan(rng, n):
    m = int(rng.integers(1, n + 1))
    mapping = np.concatenate([np.arange(1, m + 1), rng.integers(1, m + 1, n - m)])
    rng.shuffle(mapping)
    return CoalescencePlan(tuple(int(v) for v in mapping))


def random_step(rng, S):
    """Pick an operation that keeps the result small; return a function of S."""
    for _ in range(20):
        op = rng.choice(["phase_extend", "kernel_extend", "coalesce", "upsample"])
        if op == "phase_extend":
            z = tuple(int(v) for v in rng.integers(1, 3, int(rng.integers(1, S.ndim + 2))))
            if S.size * np.prod(z) <= MAX_CELLS and max(z) > 1:
                return op, lambda T, z=z: phase_extend(T, z)
        elif op == "kernel_extend":
            K = random_kernels(rng, S.phases, S.ndim)
            if S.size * np.prod(K.shape) <= MAX_CELLS:
                return op, lambda T, K=K: kernel_extend(T, K)
        elif op == "coalesce":
            plan = random_plan(rng, S.phases)
            return op, lambda T, plan=plan: coalesce(T, plan)
        else:
            f = tuple(int(v) for v in rng.integers(1, 3, S.ndim))
            if S.size * np.prod(f) <= MAX_CELLS:
                return op, lambda T, f=f: upsample(T, f)
    return "coalesce", lambda T: coalesce(T, tuple(range(1, T.phases + 1)))


def random_chain(rng, S1, S2, length):
    ops = []
    for _ in range(length):
        name, step = random_step(rng, S1)
        S1, S2 = step(S1), step(S2)
        ops.append(name)
    return S1, S2, ops
