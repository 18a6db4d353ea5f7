"""Compiled random-walk kernels.

Everything below is njit-compiled and RNG-explicit: each kernel takes a
uint64 seed, expands it with splitmix64 and walks a private xoshiro256++
state, so output depends only on (seed, arguments).
"""

import math

import numpy as np
from numba import njit, uint64, float64, int64

from ._rng import seed_state, next_double


@njit(inline="always", cache=True)
def _step_draw(state, code, params, arr1, arr2):
    if code == 0:  # exactly stable: two-uniform polar transform
        alpha = params[0]
        B = params[1]
        S = params[2]
        sigma = params[3]
        V = (next_double(state) - 0.5) * math.pi
        W = -math.log(1.0 - next_double(state))
        x = (
            S
            * math.sin(alpha * (V + B))
            / math.cos(V) ** (1.0 / alpha)
            * (math.cos(V - alpha * (V + B)) / W) ** ((1.0 - alpha) / alpha)
        )
        return sigma * x
    elif code == 1:  # piecewise-uniform table
        u = next_double(state)
        lo = 0
        hi = len(arr1) - 1
        while lo < hi:
            mid = (lo + hi) >> 1
            if arr1[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        i = lo - 1 if lo > 0 else 0
        denom = arr1[i + 1] - arr1[i]
        frac = (u - arr1[i]) / denom if denom > 0.0 else 0.5
        return arr2[i] + frac * (arr2[i + 1] - arr2[i])
    elif code == 2:  # atoms
        u = next_double(state)
        for i in range(len(arr1)):
            if u <= arr1[i]:
                return arr2[i]
        return arr2[len(arr2) - 1]
    elif code == 3:  # piecewise e^{-x}-tilted table
        u = next_double(state)
        lo = 0
        hi = len(arr1) - 1
        while lo < hi:
            mid = (lo + hi) >> 1
            if arr1[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        i = lo - 1 if lo > 0 else 0
        denom = arr1[i + 1] - arr1[i]
        v = (u - arr1[i]) / denom if denom > 0.0 else 0.5
        a = arr2[i]
        b = arr2[i + 1]
        ea = math.exp(-a)
        eb = math.exp(-b)
        return -math.log(ea - v * (ea - eb))
    elif code == 4:  # offspring displacement: w * left-pareto-exp + (1-w) * Exp(gamma)
        w = params[0]
        gamma = params[1]
        aj = params[2]
        if next_double(state) < w:
            while True:
                y = -math.log(1.0 - next_double(state))
                if next_double(state) < (1.0 + y) ** (-1.0 - aj):
                    return -y
        else:
            return -math.log(1.0 - next_double(state)) / gamma
    elif code == 5:  # spine of the pareto family: pure pareto left, Exp right
        mass_left = params[0]
        aj = params[1]
        rate = params[2]
        u = next_double(state)
        if u < mass_left:
            v = u / mass_left
            return -((1.0 - v) ** (-1.0 / aj) - 1.0)
        else:
            return -math.log(1.0 - next_double(state)) / rate
    else:  # constant step
        return params[0]


@njit(cache=True)
def step_array(seed, n, code, params, arr1, arr2):
    state = seed_state(seed)
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        out[i] = _step_draw(state, code, params, arr1, arr2)
    return out


@njit(cache=True)
def walk_positions(seed, n, x0, code, params, arr1, arr2):
    """One path: positions[0..n] with positions[0] = x0."""
    state = seed_state(seed)
    out = np.empty(n + 1, dtype=np.float64)
    out[0] = x0
    s = x0
    for i in range(n):
        s += _step_draw(state, code, params, arr1, arr2)
        out[i + 1] = s
    return out


@njit(cache=True)
def walk_endpoints(seed, reps, n, x0, code, params, arr1, arr2):
    state = seed_state(seed)
    out = np.empty(reps, dtype=np.float64)
    for r in range(reps):
        s = x0
        for i in range(n):
            s += _step_draw(state, code, params, arr1, arr2)
        out[r] = s
    return out


@njit(cache=True)
def ladder_heights(seed, count, max_steps, code, params, arr1, arr2):
    """Absolute strictly-descending ladder heights from i.i.d. epochs.

    Each epoch restarts the walk at 0 and runs until it first goes strictly
    negative (harvest |S|) or exhausts max_steps (censored, restart).
    Returns (heights, censored_epochs).
    """
    state = seed_state(seed)
    out = np.empty(count, dtype=np.float64)
    censored = int64(0)
    got = 0
    s = 0.0
    steps = 0
    while got < count:
        s += _step_draw(state, code, params, arr1, arr2)
        steps += 1
        if s < 0.0:
            out[got] = -s
            got += 1
            s = 0.0
            steps = 0
        elif steps >= max_steps:
            censored += 1
            s = 0.0
            steps = 0
    return out, censored


@njit(cache=True)
def renewal_counts(seed, replicas, grid, max_steps, code, params, arr1, arr2):
    """Per-replica counts of descending ladder points with cumulative height
    <= grid[j], summed and square-summed over replicas.

    A censored epoch (no descent within max_steps) is treated as an infinite
    ladder height: the replica stops contributing ladder points beyond it.
    Returns (sum_counts, sumsq_counts, censored_epochs, total_epochs).
    """
    state = seed_state(seed)
    G = len(grid)
    sums = np.zeros(G, dtype=np.float64)
    sqs = np.zeros(G, dtype=np.float64)
    counts = np.empty(G, dtype=np.float64)
    censored = int64(0)
    epochs = int64(0)
    xmax = grid[G - 1]
    for _ in range(replicas):
        for j in range(G):
            counts[j] = 0.0
        cum = 0.0
        while cum <= xmax:
            s = 0.0
            steps = 0
            ok = False
            while steps < max_steps:
                s += _step_draw(state, code, params, arr1, arr2)
                steps += 1
                if s < 0.0:
                    ok = True
                    break
            epochs += 1
            if not ok:
                censored += 1
                break
            cum += -s
            if cum <= xmax:
                lo = 0
                hi = G - 1
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if grid[mid] < cum:
                        lo = mid + 1
                    else:
                        hi = mid
                for j in range(lo, G):
                    counts[j] += 1.0
        for j in range(G):
            sums[j] += counts[j]
            sqs[j] += counts[j] * counts[j]
    return sums, sqs, censored, epochs


@njit(cache=True)
def survival_count(seed, reps, n, x0, code, params, arr1, arr2):
    """Number of paths out of reps with min over the first n steps >= 0."""
    state = seed_state(seed)
    alive = int64(0)
    for _ in range(reps):
        s = x0
        ok = True
        for i in range(n):
            s += _step_draw(state, code, params, arr1, arr2)
            if s < 0.0:
                ok = False
                break
        if ok:
            alive += 1
    return alive


@njit(cache=True)
def conditioned_endpoints(seed, want, n, x0, max_attempts,
                          code, params, arr1, arr2):
    """Rejection-sample endpoints S_n of walks with min_{k<=n} S_k >= 0.

    Returns (endpoints, attempts, got); got < want means the attempt budget
    ran out.
    """
    state = seed_state(seed)
    out = np.empty(want, dtype=np.float64)
    attempts = int64(0)
    got = 0
    while got < want and attempts < max_attempts:
        attempts += 1
        s = x0
        ok = True
        for i in range(n):
            s += _step_draw(state, code, params, arr1, arr2)
            if s < 0.0:
                ok = False
                break
        if ok:
            out[got] = s
            got += 1
    return out, attempts, got


@njit(cache=True)
def conditioned_path(seed, n, x0, max_attempts, code, params, arr1, arr2):
    """One full path conditioned to stay >= 0 up to time n, by rejection.

    Returns (path, attempts); attempts = -1 signals budget exhaustion.
    """
    state = seed_state(seed)
    path = np.empty(n + 1, dtype=np.float64)
    attempts = int64(0)
    while attempts < max_attempts:
        attempts += 1
        path[0] = x0
        s = x0
        ok = True
        for i in range(n):
            s += _step_draw(state, code, params, arr1, arr2)
            path[i + 1] = s
            if s < 0.0:
                ok = False
                break
        if ok:
            return path, attempts
    return path, int64(-1)
