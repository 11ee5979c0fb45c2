"""Independent brute-force reference implementations used as test oracles.

Deliberately written in plain Python (no shared code with the package) so
they stay an independent check on the fast paths.
"""

from __future__ import annotations

import math


def naive_confusion(gold, pred):
    """gold/pred are sequences of 'F'/'B' strings."""
    c = {"tp_fg": 0, "fn_fg": 0, "tp_bg": 0, "fn_bg": 0}
    for g, p in zip(gold, pred):
        if g == "F" and p == "F":
            c["tp_fg"] += 1
        elif g == "F":
            c["fn_fg"] += 1
        elif g == "B" and p == "B":
            c["tp_bg"] += 1
        else:
            c["fn_bg"] += 1
    return c


def naive_score(gold, pred):
    """(balanced_accuracy, macro_f1, recalls, f1s) from first principles."""
    c = naive_confusion(gold, pred)

    def div(a, b):
        return a / b if b else 0.0

    recall_f = div(c["tp_fg"], c["tp_fg"] + c["fn_fg"])
    recall_b = div(c["tp_bg"], c["tp_bg"] + c["fn_bg"])
    prec_f = div(c["tp_fg"], c["tp_fg"] + c["fn_bg"])
    prec_b = div(c["tp_bg"], c["tp_bg"] + c["fn_fg"])
    f1_f = div(2 * prec_f * recall_f, prec_f + recall_f)
    f1_b = div(2 * prec_b * recall_b, prec_b + recall_b)
    return ((recall_f + recall_b) / 2.0, (f1_f + f1_b) / 2.0,
            (recall_f, recall_b), (f1_f, f1_b))


def naive_kappa(a, b):
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    labels = set(a) | set(b)
    p_e = 0.0
    for l in labels:
        p_e += (sum(1 for x in a if x == l) / n) * (sum(1 for y in b if y == l) / n)
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else None
    return (p_o - p_e) / (1.0 - p_e)


def naive_dft_peak_hz(frame, sample_rate=16000, n_grid=1024):
    """Peak frequency of a raw frame by direct DFT on an n_grid-point grid.

    Explicit exponential-matrix summation: no FFT, no window, independent of
    the production feature path.
    """
    import numpy as _np

    frame = _np.asarray(frame, dtype=float)
    n = len(frame)
    freqs = _np.arange(n_grid // 2 + 1) * (sample_rate / n_grid)
    t = _np.arange(n) / sample_rate
    basis = _np.exp(-2j * _np.pi * freqs[:, None] * t[None, :])
    mags = _np.abs(basis @ frame)
    return float(freqs[int(mags.argmax())])


def naive_fft_band(freq_hz, sample_rate=16000, n_grid=1024, n_bands=64):
    """Band index of the fft64x20 layout containing freq_hz."""
    n_bins = n_grid // 2 + 1
    width = n_bins // n_bands
    band = int(freq_hz / (sample_rate / n_grid)) // width
    return min(band, n_bands - 1)


def naive_mean_similarity(members):
    """Average member-to-centroid cosine, plain Python."""
    n = len(members)
    dim = len(members[0])
    centroid = [sum(row[d] for row in members) / n for d in range(dim)]
    c_norm = math.sqrt(sum(v * v for v in centroid))
    total = 0.0
    for row in members:
        r_norm = math.sqrt(sum(v * v for v in row))
        if r_norm < 1e-12 or c_norm < 1e-12:
            continue
        dot = sum(x * y for x, y in zip(row, centroid))
        total += dot / (r_norm * c_norm)
    return total / n


def naive_normalized_cut(affinity, mask):
    """Ncut value of the bipartition given by boolean mask."""
    n = len(affinity)
    a = [i for i in range(n) if mask[i]]
    b = [i for i in range(n) if not mask[i]]
    if not a or not b:
        return math.inf
    cut = sum(affinity[i][j] for i in a for j in b)
    vol_a = sum(affinity[i][j] for i in a for j in range(n))
    vol_b = sum(affinity[i][j] for i in b for j in range(n))
    if vol_a <= 0 or vol_b <= 0:
        return math.inf
    return cut / vol_a + cut / vol_b


def best_bipartition_by_ncut(affinity):
    """Exhaustive min-Ncut bipartition (N <= ~14), as a boolean tuple."""
    n = len(affinity)
    best_mask, best_val = None, math.inf
    for bits in range(1, 2 ** (n - 1)):  # fix element 0 in side A
        mask = tuple(bool((bits >> i) & 1) for i in range(n - 1))
        mask = (True,) + mask
        val = naive_normalized_cut(affinity, mask)
        if val < best_val:
            best_mask, best_val = mask, val
    return best_mask, best_val
