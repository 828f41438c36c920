"""Independent brute-force reference implementations used to check the
engine. Deliberately written as plain loops so they share no code path
with the package."""

import math


def pinball_terms(actual, predicted, q):
    if actual >= predicted:
        return q * (actual - predicted)
    return (1 - q) * (predicted - actual)


def naive_quantile_loss(actuals, forecasts, q):
    total = 0.0
    for y, f in zip(actuals, forecasts):
        total += pinball_terms(y, f, q)
    return total / len(actuals)


def naive_quantile_change(curr, prev, q):
    total = 0.0
    for c, p in zip(curr, prev):
        if p >= c:
            total += q * (p - c)
        else:
            total += (1 - q) * (c - p)
    return total / len(curr)


def naive_mqc(curr_tracks, prev_tracks, levels):
    """Double loop over levels then overlap points."""
    total = 0.0
    for j, q in enumerate(levels):
        curr = [row[j] for row in curr_tracks]
        prev = [row[j] for row in prev_tracks]
        total += naive_quantile_change(curr, prev, q)
    return total / len(levels)


def naive_smapc(curr, prev):
    total = 0.0
    for c, p in zip(curr, prev):
        num = abs(c - p)
        if num != 0:
            total += num / (abs(c) + abs(p))
    return 200.0 / len(curr) * total


def naive_rmsse(actuals, forecasts, training, s):
    num = sum((y - f) ** 2 for y, f in zip(actuals, forecasts)) / len(actuals)
    diffs = [(training[t] - training[t - s]) ** 2 for t in range(s, len(training))]
    den = sum(diffs) / len(diffs)
    return math.sqrt(num / den)


def midranks(row):
    order = sorted(range(len(row)), key=lambda i: row[i])
    ranks = [0.0] * len(row)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and row[order[j + 1]] == row[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def naive_friedman_statistic(values):
    """Chi-squared Friedman statistic from a list of rows (blocks)."""
    n = len(values)
    k = len(values[0])
    rank_rows = [midranks(row) for row in values]
    mean_ranks = [sum(r[j] for r in rank_rows) / n for j in range(k)]
    total = sum((mr - (k + 1) / 2) ** 2 for mr in mean_ranks)
    return 12.0 * n / (k * (k + 1)) * total


def conformal_width(abs_residuals, c):
    """Order-statistic width by explicit enumeration."""
    pool = sorted(abs_residuals)
    m = len(pool)
    rank = math.ceil((m + 1) * c - 1e-12)
    return pool[min(rank, m) - 1]
