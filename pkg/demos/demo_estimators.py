#!/usr/bin/env python3
"""Walk through the chained-Bell estimator on the bundled data tables.

The chained Bell parameter for N setting pairs per side is

    I_N = C(a1,b1) + C(a1,b2) + ... + C(aN,bN) + [1 - C(aN,b1)]

where C is the coincidence probability (or the anticorrelation probability
for a Phi- state).  Every local hidden-variable model obeys I_N >= 1; the
two-qubit quantum minimum is 2N sin^2(pi/4N), which tends to 0 as N grows.
"""

from chainbell import chain_estimate_from_stats, ideal_chain_value
from chainbell.fixtures import pair_stats_n3, pair_stats_n6, pair_stats_n8

print(__doc__)

# ---------------------------------------------------------------------------
# N = 3, Phi- state: six setting pairs, anticorrelation convention.
# ---------------------------------------------------------------------------
params, mode, stats = pair_stats_n3()
est = chain_estimate_from_stats(stats, params, mode)
print(f"N = {params.N} ({mode})")
for (k, l), st in sorted(stats.items()):
    print(f"  a{k} b{l}: mean = {st.mean:.4f}  (n = {st.count})")
print(f"  I_3 = {est.value:.5f} +/- {est.stderr:.5f}")
print(f"  quantum minimum {ideal_chain_value(3):.5f}, local bound 1\n")

# ---------------------------------------------------------------------------
# N = 8, Phi+ state: the strongest fixed-settings run.
# ---------------------------------------------------------------------------
params, mode, stats = pair_stats_n8()
est = chain_estimate_from_stats(stats, params, mode)
print(f"N = {params.N} ({mode})")
print(f"  I_8 = {est.value:.4f} +/- {est.stderr:.4f}")
print(f"  quantum minimum {ideal_chain_value(8):.4f}\n")

# ---------------------------------------------------------------------------
# N = 6, randomized-settings run: the certification dataset.  The "all"
# columns use every trial; the analyzed 50th-trial columns feed the
# memory-robust certificate instead (see demo_certification.py).
# ---------------------------------------------------------------------------
for which in ("all", "50th"):
    params, mode, stats = pair_stats_n6(which)
    est = chain_estimate_from_stats(stats, params, mode)
    n = sum(st.count for st in stats.values())
    print(f"N = 6 randomized, {which} trials (n = {n}):"
          f"  I_6 = {est.value:.4f} +/- {est.stderr:.4f}")

print(f"\nquantum minimum for N = 6: {ideal_chain_value(6):.4f}")
