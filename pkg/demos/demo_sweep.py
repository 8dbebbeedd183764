#!/usr/bin/env python3
"""Sweep the chain length N: quantum minimum, detection threshold, fidelity.

Longer chains certify more nonlocality (the quantum minimum of I_N falls
like pi^2/8N) but demand higher detection efficiency; the minimum
efficiency for a loophole-free test rises toward 1 as N grows.  The CHSH
case N = 2 doubles as a self-test: the observed CHSH value alone lower
bounds the fidelity of the shared state to a Bell state.
"""

import numpy as np

from chainbell import (
    ideal_chain_value,
    min_detection_efficiency,
    self_test_fidelity,
)

print(__doc__)

print(f"{'N':>3}  {'I_N quantum min':>15}  {'eta_min':>8}")
for N in range(2, 16):
    print(f"{N:>3}  {ideal_chain_value(N):>15.5f}  "
          f"{min_detection_efficiency(N):>8.5f}")

asymptote = np.pi**2 / 8
print(f"\nN * I_N -> pi^2/8 = {asymptote:.5f}; "
      f"at N = 15: {15 * ideal_chain_value(15):.5f}")

# ---------------------------------------------------------------------------
# Self-testing from the N = 2 (CHSH) value: published trapped-ion result.
# ---------------------------------------------------------------------------
b, stderr = 2.80, 0.02
print(f"\nCHSH B = {b} +/- {stderr}")
print(f"  Bell-state fidelity >= {self_test_fidelity(b, stderr, 0.50):.3f} "
      f"(50 % confidence)")
print(f"  Bell-state fidelity >= {self_test_fidelity(b, stderr, 0.95):.3f} "
      f"(95 % confidence)")
