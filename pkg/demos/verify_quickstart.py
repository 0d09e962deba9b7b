"""Run the cheap identity checks and print the report table.

Every distributional claim the package relies on has a named check in
rootbound.verify; this demo runs the two deterministic ones (duality of
the two index signs, and the quadrature-vs-hypergeometric route match).
The full seeded suite is `rootbound verify --check all --seed 42` and
takes a couple of minutes.
"""

from rootbound.transforms import Boundary
from rootbound.verify import reports_to_text, verify_duality, verify_whittaker

reports = [
    verify_duality(0.5, Boundary(0.25, 1.0), (0.5, 1.0, 2.0)),
    verify_whittaker(seed=42),
]
print(reports_to_text(reports))

for r in reports:
    print(f"{r.name}: statistic {r.statistic:.3e} vs threshold {r.threshold:.0e}")
