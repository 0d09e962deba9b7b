"""Shared fixtures.

The inversion and CLI tests all lean on one modest contour table
(half_height=120) so the expensive build happens once per session; the
full-height default table is exercised only by the acceptance suite.
"""

import pytest

from rootbound import BesselSpec, Boundary, InversionConfig
from rootbound.inversion import build_contour_table

REF_NU = 0.5
REF_B = 0.25
REF_C = 1.0

# |M(1+120i)| ~ 1.4e-4, so densities from this table carry ~1e-4-level
# truncation noise: fine for structural checks, not for tight tolerances.
SMALL_ICFG = InversionConfig(half_height=120.0, step=0.1, tail_tol=1e-3)


@pytest.fixture(scope="session")
def ref_spec():
    return BesselSpec(REF_NU, -1)


@pytest.fixture(scope="session")
def ref_bnd():
    return Boundary(REF_B, REF_C)


@pytest.fixture(scope="session")
def small_table(ref_spec, ref_bnd):
    return build_contour_table(ref_spec, ref_bnd, SMALL_ICFG)
