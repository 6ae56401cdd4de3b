"""Cross-validation identity suite: every closed form against its oracle.

Each check pits two independent computations of the same quantity against
each other at randomized (seeded, reproducible) sample points.  A run
returns one named result per check with the measured defects, so a failure
always says which identity broke and by how much.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classical import (
    classical_secular,
    multiset_defect,
    no_backscatter_map,
    no_backscatter_secular_closed_form,
    no_backscatter_spectrum_from_laplacian,
)
from .errors import RegularityError
from .graph import Graph, directed_bonds
from .laplacian import build_laplacian, laplacian_spectrum
from .linalg import determinant, eig_general, matrix_power_trace
from .orbits import enumerate_orbits, trace_power_from_orbits
from .scattering import (
    evolution_determinant_closed_form,
    evolution_operator,
    scan_spectrum_deviation,
)
from .zeta import (
    functional_equation_defect,
    ihara_zeta_product,
    secular_ratio_constant,
)

UNITARITY_TOL = 1e-10
DET_CLOSED_TOL = 1e-9
RATIO_STD_TOL = 1e-8
TRACE_ORACLE_TOL = 1e-8
IHARA_TOL = 1e-6
FUNCTIONAL_EQ_TOL = 1e-8
CONNECT_TOL = 1e-8


@dataclass
class CheckResult:
    name: str
    passed: bool
    measure: float
    tolerance: float
    detail: dict = field(default_factory=dict)


def _real_lams(rng, count):
    return rng.uniform(-4.0, 10.0, count)


def _complex_lams(rng, count, im_low=-2.0, im_high=2.0):
    return rng.uniform(-4.0, 10.0, count) + 1j * rng.uniform(im_low, im_high, count)


def run_identity_suite(
    g: Graph,
    seed: int = 0,
    kind: str = "standard",
    corrupt_sigma: bool = False,
) -> list[CheckResult]:
    """Run every applicable identity check on one graph.

    ``corrupt_sigma`` is a fault-injection hook for testing the suite
    itself: it perturbs one evolution-operator entry so the unitarity check
    must fail by name.
    """
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []

    def build_u(lam):
        op = evolution_operator(g, lam, kind)
        if corrupt_sigma:
            op.matrix[0, int(np.argmax(np.abs(op.matrix[0]) > 0))] *= 1.0 + 1e-6
        return op

    # unitarity on the real axis
    worst = 0.0
    for lam in _real_lams(rng, 100):
        worst = max(worst, build_u(float(lam)).unitarity_defect())
    results.append(CheckResult("unitarity", worst < UNITARITY_TOL, worst, UNITARITY_TOL))

    # determinant of U against the closed form
    worst = 0.0
    for lam in _complex_lams(rng, 30):
        op = build_u(complex(lam))
        d_lu = determinant(op.matrix)
        d_cf = evolution_determinant_closed_form(g, complex(lam), kind)
        worst = max(worst, abs(d_lu - d_cf) / abs(d_cf))
    results.append(CheckResult("det_closed_form", worst < DET_CLOSED_TOL, worst, DET_CLOSED_TOL))

    # lambda-independence of the determinant identity ratio
    ratios = np.array(
        [secular_ratio_constant(g, complex(lam), kind) for lam in _complex_lams(rng, 30)]
    )
    spread = float(np.std(ratios) / abs(np.mean(ratios)))
    results.append(
        CheckResult(
            "identity_ratio_constant",
            spread < RATIO_STD_TOL,
            spread,
            RATIO_STD_TOL,
            detail={
                "mean": complex(np.mean(ratios)),
                "closed_form": complex(2.0 ** g.num_edges * 1j ** g.num_vertices),
            },
        )
    )

    # zeros of the secular function against the Laplacian spectrum
    dev = scan_spectrum_deviation(g, kind)
    results.append(CheckResult("secular_zeros_match_spectrum", dev < 1e-7, dev, 1e-7))

    # orbit trace oracle
    catalog = enumerate_orbits(directed_bonds(g), 8)
    worst = 0.0
    for lam in _complex_lams(rng, 5, im_low=-2.0, im_high=0.0):
        op = build_u(complex(lam))
        for n in range(2, 9):
            t_direct = matrix_power_trace(op.matrix, n)
            t_orbit = trace_power_from_orbits(catalog, g, complex(lam), n, kind)
            worst = max(worst, abs(t_direct - t_orbit) / max(abs(t_direct), 1e-12))
    results.append(CheckResult("trace_power_oracle", worst < TRACE_ORACLE_TOL, worst, TRACE_ORACLE_TOL))

    # regular-graph checks
    if g.is_regular and not corrupt_sigma and kind == "standard":
        nb_cat = enumerate_orbits(directed_bonds(g), 12, no_backtrack=True)
        ih = ihara_zeta_product(nb_cat, 0.1, 12)
        results.append(
            CheckResult("ihara_product_vs_det", ih.relative_error < IHARA_TOL,
                        ih.relative_error, IHARA_TOL)
        )
        worst = 0.0
        for _ in range(20):
            z = rng.uniform(0.7, 1.4) * np.exp(1j * rng.uniform(-np.pi, np.pi))
            worst = max(worst, functional_equation_defect(g, z))
        results.append(
            CheckResult("functional_equation", worst < FUNCTIONAL_EQ_TOL, worst, FUNCTIONAL_EQ_TOL)
        )
        if g.regular_degree > 2:
            cmap = no_backscatter_map(g)
            worst = 0.0
            for _ in range(20):
                mu = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
                lhs = classical_secular(cmap, mu)
                rhs = no_backscatter_secular_closed_form(g, mu)
                worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-12))
            results.append(CheckResult("no_backscatter_secular", worst < CONNECT_TOL, worst, CONNECT_TOL))
            direct = eig_general(cmap.matrix).eigenvalues
            formula = no_backscatter_spectrum_from_laplacian(g)
            d = multiset_defect(direct, formula)
            results.append(CheckResult("no_backscatter_spectrum", d < CONNECT_TOL, d, CONNECT_TOL))

    return results


def all_passed(results: list[CheckResult]) -> bool:
    return all(r.passed for r in results)


def first_failure(results: list[CheckResult]) -> CheckResult | None:
    for r in results:
        if not r.passed:
            return r
    return None
