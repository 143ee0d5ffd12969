import logging
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.exceptions import ConstructionError
from app.models import FiniteValuationDistribution
from app.models.lower_bound import TwoBitLBParams
from app.schemas.report import TwoBitStructureReport
from app.schemas.verification import CheckResult

logger = logging.getLogger(__name__)

# (label, s, b, mass)
SupportPoint = Tuple[str, Fraction, Fraction, Fraction]
# (s, b, sign): epsilon-weighted mass moved by instance k
Perturbation = Tuple[Fraction, Fraction, int]

CORNERS = ((0, 0), (0, 1), (1, 1), (1, 0))


def _check(name: str, passed: bool, lhs: Fraction, rhs: Fraction, detail: str = "",
           informational: bool = False) -> CheckResult:
    return CheckResult(
        name=name, passed=bool(passed), lhs=float(lhs), rhs=float(rhs),
        exact_lhs=str(lhs), exact_rhs=str(rhs), detail=detail, informational=informational,
    )


class _ValueTable:
    """
    Exact E_0[GFT(p, q)] on G_W by dominance sums, plus the epsilon term of one instance.

    Rows follow the sorted seller coordinates, columns the sorted buyer
    coordinates; cell (i, j) sums mass*(b - s) over points with s <= gs[i]
    and b >= gb[j].
    """

    def __init__(self, base: List[SupportPoint], perturbation: List[Perturbation], epsilon: Fraction):
        self.gs = sorted({s for _, s, _, _ in base})
        self.gb = sorted({b for _, _, b, _ in base})
        self.si = {v: i for i, v in enumerate(self.gs)}
        self.bi = {v: j for j, v in enumerate(self.gb)}
        ns, nb = len(self.gs), len(self.gb)
        cells = [[Fraction(0)] * nb for _ in range(ns)]
        for _, s, b, m in base:
            cells[self.si[s]][self.bi[b]] += m * (b - s)
        for i in range(1, ns):
            prev, row = cells[i - 1], cells[i]
            for j in range(nb):
                row[j] += prev[j]
        for row in cells:
            for j in range(nb - 2, -1, -1):
                row[j] += row[j + 1]
        self.base = cells
        self.epsilon = epsilon
        self.perturbation = [(self.si[s], self.bi[b], sign * (b - s)) for s, b, sign in perturbation]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.gs), len(self.gb)

    def value(self, i: int, j: int) -> Fraction:
        bonus = sum((w for a, c, w in self.perturbation if a <= i and c >= j), Fraction(0))
        return self.base[i][j] + self.epsilon * bonus

    def pair(self, i: int, j: int) -> Tuple[Fraction, Fraction]:
        return self.gs[i], self.gb[j]


class LowerBoundService:
    """Two-bit lower-bound instance family: construction and exact structural checks"""

    @staticmethod
    def perturbation(params: TwoBitLBParams, k: int) -> List[Perturbation]:
        if k == 0:
            return []
        hi, lo = 1 - params.l, 1 - params.l - params.rho
        s_k, s_next = params.seller(k), params.seller(k + 1)
        return [(s_k, hi, 1), (s_next, hi, -1), (s_k, lo, -1), (s_next, lo, 1)]

    @staticmethod
    def support(params: TwoBitLBParams, k: Optional[int] = None) -> List[SupportPoint]:
        """Support points of instance k (defaults to params.k) with exact masses"""
        k = params.k if k is None else k
        g1, eps, l, rho = params.gamma_1, params.epsilon, params.l, params.rho
        shift: Dict[Tuple[Fraction, Fraction], Fraction] = {
            (s, b): sign * eps for s, b, sign in LowerBoundService.perturbation(params, k)
        }
        points: List[SupportPoint] = []
        for i in range(params.N):
            s_i = params.seller(i)
            points.append((f"W1[{i}]", s_i, 1 - l, g1 + shift.get((s_i, 1 - l), 0)))
            points.append((f"W2[{i}]", s_i, 1 - l - rho, g1 + shift.get((s_i, 1 - l - rho), 0)))
        for i in range(params.N):
            points.append((f"W3[{i}]", Fraction(0), params.seller(i) - params.delta, params.gamma_3[i]))
        for i in range(params.N):
            s_i = params.seller(i)
            points.append((f"W4[{i}]", s_i, s_i - params.delta, params.gamma_4))
        points.append(("W5", Fraction(0), params.w5_buyer, params.gamma_5))
        for s, b in CORNERS:
            points.append((f"W6({s},{b})", Fraction(s), Fraction(b), params.gamma_6))

        negative = [label for label, _, _, m in points if m < 0]
        if negative:
            raise ConstructionError(f"Negative masses at {', '.join(negative[:5])}")
        total = sum(m for _, _, _, m in points)
        if total != 1:
            raise ConstructionError(f"Masses sum to {total}, not 1")
        return points

    @staticmethod
    def twobit_lb_distribution(params: TwoBitLBParams) -> FiniteValuationDistribution:
        points = LowerBoundService.support(params)
        return FiniteValuationDistribution.from_exact(
            [(s, b, m) for _, s, b, m in points], labels=[label for label, _, _, _ in points]
        )

    @staticmethod
    def expected_gft(points: List[SupportPoint], p: Fraction, q: Fraction) -> Fraction:
        return sum((m * (b - s) for _, s, b, m in points if s <= p and q <= b), Fraction(0))

    # -- checks -----------------------------------------------------------------

    @staticmethod
    def _validity_checks(params: TwoBitLBParams) -> List[CheckResult]:
        g1 = params.gamma_1
        w3_lo, w3_hi = min(params.gamma_3), max(params.gamma_3)
        return [
            _check("gamma6-floor", params.gamma_6 >= Fraction(1, 32), params.gamma_6, Fraction(1, 32),
                   "corner mass gamma_6 >= 1/32"),
            _check("w3-positive", w3_lo > 0, w3_lo, Fraction(0), "smallest balancing mass"),
            _check("w3-below-2gamma1", w3_hi < 2 * g1, w3_hi, 2 * g1, "largest balancing mass"),
        ]

    @staticmethod
    def _plateau_checks(params: TwoBitLBParams, base: List[SupportPoint], table: _ValueTable) -> List[CheckResult]:
        c1, c2, c3, c4 = params.c_values
        d = params.delta
        top = 1 - params.l
        mid2 = ((1 + params.l) / 2 + top - params.rho) / 2
        probes = [
            ("plateau-c2", mid2, c2),
            ("plateau-c3", top - params.rho / 2 - d, c3),
            ("plateau-c4", 1 - d, c4),
        ]
        origin = table.value(0, 0)  # the corner (0,0) is always in G_W
        checks = [_check("c1-closed-form", origin == c1, origin, c1,
                         "E_0[GFT(0,0)] against gamma_5(1+l)/2 + gamma_6 + gamma_1*77N/96")]
        off = [
            LowerBoundService.expected_gft(base, params.seller(i), params.seller(i) + d)
            for i in range(params.N - 1)
        ]
        worst = max(off, key=lambda v: abs(v - c1))
        checks.append(_check("plateau-c1", all(v == c1 for v in off), worst, c1,
                             "E_0[GFT(s_i, s_i + delta)] for i < N-1"))
        for name, p, closed in probes:
            value = LowerBoundService.expected_gft(base, p, min(p + d, Fraction(1)))
            checks.append(_check(name, value == closed, value, closed, f"E_0[GFT(p, p+delta)] at p={p}"))
        return checks

    @staticmethod
    def _argmax_check(params: TwoBitLBParams, table: _ValueTable) -> CheckResult:
        ns, nb = table.shape
        values = [
            (table.value(i, j), (i, j))
            for i in range(ns) for j in range(nb) if table.gs[i] <= table.gb[j]
        ]
        best = max(v for v, _ in values)
        winners = [ij for v, ij in values if v == best]
        if params.k == 0:
            plateau = table.value(0, 0)
            return _check("a-argmax", best == plateau, best, plateau,
                          "base instance: no budget-balanced pair beats the (0,0) plateau")

        target = (table.si[params.seller(params.k)], table.bi.get(params.seller(params.k) + params.delta))
        second = max((v for v, ij in values if ij != target), default=Fraction(0))
        margin = best - second
        floor = params.rho * params.epsilon
        found = [tuple(str(x) for x in table.pair(*ij)) for ij in winners[:3]]
        return _check(
            "a-argmax", winners == [target] and margin >= floor, margin, floor,
            f"margin of (s_k, s_k + delta) over every other budget-balanced pair; argmax={found}",
        )

    @staticmethod
    def _lower_triangle_check(table: _ValueTable) -> CheckResult:
        ns, nb = table.shape
        worst, where = None, None
        for i in range(ns):
            for j in range(nb):
                if table.gs[i] > table.gb[j]:
                    v = table.value(i, j)
                    if worst is None or v > worst:
                        worst, where = v, (i, j)
        anchor = table.value(table.si[Fraction(0)], table.bi[Fraction(0)])
        pair = tuple(str(x) for x in table.pair(*where))
        return _check("b-lower-dominated", worst <= anchor, worst, anchor,
                      f"best pair with p > q is {pair}, compared with (0,0)")

    @staticmethod
    def _exploration_check(params: TwoBitLBParams, table: _ValueTable) -> CheckResult:
        lo, hi = params.band
        need = params.gamma_5 / 3
        gap, where = None, None
        for i, p in enumerate(table.gs):
            if not lo <= p <= hi:
                continue
            cap = min(p + params.delta, hi)
            j_ref = max(j for j, q in enumerate(table.gb) if q <= cap)
            ref = table.value(i, j_ref)
            for j, q in enumerate(table.gb):
                if q > hi:
                    g = ref - table.value(i, j)
                    if gap is None or g < gap:
                        gap, where = g, (str(p), str(q))
        return _check("c-exploration-cost", gap >= need, gap, need,
                      f"smallest loss from raising q above (1+l)/2, at {where}")

    @staticmethod
    def _feedback_check(params: TwoBitLBParams, table: _ValueTable) -> CheckResult:
        """
        Every instance's two-bit outcome law is the base law plus epsilon times an
        integer combination, so it is instance-independent exactly where the
        integer coefficients of P(s<=p, b>=q), P(s<=p) and P(b>=q) all vanish.
        """
        ns, nb = table.shape
        rows = np.arange(ns)
        cols = np.arange(nb)
        gs, gb = table.gs, table.gb
        q_lo, q_hi = 1 - params.l - params.rho, 1 - params.l
        in_q = np.array([q_lo < q <= q_hi for q in gb])
        strips = np.zeros((ns, nb), dtype=bool)
        changed = np.zeros((ns, nb), dtype=bool)
        for k in range(1, params.N - 1):
            p_lo, p_hi = params.seller(k), params.seller(k + 1)
            in_p = np.array([p_lo <= p < p_hi for p in gs])
            strips |= np.outer(in_p, in_q)
            joint = np.zeros((ns, nb), dtype=np.int64)
            seller = np.zeros(ns, dtype=np.int64)
            buyer = np.zeros(nb, dtype=np.int64)
            for s, b, sign in LowerBoundService.perturbation(params, k):
                s_ok = rows >= table.si[s]
                b_ok = cols <= table.bi[b]
                joint += sign * np.outer(s_ok, b_ok)
                seller += sign * s_ok
                buyer += sign * b_ok
            changed |= (joint != 0) | (seller[:, None] != 0) | (buyer[None, :] != 0)
        violations = int((changed & ~strips).sum())
        return _check(
            "d-feedback-invariance", violations == 0, Fraction(violations), Fraction(0),
            f"grid pairs outside the strips whose outcome law depends on the instance; "
            f"{int(strips.sum())} grid pairs lie inside the strips",
        )

    @staticmethod
    def twobit_lb_structure_report(params: TwoBitLBParams) -> TwoBitStructureReport:
        base = LowerBoundService.support(params, k=0)
        LowerBoundService.support(params)  # raises on invalid masses of instance k
        table = _ValueTable(base, LowerBoundService.perturbation(params, params.k), params.epsilon)

        checks = LowerBoundService._validity_checks(params)
        checks.append(LowerBoundService._argmax_check(params, table))
        checks.append(LowerBoundService._lower_triangle_check(table))
        checks.append(LowerBoundService._exploration_check(params, table))
        checks.append(LowerBoundService._feedback_check(params, table))
        checks.extend(LowerBoundService._plateau_checks(params, base, table))

        report = TwoBitStructureReport(
            N=params.N, k=params.k, epsilon=str(params.epsilon), w5_buyer=str(params.w5_buyer),
            grid_shape=table.shape, gamma_1=str(params.gamma_1), gamma_4=str(params.gamma_4),
            gamma_5=str(params.gamma_5), gamma_6=str(params.gamma_6), checks=checks,
        )
        for check in report.checks:
            if not check.passed:
                logger.error("Two-bit structure check %s failed for N=%d k=%d: %s (%s vs %s)",
                             check.name, params.N, params.k, check.detail, check.exact_lhs, check.exact_rhs)
        return report
