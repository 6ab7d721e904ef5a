"""Closed-form trigonometric identities and bounds for closed hyperbolic
surfaces: geodesic lengths of two-arc bigon curves, the extremal-angle upper
bounds, the systole/diameter inequalities and their slack functions, and the
genus-dependent bounds (Bavard, Jenni) with the resulting ratio estimates.

Lengths are in curvature -1 units, angles in radians.  Several quantities are
exposed on both the cosh scale and the length scale to avoid unit slips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InputDomainError

# Maximal systole of a closed genus-2 surface (Jenni's sharp bound),
# attained by the regular-octagon surface.
JENNI_SYS_UPPER = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


class Side(Enum):
    """Whether the two bigon angles lie on the same or opposite sides of the
    curve formed by the two arcs."""

    SAME = "same"
    OPPOSITE = "opposite"


@dataclass(frozen=True)
class BigonConfig:
    """Two interior-disjoint simple arcs of equal length d sharing both
    endpoints, meeting at angles alpha and beta."""

    alpha: float
    beta: float
    d: float
    side: Side

    def __post_init__(self):
        for name, val in (("alpha", self.alpha), ("beta", self.beta), ("d", self.d)):
            if not math.isfinite(val) or val <= 0.0:
                raise InputDomainError(f"{name} must be positive and finite, got {val}")
        if self.alpha >= 2.0 * math.pi or self.beta >= 2.0 * math.pi:
            raise InputDomainError("angles must lie in (0, 2pi)")

    @property
    def theta(self) -> float:
        """Mean angle (alpha + beta) / 2."""
        return 0.5 * (self.alpha + self.beta)


def bigon_coshhalf(cfg: BigonConfig) -> float:
    """cosh(L/2) of the closed geodesic homotopic to the two-arc curve.

    Same side:     cosh(L/2) = -cos(a/2) cos(b/2) + sin(a/2) sin(b/2) cosh d
    Opposite side: cosh(L/2) = +cos(a/2) cos(b/2) + sin(a/2) sin(b/2) cosh d

    Valid for 0 < alpha, beta <= pi.  Values <= 1 mean no closed geodesic
    exists for the configuration (the holonomy is not hyperbolic).
    """
    if cfg.alpha > math.pi or cfg.beta > math.pi:
        raise InputDomainError("length formula requires angles in (0, pi]")
    ca, cb = math.cos(cfg.alpha / 2.0), math.cos(cfg.beta / 2.0)
    sa, sb = math.sin(cfg.alpha / 2.0), math.sin(cfg.beta / 2.0)
    sign = -1.0 if cfg.side is Side.SAME else 1.0
    return sign * ca * cb + sa * sb * math.cosh(cfg.d)


def bigon_geodesic_length(cfg: BigonConfig) -> float | None:
    """Length L of the closed geodesic in the class of the two-arc curve, or
    None when no such geodesic exists (cosh(L/2) formula gives a value <= 1)."""
    rhs = bigon_coshhalf(cfg)
    if rhs <= 1.0:
        return None
    return 2.0 * math.acosh(rhs)


def folded_coshhalf(alpha: float, beta: float, d: float, side: Side) -> float:
    """cosh(L/2) for angles 0 < alpha <= beta < 2pi with alpha + beta < 2pi.

    Configurations with beta > pi reduce to the other side's formula with
    beta replaced by 2pi - beta; this folding keeps a single code path for
    the extremal-angle comparisons.
    """
    if not (0.0 < alpha <= beta < 2.0 * math.pi):
        raise InputDomainError("need 0 < alpha <= beta < 2pi")
    if alpha + beta >= 2.0 * math.pi:
        raise InputDomainError("need alpha + beta < 2pi")
    if beta > math.pi:
        beta = 2.0 * math.pi - beta
        side = Side.OPPOSITE if side is Side.SAME else Side.SAME
    return bigon_coshhalf(BigonConfig(alpha, beta, d, side))


def extremal_bound(theta: float, d: float, side: Side) -> float:
    """Upper bound for cosh(L/2) over all angle splittings with mean theta:

    Same side:     -cos^2(theta/2) + sin^2(theta/2) cosh d
    Opposite side: +cos^2(theta/2) + sin^2(theta/2) cosh d
    """
    if not (0.0 < theta < math.pi):
        raise InputDomainError(f"theta must lie in (0, pi), got {theta}")
    if d <= 0.0 or not math.isfinite(d):
        raise InputDomainError(f"d must be positive and finite, got {d}")
    c2 = math.cos(theta / 2.0) ** 2
    s2 = math.sin(theta / 2.0) ** 2
    sign = -1.0 if side is Side.SAME else 1.0
    return sign * c2 + s2 * math.cosh(d)


def monotone_f(x: float, theta: float, d: float) -> float:
    """f(x) = -cos(x) cos(theta - x) + sin(x) sin(theta - x) cosh(d).

    Strictly increasing on [0, theta/2] for 0 < theta < pi, d > 0; its value
    at x = theta/2 is the same-side extremal bound.  Exposed so the
    monotonicity is directly testable.
    """
    if not (0.0 < theta < math.pi):
        raise InputDomainError(f"theta must lie in (0, pi), got {theta}")
    if not (0.0 <= x <= theta / 2.0 + 1e-15):
        raise InputDomainError(f"x must lie in [0, theta/2], got {x}")
    if d <= 0.0 or not math.isfinite(d):
        raise InputDomainError(f"d must be positive and finite, got {d}")
    return -math.cos(x) * math.cos(theta - x) + math.sin(x) * math.sin(theta - x) * math.cosh(d)


def _check_sys_diam(sys: float, diam: float) -> None:
    if sys <= 0.0 or diam <= 0.0 or not (math.isfinite(sys) and math.isfinite(diam)):
        raise InputDomainError("systole and diameter must be positive and finite")


def main_inequality_slack(sys: float, diam: float) -> float:
    """Signed slack of 4 cosh(sys/2) <= 3 cosh(diam) - 1 (nonnegative for
    genuine closed hyperbolic surfaces)."""
    _check_sys_diam(sys, diam)
    return 3.0 * math.cosh(diam) - 1.0 - 4.0 * math.cosh(sys / 2.0)


def weak_inequality_slack(sys: float, diam: float) -> float:
    """Slack of the weaker variant 4 cosh(sys/2) <= 3 cosh(diam) + 1;
    always exceeds the main slack by exactly 2."""
    _check_sys_diam(sys, diam)
    return 3.0 * math.cosh(diam) + 1.0 - 4.0 * math.cosh(sys / 2.0)


def combined_bavard_slack(sys: float, diam: float) -> float:
    """Slack of 4 cosh^2(sys/2) <= 3 cosh^2(diam) + 1 (the combination of the
    two genus-dependent bounds below)."""
    _check_sys_diam(sys, diam)
    return 3.0 * math.cosh(diam) ** 2 + 1.0 - 4.0 * math.cosh(sys / 2.0) ** 2


def pants_case_slack(sys: float, diam: float) -> float:
    """Slack of cosh(sys/2) <= (3/4) cosh(diam) - 1/4; four times this slack
    is the main slack."""
    _check_sys_diam(sys, diam)
    return 0.75 * math.cosh(diam) - 0.25 - math.cosh(sys / 2.0)


def torus_case_slack(sys: float, diam: float) -> float:
    """Slack of cosh(sys/2) <= (1/2) cosh(diam) + 1/2; crosses the pants-case
    bound at cosh(diam) = 3."""
    _check_sys_diam(sys, diam)
    return 0.5 * math.cosh(diam) + 0.5 - math.cosh(sys / 2.0)


def _check_genus(genus: int, minimum: int = 2) -> None:
    if not isinstance(genus, int) or genus < minimum:
        raise InputDomainError(f"genus must be an integer >= {minimum}, got {genus!r}")


def bavard_diam_lower_cosh(genus: int) -> float:
    """cosh(diam) >= 1 / (sqrt(3) tan(pi / (12g - 6)))."""
    _check_genus(genus)
    return 1.0 / (math.sqrt(3.0) * math.tan(math.pi / (12 * genus - 6)))


def bavard_sys_upper_cosh(genus: int) -> float:
    """cosh(sys/2) <= 1 / (2 sin(pi / (12g - 6)))."""
    _check_genus(genus)
    return 1.0 / (2.0 * math.sin(math.pi / (12 * genus - 6)))


def ratio_upper_bound(genus: int) -> float:
    """Genus-dependent upper bound for sys/diam:

        2 arccosh(1 / (2 sin t)) / arccosh(2 / (3 sin t) + 1/3),

    with t = pi / (12g - 6).  Always below 2.
    """
    _check_genus(genus)
    s = math.sin(math.pi / (12 * genus - 6))
    num = 2.0 * _acosh_big(1.0 / (2.0 * s))
    den = _acosh_big(2.0 / (3.0 * s) + 1.0 / 3.0)
    return num / den


def _acosh_big(x: float) -> float:
    # math.acosh overflows x*x for x ~ 1e154; fall back to log(2x) there.
    if x > 1e150:
        return math.log(2.0 * x)
    return math.acosh(x)


def genus2_ratio_bound() -> float:
    """Sharp-systole genus-2 ratio bound 2 arccosh(1 + sqrt 2) / arccosh((5 + 4 sqrt 2)/3),
    which is below 8/5."""
    return JENNI_SYS_UPPER / math.acosh((5.0 + 4.0 * math.sqrt(2.0)) / 3.0)


def asymptotic_ratio_model(genus: int, constant: float) -> float:
    """First-order model 2 (1 - constant / log g) for the large-genus behavior
    of the ratio bound, for a caller-supplied constant."""
    _check_genus(genus, minimum=3)
    return 2.0 * (1.0 - constant / math.log(genus))


def fitted_expansion_constant(genus: int) -> float:
    """Constant c_g = (2 - ratio_upper_bound(g)) log(g) / 2 so that the model
    above reproduces the exact bound at genus g."""
    _check_genus(genus, minimum=3)
    return 0.5 * (2.0 - ratio_upper_bound(genus)) * math.log(genus)


@dataclass(frozen=True)
class BoundsReport:
    """Genus-dependent bounds on both the cosh scale and the length scale."""

    genus: int
    bavard_diam_lower_cosh: float
    bavard_sys_upper_cosh: float
    bavard_diam_lower: float
    bavard_sys_upper: float
    ratio_upper: float
    asymptotic_ratio_model: float | None
    jenni_sys_upper: float | None

    def to_dict(self) -> dict:
        return {
            "genus": self.genus,
            "bavard_diam_lower_cosh": self.bavard_diam_lower_cosh,
            "bavard_sys_upper_cosh": self.bavard_sys_upper_cosh,
            "bavard_diam_lower": self.bavard_diam_lower,
            "bavard_sys_upper": self.bavard_sys_upper,
            "ratio_upper": self.ratio_upper,
            "asymptotic_ratio_model": self.asymptotic_ratio_model,
            "jenni_sys_upper": self.jenni_sys_upper,
        }

    @staticmethod
    def from_dict(data: dict) -> "BoundsReport":
        return BoundsReport(**data)


# Reference genus at which the expansion constant of the ratio bound is
# fitted for reporting purposes (the fit converges like 1/log g).
FIT_REFERENCE_GENUS = 10**9


def bavard_bounds(genus: int) -> BoundsReport:
    """Assemble the genus-dependent bounds report."""
    _check_genus(genus)
    dlc = bavard_diam_lower_cosh(genus)
    suc = bavard_sys_upper_cosh(genus)
    model = None
    if genus >= 3:
        model = asymptotic_ratio_model(genus, fitted_expansion_constant(FIT_REFERENCE_GENUS))
    return BoundsReport(
        genus=genus,
        bavard_diam_lower_cosh=dlc,
        bavard_sys_upper_cosh=suc,
        bavard_diam_lower=math.acosh(dlc),
        bavard_sys_upper=2.0 * math.acosh(suc),
        ratio_upper=ratio_upper_bound(genus),
        asymptotic_ratio_model=model,
        jenni_sys_upper=JENNI_SYS_UPPER if genus == 2 else None,
    )


def systole_upper_bound(genus: int) -> float:
    """Best a-priori systole upper bound: Jenni's sharp bound in genus 2,
    otherwise the Bavard bound."""
    _check_genus(genus)
    if genus == 2:
        return JENNI_SYS_UPPER
    return 2.0 * math.acosh(bavard_sys_upper_cosh(genus))
