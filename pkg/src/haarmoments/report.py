"""Machine-readable verification records shared by the check suites."""

from __future__ import annotations

from dataclasses import dataclass, field


def _jsonable(v):
    if isinstance(v, complex):
        if v.imag == 0:
            return v.real
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if hasattr(v, "numerator") and hasattr(v, "denominator") and not isinstance(v, int):
        return str(v)
    if hasattr(v, "item"):
        return v.item()
    return v


@dataclass(frozen=True)
class VerificationReport:
    """One comparison: a named check, both sides, errors and a verdict.

    ``passed`` is True when abs_err <= tolerance, or -- for Monte Carlo backed
    checks -- when abs_err <= k * mc_stderr with ``k`` recorded in params.
    """

    check: str
    params: dict
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tolerance: float
    passed: bool
    mc_stderr: float | None = None
    seed: int | None = None
    wall_ms: int | None = None
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    def to_dict(self, with_timings: bool = False) -> dict:
        d = {
            "check": self.check,
            "params": _jsonable(self.params),
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tolerance": self.tolerance,
            "mc_stderr": self.mc_stderr,
            "pass": self.passed,
            "seed": self.seed,
            "wall_ms": self.wall_ms if with_timings else None,
            "status": self.status,
        }
        if self.extra:
            d["extra"] = _jsonable(self.extra)
        return d


def make_report(check: str, params: dict, lhs, rhs, tolerance: float,
                mc_stderr: float | None = None, k: float = 4.0,
                seed: int | None = None, wall_ms: int | None = None,
                status: str = "ok", extra: dict | None = None) -> VerificationReport:
    """Build a report, deriving errors and the pass verdict."""
    lhs = complex(lhs)
    rhs = complex(rhs)
    abs_err = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel_err = abs_err / scale if scale > 0 else 0.0
    passed = abs_err <= tolerance
    params = dict(params)
    if mc_stderr is not None:
        params.setdefault("k", k)
        passed = passed or abs_err <= k * mc_stderr
    return VerificationReport(
        check=check, params=params, lhs=lhs, rhs=rhs,
        abs_err=abs_err, rel_err=rel_err, tolerance=tolerance,
        passed=passed, mc_stderr=mc_stderr, seed=seed, wall_ms=wall_ms,
        status=status, extra=extra or {},
    )


def make_exact_report(check: str, params: dict, lhs, rhs,
                      seed: int | None = None) -> VerificationReport:
    """Report for arbitrary-precision checks: pass iff the sides are equal."""
    equal = lhs == rhs
    diff = abs(float(lhs - rhs))
    scale = max(abs(float(lhs)), abs(float(rhs)))
    return VerificationReport(
        check=check, params=_jsonable(params), lhs=float(lhs), rhs=float(rhs),
        abs_err=0.0 if equal else max(diff, 5e-324),
        rel_err=0.0 if equal or scale == 0 else diff / scale,
        tolerance=0.0, passed=equal, mc_stderr=None, seed=seed,
        wall_ms=None, status="ok", extra={"exact_equal": equal},
    )
