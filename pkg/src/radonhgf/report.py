"""Verification reports shared by every check."""
from contextlib import contextmanager
from dataclasses import dataclass, field
import math
import time


class ResourceGuardError(ValueError):
    """A request exceeds a configured size limit."""


@dataclass
class VerificationReport:
    check: str
    params: dict
    status: str
    max_rel_err: float | None = None
    exact: bool | None = None
    elapsed_ms: float | None = None
    seed: int | None = None
    tol: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == "pass"

    def to_dict(self, timing=True):
        out = {"check": self.check, "params": _jsonable(self.params), "status": self.status}
        if self.exact is not None:
            out["exact"] = self.exact
        if self.max_rel_err is not None or self.exact is None:
            out["max_rel_err"] = _jsonable(self.max_rel_err)
        out["tol"] = self.tol
        out["elapsed_ms"] = round(self.elapsed_ms, 3) if timing and self.elapsed_ms is not None else None
        out["seed"] = self.seed
        if self.details:
            out["details"] = _jsonable(self.details)
        return out

    def summary_line(self):
        if self.exact is not None:
            metric = f"exact={self.exact}"
        elif self.max_rel_err is not None:
            metric = f"max_rel_err={self.max_rel_err:.3e}"
        else:
            metric = ""
        return f"{self.status.upper():4} {self.check} {_jsonable(self.params)} {metric}".rstrip()


def numeric_report(check, params, errors, tol, seed=None, details=None):
    """Build a report from a list of relative errors (pass iff max <= tol)."""
    worst = max(errors) if errors else 0.0
    ok = bool(errors) and all(math.isfinite(e) for e in errors) and worst <= tol
    return VerificationReport(
        check=check,
        params=params,
        status="pass" if ok else "fail",
        max_rel_err=float(worst),
        seed=seed,
        tol=tol,
        details=details or {},
    )


def exact_report(check, params, equal, details=None):
    return VerificationReport(
        check=check, params=params, status="pass" if equal else "fail", exact=bool(equal), details=details or {}
    )


@contextmanager
def timed(holder):
    """Store elapsed milliseconds in ``holder['ms']``."""
    start = time.perf_counter()
    try:
        yield holder
    finally:
        holder["ms"] = (time.perf_counter() - start) * 1000.0


def rel_err(a, b):
    """``|a - b| / max(|b|, tiny)``."""
    scale = abs(b)
    if scale < 1e-300:
        return abs(a - b)
    return abs(a - b) / scale


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    try:
        return float(obj)
    except (TypeError, ValueError):
        return str(obj)
