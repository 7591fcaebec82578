"""
Parsers for the shell-friendly leg syntax.

    detector@time            sharp leg            d0@1.0
    detector:start,end       Rect window          d0:0,1
    dt,T                     simulation grid      1e-3,3
    [id=]leg;leg;...         comparison request   overlap=d0:0,1;d0:0.5,1.5
"""

from __future__ import annotations

from typing import Optional

from pydantic import ValidationError

from sme_correlate.errors import UsageError
from sme_correlate.schemas.correlation import SharpPoint, WindowFilter
from sme_correlate.schemas.run_config import GridSpec, RequestSpec


def _float(text: str, flag: str, whole: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"bad {flag} value {whole!r}: {text!r} is not a number", flag=flag) from None


def parse_sharp(text: str) -> SharpPoint:
    label, sep, time = text.rpartition("@")
    if not sep or not label:
        raise UsageError(f"bad --sharp value {text!r}: expected detector@time", flag="--sharp")
    try:
        return SharpPoint(detector=label, time=_float(time, "--sharp", text))
    except ValidationError as exc:
        raise UsageError(f"bad --sharp value {text!r}: {exc.errors()[0]['msg']}", flag="--sharp") from None


def parse_window(text: str) -> WindowFilter:
    label, sep, bounds = text.strip().rpartition(":")
    parts = bounds.split(",")
    if not sep or not label or len(parts) != 2:
        raise UsageError(f"bad --window value {text!r}: expected detector:start,end", flag="--window")
    start, end = (_float(p, "--window", text) for p in parts)
    try:
        return WindowFilter.rect(label, start, end)
    except ValidationError as exc:
        raise UsageError(f"bad --window value {text!r}: {exc.errors()[0]['msg']}", flag="--window") from None


def parse_grid(text: str) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"bad --grid value {text!r}: expected dt,T", flag="--grid")
    dt, t_end = (_float(p, "--grid", text) for p in parts)
    try:
        return GridSpec(dt=dt, t_end=t_end)
    except ValidationError as exc:
        raise UsageError(f"bad --grid value {text!r}: {exc.errors()[0]['msg']}", flag="--grid") from None


def parse_request(text: str, default_id: str) -> RequestSpec:
    rid: Optional[str] = None
    body = text
    head, sep, tail = text.partition("=")
    if sep and ":" not in head:
        rid, body = head.strip(), tail
    legs = [leg for leg in body.split(";") if leg.strip()]
    if not legs:
        raise UsageError(f"bad --request value {text!r}: no windows", flag="--request")
    return RequestSpec(id=rid or default_id, windows=[parse_window(leg) for leg in legs])
