from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from mpmath import mpc, mpf

__all__ = ["EvalResult"]


@dataclass(frozen=True)
class EvalResult:
    """A value together with how it was obtained.

    ``mode`` is ``"exact"`` (realized from exact arithmetic; ``exact`` holds
    the exact value), ``"certified"`` (the true value lies within
    ``error_bound``) or ``"heuristic"`` (``error_bound`` is an estimate only).
    """

    value: mpc
    error_bound: mpf
    route: str
    terms_used: int = 0
    mode: str = "certified"
    flags: tuple[str, ...] = ()
    exact: Any = None

    @property
    def real(self) -> mpf:
        return mpc(self.value).real
