"""Certification checks and the decorator that builds them."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

from tentlab.report import CheckRecord, Curve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Outcome:
    """What a check function measured."""

    passed: bool
    constants: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    witness: Optional[str] = None
    curves: Dict[str, Curve] = field(default_factory=dict)


CheckFunction = Callable[[Any], Outcome]


def check(name: str, anchor: str, assertive: bool = True) -> Callable[[CheckFunction], Check]:
    """Wrap a function ``(context) -> Outcome`` into a named ``Check``.

    Parameters
    ----------
    name : str
        unique name in a suite
    anchor : str
        the statement being certified
    assertive : bool
        report-only checks never fail a suite

    Returns
    -------
    Callable
        decorator producing a ``Check``
    """

    def wrap(func: CheckFunction) -> Check:
        if "return" not in func.__annotations__:
            raise ValueError("The check function must be type annotated")
        return Check(func, name, anchor, assertive)

    return wrap


@dataclass(frozen=True)
class Check:
    """Checks in tentlab.

    Attributes
    ----------
    function: Callable
        measures the property on a context and returns an ``Outcome``
    name: str
        unique name within a suite
    anchor: str
        the statement being certified
    assertive: bool
        whether a failure fails the suite
    """

    function: CheckFunction
    name: str
    anchor: str
    assertive: bool = True

    def evaluate(self, context: Any) -> tuple:
        """Run the check, turning an escaping exception into a failed outcome.

        Returns
        -------
        tuple
            the ``CheckRecord`` and the outcome's curves
        """
        start = time.perf_counter()
        try:
            outcome = self.function(context)
        except Exception as err:  # pylint: disable=broad-except
            log.warning("Check %s raised %s: %s", self.name, type(err).__name__, err)
            outcome = Outcome(False, witness=f"{type(err).__name__}: {err}")
        elapsed = time.perf_counter() - start

        if not self.assertive:
            status = "report-only"
        else:
            status = "pass" if outcome.passed else "fail"
        witness = outcome.witness
        if status == "fail":
            witness = witness or "no witness recorded"
            log.warning("Check %s failed: %s", self.name, witness)
        else:
            log.debug("Check %s: %s in %.3fs", self.name, status, elapsed)
        record = CheckRecord(
            name=self.name,
            anchor=self.anchor,
            status=status,
            assertive=self.assertive,
            constants=dict(outcome.constants),
            tolerances=dict(outcome.tolerances),
            witness=witness,
            wall_time=elapsed,
        )
        return record, outcome.curves

    def __str__(self) -> str:
        """Return a string representation of a check."""
        kind = "assertive" if self.assertive else "report-only"
        return f"Check {self.name} ({kind}) certifies: {self.anchor}"

    def __call__(self, context: Any) -> CheckRecord:
        return self.evaluate(context)[0]
