"""Difference functions: (need, have) -> the part of need not covered by have.

A difference function must be *sound*: everything it returns denotes a
subset of the need. It should also be order independent so that iterated
subtraction over a grant list reaches the same emptiness outcome in any
order. The built-in helpers here are conservative for enum and tree values
and exact for integer intervals.
"""

from __future__ import annotations

import itertools
import random
import re
import threading
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

from .errors import (
    MalformedIntervalError,
    TreeMismatchError,
    UnknownApplicationError,
    UnknownTreeError,
    UnsoundCustomFunctionError,
)
from .model import (
    ResourceForest,
    ResourceValueSpec,
    Segment,
    node_kinds_along,
    render_rvs,
    validate_rvs,
)

_INTERVAL_RE = re.compile(r"^\s*(-?\d+)-(-?\d+)\s*$")


def parse_interval(value: str) -> tuple[int, int]:
    """Parse an interval value as half-open [lo, hi); requires lo <= hi."""
    m = _INTERVAL_RE.match(value)
    if not m:
        raise MalformedIntervalError(f"not an interval value: {value!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise MalformedIntervalError(f"interval bounds out of order: {value!r}")
    return lo, hi


def _check_same_tree(need: ResourceValueSpec, have: ResourceValueSpec) -> None:
    if need.tree_name != have.tree_name:
        raise TreeMismatchError(
            f"specs resolve to different trees: {need.tree_name!r} vs {have.tree_name!r}"
        )


def _prefix_covers(need: ResourceValueSpec, have: ResourceValueSpec) -> bool:
    """True when have's segments are a (possibly equal-length) covering prefix."""
    if len(have.segments) > len(need.segments):
        return False
    for hseg, nseg in zip(have.segments, need.segments):
        if hseg.node_name != nseg.node_name:
            return False
        if hseg.is_wildcard:
            continue
        if nseg.is_wildcard or hseg.value != nseg.value:
            return False
    return True


def tree_difference(
    need: ResourceValueSpec, have: ResourceValueSpec
) -> set[ResourceValueSpec]:
    """Conservative helper for tree-shaped resources.

    Empty iff have's segments form a prefix of need's and each has the
    wildcard or the exact same literal; otherwise the untouched need.
    Never returns anything other than {} or {need}.
    """
    _check_same_tree(need, have)
    return set() if _prefix_covers(need, have) else {need}


def interval_difference(
    need: ResourceValueSpec, have: ResourceValueSpec
) -> set[ResourceValueSpec]:
    """Exact subtraction on a final interval-valued segment.

    Earlier segments must satisfy the tree prefix rule. Intervals are
    half-open integer ranges ``lo-hi``. A wildcard have covers everything;
    a wildcard need is returned untouched (conservative) because its
    complement has no finite interval form.
    """
    _check_same_tree(need, have)
    if len(have.segments) > len(need.segments):
        return {need}
    if len(have.segments) < len(need.segments):
        return set() if _prefix_covers(need, have) else {need}
    for hseg, nseg in zip(have.segments[:-1], need.segments[:-1]):
        if hseg.node_name != nseg.node_name:
            return {need}
        if hseg.is_wildcard:
            continue
        if nseg.is_wildcard or hseg.value != nseg.value:
            return {need}
    hlast, nlast = have.segments[-1], need.segments[-1]
    if hlast.node_name != nlast.node_name:
        return {need}
    if hlast.is_wildcard:
        return set()
    if nlast.is_wildcard:
        return {need}
    nlo, nhi = parse_interval(nlast.value)
    hlo, hhi = parse_interval(hlast.value)
    pieces: list[tuple[int, int]] = []
    left = (nlo, min(nhi, hlo))
    right = (max(nlo, hhi), nhi)
    for lo, hi in (left, right):
        if lo < hi:
            pieces.append((lo, hi))
    out: set[ResourceValueSpec] = set()
    for lo, hi in pieces:
        segments = need.segments[:-1] + (Segment(nlast.node_name, f"{lo}-{hi}"),)
        out.add(replace(need, segments=segments))
    return out


@dataclass(frozen=True)
class DifferenceFunction:
    """An application-supplied difference function for one tree."""

    applies_to: str
    evaluate: Callable[
        [ResourceValueSpec, ResourceValueSpec], Iterable[ResourceValueSpec]
    ]


class Registration:
    """Handle returned by register_difference; can undo the registration."""

    def __init__(self, engine: "DifferenceEngine", app_id: str, tree_name: str):
        self._engine = engine
        self.app_id = app_id
        self.tree_name = tree_name

    def unregister(self) -> None:
        self._engine._unregister(self.app_id, self.tree_name)


class DifferenceEngine:
    """Holds per-application forests and dispatches difference evaluation.

    Reads are lock-free; forest and function registration take an exclusive
    lock. Evaluate callables must be reentrant and side-effect free.
    """

    def __init__(self):
        self._forests: dict[str, ResourceForest] = {}
        self._custom: dict[tuple[str, str], DifferenceFunction] = {}
        self._lock = threading.Lock()

    def add_forest(self, app_id: str, forest: ResourceForest) -> None:
        with self._lock:
            self._forests[app_id] = forest

    def forest(self, app_id: str) -> ResourceForest:
        try:
            return self._forests[app_id]
        except KeyError:
            raise UnknownApplicationError(f"unknown application {app_id!r}") from None

    def applications(self) -> tuple[str, ...]:
        return tuple(self._forests)

    def register_difference(
        self, app_id: str, fn: DifferenceFunction
    ) -> Registration:
        forest = self.forest(app_id)
        if fn.applies_to not in forest.trees:
            raise UnknownTreeError(
                f"application {app_id!r} has no tree {fn.applies_to!r}"
            )
        with self._lock:
            self._custom[(app_id, fn.applies_to)] = fn
        return Registration(self, app_id, fn.applies_to)

    def _unregister(self, app_id: str, tree_name: str) -> None:
        with self._lock:
            self._custom.pop((app_id, tree_name), None)

    def resolve(
        self, app_id: str, need: ResourceValueSpec, have: ResourceValueSpec
    ) -> set[ResourceValueSpec]:
        """The remaining part of need after accounting for have.

        Specs from different trees are incomparable and leave the need
        untouched. Custom functions take precedence for their tree and have
        their output structurally vetted against the need.
        """
        forest = self.forest(app_id)
        need = validate_rvs(need, forest)
        have = validate_rvs(have, forest)
        if need.tree_name != have.tree_name:
            return {need}
        fn = self._custom.get((app_id, need.tree_name))
        if fn is not None:
            result = set(fn.evaluate(need, have))
            self._vet_custom_result(forest, need, result)
            return result
        return self._builtin(forest, need, have)

    def subtract(
        self,
        app_id: str,
        need: ResourceValueSpec,
        haves: Sequence[ResourceValueSpec],
    ) -> set[ResourceValueSpec]:
        """Iterated subtraction of each have from the working set."""
        remaining = {validate_rvs(need, self.forest(app_id))}
        for have in haves:
            nxt: set[ResourceValueSpec] = set()
            for item in remaining:
                nxt |= self.resolve(app_id, item, have)
            remaining = nxt
            if not remaining:
                break
        return remaining

    def _builtin(
        self,
        forest: ResourceForest,
        need: ResourceValueSpec,
        have: ResourceValueSpec,
    ) -> set[ResourceValueSpec]:
        if len(have.segments) > len(need.segments):
            return {need}
        kinds = node_kinds_along(need, forest)
        last = len(need.segments) - 1
        for i, (hseg, nseg) in enumerate(zip(have.segments, need.segments)):
            if hseg.node_name != nseg.node_name:
                return {need}
            if hseg.is_wildcard:
                continue
            if not nseg.is_wildcard and hseg.value == nseg.value:
                continue
            # first position have fails to cover
            if i == last == len(have.segments) - 1 and kinds[i] == "interval":
                return interval_difference(need, have)
            return {need}
        return set()

    def _vet_custom_result(
        self,
        forest: ResourceForest,
        need: ResourceValueSpec,
        result: set[ResourceValueSpec],
    ) -> None:
        """Best-effort structural soundness check of a custom result.

        Each returned spec must be a valid path that extends the need's path
        and stays inside the need's values (exact literals for enums,
        numeric containment for intervals). Full semantic soundness remains
        the application's obligation.
        """
        kinds = node_kinds_along(need, forest)
        for spec in result:
            try:
                resolved = validate_rvs(spec, forest)
            except Exception as exc:
                raise UnsoundCustomFunctionError(
                    f"custom result {render_rvs(spec)!r} does not validate: {exc}"
                ) from exc
            if resolved.tree_name != need.tree_name:
                raise UnsoundCustomFunctionError(
                    f"custom result {render_rvs(spec)!r} is from a different tree"
                )
            if len(resolved.segments) < len(need.segments) or (
                resolved.node_path()[: len(need.segments)] != need.node_path()
            ):
                raise UnsoundCustomFunctionError(
                    f"custom result {render_rvs(spec)!r} is not reachable from the need"
                )
            for i, nseg in enumerate(need.segments):
                rseg = resolved.segments[i]
                if nseg.is_wildcard:
                    continue
                if kinds[i] == "interval":
                    if rseg.is_wildcard:
                        raise UnsoundCustomFunctionError(
                            f"custom result {render_rvs(spec)!r} widens an interval to ?"
                        )
                    try:
                        nlo, nhi = parse_interval(nseg.value)
                        rlo, rhi = parse_interval(rseg.value)
                    except MalformedIntervalError as exc:
                        raise UnsoundCustomFunctionError(str(exc)) from exc
                    if rlo < nlo or rhi > nhi:
                        raise UnsoundCustomFunctionError(
                            f"custom result {render_rvs(spec)!r} exceeds the needed interval"
                        )
                elif rseg.is_wildcard or rseg.value != nseg.value:
                    raise UnsoundCustomFunctionError(
                        f"custom result {render_rvs(spec)!r} is outside the need"
                    )


def order_independence_violations(
    engine: DifferenceEngine,
    app_id: str,
    need: ResourceValueSpec,
    haves: Sequence[ResourceValueSpec],
    *,
    max_permutations: int = 120,
    compare_value_sets: bool = False,
    seed: int = 0,
) -> list[tuple[tuple[int, ...], str]]:
    """Permutation-testing harness for order independence.

    Subtracts ``haves`` from ``need`` under every permutation (sampled when
    there are more than ``max_permutations``) and reports orderings whose
    emptiness outcome (or, optionally, final value set) differs from the
    declared order. This flags violations; it cannot prove independence.
    """
    baseline = engine.subtract(app_id, need, haves)
    base_empty = not baseline
    base_rendered = sorted(render_rvs(r) for r in baseline)
    indices = list(range(len(haves)))
    perms: Iterable[tuple[int, ...]]
    all_perms = list(itertools.permutations(indices))
    if len(all_perms) > max_permutations:
        rng = random.Random(seed)
        perms = [tuple(rng.sample(indices, len(indices))) for _ in range(max_permutations)]
    else:
        perms = all_perms
    violations: list[tuple[tuple[int, ...], str]] = []
    for perm in perms:
        shuffled = [haves[i] for i in perm]
        outcome = engine.subtract(app_id, need, shuffled)
        if (not outcome) != base_empty:
            violations.append((perm, "emptiness differs"))
        elif compare_value_sets and sorted(render_rvs(r) for r in outcome) != base_rendered:
            violations.append((perm, "final value set differs"))
    return violations
