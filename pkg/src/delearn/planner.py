"""Shortest plans for epistemic goals on deterministic domains."""

from __future__ import annotations

from collections import deque
from typing import Optional, Tuple

from .domain import Domain, State, eval_on_state
from .formula import Formula


def plan(d: Domain, start: State, goal: Formula, horizon: Optional[int] = None) -> Optional[Tuple[str, ...]]:
    """Shortest action sequence from ``start`` ending in a state where
    ``goal`` holds, preferring the lexicographically least among equals.

    Breadth-first with actions expanded in sorted order, so the first path
    to reach any state is the least shortest one.  ``horizon`` defaults to
    the number of states; ``None`` is returned if no plan fits.
    """
    if horizon is None:
        horizon = len(d.states)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if not d.is_deterministic():
        raise ValueError("planning needs a deterministic domain")
    if start not in set(d.states):
        raise ValueError(f"start state {d.show(start)} is not in the domain")
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        s, path = queue.popleft()
        if eval_on_state(d, s, goal):
            return path
        if len(path) == horizon:
            continue
        for a in d.actions:
            for t in d.successors(s, a):
                if t not in seen:
                    seen.add(t)
                    queue.append((t, path + (a,)))
    return None
