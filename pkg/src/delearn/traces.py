"""Simulating a reference domain to collect learner input."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .domain import BudgetExceeded, Domain, Observation, State


class ObservedTransition(NamedTuple):
    source: Observation
    action: str
    target: Observation

    def __str__(self) -> str:
        return f"({self.source}, {self.action}, {self.target})"


@dataclass(frozen=True)
class ExecutionTrace:
    states: Tuple[State, ...]
    actions: Tuple[str, ...]

    def __post_init__(self):
        if len(self.states) != len(self.actions) + 1:
            raise ValueError("an execution trace has one more state than actions")


@dataclass(frozen=True)
class ObservationTrace:
    observations: Tuple[Observation, ...]
    actions: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))
        object.__setattr__(self, "actions", tuple(self.actions))
        if len(self.observations) != len(self.actions) + 1:
            raise ValueError("an observation trace has one more observation than actions")

    def __len__(self) -> int:
        """Number of actions."""
        return len(self.actions)

    def steps(self) -> Iterator[ObservedTransition]:
        for i, a in enumerate(self.actions):
            yield ObservedTransition(self.observations[i], a, self.observations[i + 1])

    def key(self, props: Sequence[str]) -> Tuple:
        return (
            tuple(o.key(props) for o in self.observations),
            self.actions,
        )

    def __str__(self) -> str:
        parts = [str(self.observations[0])]
        for a, o in zip(self.actions, self.observations[1:]):
            parts += [a, str(o)]
        return "(" + ", ".join(parts) + ")"


def execute(d: Domain, s: State, actions: Sequence[str]) -> ExecutionTrace:
    if not d.is_deterministic():
        raise ValueError("execution needs a deterministic domain")
    states = [s]
    for a in actions:
        if a not in d.actions:
            raise ValueError(f"unknown action {a!r}")
        states.append(d.step(states[-1], a))
    return ExecutionTrace(tuple(states), tuple(actions))


def observe(d: Domain, run: ExecutionTrace) -> ObservationTrace:
    return ObservationTrace(tuple(d.obs[s] for s in run.states), run.actions)


def sound_complete_transitions(d: Domain) -> FrozenSet[ObservedTransition]:
    """Every transition of ``d`` seen through its observations."""
    return frozenset(ObservedTransition(d.obs[s], a, d.obs[t]) for s, a, t in d.transitions)


def default_length(d: Domain) -> int:
    """Trace length guaranteeing completeness: ``2 ** (2 * |props|)``."""
    return 2 ** (2 * len(d.props))


def sound_complete_traces(
    d: Domain, length: Optional[int] = None, budget: int = 10**6
) -> FrozenSet[ObservationTrace]:
    """Observation traces of exactly ``length`` actions from the initial state."""
    if not d.is_deterministic_total():
        raise ValueError("trace generation needs a deterministic, universally applicable domain")
    n = default_length(d) if length is None else length
    if n < 0:
        raise ValueError("trace length must be non-negative")
    if len(d.actions) ** n > budget:
        raise BudgetExceeded(f"{len(d.actions)}^{n} traces exceed the budget of {budget}")
    out = set()
    obs: List[Observation] = [d.obs[d.initial]]
    acts: List[str] = []

    def walk(s: State) -> None:
        if len(acts) == n:
            out.add(ObservationTrace(tuple(obs), tuple(acts)))
            return
        for a in d.actions:
            t = d.step(s, a)
            acts.append(a)
            obs.append(d.obs[t])
            walk(t)
            acts.pop()
            obs.pop()

    walk(d.initial)
    return frozenset(out)


def sorted_traces(traces, props: Sequence[str]) -> List[ObservationTrace]:
    return sorted(traces, key=lambda t: t.key(props))
