"""Learning every domain consistent with a set of observation traces.

A history labels each observation of a trace with a concrete valuation
compatible with it.  Histories whose read-off domain is deterministic are
collected per trace, then combined across traces; every deterministic union
is a candidate domain.  The behavioural equivalence domain is the lock-step
composition of all candidates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .domain import (
    BudgetExceeded,
    Domain,
    Observation,
    canonical_order,
    comp,
    sync_compose,
)
from .epistemic import Valuation, all_valuations, render_valuation, valuation_key
from .traces import ObservationTrace

Step = Tuple[Valuation, str]


@dataclass(frozen=True)
class History:
    valuations: Tuple[Valuation, ...]
    trace: ObservationTrace

    def __post_init__(self):
        if len(self.valuations) != len(self.trace.observations):
            raise ValueError("a history needs one valuation per observation")
        for v, o in zip(self.valuations, self.trace.observations):
            if not o.holds_in(v):
                raise ValueError(f"valuation {sorted(v)} is not compatible with observation '{o}'")

    @property
    def initial(self) -> Valuation:
        return self.valuations[0]

    def steps(self) -> Iterable[Tuple[Valuation, str, Valuation]]:
        for i, a in enumerate(self.trace.actions):
            yield self.valuations[i], a, self.valuations[i + 1]

    def labelled(self) -> Iterable[Tuple[Valuation, Observation]]:
        return zip(self.valuations, self.trace.observations)

    def is_deterministic(self) -> bool:
        return _merge(({}, {}), self) is not None

    def domain(self, actions: Optional[Iterable[str]] = None) -> Domain:
        d = domain_of_histories([self], actions)
        if d is None:
            raise ValueError("history does not induce a deterministic domain")
        return d

    def key(self, props: Sequence[str]) -> Tuple:
        return (tuple(valuation_key(v, props) for v in self.valuations), self.trace.key(props))

    def render(self, props: Sequence[str]) -> str:
        parts = []
        for i, (v, o) in enumerate(self.labelled()):
            if i:
                parts.append(self.trace.actions[i - 1])
            parts += [render_valuation(v, props), str(o)]
        return "(" + ", ".join(parts) + ")"


Partial = Tuple[Dict[Step, Valuation], Dict[Valuation, Observation]]


def _merge(partial: Partial, h: History) -> Optional[Partial]:
    """Add ``h`` to a partial domain, or ``None`` on a determinism conflict."""
    trans, obs = partial
    trans, obs = dict(trans), dict(obs)
    for v, o in h.labelled():
        if obs.setdefault(v, o) != o:
            return None
    for v, a, w in h.steps():
        if trans.setdefault((v, a), w) != w:
            return None
    return trans, obs


def histories(props: Iterable[str], trace: ObservationTrace, max_histories: int = 10**6) -> FrozenSet[History]:
    """All histories of ``trace`` whose read-off domain is deterministic.

    Extends prefixes front to back and drops a prefix as soon as it maps a
    state and action to two successors or a valuation to two observations.
    """
    props = sorted(set(props))
    observations = trace.observations
    comps = [comp(o, props) for o in observations]
    layer: List[Tuple[Tuple[Valuation, ...], Dict[Step, Valuation], Dict[Valuation, Observation]]] = [
        ((v,), {}, {v: observations[0]}) for v in comps[0]
    ]
    for i, a in enumerate(trace.actions):
        o = observations[i + 1]
        nxt = []
        for path, trans, obs in layer:
            step = (path[-1], a)
            fixed = trans.get(step)
            for v in comps[i + 1] if fixed is None else (fixed,):
                seen = obs.get(v)
                if seen is not None and seen != o:
                    continue
                # a fixed successor was visited before, so its observation is recorded
                nxt.append((
                    path + (v,),
                    trans if fixed is not None else {**trans, step: v},
                    obs if seen is not None else {**obs, v: o},
                ))
        if len(nxt) > max_histories:
            raise BudgetExceeded(f"more than {max_histories} partial histories")
        layer = nxt
    return frozenset(History(path, trace) for path, _, _ in layer)


def histories_naive(props: Iterable[str], trace: ObservationTrace, budget: int = 10**6) -> FrozenSet[History]:
    """Oracle: filter every combination of compatible valuations."""
    props = sorted(set(props))
    comps = [comp(o, props) for o in trace.observations]
    size = 1
    for c in comps:
        size *= len(c)
    if size > budget:
        raise BudgetExceeded(f"{size} candidate histories exceed the budget of {budget}")
    out = set()
    for path in itertools.product(*comps):
        h = History(path, trace)
        if h.is_deterministic():
            out.add(h)
    return frozenset(out)


def histories_by_replay(props: Iterable[str], trace: ObservationTrace, budget: int = 10**7) -> FrozenSet[History]:
    """Oracle: replay the trace's actions under every partial transition
    function over all valuations and keep the runs whose valuations are
    compatible with the observations and observed consistently.

    Every deterministic history arises from its own transition function, so
    this yields the same set as :func:`histories`; it stays feasible for long
    traces over few propositions and actions.
    """
    props = sorted(set(props))
    vals = all_valuations(props)
    acts = sorted(set(trace.actions))
    slots = [(v, a) for v in vals for a in acts]
    options = [None] + list(range(len(vals)))
    total = len(comp(trace.observations[0], props)) * len(options) ** len(slots)
    if total > budget:
        raise BudgetExceeded(f"{total} replays exceed the budget of {budget}")
    out = set()
    for choice in itertools.product(options, repeat=len(slots)):
        table = {slot: vals[c] for slot, c in zip(slots, choice) if c is not None}
        for v0 in comp(trace.observations[0], props):
            path = [v0]
            seen: Dict[Valuation, Observation] = {}
            ok = True
            for i, o in enumerate(trace.observations):
                v = path[i]
                if not o.holds_in(v) or seen.setdefault(v, o) != o:
                    ok = False
                    break
                if i < len(trace.actions):
                    w = table.get((v, trace.actions[i]))
                    if w is None:
                        ok = False
                        break
                    path.append(w)
            if ok:
                out.add(History(tuple(path), trace))
    return frozenset(out)


def _to_domain(initial: Valuation, partial: Partial, props: Sequence[str], actions: Sequence[str]) -> Domain:
    trans, obs = partial
    d = Domain(
        props,
        actions,
        list(obs),
        initial,
        [(v, a, w) for (v, a), w in trans.items()],
        obs,
        deterministic=False,
    )
    d.deterministic = d.is_deterministic_total()
    return d


def domain_of_histories(
    hs: Iterable[History], actions: Optional[Iterable[str]] = None, props: Optional[Iterable[str]] = None
) -> Optional[Domain]:
    """Union of the histories' domains, or ``None`` if it is not deterministic."""
    hs = list(hs)
    if not hs:
        raise ValueError("need at least one history")
    initial = hs[0].initial
    if any(h.initial != initial for h in hs):
        raise ValueError("histories start from different valuations")
    partial: Optional[Partial] = ({}, {})
    for h in hs:
        partial = _merge(partial, h)
        if partial is None:
            return None
    if actions is None:
        actions = {a for h in hs for a in h.trace.actions}
    if props is None:
        props = {p for h in hs for o in h.trace.observations for p in o.observed}
        props |= {p for h in hs for v in h.valuations for p in v}
    return _to_domain(initial, partial, sorted(set(props)), sorted(set(actions)))


def _signature(traces: Iterable[ObservationTrace]) -> Tuple[List[ObservationTrace], List[str]]:
    traces = list(dict.fromkeys(traces))
    if not traces:
        raise ValueError("need at least one observation trace")
    actions = sorted({a for t in traces for a in t.actions})
    return traces, actions


def learn_domains(
    props: Iterable[str],
    traces: Iterable[ObservationTrace],
    naive: bool = False,
    max_histories: int = 10**6,
    max_candidates: int = 10**6,
) -> FrozenSet[Domain]:
    """Every deterministic union of one history per trace, all histories
    sharing their initial valuation.

    The default search merges traces one at a time and drops a partial union
    on its first conflict; ``naive`` enumerates the full product instead.
    """
    props = sorted(set(props))
    traces, actions = _signature(traces)
    traces = sorted(traces, key=lambda t: t.key(props))
    per_trace = [sorted(histories(props, t, max_histories), key=lambda h: h.key(props)) for t in traces]
    if naive:
        return _learn_naive(props, actions, per_trace, max_candidates)

    partials: Dict[Tuple, Tuple[Valuation, Partial]] = {}
    for h in per_trace[0]:
        merged = _merge(({}, {}), h)
        partials[_partial_key(h.initial, merged)] = (h.initial, merged)
    for hs in per_trace[1:]:
        by_start: Dict[Valuation, List[History]] = {}
        for h in hs:
            by_start.setdefault(h.initial, []).append(h)
        nxt: Dict[Tuple, Tuple[Valuation, Partial]] = {}
        for initial, partial in partials.values():
            for h in by_start.get(initial, ()):
                merged = _merge(partial, h)
                if merged is not None:
                    nxt.setdefault(_partial_key(initial, merged), (initial, merged))
            if len(nxt) > max_candidates:
                raise BudgetExceeded(f"more than {max_candidates} candidate domains")
        partials = nxt
    return frozenset(_to_domain(i, p, props, actions) for i, p in partials.values())


def _partial_key(initial: Valuation, partial: Partial) -> Tuple:
    trans, obs = partial
    return initial, frozenset(trans.items()), frozenset(obs.items())


def _learn_naive(props, actions, per_trace, max_candidates) -> FrozenSet[Domain]:
    size = 1
    for hs in per_trace:
        size *= len(hs)
    if size > max_candidates:
        raise BudgetExceeded(f"{size} history combinations exceed the budget of {max_candidates}")
    out = set()
    for combo in itertools.product(*per_trace):
        if any(h.initial != combo[0].initial for h in combo):
            continue
        d = domain_of_histories(combo, actions, props)
        if d is not None:
            out.add(d)
    return frozenset(out)


def learn_implicit(props: Iterable[str], traces: Iterable[ObservationTrace], **limits) -> Domain:
    """Behavioural equivalence domain learned from ``traces``."""
    found = learn_domains(props, traces, **limits)
    if not found:
        raise ValueError("no deterministic domain reproduces the traces")
    return sync_compose(canonical_order(found))
