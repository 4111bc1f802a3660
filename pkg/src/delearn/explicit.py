"""Learning event models from observed transitions.

For every action and every observation reached by it, one component of
mutually indistinguishable events is built.  Its events all share the
precondition "the current observation is one of the observed sources" and
together cover every valuation compatible with the target observation.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence

from .domain import Observation, comp
from .epistemic import Event, EventModel, Post
from .formula import Atom, Formula, Know, KnowWhether, Neg, conj, disj
from .traces import ObservedTransition


def observation_formula(o: Observation, props: Sequence[str]) -> Formula:
    """Holds in a model exactly when the agent's knowledge matches ``o``:
    observed literals are known, every other proposition is unknown."""
    props = sorted(props)
    known = conj(Atom(p) if p in o.pos else Neg(Atom(p)) for p in props if p in o.observed)
    unknown = [Neg(KnowWhether(Atom(p))) for p in props if p not in o.observed]
    return conj([Know(known)] + unknown)


def learn_explicit(
    props: Iterable[str], actions: Iterable[str], sigma: Iterable[ObservedTransition]
) -> Dict[str, EventModel]:
    """One event model per action, in sorted action order."""
    props = sorted(set(props))
    actions = sorted(set(actions))
    sources: Dict[str, Dict[Observation, set]] = {a: {} for a in actions}
    for src, a, dst in sigma:
        if a not in sources:
            raise ValueError(f"observed transition uses unknown action {a!r}")
        for o in (src, dst):
            if not o.observed <= set(props):
                raise ValueError(f"observation '{o}' mentions propositions outside {props}")
        sources[a].setdefault(dst, set()).add(src)

    out: Dict[str, EventModel] = {}
    for a in actions:
        events: Dict[str, Event] = {}
        partition: List[List[str]] = []
        for target in sorted(sources[a], key=lambda o: o.key(props)):
            pre = disj(
                observation_formula(o, props) for o in sorted(sources[a][target], key=lambda o: o.key(props))
            )
            cell = []
            for v in comp(target, props):
                eid = f"e{len(events)}"
                events[eid] = Event(pre, {p: Post.TRUE if p in v else Post.FALSE for p in props})
                cell.append(eid)
            partition.append(cell)
        out[a] = EventModel(props, events, partition)
    return out
