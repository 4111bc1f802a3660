"""Random instance generators shared by the property tests."""

import random
from typing import List, Sequence

from hypothesis import strategies as st

from delearn.domain import Domain, Observation, comp
from delearn.epistemic import EpistemicModel, Event, EventModel, Post, all_valuations
from delearn.formula import (
    And,
    Atom,
    Bot,
    DynEvent,
    Iff,
    Implies,
    Know,
    KnowWhether,
    Neg,
    Or,
    Top,
)

PROPS = ["p", "q", "r", "s"]
ACTIONS = ["a", "b"]


def random_domain(
    rng: random.Random,
    n_props: int,
    n_states: int,
    n_actions: int,
    observe_prob: float = 0.5,
) -> Domain:
    """Valid deterministic generated noiseless domain."""
    props = PROPS[:n_props]
    vals = rng.sample(all_valuations(props), n_states)
    actions = ACTIONS[:n_actions]
    while True:
        table = {(i, a): rng.randrange(n_states) for i in range(n_states) for a in actions}
        seen, stack = {0}, [0]
        while stack:
            i = stack.pop()
            for a in actions:
                j = table[(i, a)]
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) == n_states:
            break
    obs = {}
    for v in vals:
        observed = [p for p in props if rng.random() < observe_prob]
        obs[v] = Observation.of(v, observed)
    trans = [(vals[i], a, vals[j]) for (i, a), j in table.items()]
    return Domain(props, actions, vals, vals[0], trans, obs)


def random_small_domain(rng: random.Random, n_props=None, max_states=6, n_actions=None) -> Domain:
    n_props = n_props or rng.randint(1, 3)
    n_states = rng.randint(1, min(max_states, 2**n_props))
    n_actions = n_actions or rng.randint(1, 2)
    return random_domain(rng, n_props, n_states, n_actions, observe_prob=rng.choice([0.2, 0.5, 0.8]))


def relabel_unobserved(rng: random.Random, d: Domain) -> Domain:
    """Same shape and observations with other compatible valuations where
    possible; bisimilar to ``d`` by construction."""
    image = {s: s for s in d.states}
    for _ in range(20):
        used, trial = set(), {}
        for s in d.ordered_states():
            options = [v for v in comp(d.obs[s], d.props) if v not in used]
            if not options:
                break
            trial[s] = rng.choice(options)
            used.add(trial[s])
        else:
            image = trial
            break
    return Domain(
        d.props,
        d.actions,
        [image[s] for s in d.states],
        image[d.initial],
        [(image[s], a, image[t]) for s, a, t in d.transitions],
        {image[s]: o for s, o in d.obs.items()},
    )


def redirect_one(rng: random.Random, d: Domain) -> Domain:
    """Point one transition elsewhere, keeping the domain generated."""
    while True:
        s, a, t = rng.choice(sorted(d.transitions, key=repr))
        u = rng.choice(list(d.states))
        trans = (set(d.transitions) - {(s, a, t)}) | {(s, a, u)}
        out = Domain(d.props, d.actions, d.states, d.initial, trans, d.obs)
        if len(out.reachable()) == len(out.states):
            return out


def random_model(rng: random.Random, props: Sequence[str], max_worlds: int = 5, max_cells: int = 3) -> EpistemicModel:
    vals = all_valuations(props)
    n = rng.randint(1, max_worlds)
    val = {f"w{i}": rng.choice(vals) for i in range(n)}
    k = rng.randint(1, min(max_cells, n))
    cells: List[List[str]] = [[] for _ in range(k)]
    names = list(val)
    rng.shuffle(names)
    for i, w in enumerate(names):
        cells[i % k].append(w)
    return EpistemicModel(props, val, cells)


def random_event_model(rng: random.Random, props: Sequence[str], max_events: int = 4, depth: int = 2) -> EventModel:
    n = rng.randint(1, max_events)
    events = {}
    for i in range(n):
        pre = random_formula(rng, props, depth) if rng.random() < 0.7 else Top()
        post = {p: rng.choice(list(Post)) for p in props}
        events[f"e{i}"] = Event(pre, post)
    names = list(events)
    rng.shuffle(names)
    k = rng.randint(1, n)
    cells: List[List[str]] = [[] for _ in range(k)]
    for i, e in enumerate(names):
        cells[i % k].append(e)
    return EventModel(props, events, cells)


def random_formula(rng: random.Random, props: Sequence[str], depth: int, modal: bool = True):
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return Top()
        if r < 0.15:
            return Bot()
        return Atom(rng.choice(list(props)))
    unary = [Neg] + ([Know, KnowWhether] if modal else [])
    binary = [And, Or, Implies, Iff]
    if rng.random() < 0.4:
        return rng.choice(unary)(random_formula(rng, props, depth - 1, modal))
    op = rng.choice(binary)
    return op(random_formula(rng, props, depth - 1, modal), random_formula(rng, props, depth - 1, modal))


names = st.sampled_from(["p", "q", "r", "light", "x1"])
labels = st.sampled_from(["a", "flip", "E"])


def _extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(Know, children),
        st.builds(KnowWhether, children),
        st.builds(DynEvent, labels, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Implies, children, children),
        st.builds(Iff, children, children),
    )


formulas = st.recursive(
    st.one_of(st.builds(Atom, names), st.just(Top()), st.just(Bot())),
    _extend,
    max_leaves=24,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
