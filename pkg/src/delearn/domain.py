"""Partially observable domains and the constructions built on them."""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .epistemic import (
    EpistemicModel,
    EvaluationError,
    Evaluator,
    EventModel,
    Valuation,
    all_valuations,
    canonicalize,
    product_update,
    render_valuation,
    split_components,
    valuation_key,
)
from .formula import (
    Atom,
    DynEvent,
    Formula,
    Neg,
    conj,
    dynamic_labels,
    subformulas,
)

State = Hashable
Transition = Tuple[State, str, State]


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured size limit."""


@dataclass(frozen=True)
class Observation:
    """Propositions observed true (``pos``) and observed false (``neg``)."""

    pos: FrozenSet[str] = frozenset()
    neg: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pos", frozenset(self.pos))
        object.__setattr__(self, "neg", frozenset(self.neg))
        clash = self.pos & self.neg
        if clash:
            raise ValueError(f"observation marks {sorted(clash)} both true and false")

    @classmethod
    def of(cls, v: Valuation, observed: Iterable[str]) -> "Observation":
        """What an agent sees of valuation ``v`` through ``observed``."""
        observed = set(observed)
        return cls(observed & v, observed - v)

    @classmethod
    def parse(cls, text: str) -> "Observation":
        """Literal text: ``"~r s"``; ``""`` or ``"true"`` for nothing observed."""
        pos, neg = set(), set()
        if text.strip() not in ("", "true", "⊤"):
            for lit in parse_literals(text):
                (neg if lit[0] else pos).add(lit[1])
        return cls(pos, neg)

    @property
    def observed(self) -> FrozenSet[str]:
        return self.pos | self.neg

    def holds_in(self, v: Valuation) -> bool:
        return self.pos <= v and not (self.neg & v)

    def key(self, props: Sequence[str]) -> Tuple[int, ...]:
        return tuple(0 if p in self.pos else 1 if p in self.neg else 2 for p in props)

    def formula(self) -> Formula:
        lits = sorted(self.observed)
        return conj(Atom(p) if p in self.pos else Neg(Atom(p)) for p in lits)

    def __str__(self) -> str:
        lits = [p if p in self.pos else "~" + p for p in sorted(self.observed)]
        return " ".join(lits) if lits else "true"


_LITERAL = re.compile(r"\s*(~|¬)?\s*([A-Za-z_][A-Za-z0-9_']*)")


def parse_literals(text: str) -> List[Tuple[bool, str]]:
    """Split compact literal text (``"p~q r"``) into (negated, name) pairs."""
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _LITERAL.match(text, pos)
        if m is None:
            raise ValueError(f"bad literal text at position {pos}: {text!r}")
        out.append((m.group(1) is not None, m.group(2)))
        pos = m.end()
    names = [n for _, n in out]
    if len(set(names)) != len(names):
        raise ValueError(f"proposition repeated in {text!r}")
    return out


def parse_valuation(text: str, props: Sequence[str]) -> Valuation:
    """Valuation from literal text that mentions every proposition once."""
    lits = parse_literals(text) if text.strip() not in ("", "-") else []
    names = {n for _, n in lits}
    if names != set(props):
        raise ValueError(f"{text!r} must mention each of {sorted(props)} exactly once")
    return frozenset(n for neg, n in lits if not neg)


def comp(o: Observation, props: Sequence[str]) -> Tuple[Valuation, ...]:
    """Valuations over ``props`` compatible with ``o``, in canonical order."""
    free = sorted(set(props) - o.observed)
    out = [
        frozenset(o.pos | {p for p, bit in zip(free, bits) if bit})
        for bits in itertools.product((True, False), repeat=len(free))
    ]
    return tuple(sorted(out, key=lambda v: valuation_key(v, sorted(props))))


# ---------------------------------------------------------------- states


def state_kind(s: State) -> str:
    if isinstance(s, EpistemicModel):
        return "model"
    if isinstance(s, tuple):
        return "tuple"
    if isinstance(s, frozenset):
        if s and all(isinstance(x, frozenset) for x in s):
            return "compset"
        return "val"
    raise TypeError(f"unsupported state payload {s!r}")


def state_valuations(s: State) -> FrozenSet[Valuation]:
    """Underlying set of valuations a state stands for."""
    kind = state_kind(s)
    if kind == "val":
        return frozenset([s])
    if kind == "model":
        return frozenset(s.val(w) for w in s.worlds)
    return frozenset(s)


def state_key(s: State, props: Sequence[str]) -> Tuple:
    kind = state_kind(s)
    if kind == "val":
        return valuation_key(s, props)
    if kind == "compset":
        return tuple(sorted(valuation_key(v, props) for v in s))
    if kind == "tuple":
        return tuple(valuation_key(v, props) for v in s)
    return s.key()


def render_state(s: State, props: Sequence[str]) -> str:
    kind = state_kind(s)
    if kind == "val":
        return render_valuation(s, props)
    if kind == "compset":
        vals = sorted(s, key=lambda v: valuation_key(v, props))
        return "{" + ", ".join(render_valuation(v, props) for v in vals) + "}"
    if kind == "tuple":
        return "(" + ", ".join(render_valuation(v, props) for v in s) + ")"
    return " | ".join(
        "{" + ", ".join(render_valuation(v, props) for v in sorted(c, key=lambda v: valuation_key(v, props))) + "}"
        for c in s.components()
    )


def induced_epistemic_model(s: State, props: Sequence[str]) -> EpistemicModel:
    """One-component model with a world per distinct valuation of ``s``."""
    if isinstance(s, EpistemicModel):
        return s
    return EpistemicModel.single(props, state_valuations(s))


# ---------------------------------------------------------------- domains


class Domain:
    """Transition system over states with a deterministic observation map.

    ``deterministic`` records the intent that every state has exactly one
    successor per action; :func:`validate` checks it.
    """

    def __init__(
        self,
        props: Iterable[str],
        actions: Iterable[str],
        states: Iterable[State],
        initial: State,
        transitions: Iterable[Transition],
        obs: Mapping[State, Observation],
        deterministic: bool = True,
    ):
        self.props: Tuple[str, ...] = tuple(sorted(set(props)))
        self.actions: Tuple[str, ...] = tuple(sorted(set(actions)))
        self.states: Tuple[State, ...] = tuple(dict.fromkeys(states))
        self.initial = initial
        self.transitions: FrozenSet[Transition] = frozenset(tuple(t) for t in transitions)
        self.obs: Dict[State, Observation] = dict(obs)
        self.deterministic = deterministic
        succ: Dict[Tuple[State, str], List[State]] = {}
        for s, a, t in self.transitions:
            succ.setdefault((s, a), []).append(t)
        props_ = self.props
        self._succ = {k: tuple(sorted(v, key=lambda x: state_key(x, props_))) for k, v in succ.items()}
        self._hash: Optional[int] = None

    # structure

    def successors(self, s: State, a: str) -> Tuple[State, ...]:
        return self._succ.get((s, a), ())

    def step(self, s: State, a: str) -> State:
        out = self.successors(s, a)
        if len(out) != 1:
            raise ValueError(f"action {a!r} has {len(out)} successors from {self.show(s)}")
        return out[0]

    def is_deterministic(self) -> bool:
        """At most one successor per state and action."""
        return all(len(v) <= 1 for v in self._succ.values())

    def is_total(self) -> bool:
        return all(self.successors(s, a) for s in self.states for a in self.actions)

    def is_deterministic_total(self) -> bool:
        return self.is_deterministic() and self.is_total()

    def reachable(self) -> List[State]:
        """States reachable from the initial one, in breadth-first order."""
        seen = {self.initial: None}
        queue = deque([self.initial])
        while queue:
            s = queue.popleft()
            for a in self.actions:
                for t in self.successors(s, a):
                    if t not in seen:
                        seen[t] = None
                        queue.append(t)
        return list(seen)

    def ordered_states(self) -> List[State]:
        """Breadth-first order, then any unreachable states by key."""
        order = self.reachable() if self.initial in set(self.states) else []
        rest = sorted(set(self.states) - set(order), key=lambda s: state_key(s, self.props))
        return order + rest

    @property
    def kind(self) -> str:
        return state_kind(self.initial)

    def show(self, s: State) -> str:
        return render_state(s, self.props)

    # identity

    def _identity(self):
        return (
            self.props,
            self.actions,
            self.initial,
            frozenset(self.states),
            self.transitions,
            frozenset(self.obs.items()),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Domain):
            return NotImplemented
        return self._identity() == other._identity()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._identity())
        return self._hash

    def __repr__(self) -> str:
        return f"Domain({len(self.states)} states, actions={list(self.actions)}, initial={self.show(self.initial)})"


def validate(d: Domain) -> List[str]:
    """Human-readable violations of the domain conditions; empty when valid."""
    out: List[str] = []
    states = set(d.states)
    pset = set(d.props)
    if d.initial not in states:
        out.append(f"initial state {d.show(d.initial)} is not a state")
    kinds = {state_kind(s) for s in d.states}
    if len(kinds) > 1:
        out.append(f"states mix payload kinds {sorted(kinds)}")
    for s, a, t in sorted(d.transitions, key=lambda x: (state_key(x[0], d.props), x[1], state_key(x[2], d.props))):
        if s not in states or t not in states:
            out.append(f"transition ({d.show(s)}, {a}, {d.show(t)}) refers to an unknown state")
        if a not in d.actions:
            out.append(f"transition ({d.show(s)}, {a}, {d.show(t)}) uses unknown action {a!r}")
    for s in d.ordered_states():
        for v in state_valuations(s):
            if not v <= pset:
                out.append(f"state {d.show(s)} uses propositions outside the signature")
                break
    if d.initial in states:
        unreachable = states - set(d.reachable())
        for s in sorted(unreachable, key=lambda x: state_key(x, d.props)):
            out.append(f"state {d.show(s)} is not reachable from the initial state")
    for s in d.ordered_states():
        for a in d.actions:
            n = len(d.successors(s, a))
            if n == 0:
                out.append(f"action {a!r} is not applicable in state {d.show(s)}")
            elif n > 1 and d.deterministic:
                out.append(f"action {a!r} has {n} successors in state {d.show(s)}")
        o = d.obs.get(s)
        if o is None:
            out.append(f"state {d.show(s)} has no observation")
            continue
        if not o.observed <= pset:
            out.append(f"observation of {d.show(s)} uses propositions outside the signature")
        if not all(o.holds_in(v) for v in state_valuations(s)):
            out.append(f"observation '{o}' of state {d.show(s)} is noisy")
    extra = set(d.obs) - states
    for s in sorted(extra, key=lambda x: state_key(x, d.props)):
        out.append(f"observation given for unknown state {d.show(s)}")
    return out


def _require_valid_deterministic(d: Domain, what: str) -> None:
    if not d.is_deterministic_total():
        raise ValueError(f"{what} needs a deterministic, universally applicable domain")


def compatibility_domain(d: Domain) -> Domain:
    """Image of ``d`` under the map from a state to its compatible valuations."""
    if d.kind != "val":
        raise ValueError("compatibility domain needs valuation states")
    _require_valid_deterministic(d, "compatibility domain")

    def image(s: State) -> FrozenSet[Valuation]:
        return frozenset(comp(d.obs[s], d.props))

    states = [image(s) for s in d.ordered_states()]
    trans = {(image(s), a, image(t)) for s, a, t in d.transitions}
    obs = {image(s): d.obs[s] for s in d.states}
    out = Domain(d.props, d.actions, states, image(d.initial), trans, obs, deterministic=False)
    out.deterministic = out.is_deterministic()
    return out


def model_observation(m: EpistemicModel) -> Observation:
    """Propositions known true and known false throughout ``m``."""
    vals = [m.val(w) for w in m.worlds]
    pos = frozenset.intersection(*vals) if vals else frozenset()
    neg = frozenset(p for p in m.props if all(p not in v for v in vals))
    return Observation(pos, neg)


def induced_domain(models: Mapping[str, EventModel], m0: EpistemicModel) -> Domain:
    """Domain whose states are the canonical models reachable from ``m0``.

    A transition leads to each connected component of the updated model;
    empty updates contribute no successor.
    """
    start = canonicalize(m0)
    actions = sorted(models)
    seen: Dict[EpistemicModel, None] = {start: None}
    queue = deque([start])
    trans: Set[Transition] = set()
    while queue:
        m = queue.popleft()
        for a in actions:
            for c in split_components(product_update(m, models[a])):
                trans.add((m, a, c))
                if c not in seen:
                    seen[c] = None
                    queue.append(c)
    obs = {m: model_observation(m) for m in seen}
    out = Domain(start.props, actions, list(seen), start, trans, obs, deterministic=False)
    out.deterministic = out.is_deterministic_total()
    return out


# ---------------------------------------------------------------- comparisons


def _labels(d: Domain) -> Dict[State, int]:
    return {s: i for i, s in enumerate(d.ordered_states())}


def shape_encoding(d: Domain, with_payload: bool = False) -> Tuple:
    """Breadth-first encoding from the initial state, actions in sorted order.

    Two generated deterministic domains are isomorphic exactly when their
    shape encodings coincide.  With ``with_payload`` the state keys are
    included, which gives a total order on domains.
    """
    label = _labels(d)
    rows = []
    for s in d.ordered_states():
        succ = tuple(tuple(sorted(label[t] for t in d.successors(s, a))) for a in d.actions)
        row = (d.obs[s].key(d.props), succ)
        rows.append((state_key(s, d.props),) + row if with_payload else row)
    return (d.props, d.actions, tuple(rows))


def domain_sort_key(d: Domain) -> Tuple:
    return shape_encoding(d, with_payload=True)


def _generated(d: Domain) -> bool:
    return len(d.reachable()) == len(d.states)


def isomorphic(d1: Domain, d2: Domain) -> Optional[Dict[State, State]]:
    """State bijection preserving initial state, transitions and observations.

    Payloads are not compared.
    """
    if d1.props != d2.props or d1.actions != d2.actions:
        return None
    if len(d1.states) != len(d2.states) or len(d1.transitions) != len(d2.transitions):
        return None
    if (
        d1.is_deterministic()
        and d2.is_deterministic()
        and _generated(d1)
        and _generated(d2)
    ):
        if shape_encoding(d1) != shape_encoding(d2):
            return None
        return dict(zip(d1.ordered_states(), d2.ordered_states()))
    return _iso_backtrack(d1, d2)


def _iso_backtrack(d1: Domain, d2: Domain) -> Optional[Dict[State, State]]:
    def preds(d: Domain) -> Dict[Tuple[State, str], Set[State]]:
        out: Dict[Tuple[State, str], Set[State]] = {}
        for s, a, t in d.transitions:
            out.setdefault((t, a), set()).add(s)
        return out

    p1, p2 = preds(d1), preds(d2)

    def signature(d: Domain, p, s: State):
        return (
            d.obs.get(s),
            tuple((len(d.successors(s, a)), len(p.get((s, a), ()))) for a in d.actions),
        )

    order = d1.ordered_states()
    cands = {
        s: [t for t in d2.ordered_states() if signature(d2, p2, t) == signature(d1, p1, s)] for s in order
    }
    if d1.initial in cands:
        cands[d1.initial] = [t for t in cands[d1.initial] if t == d2.initial]
    fwd: Dict[State, State] = {}
    back: Dict[State, State] = {}

    def fits(s: State, t: State) -> bool:
        for a in d1.actions:
            for n1, n2 in ((set(d1.successors(s, a)), set(d2.successors(t, a))), (p1.get((s, a), set()), p2.get((t, a), set()))):
                if (s in n1) != (t in n2):
                    return False
                if {fwd[u] for u in n1 if u in fwd} != {u for u in n2 if u in back}:
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        s = order[i]
        for t in cands[s]:
            if t in back or not fits(s, t):
                continue
            fwd[s], back[t] = t, s
            if search(i + 1):
                return True
            del fwd[s], back[t]
        return False

    return dict(fwd) if search(0) else None


def _check_comparable(d1: Domain, d2: Domain, what: str) -> None:
    _require_valid_deterministic(d1, what)
    _require_valid_deterministic(d2, what)
    if d1.props != d2.props or d1.actions != d2.actions:
        raise ValueError(f"{what} needs domains over the same propositions and actions")


def obs_bisimilar(d1: Domain, d2: Domain) -> Optional[FrozenSet[Tuple[State, State]]]:
    """Pairs reachable in the synchronous product, or ``None`` when some
    reachable pair disagrees on its observation."""
    _check_comparable(d1, d2, "observational bisimulation")
    start = (d1.initial, d2.initial)
    seen = {start}
    stack = [start]
    while stack:
        s, t = stack.pop()
        if d1.obs[s] != d2.obs[t]:
            return None
        for a in d1.actions:
            nxt = (d1.step(s, a), d2.step(t, a))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def trace_equivalent(d1: Domain, d2: Domain, max_actions: int) -> bool:
    """Whether both domains produce the same observation traces of up to
    ``max_actions`` actions from their initial states.

    Uses iterated refinement of observation classes on the disjoint union:
    after ``k`` rounds two states share a class exactly when no sequence of at
    most ``k`` actions tells them apart by what is observed along the way.
    """
    _check_comparable(d1, d2, "trace equivalence")
    if max_actions < 1:
        raise ValueError("max_actions must be at least 1")
    nodes = [(0, s) for s in d1.states] + [(1, s) for s in d2.states]
    doms = (d1, d2)
    cls = {x: doms[x[0]].obs[x[1]].key(d1.props) for x in nodes}
    count = len(set(cls.values()))
    for _ in range(max_actions):
        sig = {
            x: (cls[x],) + tuple(cls[(x[0], doms[x[0]].step(x[1], a))] for a in d1.actions) for x in nodes
        }
        ids = {k: i for i, k in enumerate(sorted(set(sig.values())))}
        cls = {x: ids[sig[x]] for x in nodes}
        if len(ids) == count:
            break
        count = len(ids)
    return cls[(0, d1.initial)] == cls[(1, d2.initial)]


def sync_compose(domains: Sequence[Domain]) -> Domain:
    """Lock-step product; states are tuples, observations from the first."""
    if not domains:
        raise ValueError("nothing to compose")
    first = domains[0]
    for d in domains:
        _check_comparable(first, d, "synchronous composition")
    init = tuple(d.initial for d in domains)
    seen = {init: None}
    queue = deque([init])
    trans: Set[Transition] = set()
    obs: Dict[State, Observation] = {}
    while queue:
        g = queue.popleft()
        o = first.obs[g[0]]
        for d, s in zip(domains[1:], g[1:]):
            if d.obs[s] != o:
                raise ValueError(f"components of global state disagree on observations: {o} vs {d.obs[s]}")
        obs[g] = o
        for a in first.actions:
            nxt = tuple(d.step(s, a) for d, s in zip(domains, g))
            trans.add((g, a, nxt))
            if nxt not in seen:
                seen[nxt] = None
                queue.append(nxt)
    return Domain(first.props, first.actions, list(seen), init, trans, obs, deterministic=True)


def enumerate_bisimilar(d: Domain, max_props: int = 2, max_actions: int = 2) -> FrozenSet[Domain]:
    """Every deterministic, generated, noiseless valuation domain over the same
    propositions and actions that is observationally bisimilar to ``d``.

    Brute force over state sets, initial states and transition functions.
    For a generated candidate every state occurs in the synchronous product
    with ``d``, so bisimilarity forces its observation; candidates where the
    forced observation is inconsistent or noisy are rejected.
    """
    _require_valid_deterministic(d, "enumeration of bisimilar domains")
    if len(d.props) > max_props or len(d.actions) > max_actions:
        raise BudgetExceeded(
            f"enumeration limited to {max_props} propositions and {max_actions} actions"
        )
    acts = d.actions
    na = len(acts)
    # index the reference domain
    ref_states = d.ordered_states()
    ref_idx = {s: i for i, s in enumerate(ref_states)}
    ref_next = [[ref_idx[d.step(s, a)] for a in acts] for s in ref_states]
    ref_obs = [d.obs[s] for s in ref_states]
    vals = all_valuations(d.props)
    found: Set[Domain] = set()
    for k in range(1, len(vals) + 1):
        for subset in itertools.combinations(vals, k):
            for init in range(k):
                if not ref_obs[0].holds_in(subset[init]):
                    continue
                for choice in itertools.product(range(k), repeat=k * na):
                    forced = _forced_observations(subset, init, choice, na, ref_next, ref_obs)
                    if forced is None:
                        continue
                    trans = [
                        (subset[i], a, subset[choice[i * na + j]])
                        for i in range(k)
                        for j, a in enumerate(acts)
                    ]
                    obs = {subset[i]: o for i, o in forced.items()}
                    found.add(Domain(d.props, acts, subset, subset[init], trans, obs))
    return frozenset(found)


def _forced_observations(subset, init, choice, na, ref_next, ref_obs) -> Optional[Dict[int, Observation]]:
    forced: Dict[int, Observation] = {}
    seen = {(0, init)}
    stack = [(0, init)]
    while stack:
        x, i = stack.pop()
        o = ref_obs[x]
        prev = forced.get(i)
        if prev is None:
            if not o.holds_in(subset[i]):
                return None
            forced[i] = o
        elif prev != o:
            return None
        for j in range(na):
            nxt = (ref_next[x][j], choice[i * na + j])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return forced if len(forced) == len(subset) else None


def canonical_order(domains: Iterable[Domain]) -> List[Domain]:
    return sorted(domains, key=domain_sort_key)


def behavioural_equivalence_domain(d: Domain, max_props: int = 2, max_actions: int = 2) -> Domain:
    """Synchronous composition of all domains bisimilar to ``d``."""
    return sync_compose(canonical_order(enumerate_bisimilar(d, max_props, max_actions)))


# ---------------------------------------------------------------- state evaluation


def eval_on_state(d: Domain, s: State, f: Formula) -> bool:
    """Truth of ``f`` throughout the model induced by state ``s``.

    ``[a] g`` holds when ``g`` holds at every ``a``-successor of ``s``.
    """
    if any(isinstance(g, DynEvent) for g in subformulas(f)):
        raise EvaluationError("event-model modalities cannot be evaluated on domain states")
    unknown = dynamic_labels(f) - set(d.actions)
    if unknown:
        raise EvaluationError(f"unknown action label(s) {sorted(unknown)}")
    if s not in d.obs and s not in set(d.states):
        raise EvaluationError(f"state {d.show(s)} is not in the domain")
    memo: Dict[Tuple[State, int], bool] = {}

    def at(state: State, g: Formula) -> bool:
        key = (state, id(g))
        if key not in memo:
            hook = lambda a, sub: all(at(t, sub) for t in d.successors(state, a))
            ev = Evaluator(induced_epistemic_model(state, d.props), action_hook=hook)
            memo[key] = ev.holds_everywhere(g)
        return memo[key]

    return at(s, f)
