"""Epistemic models, event models, evaluation and product update."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from .formula import (
    And,
    Atom,
    Bot,
    DynAction,
    DynEvent,
    Formula,
    Iff,
    Implies,
    Know,
    KnowWhether,
    Neg,
    Or,
    Top,
)

Valuation = FrozenSet[str]
World = Hashable


class EvaluationError(ValueError):
    """A formula cannot be evaluated in the given context."""


def valuation(props: Iterable[str]) -> Valuation:
    return frozenset(props)


def valuation_key(v: Valuation, props: Sequence[str]) -> Tuple[bool, ...]:
    """Sort key over sorted ``props``: literal by literal, true before false."""
    return tuple(p not in v for p in props)


def all_valuations(props: Sequence[str]) -> List[Valuation]:
    """Every valuation over ``props`` in canonical order."""
    props = sorted(props)
    out = [
        frozenset(p for p, bit in zip(props, bits) if bit)
        for bits in itertools.product((True, False), repeat=len(props))
    ]
    return out


def render_valuation(v: Valuation, props: Sequence[str]) -> str:
    """Compact literal text such as ``p ~q r``; ``-`` for an empty signature."""
    lits = [p if p in v else "~" + p for p in sorted(props)]
    return " ".join(lits) if lits else "-"


class EpistemicModel:
    """Single-agent S5 model: valuations plus a partition of the worlds.

    Values are immutable.  Equality is structural on world identifiers, so
    compare canonical forms (see :func:`canonicalize`) to test bisimilarity.
    """

    __slots__ = ("props", "_val", "_cells", "_cell_of")

    def __init__(
        self,
        props: Iterable[str],
        val: Mapping[World, Iterable[str]],
        partition: Iterable[Iterable[World]],
    ):
        self.props: Tuple[str, ...] = tuple(sorted(set(props)))
        pset = set(self.props)
        self._val: Dict[World, Valuation] = {w: frozenset(v) for w, v in val.items()}
        for w, v in self._val.items():
            if not v <= pset:
                raise ValueError(f"world {w!r} uses propositions outside the signature: {sorted(v - pset)}")
        cells = tuple(tuple(c) for c in partition)
        cell_of: Dict[World, int] = {}
        for i, cell in enumerate(cells):
            if not cell:
                raise ValueError("partition cells must be non-empty")
            for w in cell:
                if w not in self._val:
                    raise ValueError(f"partition mentions unknown world {w!r}")
                if w in cell_of:
                    raise ValueError(f"world {w!r} occurs in two partition cells")
                cell_of[w] = i
        missing = [w for w in self._val if w not in cell_of]
        if missing:
            raise ValueError(f"worlds missing from the partition: {missing!r}")
        self._cells = cells
        self._cell_of = cell_of

    @classmethod
    def from_components(cls, props: Iterable[str], components: Iterable[Iterable[Valuation]]) -> "EpistemicModel":
        """Build and canonicalize a model given as valuation sets per component."""
        props = tuple(props)
        val: Dict[World, Valuation] = {}
        cells = []
        for ci, comp in enumerate(components):
            cell = []
            for vi, v in enumerate(comp):
                val[(ci, vi)] = frozenset(v)
                cell.append((ci, vi))
            if cell:
                cells.append(cell)
        return canonicalize(cls(props, val, cells))

    @classmethod
    def single(cls, props: Iterable[str], valuations: Iterable[Valuation]) -> "EpistemicModel":
        """One connected component with one world per distinct valuation."""
        return cls.from_components(props, [list(valuations)])

    @property
    def worlds(self) -> Tuple[World, ...]:
        return tuple(self._val)

    @property
    def partition(self) -> Tuple[Tuple[World, ...], ...]:
        return self._cells

    def val(self, w: World) -> Valuation:
        return self._val[w]

    def cell(self, w: World) -> Tuple[World, ...]:
        return self._cells[self._cell_of[w]]

    def components(self) -> Tuple[FrozenSet[Valuation], ...]:
        return tuple(frozenset(self._val[w] for w in c) for c in self._cells)

    def is_empty(self) -> bool:
        return not self._val

    def __len__(self) -> int:
        return len(self._val)

    def __contains__(self, w: object) -> bool:
        return w in self._val

    def key(self) -> Tuple:
        """Canonical sort key: components as sorted tuples of valuation keys."""
        comps = {
            tuple(sorted(valuation_key(v, self.props) for v in comp)) for comp in self.components()
        }
        return tuple(sorted(comps))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EpistemicModel):
            return NotImplemented
        return (
            self.props == other.props
            and self._val == other._val
            and frozenset(map(frozenset, self._cells)) == frozenset(map(frozenset, other._cells))
        )

    def __hash__(self) -> int:
        return hash((self.props, frozenset(self._val.items())))

    def __repr__(self) -> str:
        comps = [
            "{" + ", ".join(render_valuation(self._val[w], self.props) for w in c) + "}" for c in self._cells
        ]
        return f"EpistemicModel({' | '.join(comps)})"


class Post(enum.Enum):
    TRUE = "T"
    FALSE = "F"
    KEEP = "keep"


@dataclass(frozen=True)
class Event:
    pre: Formula
    post: Mapping[str, Post]

    @classmethod
    def assigning(cls, pre: Formula, props: Iterable[str], true: Iterable[str] = (), false: Iterable[str] = ()) -> "Event":
        """Event that sets ``true``/``false`` and keeps everything else."""
        true, false = set(true), set(false)
        post = {
            p: Post.TRUE if p in true else Post.FALSE if p in false else Post.KEEP
            for p in sorted(props)
        }
        return cls(pre, post)

    def apply(self, v: Valuation) -> Valuation:
        out = set(v)
        for p, what in self.post.items():
            if what is Post.TRUE:
                out.add(p)
            elif what is Post.FALSE:
                out.discard(p)
        return frozenset(out)


class EventModel:
    """Events with preconditions and total postconditions, partitioned by
    indistinguishability."""

    __slots__ = ("props", "events", "partition")

    def __init__(
        self,
        props: Iterable[str],
        events: Mapping[Hashable, Event],
        partition: Iterable[Iterable[Hashable]],
    ):
        self.props: Tuple[str, ...] = tuple(sorted(set(props)))
        self.events: Dict[Hashable, Event] = dict(events)
        self.partition: Tuple[Tuple[Hashable, ...], ...] = tuple(tuple(c) for c in partition)
        pset = set(self.props)
        for eid, ev in self.events.items():
            if set(ev.post) != pset:
                raise ValueError(f"postcondition of event {eid!r} must cover exactly {sorted(pset)}")
        seen = [e for c in self.partition for e in c]
        if set(seen) != set(self.events) or len(set(seen)) != len(seen):
            raise ValueError("event partition must cover every event exactly once")

    def cell(self, e: Hashable) -> Tuple[Hashable, ...]:
        for c in self.partition:
            if e in c:
                return c
        raise KeyError(e)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventModel):
            return NotImplemented
        return (
            self.props == other.props
            and self.events == other.events
            and frozenset(map(frozenset, self.partition)) == frozenset(map(frozenset, other.partition))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"EventModel({len(self.events)} events, {len(self.partition)} components)"


def identity_event_model(props: Iterable[str]) -> EventModel:
    """One event, always applicable, changes nothing."""
    return EventModel(props, {"id": Event.assigning(Top(), props)}, [["id"]])


# ---------------------------------------------------------------- evaluation

ActionHook = Callable[[str, Formula], bool]


class Evaluator:
    """Memoising evaluator for one model.

    ``action_hook`` decides ``DynAction`` subformulas; it is supplied when the
    model stands for a domain state.
    """

    def __init__(
        self,
        model: EpistemicModel,
        env: Optional[Mapping[str, EventModel]] = None,
        action_hook: Optional[ActionHook] = None,
    ):
        self.model = model
        self.env = env or {}
        self.action_hook = action_hook
        self._memo: Dict[Tuple[int, World], bool] = {}
        self._products: Dict[str, Tuple[EpistemicModel, "Evaluator"]] = {}

    def holds(self, w: World, f: Formula) -> bool:
        if w not in self.model:
            raise EvaluationError(f"world {w!r} is not in the model")
        return self._eval(w, f)

    def holds_everywhere(self, f: Formula) -> bool:
        return all(self._eval(w, f) for w in self.model.worlds)

    def _eval(self, w: World, f: Formula) -> bool:
        key = (id(f), w)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._compute(w, f)
        return hit

    def _compute(self, w: World, f: Formula) -> bool:
        if isinstance(f, Atom):
            return f.name in self.model.val(w)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Neg):
            return not self._eval(w, f.sub)
        if isinstance(f, And):
            return self._eval(w, f.left) and self._eval(w, f.right)
        if isinstance(f, Or):
            return self._eval(w, f.left) or self._eval(w, f.right)
        if isinstance(f, Implies):
            return (not self._eval(w, f.left)) or self._eval(w, f.right)
        if isinstance(f, Iff):
            return self._eval(w, f.left) == self._eval(w, f.right)
        if isinstance(f, Know):
            return all(self._eval(v, f.sub) for v in self.model.cell(w))
        if isinstance(f, KnowWhether):
            cell = self.model.cell(w)
            vals = {self._eval(v, f.sub) for v in cell}
            return len(vals) == 1
        if isinstance(f, DynEvent):
            product, inner = self._product(f.ref)
            return all(inner._eval(pw, f.sub) for pw in product.worlds if pw[0] == w)
        if isinstance(f, DynAction):
            if self.action_hook is None:
                raise EvaluationError(
                    f"action modality [{f.action}] needs a domain state; use eval_on_state"
                )
            return self.action_hook(f.action, f.sub)
        raise TypeError(f"not a formula: {f!r}")

    def _product(self, ref: str) -> Tuple[EpistemicModel, "Evaluator"]:
        hit = self._products.get(ref)
        if hit is None:
            if ref not in self.env:
                raise EvaluationError(f"unknown event model {ref!r}")
            product = raw_product(self.model, self.env[ref], self)
            hit = self._products[ref] = (product, Evaluator(product, self.env, self.action_hook))
        return hit


def eval_formula(
    model: EpistemicModel, world: World, f: Formula, env: Optional[Mapping[str, EventModel]] = None
) -> bool:
    """Truth of ``f`` at ``world``."""
    return Evaluator(model, env).holds(world, f)


def eval_global(model: EpistemicModel, f: Formula, env: Optional[Mapping[str, EventModel]] = None) -> bool:
    """Truth of ``f`` at every world (vacuously true on the empty model)."""
    return Evaluator(model, env).holds_everywhere(f)


# ---------------------------------------------------------------- product update


def raw_product(model: EpistemicModel, events: EventModel, evaluator: Optional[Evaluator] = None) -> EpistemicModel:
    """Product update without contraction; worlds are ``(w, e)`` pairs."""
    if model.props != events.props:
        raise ValueError(f"signature mismatch: {list(model.props)} vs {list(events.props)}")
    ev = evaluator or Evaluator(model)
    val: Dict[World, Valuation] = {}
    cells: List[List[World]] = []
    for wcell in model.partition:
        for ecell in events.partition:
            cell = []
            for w in wcell:
                for e in ecell:
                    event = events.events[e]
                    if ev._eval(w, event.pre):
                        val[(w, e)] = event.apply(model.val(w))
                        cell.append((w, e))
            if cell:
                cells.append(cell)
    return EpistemicModel(model.props, val, cells)


def canonicalize(model: EpistemicModel) -> EpistemicModel:
    """Bisimulation contraction with a deterministic world numbering.

    Duplicate valuations inside a component and duplicate components are
    merged; components are ordered by their sorted valuation keys.
    """
    props = model.props
    comps = {}
    for comp in model.components():
        ordered = tuple(sorted(comp, key=lambda v: valuation_key(v, props)))
        comps[tuple(valuation_key(v, props) for v in ordered)] = ordered
    val: Dict[World, Valuation] = {}
    cells = []
    n = 0
    for k in sorted(comps):
        cell = []
        for v in comps[k]:
            val[n] = v
            cell.append(n)
            n += 1
        cells.append(cell)
    return EpistemicModel(props, val, cells)


def product_update(model: EpistemicModel, events: EventModel) -> EpistemicModel:
    """Canonical form of ``model`` updated with ``events``."""
    return canonicalize(raw_product(model, events))


def models_bisimilar(m1: EpistemicModel, m2: EpistemicModel) -> bool:
    return canonicalize(m1) == canonicalize(m2)


def split_components(model: EpistemicModel) -> List[EpistemicModel]:
    """Each connected component as its own canonical model, in canonical order."""
    canon = canonicalize(model)
    return [EpistemicModel.single(canon.props, comp) for comp in
            (tuple(canon.val(w) for w in cell) for cell in canon.partition)]
