"""Small worked domains and models used in docs, tests and data files."""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .domain import Domain, Observation, parse_valuation
from .epistemic import EpistemicModel, Event, EventModel
from .formula import Top


def val_domain(
    props: Sequence[str],
    states: Mapping[str, str],
    initial: str,
    transitions: Iterable[Tuple[str, str, str]],
    obs: Mapping[str, str],
    actions: Iterable[str] = (),
    deterministic: bool = True,
) -> Domain:
    """Valuation domain from named states written as literal text.

    >>> d = val_domain(["p"], {"a": "~p", "b": "p"}, "a", [("a", "go", "b"), ("b", "go", "a")], {"a": "", "b": "p"})
    >>> sorted(d.show(s) for s in d.states)
    ['p', '~p']
    """
    vals = {name: parse_valuation(text, props) for name, text in states.items()}
    transitions = list(transitions)
    acts = set(actions) | {a for _, a, _ in transitions}
    return Domain(
        props,
        acts,
        [vals[n] for n in states],
        vals[initial],
        [(vals[s], a, vals[t]) for s, a, t in transitions],
        {vals[n]: Observation.parse(text) for n, text in obs.items()},
        deterministic=deterministic,
    )


def light_switch(self_loops: bool = True) -> Domain:
    """Lamp ``l``, agent in the right room ``r``, switch up ``s``.

    Flipping only works in the left room; without ``self_loops`` the flip
    action is inapplicable in the right room.
    """
    trans = [
        ("s0", "flip", "s1"),
        ("s1", "flip", "s0"),
        ("s1", "move", "s2"),
        ("s2", "move", "s1"),
        ("s0", "move", "s3"),
        ("s3", "move", "s0"),
    ]
    if self_loops:
        trans += [("s2", "flip", "s2"), ("s3", "flip", "s3")]
    return val_domain(
        ["l", "r", "s"],
        {"s0": "~l ~r ~s", "s1": "l ~r s", "s2": "l r s", "s3": "~l r ~s"},
        "s0",
        trans,
        {"s0": "~r ~s", "s1": "~r s", "s2": "l r", "s3": "~l r"},
        deterministic=self_loops,
    )


def box() -> Domain:
    """A box whose lid reveals ``p`` only when ``p`` holds."""
    return val_domain(
        ["p"],
        {"s0": "~p", "s1": "p"},
        "s0",
        [("s0", "flip", "s1"), ("s1", "flip", "s0")],
        {"s0": "", "s1": "p"},
    )


def _cycle(first: str, second: str, third: str) -> Domain:
    return val_domain(
        ["p", "q"],
        {"s0": first, "s1": second, "s2": third},
        "s0",
        [("s0", "a", "s1"), ("s1", "a", "s2"), ("s2", "a", "s0")],
        {"s0": "q", "s1": "q", "s2": "~q"},
    )


def door_knocking() -> Domain:
    """Three-step knocking cycle; only ``q`` is ever observed."""
    return _cycle("p q", "~p q", "~p ~q")


def door_variants() -> List[Domain]:
    """The four domains observationally indistinguishable from door knocking,
    in canonical order; the second one is :func:`door_knocking` itself."""
    return [
        _cycle("p q", "~p q", "p ~q"),
        _cycle("p q", "~p q", "~p ~q"),
        _cycle("~p q", "p q", "p ~q"),
        _cycle("~p q", "p q", "~p ~q"),
    ]


def broken_door_knocking() -> Domain:
    """Door knocking with the last step returning to the middle state."""
    return val_domain(
        ["p", "q"],
        {"s0": "p q", "s1": "~p q", "s2": "~p ~q"},
        "s0",
        [("s0", "a", "s1"), ("s1", "a", "s2"), ("s2", "a", "s1")],
        {"s0": "q", "s1": "q", "s2": "~q"},
    )


def coin_model() -> EpistemicModel:
    """One world where heads ``h`` is up."""
    return EpistemicModel(["h"], {"w": {"h"}}, [["w"]])


def coin_toss() -> EventModel:
    """Heads or tails, and the agent sees which."""
    return EventModel(
        ["h"],
        {"heads": Event.assigning(Top(), ["h"], true=["h"]), "tails": Event.assigning(Top(), ["h"], false=["h"])},
        [["heads"], ["tails"]],
    )


def examples() -> Dict[str, Domain]:
    """Named domains shipped as data files."""
    out = {
        "light_switch": light_switch(),
        "light_switch_no_loops": light_switch(self_loops=False),
        "box": box(),
        "door": door_knocking(),
        "door_broken": broken_door_knocking(),
    }
    for i, d in enumerate(door_variants(), start=1):
        out[f"door_d{i}"] = d
    return out
