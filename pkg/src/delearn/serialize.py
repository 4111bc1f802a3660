"""JSON interchange formats.

All writers emit canonical orderings so identical inputs give identical
bytes.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .domain import (
    Domain,
    Observation,
    State,
    parse_valuation,
    state_key,
    state_kind,
)
from .epistemic import EpistemicModel, Event, EventModel, Post, valuation_key
from .formula import parse_formula, render_formula
from .traces import ObservationTrace, ObservedTransition, sorted_traces


_WIDTH = 78


def _write(obj: Any, indent: str) -> str:
    text = json.dumps(obj, ensure_ascii=False)
    if not isinstance(obj, (list, dict)) or not obj or len(indent) + len(text) <= _WIDTH:
        return text
    inner = indent + "  "
    if isinstance(obj, list):
        items = [inner + _write(x, inner) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + indent + "]"
    items = [inner + json.dumps(k, ensure_ascii=False) + ": " + _write(v, inner) for k, v in obj.items()]
    return "{\n" + ",\n".join(items) + "\n" + indent + "}"


def dumps(obj: Any) -> str:
    """Indented JSON; any value that fits in the line width stays on one line."""
    return _write(obj, "") + "\n"


def _strings(xs: Any, what: str) -> List[str]:
    if not isinstance(xs, list) or not all(isinstance(x, str) for x in xs):
        raise ValueError(f"{what} must be a list of strings")
    return xs


# ---------------------------------------------------------------- observations


def observation_to_json(o: Observation) -> Dict[str, List[str]]:
    return {"pos": sorted(o.pos), "neg": sorted(o.neg)}


def observation_from_json(obj: Any) -> Observation:
    if isinstance(obj, str):
        return Observation.parse(obj)
    if not isinstance(obj, dict):
        raise ValueError(f"observation must be an object with pos/neg, got {obj!r}")
    return Observation(_strings(obj.get("pos", []), "pos"), _strings(obj.get("neg", []), "neg"))


def traces_to_json(traces: Iterable[ObservationTrace], props: Sequence[str]) -> List[list]:
    out = []
    for t in sorted_traces(traces, props):
        row: List[Any] = [observation_to_json(t.observations[0])]
        for a, o in zip(t.actions, t.observations[1:]):
            row += [a, observation_to_json(o)]
        out.append(row)
    return out


def traces_from_json(obj: Any) -> List[ObservationTrace]:
    if not isinstance(obj, list):
        raise ValueError("trace file must hold a JSON array of traces")
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) % 2 != 1:
            raise ValueError(f"trace {i} must alternate observations and actions, starting and ending with an observation")
        observations = [observation_from_json(x) for x in row[0::2]]
        actions = row[1::2]
        if not all(isinstance(a, str) for a in actions):
            raise ValueError(f"trace {i}: actions must be strings")
        out.append(ObservationTrace(tuple(observations), tuple(actions)))
    return out


def sigma_to_json(sigma: Iterable[ObservedTransition], props: Sequence[str]) -> List[list]:
    rows = sorted(sigma, key=lambda t: (t.source.key(props), t.action, t.target.key(props)))
    return [[observation_to_json(s), a, observation_to_json(t)] for s, a, t in rows]


def sigma_from_json(obj: Any) -> List[ObservedTransition]:
    if not isinstance(obj, list):
        raise ValueError("observed-transition file must hold a JSON array")
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != 3 or not isinstance(row[1], str):
            raise ValueError(f"observed transition {i} must be [observation, action, observation]")
        out.append(ObservedTransition(observation_from_json(row[0]), row[1], observation_from_json(row[2])))
    return out


# ---------------------------------------------------------------- models


def _world_ids(m: EpistemicModel) -> Dict[Any, str]:
    order = [w for cell in m.partition for w in cell]
    return {w: f"w{i}" for i, w in enumerate(order)}


def epistemic_model_to_json(m: EpistemicModel) -> Dict[str, Any]:
    ids = _world_ids(m)
    return {
        "props": list(m.props),
        "worlds": [{"id": ids[w], "val": sorted(m.val(w))} for cell in m.partition for w in cell],
        "partition": [[ids[w] for w in cell] for cell in m.partition],
    }


def epistemic_model_from_json(obj: Any, props: Optional[Iterable[str]] = None) -> EpistemicModel:
    if not isinstance(obj, dict) or "worlds" not in obj:
        raise ValueError("epistemic model must be an object with 'worlds'")
    val = {}
    for w in obj["worlds"]:
        if not isinstance(w, dict) or "id" not in w:
            raise ValueError("each world needs an 'id'")
        if str(w["id"]) in val:
            raise ValueError(f"duplicate world id {w['id']!r}")
        val[str(w["id"])] = _strings(w.get("val", []), "world valuation")
    if props is None:
        props = obj.get("props")
    if props is None:
        props = {p for v in val.values() for p in v}
    partition = obj.get("partition", [list(val)])
    return EpistemicModel(props, val, [[str(w) for w in cell] for cell in partition])


_POST_TEXT = {Post.TRUE: "T", Post.FALSE: "F", Post.KEEP: "keep"}
_POST_PARSE = {"T": Post.TRUE, "F": Post.FALSE, "keep": Post.KEEP}


def event_model_to_json(e: EventModel) -> Dict[str, Any]:
    order = [x for cell in e.partition for x in cell]
    return {
        "props": list(e.props),
        "events": [
            {
                "id": str(x),
                "pre": render_formula(e.events[x].pre),
                "post": {p: _POST_TEXT[e.events[x].post[p]] for p in e.props},
            }
            for x in order
        ],
        "partition": [[str(x) for x in cell] for cell in e.partition],
    }


def event_model_from_json(obj: Any, props: Optional[Iterable[str]] = None) -> EventModel:
    if not isinstance(obj, dict) or "events" not in obj:
        raise ValueError("event model must be an object with 'events'")
    events = {}
    for ev in obj["events"]:
        if not isinstance(ev, dict) or "id" not in ev:
            raise ValueError("each event needs an 'id'")
        post = ev.get("post", {})
        try:
            parsed = {p: _POST_PARSE[v] for p, v in post.items()}
        except KeyError as exc:
            raise ValueError(f"postcondition values must be T, F or keep, got {exc.args[0]!r}") from None
        events[str(ev["id"])] = (parse_formula(ev.get("pre", "true")), parsed)
    if props is None:
        props = obj.get("props")
    if props is None:
        props = {p for _, post in events.values() for p in post}
    props = sorted(props)
    full = {
        eid: Event(pre, {p: post.get(p, Post.KEEP) for p in props}) for eid, (pre, post) in events.items()
    }
    partition = obj.get("partition", [[e] for e in events])
    return EventModel(props, full, [[str(x) for x in cell] for cell in partition])


def event_models_to_json(models: Mapping[str, EventModel]) -> Dict[str, Any]:
    return {a: event_model_to_json(models[a]) for a in sorted(models)}


def event_models_from_json(obj: Any, props: Optional[Iterable[str]] = None) -> Dict[str, EventModel]:
    if not isinstance(obj, dict):
        raise ValueError("event-model file must map names to event models")
    if "events" in obj:
        raise ValueError("expected a mapping from names to event models, got a single event model")
    return {name: event_model_from_json(m, props) for name, m in obj.items()}


# ---------------------------------------------------------------- domains


def state_ids(d: Domain) -> Dict[State, str]:
    return {s: f"s{i}" for i, s in enumerate(d.ordered_states())}


def _payload(s: State, props: Sequence[str]) -> Any:
    kind = state_kind(s)
    if kind == "val":
        return sorted(s)
    if kind == "compset":
        return [sorted(v) for v in sorted(s, key=lambda v: valuation_key(v, props))]
    if kind == "tuple":
        return [sorted(v) for v in s]
    m = epistemic_model_to_json(s)
    del m["props"]
    return m


def domain_to_json(d: Domain) -> Dict[str, Any]:
    ids = state_ids(d)
    order = d.ordered_states()
    trans = sorted(d.transitions, key=lambda t: (int(ids[t[0]][1:]), t[1], int(ids[t[2]][1:])))
    return {
        "props": list(d.props),
        "actions": list(d.actions),
        "states": [{"id": ids[s], "kind": state_kind(s), "val": _payload(s, d.props)} for s in order],
        "initial": ids[d.initial],
        "transitions": [[ids[s], a, ids[t]] for s, a, t in trans],
        "obs": {ids[s]: observation_to_json(d.obs[s]) for s in order if s in d.obs},
        "deterministic": d.deterministic,
    }


def _valuation(x: Any, props: Sequence[str]):
    if isinstance(x, str):
        return parse_valuation(x, props)
    return frozenset(_strings(x, "valuation"))


def _state_from_json(entry: Dict[str, Any], props: Sequence[str]) -> State:
    kind = entry.get("kind", "val")
    if "val" not in entry:
        if kind != "val":
            raise ValueError(f"state {entry.get('id')!r} of kind {kind!r} needs a 'val'")
        return parse_valuation(str(entry["id"]), props)
    raw = entry["val"]
    if kind == "val":
        return _valuation(raw, props)
    if kind == "compset":
        s = frozenset(_valuation(v, props) for v in raw)
        if not s:
            raise ValueError("a compset state needs at least one valuation")
        return s
    if kind == "tuple":
        return tuple(_valuation(v, props) for v in raw)
    if kind == "model":
        return epistemic_model_from_json(raw, props)
    raise ValueError(f"unknown state kind {kind!r}")


def domain_from_json(obj: Any) -> Tuple[Domain, Dict[str, State]]:
    """Domain plus the file's mapping from state ids to states."""
    if not isinstance(obj, dict):
        raise ValueError("domain file must hold a JSON object")
    for field in ("props", "states", "initial"):
        if field not in obj:
            raise ValueError(f"domain is missing {field!r}")
    props = sorted(_strings(obj["props"], "props"))
    ids: Dict[str, State] = {}
    for entry in obj["states"]:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ValueError("each state needs an 'id'")
        sid = str(entry["id"])
        if sid in ids:
            raise ValueError(f"duplicate state id {sid!r}")
        s = _state_from_json(entry, props)
        if s in ids.values():
            raise ValueError(f"state {sid!r} repeats the payload of another state")
        ids[sid] = s

    def lookup(sid: Any) -> State:
        if str(sid) not in ids:
            raise ValueError(f"unknown state id {sid!r}")
        return ids[str(sid)]

    trans = []
    for row in obj.get("transitions", []):
        if not isinstance(row, list) or len(row) != 3:
            raise ValueError(f"transition {row!r} must be [source, action, target]")
        trans.append((lookup(row[0]), str(row[1]), lookup(row[2])))
    actions = obj.get("actions")
    actions = _strings(actions, "actions") if actions is not None else sorted({a for _, a, _ in trans})
    obs = {lookup(sid): observation_from_json(o) for sid, o in obj.get("obs", {}).items()}
    d = Domain(props, actions, list(ids.values()), lookup(obj["initial"]), trans, obs, bool(obj.get("deterministic", True)))
    return d, ids


def resolve_state(d: Domain, ids: Mapping[str, State], ref: str) -> State:
    """A state named by file id or, for valuation domains, by literal text."""
    if ref in ids:
        return ids[ref]
    if d.kind == "val":
        s = parse_valuation(ref, d.props)
        if s in set(d.states):
            return s
    raise ValueError(f"no state {ref!r} in the domain")
