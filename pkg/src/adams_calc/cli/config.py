"""JSON configuration: named spaces, bundles, fibrations and tasks.

Top-level keys are ``spaces``, ``bundles``, ``fibrations`` and ``tasks``.
The total space of a fibration can be used wherever a space name is
expected.  See ``docs/config-schema.json`` for the full schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from ..graded_ring import Relation, Ring, RingDescriptor
from ..k_calculus import Bundle, Space, point, product, projective_space
from ..pushforward import Fibration, compose_fibrations, make_projective_bundle
from .evaluate import EvalError, Evaluator

SECTIONS = ("spaces", "bundles", "fibrations", "tasks")


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    raw: dict
    spaces: dict[str, Space] = field(default_factory=dict)
    bundles: dict[str, Bundle] = field(default_factory=dict)
    fibrations: dict[str, Fibration] = field(default_factory=dict)

    @property
    def tasks(self) -> list[dict]:
        return list(self.raw.get("tasks", []))

    def space(self, name: str) -> Space:
        if name in self.spaces:
            return self.spaces[name]
        if name in self.fibrations:
            return self.fibrations[name].total
        raise ConfigError(f"unknown space {name!r}")

    def names_for(self, space: Space) -> dict:
        """Bundles on ``space`` plus every fibration, for expression evaluation."""
        names: dict[str, Any] = {n: b for n, b in self.bundles.items() if b.space == space}
        names.update(self.fibrations)
        return names

    def evaluator(self, space_name: str) -> Evaluator:
        space = self.space(space_name)
        return Evaluator(space, self.names_for(space))


class _Resolver:
    def __init__(self, raw: dict):
        for key in raw:
            if key not in SECTIONS:
                raise ConfigError(f"unknown top-level key {key!r}")
        self.raw = raw
        self.cfg = Config(raw)
        self.stack: list[str] = []

    def _enter(self, kind: str, name: str):
        tag = f"{kind}:{name}"
        if tag in self.stack:
            raise ConfigError(f"cyclic definition: {' -> '.join(self.stack + [tag])}")
        self.stack.append(tag)

    def space(self, name: str) -> Space:
        if name in self.cfg.spaces:
            return self.cfg.spaces[name]
        spaces = self.raw.get("spaces", {})
        if name not in spaces:
            if name in self.raw.get("fibrations", {}):
                return self.fibration(name).total
            raise ConfigError(f"unknown space {name!r}")
        self._enter("space", name)
        entry = spaces[name]
        model = entry.get("model", "custom")
        if model == "point":
            space = point()
        elif model == "projective":
            space = projective_space(int(entry["n"]), entry.get("generator", "h"))
        elif model == "product":
            space = product(*(self.space(f) for f in entry["factors"]))
        elif model == "custom":
            space = self._custom(name, entry)
        else:
            raise ConfigError(f"space {name!r}: unknown model {model!r}")
        space.name = name
        self.stack.pop()
        self.cfg.spaces[name] = space
        return space

    def _custom(self, name: str, entry: dict) -> Space:
        try:
            gens = [(g, int(d)) for g, d in entry["generators"]]
            trunc = int(entry["truncation"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"space {name!r}: malformed generators/truncation") from exc
        try:
            free = Space(Ring(RingDescriptor.make(gens, trunc)))
        except ValueError as exc:
            raise ConfigError(f"space {name!r}: {exc}") from exc
        rels = []
        for r in entry.get("relations", []):
            tail = self._eval(Evaluator(free), r.get("tail", "0"), f"relation tail of {name!r}")
            tail = free.ring.const(tail) if not hasattr(tail, "terms") else tail
            rels.append(Relation.make(r["lead"], int(r["power"]), tail.terms))
        try:
            ring = Ring(RingDescriptor.make(gens, trunc, rels))
        except ValueError as exc:
            raise ConfigError(f"space {name!r}: {exc}") from exc
        bare = Space(ring)
        lines = {ln: self._eval(Evaluator(bare), text, f"line {ln!r}")
                 for ln, text in entry.get("lines", {}).items()}
        return Space(ring, lines, name=name)

    @staticmethod
    def _eval(evaluator: Evaluator, text: str, what: str):
        try:
            return evaluator(str(text))
        except (EvalError, ValueError) as exc:
            raise ConfigError(f"{what}: {exc}") from exc

    def fibration(self, name: str) -> Fibration:
        if name in self.cfg.fibrations:
            return self.cfg.fibrations[name]
        fibs = self.raw.get("fibrations", {})
        if name not in fibs:
            raise ConfigError(f"unknown fibration {name!r}")
        self._enter("fibration", name)
        entry = fibs[name]
        if "compose" in entry:
            p_name, q_name = entry["compose"]
            f = compose_fibrations(self.fibration(p_name), self.fibration(q_name))
        else:
            base = self.space(entry["base"])
            ev = Evaluator(base)
            twists = [self._eval(ev, t, f"twist of fibration {name!r}") for t in entry["twists"]]
            try:
                f = make_projective_bundle(base, twists, entry.get("generator", "h"))
            except ValueError as exc:
                raise ConfigError(f"fibration {name!r}: {exc}") from exc
        f = Fibration(f.base, f.total, f.fiber, f.vertical_roots, f.pullback, f.epsilon, name)
        f.total.name = name
        self.stack.pop()
        self.cfg.fibrations[name] = f
        return f

    def bundle(self, name: str) -> Bundle:
        entry = self.raw["bundles"][name]
        space = self.space(entry["space"])
        ev = Evaluator(space)
        roots = [self._eval(ev, r, f"root of bundle {name!r}") for r in entry.get("roots", [])]
        try:
            return Bundle.of(space, roots, entry.get("rank"))
        except ValueError as exc:
            raise ConfigError(f"bundle {name!r}: {exc}") from exc

    def resolve(self) -> Config:
        for name in self.raw.get("spaces", {}):
            self.space(name)
        for name in self.raw.get("fibrations", {}):
            self.fibration(name)
        for name in self.raw.get("bundles", {}):
            self.cfg.bundles[name] = self.bundle(name)
        ids = [t.get("id") for t in self.raw.get("tasks", [])]
        dup = {i for i in ids if i is not None and ids.count(i) > 1}
        if dup:
            raise ConfigError(f"duplicate task ids: {sorted(dup)}")
        return self.cfg


def load_config(source) -> Config:
    """Load from a path, a JSON string or an already-parsed dict."""
    if isinstance(source, dict):
        raw = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read configuration: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        return _Resolver(raw).resolve()
    except KeyError as exc:
        raise ConfigError(f"missing field {exc}") from exc
    except TypeError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc


def default_config() -> Config:
    text = resources.files("adams_calc.cli").joinpath("data/default.json").read_text()
    return load_config(json.loads(text))
