"""Kripke structures and teams.

Worlds are kept in insertion order; a team is a bitset over that order, so
team equality, hashing, and subset tests are single integer operations, and
every enumeration (splits, successor teams) is reproducible.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator, Optional

from . import _kernels as K
from .errors import ModelFormatError, WellFormednessError
from .formula import Formula

LAX = "lax"
STRICT = "strict"


def _check_mode(mode):
    if mode not in (LAX, STRICT):
        raise ValueError(f"mode must be 'lax' or 'strict', got {mode!r}")


class KripkeStructure:
    """Finite directed graph with a propositional valuation.

    ``worlds`` fixes the bit order used by every team over this structure.
    Structures are immutable after construction and safe to share.
    """

    __slots__ = ("worlds", "_index", "succ_masks", "valuation", "_full", "_image_cache")

    def __init__(self, worlds, edges, valuation):
        self.worlds = tuple(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelFormatError("duplicate world names")
        self._index = {w: i for i, w in enumerate(self.worlds)}
        succ = [0] * len(self.worlds)
        for (u, v) in edges:
            if u not in self._index or v not in self._index:
                raise ModelFormatError(f"edge ({u!r}, {v!r}) mentions an undeclared world")
            succ[self._index[u]] |= 1 << self._index[v]
        self.succ_masks = tuple(succ)
        val = {}
        for p, ws in valuation.items():
            mask = 0
            for w in ws:
                if w not in self._index:
                    raise ModelFormatError(f"valuation of {p!r} mentions undeclared world {w!r}")
                mask |= 1 << self._index[w]
            val[p] = mask
        self.valuation = val
        self._full = (1 << len(self.worlds)) - 1
        self._image_cache = {}

    def __len__(self):
        return len(self.worlds)

    @property
    def full_mask(self) -> int:
        return self._full

    def bit(self, world: str) -> int:
        return 1 << self._index[world]

    def index(self, world: str) -> int:
        return self._index[world]

    def world_mask(self, worlds: Iterable[str]) -> int:
        mask = 0
        for w in worlds:
            mask |= 1 << self._index[w]
        return mask

    def mask_worlds(self, mask: int) -> list:
        return [w for i, w in enumerate(self.worlds) if mask >> i & 1]

    def prop_mask(self, name: str) -> int:
        return self.valuation.get(name, 0)

    def image_mask(self, mask: int) -> int:
        out = self._image_cache.get(mask)
        if out is None:
            out = K.image_of(mask, self.succ_masks)
            self._image_cache[mask] = out
        return out

    def edges(self):
        for i, w in enumerate(self.worlds):
            m = self.succ_masks[i]
            for j, v in enumerate(self.worlds):
                if m >> j & 1:
                    yield (w, v)

    def team(self, worlds: Iterable[str]) -> "Team":
        return Team(self, self.world_mask(worlds))

    def full_team(self) -> "Team":
        return Team(self, self._full)

    def to_json_dict(self, team: Optional["Team"] = None) -> dict:
        d = {
            "worlds": list(self.worlds),
            "edges": [[u, v] for (u, v) in self.edges()],
            "valuation": {p: self.mask_worlds(m) for p, m in sorted(self.valuation.items())},
        }
        if team is not None:
            d["team"] = self.mask_worlds(team.mask)
        return d


class Team:
    """An immutable world subset of a fixed structure, stored as a bitmask."""

    __slots__ = ("structure", "mask")

    def __init__(self, structure: KripkeStructure, mask: int):
        if mask & ~structure.full_mask:
            raise ModelFormatError("team mask mentions bits outside the structure")
        self.structure = structure
        self.mask = mask

    def __eq__(self, other):
        return (
            isinstance(other, Team)
            and other.structure is self.structure
            and other.mask == self.mask
        )

    def __hash__(self):
        return hash((id(self.structure), self.mask))

    def __len__(self):
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[str]:
        return iter(self.structure.mask_worlds(self.mask))

    def __contains__(self, world: str) -> bool:
        return bool(self.mask >> self.structure.index(world) & 1)

    def __le__(self, other: "Team") -> bool:
        return self.mask & ~other.mask == 0

    def __or__(self, other: "Team") -> "Team":
        return Team(self.structure, self.mask | other.mask)

    def __and__(self, other: "Team") -> "Team":
        return Team(self.structure, self.mask & other.mask)

    def __sub__(self, other: "Team") -> "Team":
        return Team(self.structure, self.mask & ~other.mask)

    def __repr__(self):
        return f"Team({{{', '.join(sorted(self))}}})"


def image(structure: KripkeStructure, team: Team, i: int = 1) -> Team:
    """The i-fold edge image of the team; i = 0 returns the team itself."""
    mask = team.mask
    for _ in range(i):
        mask = structure.image_mask(mask)
    return Team(structure, mask)


def successor_teams(structure: KripkeStructure, team: Team, mode: str = LAX) -> Iterator[Team]:
    """All successor teams, lazily, in deterministic bitmask order.

    Lax: subsets of the image in which every team world has a successor.
    Strict: images of choice functions picking one successor per world.
    The empty team has the single successor team ``{}``; a team containing a
    dead-end world has none.
    """
    _check_mode(mode)
    succ = [structure.succ_masks[i] for i in K.iter_bits(team.mask)]
    if mode == LAX:
        gen = K.iter_lax_successors(succ)
    else:
        gen = K.iter_strict_successors(succ)
    for mask in gen:
        yield Team(structure, mask)


def splits(team: Team, mode: str = LAX) -> Iterator[tuple]:
    """All splits ``(S, U)`` with ``S | U == team``, deterministically.

    Lax mode yields every cover (3^|T| pairs), strict mode every ordered
    disjoint partition (2^|T| pairs).
    """
    _check_mode(mode)
    s = team.structure
    if mode == LAX:
        gen = K.iter_covers(team.mask)
    else:
        gen = K.iter_partitions(team.mask)
    for a, b in gen:
        yield (Team(s, a), Team(s, b))


def _sat_mask(structure: KripkeStructure, alpha: Formula) -> int:
    if not alpha.classical:
        raise WellFormednessError("conditioning requires a classical formula")
    from .checker import ModelChecker

    return ModelChecker(structure).sat_mask(alpha)


def restrict(structure: KripkeStructure, team: Team, alpha: Formula) -> Team:
    """Conditioned subteam: the worlds of the team satisfying ``alpha``."""
    return Team(structure, team.mask & _sat_mask(structure, alpha))


def select(structure: KripkeStructure, team: Team, alpha: Formula, sub: Team) -> Team:
    """Shrink the ``alpha`` part of the team to ``sub``, keeping the rest."""
    a = _sat_mask(structure, alpha)
    return Team(structure, (team.mask & ~a) | (team.mask & a & sub.mask))


def is_scope(structure: KripkeStructure, alpha: Formula) -> bool:
    """True iff every edge preserves membership in ``alpha``."""
    a = _sat_mask(structure, alpha)
    for i in range(len(structure.worlds)):
        succ = structure.succ_masks[i]
        if a >> i & 1:
            if succ & ~a:
                return False
        elif succ & a:
            return False
    return True


_MODEL_KEYS = {"worlds", "edges", "valuation", "team"}


def model_from_json_dict(data: dict) -> tuple:
    """Build ``(structure, team)`` from the model file format.

    Unknown keys and duplicate worlds are rejected; ``team`` may be absent,
    in which case the team is the full world set.
    """
    if not isinstance(data, dict):
        raise ModelFormatError("model file must contain a JSON object")
    unknown = set(data) - _MODEL_KEYS - {"layers", "stairs"}
    if unknown:
        raise ModelFormatError(f"unknown keys in model file: {sorted(unknown)}")
    for key in ("worlds", "edges"):
        if key not in data:
            raise ModelFormatError(f"model file is missing {key!r}")
    structure = KripkeStructure(data["worlds"], data["edges"], data.get("valuation", {}))
    if "team" in data:
        team = structure.team(data["team"])
    else:
        team = structure.full_team()
    return structure, team


def load_model(path) -> tuple:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON: {exc}") from None
    return model_from_json_dict(data)


def dump_model(structure: KripkeStructure, team: Optional[Team] = None, extra: Optional[dict] = None) -> str:
    d = structure.to_json_dict(team)
    if extra:
        d.update(extra)
    return json.dumps(d, sort_keys=True, indent=1)
