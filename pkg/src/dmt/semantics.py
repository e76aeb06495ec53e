"""Preferential Kripke models and formula evaluation.

A preferential Kripke model is a Kripke model together with a strict
partial order on worlds ("preference"), lower meaning more normal.  The
defeasible box holds at w when its operand holds at every most-preferred
accessible world; the defeasible diamond when it holds at at least one.

Also provides a bounded brute-force model enumerator used as an
independent oracle by the test suite and the entailment engine.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Optional

from .syntax import (
    And, Atom, Bottom, Box, DefBox, DefDia, Dia, Formula, Iff, Implies,
    Not, Or, Top, Conditional as StmtConditional,
)


class ModelError(ValueError):
    """Raised for structurally invalid model data."""


@dataclass(frozen=True)
class Conditional:
    antecedent: Formula
    consequent: Formula


class PreferentialModel:
    """Worlds, per-modality accessibility, valuation, and preference.

    ``preference`` holds pairs (a, b) meaning a is strictly preferred to
    (more normal than) b, stored transitively closed.  Instances are
    treated as immutable after construction.
    """

    __slots__ = ("worlds", "atoms", "modalities", "relations", "valuation",
                 "preference", "_succ", "_pred")

    def __init__(self, worlds, atoms, modalities, relations, valuation,
                 preference):
        self.worlds = tuple(worlds)
        self.atoms = frozenset(atoms)
        self.modalities = frozenset(modalities)
        self.relations = {i: frozenset(pairs) for i, pairs in relations.items()}
        self.valuation = {w: frozenset(v) for w, v in valuation.items()}
        self.preference = frozenset(preference)
        self._succ = None
        self._pred = None

    def successors(self, modality, world):
        if self._succ is None:
            succ = {}
            for i, pairs in self.relations.items():
                by_world = {}
                for a, b in pairs:
                    by_world.setdefault(a, set()).add(b)
                succ[i] = by_world
            self._succ = succ
        return self._succ.get(modality, {}).get(world, frozenset())

    def predecessors_in_preference(self, world):
        if self._pred is None:
            pred = {}
            for a, b in self.preference:
                pred.setdefault(b, set()).add(a)
            self._pred = pred
        return self._pred.get(world, frozenset())

    def to_json_dict(self):
        return {
            "atoms": sorted(self.atoms),
            "modalities": sorted(self.modalities),
            "worlds": list(self.worlds),
            "valuation": {w: sorted(self.valuation.get(w, ()))
                          for w in self.worlds},
            "relations": {i: sorted(map(list, self.relations.get(i, ())))
                          for i in sorted(self.modalities)},
            "preference": sorted(map(list, self.preference)),
        }

    def __repr__(self):
        return (f"PreferentialModel(worlds={list(self.worlds)}, "
                f"valuation={{...}}, preference={sorted(self.preference)})")


def transitive_closure(pairs, elements):
    closed = set(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(closed):
            for c, d in list(closed):
                if b == c and (a, d) not in closed:
                    closed.add((a, d))
                    changed = True
    return closed


def validate_model(raw: dict) -> PreferentialModel:
    """Build a model from file-format data, closing the preference order.

    Rejects dangling world references, preference cycles, and an empty
    world set.  A preference entry ["a", "b"] asserts a is preferred to b.
    """
    try:
        worlds = list(raw["worlds"])
    except (KeyError, TypeError):
        raise ModelError("model data must contain a 'worlds' list")
    if not worlds:
        raise ModelError("the set of worlds must be non-empty")
    if len(set(worlds)) != len(worlds):
        raise ModelError("duplicate world ids")
    world_set = set(worlds)
    atoms = set(raw.get("atoms", []))
    modalities = set(raw.get("modalities", []))

    valuation = {}
    for w, names in raw.get("valuation", {}).items():
        if w not in world_set:
            raise ModelError(f"valuation mentions unknown world {w!r}")
        for p in names:
            if p not in atoms:
                raise ModelError(f"valuation mentions undeclared atom {p!r}")
        valuation[w] = frozenset(names)

    relations = {}
    for i, pairs in raw.get("relations", {}).items():
        if i not in modalities:
            raise ModelError(f"relation for undeclared modality {i!r}")
        rel = set()
        for pair in pairs:
            a, b = pair
            if a not in world_set or b not in world_set:
                raise ModelError(
                    f"relation {i!r} mentions unknown world in {pair!r}")
            rel.add((a, b))
        relations[i] = rel

    pref = set()
    for pair in raw.get("preference", []):
        a, b = pair
        if a not in world_set or b not in world_set:
            raise ModelError(f"preference mentions unknown world in {pair!r}")
        pref.add((a, b))
    pref = transitive_closure(pref, worlds)
    for w in worlds:
        if (w, w) in pref:
            raise ModelError(f"preference has a cycle through {w!r}")

    return PreferentialModel(worlds, atoms, modalities, relations, valuation,
                             pref)


def load_model(path) -> PreferentialModel:
    with open(path) as fh:
        return validate_model(json.load(fh))


def save_model(model: PreferentialModel, path):
    with open(path, "w") as fh:
        json.dump(model.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Evaluation

def min_preferred(model: PreferentialModel, worlds) -> set:
    """The preference-minimal elements of a set of worlds."""
    ws = set(worlds)
    return {w for w in ws
            if not (model.predecessors_in_preference(w) & ws)}


def extension(model: PreferentialModel, f: Formula) -> set:
    """The set of worlds satisfying f, by structural recursion."""
    return _extension(model, f, {})


def _extension(model, f, memo):
    cached = memo.get(f)
    if cached is not None:
        return cached
    if isinstance(f, Atom):
        out = {w for w in model.worlds
               if f.name in model.valuation.get(w, ())}
    elif isinstance(f, Bottom):
        out = set()
    elif isinstance(f, Top):
        out = set(model.worlds)
    elif isinstance(f, Not):
        out = set(model.worlds) - _extension(model, f.operand, memo)
    elif isinstance(f, And):
        out = (_extension(model, f.left, memo)
               & _extension(model, f.right, memo))
    elif isinstance(f, Or):
        out = (_extension(model, f.left, memo)
               | _extension(model, f.right, memo))
    elif isinstance(f, Implies):
        out = ((set(model.worlds) - _extension(model, f.left, memo))
               | _extension(model, f.right, memo))
    elif isinstance(f, Iff):
        left = _extension(model, f.left, memo)
        right = _extension(model, f.right, memo)
        out = {w for w in model.worlds if (w in left) == (w in right)}
    elif isinstance(f, Box):
        sub = _extension(model, f.operand, memo)
        out = {w for w in model.worlds
               if model.successors(f.modality, w) <= sub}
    elif isinstance(f, Dia):
        sub = _extension(model, f.operand, memo)
        out = {w for w in model.worlds
               if model.successors(f.modality, w) & sub}
    elif isinstance(f, DefBox):
        sub = _extension(model, f.operand, memo)
        out = {w for w in model.worlds
               if min_preferred(model, model.successors(f.modality, w)) <= sub}
    elif isinstance(f, DefDia):
        sub = _extension(model, f.operand, memo)
        out = {w for w in model.worlds
               if min_preferred(model, model.successors(f.modality, w)) & sub}
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def holds_at(model: PreferentialModel, world, f: Formula) -> bool:
    if world not in model.worlds:
        raise ModelError(f"unknown world {world!r}")
    return world in extension(model, f)


def globally_true(model: PreferentialModel, f: Formula) -> bool:
    return len(extension(model, f)) == len(model.worlds)


def holds_conditional(model: PreferentialModel, c) -> bool:
    """KLM reading: every minimal antecedent-world satisfies the consequent."""
    ante = extension(model, c.antecedent)
    return min_preferred(model, ante) <= extension(model, c.consequent)


def satisfies_kb_globally(model: PreferentialModel, kb) -> bool:
    return all(globally_true(model, f) for f in kb)


# ---------------------------------------------------------------------------
# Brute-force oracle

@dataclass(frozen=True)
class ModelSignature:
    atoms: tuple
    modalities: tuple
    max_worlds: int


def strict_partial_orders(worlds):
    """All transitively closed strict partial orders on the given worlds.

    Enumerates irreflexive candidate relations and keeps the transitive
    ones; transitivity plus irreflexivity rules out symmetric pairs.
    """
    pairs = [(a, b) for a in worlds for b in worlds if a != b]
    out = []
    for bits in itertools.product((False, True), repeat=len(pairs)):
        rel = {p for p, keep in zip(pairs, bits) if keep}
        if all((a, d) in rel
               for a, b in rel for c, d in rel if b == c):
            out.append(frozenset(rel))
    return out


def enumerate_models(sig: ModelSignature, hard_cap: int = 3) -> Iterator[PreferentialModel]:
    """Yield every model over the signature, in a deterministic order."""
    if sig.max_worlds < 1:
        raise ModelError("the set of worlds must be non-empty")
    if sig.max_worlds > hard_cap:
        raise ModelError(
            f"max_worlds {sig.max_worlds} exceeds the hard cap {hard_cap}")
    atoms = tuple(sig.atoms)
    modalities = tuple(sig.modalities)
    for k in range(1, sig.max_worlds + 1):
        worlds = tuple(f"w{j + 1}" for j in range(k))
        pairs = [(a, b) for a in worlds for b in worlds]
        world_valuations = [frozenset(s)
                            for r in range(len(atoms) + 1)
                            for s in itertools.combinations(atoms, r)]
        relation_choices = [frozenset(s)
                            for r in range(len(pairs) + 1)
                            for s in itertools.combinations(pairs, r)]
        orders = strict_partial_orders(worlds)
        atoms_fs = frozenset(atoms)
        modalities_fs = frozenset(modalities)
        for val in itertools.product(world_valuations, repeat=k):
            valuation = dict(zip(worlds, val))
            for rels in itertools.product(relation_choices,
                                          repeat=len(modalities)):
                relations = dict(zip(modalities, rels))
                for order in orders:
                    # bypass __init__: all parts are already immutable and
                    # shared structure is never mutated
                    m = PreferentialModel.__new__(PreferentialModel)
                    m.worlds = worlds
                    m.atoms = atoms_fs
                    m.modalities = modalities_fs
                    m.relations = relations
                    m.valuation = valuation
                    m.preference = order
                    m._succ = None
                    m._pred = None
                    yield m


def _successor_masks(model):
    worlds = model.worlds
    idx = {w: j for j, w in enumerate(worlds)}
    succ = {}
    for i, pairs in model.relations.items():
        masks = [0] * len(worlds)
        for a, b in pairs:
            masks[idx[a]] |= 1 << idx[b]
        succ[i] = masks
    return succ


def _atom_masks(model):
    return {p: sum(1 << j for j, w in enumerate(model.worlds)
                   if p in model.valuation.get(w, ()))
            for p in model.atoms}


def _satisfying_mask(model, f, succ=None, atom_masks=None):
    """Bitmask of world indices satisfying f (fast path for enumeration)."""
    worlds = model.worlds
    k = len(worlds)
    idx = {w: j for j, w in enumerate(worlds)}
    full = (1 << k) - 1
    if succ is None:
        succ = _successor_masks(model)
    pred = [0] * k
    for a, b in model.preference:
        pred[idx[b]] |= 1 << idx[a]

    min_cache = {}

    def min_mask(mask):
        out = min_cache.get(mask)
        if out is None:
            out = 0
            rest = mask
            while rest:
                low = rest & -rest
                if not (pred[low.bit_length() - 1] & mask):
                    out |= low
                rest ^= low
            min_cache[mask] = out
        return out

    zeros = [0] * k

    def ev(g):
        if isinstance(g, Atom):
            if atom_masks is not None:
                return atom_masks.get(g.name, 0)
            mask = 0
            for j, w in enumerate(worlds):
                if g.name in model.valuation.get(w, ()):
                    mask |= 1 << j
            return mask
        if isinstance(g, Bottom):
            return 0
        if isinstance(g, Top):
            return full
        if isinstance(g, Not):
            return full ^ ev(g.operand)
        if isinstance(g, And):
            return ev(g.left) & ev(g.right)
        if isinstance(g, Or):
            return ev(g.left) | ev(g.right)
        if isinstance(g, Implies):
            return (full ^ ev(g.left)) | ev(g.right)
        if isinstance(g, Iff):
            return full ^ ev(g.left) ^ ev(g.right)
        sub = ev(g.operand)
        masks = succ.get(g.modality, zeros)
        if isinstance(g, Box):
            return sum(1 << j for j in range(k)
                       if not (masks[j] & ~sub))
        if isinstance(g, Dia):
            return sum(1 << j for j in range(k) if masks[j] & sub)
        if isinstance(g, DefBox):
            return sum(1 << j for j in range(k)
                       if not (min_mask(masks[j]) & ~sub))
        if isinstance(g, DefDia):
            return sum(1 << j for j in range(k)
                       if min_mask(masks[j]) & sub)
        raise TypeError(f"not a formula: {g!r}")

    return ev(f)


def brute_force_satisfiable(f: Formula, sig: ModelSignature,
                            hard_cap: int = 3
                            ) -> Optional[tuple]:
    """First (model, world) satisfying f within the bounds, else None.

    None means only that no model exists within the enumeration bounds.
    """
    # the enumerator shares relation/valuation dicts across consecutive
    # preference orders; cache their derived masks by identity
    last_rel = last_succ = last_val = last_atoms = None
    for model in enumerate_models(sig, hard_cap=hard_cap):
        if model.relations is not last_rel:
            last_rel = model.relations
            last_succ = _successor_masks(model)
        if model.valuation is not last_val:
            last_val = model.valuation
            last_atoms = _atom_masks(model)
        mask = _satisfying_mask(model, f, succ=last_succ,
                                atom_masks=last_atoms)
        if mask:
            world = model.worlds[(mask & -mask).bit_length() - 1]
            return model, world
    return None


def signature_for(formulas, max_worlds: int = 3) -> ModelSignature:
    from .syntax import atoms_of, modalities_of
    atoms = set()
    modalities = set()
    for f in formulas:
        atoms |= atoms_of(f)
        modalities |= modalities_of(f)
    return ModelSignature(tuple(sorted(atoms)), tuple(sorted(modalities)),
                          max_worlds)
