"""Feynman rules, the graph expansion of perturbed correlators, and the
brute-force Wick oracle that certifies it.

Couplings are never numbers: a series is a map from the multidegree (how many
vertices of each valence) to an exact rational coefficient.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (DimensionMismatchError, MissingVertexTensorError,
                     SlotLimitError)
from .graphs import FeynmanGraph, enumerate_graphs
from .wick import BilinearForm, Covector, free_correlator, inverse_form

ORACLE_SLOT_LIMIT = 14


class SymTensor:
    """Sparse symmetric m-tensor with exact coefficients.

    Stored on sorted multi-indices; ``entries`` expands every distinct index
    permutation, so contraction code can iterate over all index assignments
    literally.  Construction symmetrizes: the stored value at a sorted index
    is the average of the supplied values over all m! position permutations.
    """

    __slots__ = ("order", "dimension", "_data", "_entries")

    def __init__(self, order: int, dimension: int,
                 coefficients: Mapping[tuple, Fraction]):
        data: dict = {}
        counts: dict = {}
        for idx, value in coefficients.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != order:
                raise DimensionMismatchError(
                    f"index {idx} has {len(idx)} slots, tensor order is {order}")
            if any(not 0 <= i < dimension for i in idx):
                raise DimensionMismatchError(
                    f"index {idx} outside dimension {dimension}")
            key = tuple(sorted(idx))
            data[key] = data.get(key, Fraction(0)) + Fraction(value)
            counts[key] = counts.get(key, 0) + 1
        sym: dict = {}
        for key, total in data.items():
            # (1/m!) sum over all m! position permutations visits each
            # distinct index permutation m!/orbit times, so the symmetrized
            # value is the orbit sum divided by the orbit size
            value = total / _orbit_size(key)
            if value:
                sym[key] = value
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "_data", sym)
        entries = []
        for key in sorted(sym):
            for perm in sorted(set(itertools.permutations(key))):
                entries.append((perm, sym[key]))
        object.__setattr__(self, "_entries", tuple(entries))

    def __setattr__(self, name, value):
        raise AttributeError("SymTensor is immutable")

    def value(self, idx: Sequence[int]) -> Fraction:
        return self._data.get(tuple(sorted(idx)), Fraction(0))

    def entries(self) -> tuple:
        """All (index tuple, coefficient) pairs, every permutation expanded."""
        return self._entries

    def sorted_items(self) -> tuple:
        return tuple(sorted(self._data.items()))

    def is_symmetric_input(self, coefficients: Mapping[tuple, Fraction]) -> bool:
        """Whether the raw map already equals its own symmetrization."""
        for idx, value in coefficients.items():
            if self.value(idx) != Fraction(value):
                return False
        for key, value in self._data.items():
            orbit = sorted(set(itertools.permutations(key)))
            got = [Fraction(coefficients.get(p, coefficients.get(tuple(p), 0)))
                   for p in orbit]
            if any(g != value for g in got):
                return False
        return True


def _orbit_size(sorted_idx: tuple) -> int:
    counts: dict = {}
    for i in sorted_idx:
        counts[i] = counts.get(i, 0) + 1
    size = math.factorial(len(sorted_idx))
    for c in counts.values():
        size //= math.factorial(c)
    return size


@dataclass(frozen=True)
class InteractionModel:
    """Free form, external insertions and symmetric vertex tensors."""

    bilinear: BilinearForm
    external_forms: tuple
    vertex_tensors: Mapping[int, SymTensor]

    def __post_init__(self):
        object.__setattr__(self, "external_forms", tuple(self.external_forms))
        object.__setattr__(self, "vertex_tensors",
                           dict(sorted(self.vertex_tensors.items())))
        d = self.bilinear.dimension
        for f in self.external_forms:
            if f.dimension != d:
                raise DimensionMismatchError(
                    "external form dimension mismatch", expected=d,
                    got=f.dimension)
        for m, q in self.vertex_tensors.items():
            if q.dimension != d or q.order != int(m):
                raise DimensionMismatchError(
                    f"vertex tensor for valence {m} has wrong shape")

    @property
    def dimension(self) -> int:
        return self.bilinear.dimension

    @property
    def n_external(self) -> int:
        return len(self.external_forms)


@dataclass(frozen=True)
class SeriesCoefficient:
    """The exact coefficient of prod_m g_m^{n_m}."""

    multidegree: tuple   # sorted ((m, n_m), ...) with n_m > 0
    value: Fraction


def _covector_entries(f: Covector) -> tuple:
    return tuple(((i,), c) for i, c in enumerate(f.components) if c)


def feynman_amplitude(graph: FeynmanGraph, model: InteractionModel) -> Fraction:
    """Tensor contraction prescribed by the graph: forms at external vertices,
    Q_m at m-valent internal vertices, B^{-1} along every edge."""
    if graph.n_external != model.n_external:
        raise DimensionMismatchError(
            "graph and model disagree on the number of external legs",
            graph=graph.n_external, model=model.n_external)
    inverse = inverse_form(model.bilinear)
    ext_of = {v: l for l, v in graph.external}

    vertex_entries = []
    for v in range(len(graph.vertices)):
        if v in ext_of:
            entries = _covector_entries(model.external_forms[ext_of[v] - 1])
        else:
            m = graph.valence(v)
            tensor = model.vertex_tensors.get(m)
            if tensor is None:
                raise MissingVertexTensorError(
                    f"model defines no vertex tensor of valence {m}", valence=m)
            entries = tensor.entries()
        if not entries:
            return Fraction(0)
        vertex_entries.append(entries)

    edges = graph.edges()
    vofd = [graph.vertex_of(d) for d in range(graph.n_darts)]
    slot_of = {}
    for v, darts in enumerate(graph.vertices):
        for pos, d in enumerate(darts):
            slot_of[d] = pos

    total = Fraction(0)
    for choice in itertools.product(*vertex_entries):
        coeff = Fraction(1)
        for idx, c in choice:
            coeff *= c
            if not coeff:
                break
        if not coeff:
            continue
        for a, b in edges:
            ia = choice[vofd[a]][0][slot_of[a]]
            ib = choice[vofd[b]][0][slot_of[b]]
            coeff *= inverse[ia][ib]
            if not coeff:
                break
        total += coeff
    return total


def _multidegrees(valences: Sequence[int], max_total: int):
    """All maps m -> n_m over the given valences with sum n_m <= max_total."""
    valences = sorted(valences)

    def rec(i, remaining):
        if i == len(valences):
            yield ()
            return
        for n in range(remaining + 1):
            for tail in rec(i + 1, remaining - n):
                yield ((valences[i], n),) + tail

    for combo in rec(0, max_total):
        yield tuple((m, n) for m, n in combo if n)


def correlator_series(model: InteractionModel, max_total_order: int,
                      include_vacuum: bool = True) -> list:
    """Graph expansion: for each multidegree, sum F_Gamma / |Aut(Gamma)| over
    one representative per isomorphism class."""
    out = []
    for nd in _multidegrees(list(model.vertex_tensors), max_total_order):
        profile = dict(nd)
        darts = model.n_external + sum(m * n for m, n in nd)
        if darts % 2:
            value = Fraction(0)
        else:
            value = Fraction(0)
            for g in enumerate_graphs(model.n_external, profile,
                                      include_vacuum=include_vacuum):
                amp = feynman_amplitude(g, model)
                if amp:
                    value += amp / g.automorphism_order()
        out.append(SeriesCoefficient(nd, value))
    out.sort(key=lambda sc: (sum(n for _, n in sc.multidegree), sc.multidegree))
    return out


def oracle_coefficient(model: InteractionModel,
                       multidegree: Mapping[int, int]) -> Fraction:
    """Independent check value: expand every vertex tensor into basis slots,
    take the free correlator of all slots by Wick pairing, divide by
    prod_m n_m! (m!)^{n_m}.  Knows nothing about graphs."""
    nd = {int(m): int(n) for m, n in multidegree.items() if int(n)}
    slots = model.n_external + sum(m * n for m, n in nd.items())
    if slots > ORACLE_SLOT_LIMIT:
        raise SlotLimitError(
            f"oracle refuses {slots} slots (limit {ORACLE_SLOT_LIMIT})",
            slots=slots)
    if slots % 2:
        return Fraction(0)

    blocks = []
    for m in sorted(nd):
        tensor = model.vertex_tensors.get(m)
        if tensor is None:
            raise MissingVertexTensorError(
                f"model defines no vertex tensor of valence {m}", valence=m)
        for _ in range(nd[m]):
            blocks.append(tensor.entries())
    for entries in blocks:
        if not entries:
            return Fraction(0)

    d = model.dimension
    basis = [Covector.basis(d, i) for i in range(d)]
    externals = list(model.external_forms)
    cache: dict = {}
    total = Fraction(0)
    for choice in itertools.product(*blocks):
        coeff = Fraction(1)
        indices: list = []
        for idx, c in choice:
            coeff *= c
            indices.extend(idx)
        if not coeff:
            continue
        key = tuple(sorted(indices))
        corr = cache.get(key)
        if corr is None:
            corr = free_correlator(externals + [basis[i] for i in key],
                                   model.bilinear)
            cache[key] = corr
        total += coeff * corr

    norm = 1
    for m, n in nd.items():
        norm *= math.factorial(n) * math.factorial(m) ** n
    return total / norm
