"""The connected graded Hopf algebra of generators with explicit
subdivergence data.

Generators play the role of 1PI graphs; the free commutative algebra on them
carries the coproduct "split off subdivergences", the counit, and two
independently implemented antipodes (the grading recursion and the geometric
convolution series).  Everything is linear over exact rationals.

The recursive antipode uses the sign the co-inverse axiom forces:
S(x) = -x - sum S(sub) * cograph.  The test suite pins this down by checking
m(S (x) id)Delta = u o counit on the whole corpus.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import SchemaError
from .graphs import FeynmanGraph


class Generator:
    """A Hopf algebra generator: id, positive degree, optional attached graph,
    and the list of (subdivergence monomial, cograph) pairs appearing in its
    reduced coproduct.  Repeated pairs encode multiplicity."""

    __slots__ = ("gid", "degree", "subdivergences", "graph", "_hash")

    def __init__(self, gid: str, degree: int, subdivergences=(), graph=None):
        if degree < 1:
            raise SchemaError(f"generator {gid!r} must have degree >= 1",
                              pointer=f"/{gid}/degree")
        subs = tuple(subdivergences)
        for sub, cograph in subs:
            if sub.is_unit():
                raise SchemaError(
                    f"generator {gid!r} lists an empty subdivergence",
                    pointer=f"/{gid}/subdivergences")
            if sub.degree + cograph.degree != degree:
                raise SchemaError(
                    f"generator {gid!r}: degree {sub.degree} + "
                    f"{cograph.degree} != {degree}",
                    pointer=f"/{gid}/subdivergences")
        object.__setattr__(self, "gid", str(gid))
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "subdivergences", subs)
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "_hash", hash((self.gid, self.degree)))

    def __setattr__(self, name, value):
        raise AttributeError("Generator is immutable")

    @property
    def is_primitive(self) -> bool:
        return not self.subdivergences

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Generator):
            return NotImplemented
        return (self.gid == other.gid and self.degree == other.degree
                and self.subdivergences == other.subdivergences)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.gid < other.gid

    def __repr__(self):
        return f"Generator({self.gid!r}, deg={self.degree})"


class Monomial:
    """Commutative product of generators; the empty product is the unit."""

    __slots__ = ("gens", "_hash")

    def __init__(self, gens: Iterable[Generator] = ()):
        gens = tuple(sorted(gens, key=lambda g: g.gid))
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "_hash",
                           hash(tuple(g.gid for g in gens)))

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @classmethod
    def unit(cls) -> "Monomial":
        return _UNIT

    @classmethod
    def of(cls, *gens: Generator) -> "Monomial":
        return cls(gens)

    def is_unit(self) -> bool:
        return not self.gens

    @property
    def degree(self) -> int:
        return sum(g.degree for g in self.gens)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        if not self.gens:
            return other
        if not other.gens:
            return self
        return Monomial(self.gens + other.gens)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.gens == other.gens

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (self.degree, tuple(g.gid for g in self.gens))

    def gids(self) -> tuple:
        return tuple(g.gid for g in self.gens)

    def __repr__(self):
        if not self.gens:
            return "1"
        return "*".join(g.gid for g in self.gens)


_UNIT = Monomial(())


def _coerce_coeff(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class HopfElement:
    """Finite rational linear combination of monomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _coerce_coeff(c)
                if c:
                    clean[m] = c
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("HopfElement is immutable")

    @classmethod
    def zero(cls) -> "HopfElement":
        return cls()

    @classmethod
    def one(cls) -> "HopfElement":
        return cls({_UNIT: Fraction(1)})

    @classmethod
    def of(cls, x, coeff=1) -> "HopfElement":
        if isinstance(x, Generator):
            x = Monomial.of(x)
        return cls({x: _coerce_coeff(coeff)})

    def terms(self) -> tuple:
        return tuple(sorted(self._terms.items(),
                            key=lambda item: item[0].sort_key()))

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other):
        if not isinstance(other, HopfElement):
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        return HopfElement(out)

    def __neg__(self):
        return HopfElement({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, HopfElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return HopfElement()
            return HopfElement({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, HopfElement):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        return HopfElement(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, HopfElement):
            return NotImplemented
        return self._terms == other._terms

    def max_degree(self) -> int:
        return max((m.degree for m in self._terms), default=0)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.terms():
            parts.append(f"{c}*{m!r}" if c != 1 or m.is_unit() else repr(m))
        return " + ".join(parts)


class TensorElement:
    """Element of H (x) H, stored sparsely on ordered monomial pairs."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        clean = {}
        if terms:
            for pair, c in terms.items():
                c = _coerce_coeff(c)
                if c:
                    clean[pair] = c
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TensorElement is immutable")

    @classmethod
    def of(cls, left: Monomial, right: Monomial, coeff=1) -> "TensorElement":
        return cls({(left, right): _coerce_coeff(coeff)})

    def terms(self) -> tuple:
        return tuple(sorted(
            self._terms.items(),
            key=lambda item: (item[0][0].sort_key(), item[0][1].sort_key())))

    def coefficient(self, left: Monomial, right: Monomial) -> Fraction:
        return self._terms.get((left, right), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        out = dict(self._terms)
        for pair, c in other._terms.items():
            s = out.get(pair, 0) + c
            if s:
                out[pair] = s
            elif pair in out:
                del out[pair]
        return TensorElement(out)

    def __neg__(self):
        return TensorElement({p: -c for p, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return TensorElement()
            return TensorElement({p: c * other for p, c in self._terms.items()})
        if not isinstance(other, TensorElement):
            return NotImplemented
        out: dict = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                pair = (a1 * a2, b1 * b2)
                s = out.get(pair, 0) + c1 * c2
                if s:
                    out[pair] = s
                elif pair in out:
                    del out[pair]
        return TensorElement(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in self.terms():
            head = "" if c == 1 else f"{c}*"
            parts.append(f"{head}{a!r}(x){b!r}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# structure maps
# ---------------------------------------------------------------------------

_COPRODUCT_CACHE: dict = {}


def coproduct_generator(gen: Generator) -> TensorElement:
    """Delta(Gamma) = Gamma (x) 1 + 1 (x) Gamma + sum sub (x) cograph."""
    terms: dict = {}
    mono = Monomial.of(gen)
    terms[(mono, _UNIT)] = Fraction(1)
    terms[(_UNIT, mono)] = terms.get((_UNIT, mono), 0) + Fraction(1)
    for sub, cograph in gen.subdivergences:
        pair = (sub, Monomial.of(cograph))
        terms[pair] = terms.get(pair, 0) + Fraction(1)
    return TensorElement(terms)


def coproduct_monomial(m: Monomial) -> TensorElement:
    """Multiplicative extension Delta(ab) = Delta(a)Delta(b)."""
    cached = _COPRODUCT_CACHE.get(m)
    if cached is not None:
        return cached
    if m.is_unit():
        out = TensorElement.of(_UNIT, _UNIT)
    else:
        out = coproduct_generator(m.gens[0])
        for g in m.gens[1:]:
            out = out * coproduct_generator(g)
    _COPRODUCT_CACHE[m] = out
    return out


def coproduct(x) -> TensorElement:
    """Coproduct of a generator, monomial or element (extended linearly)."""
    if isinstance(x, Generator):
        return coproduct_generator(x)
    if isinstance(x, Monomial):
        return coproduct_monomial(x)
    out = TensorElement()
    for m, c in x.terms():
        out = out + coproduct_monomial(m) * c
    return out


def reduced_coproduct(m: Monomial) -> TensorElement:
    """Delta'(m) = Delta(m) - m (x) 1 - 1 (x) m, for degree >= 1."""
    full = coproduct_monomial(m)
    return full - TensorElement.of(m, _UNIT) - TensorElement.of(_UNIT, m)


def counit(x) -> Fraction:
    """Coefficient of the empty monomial."""
    if isinstance(x, Generator):
        return Fraction(0)
    if isinstance(x, Monomial):
        return Fraction(1 if x.is_unit() else 0)
    return x.coefficient(_UNIT)


def degree(m: Monomial) -> int:
    return m.degree


def apply_linear(f: Callable[[Monomial], object], x: HopfElement):
    """Extend a map defined on monomials linearly; x must be nonzero."""
    total = None
    for m, c in x.terms():
        v = c * f(m)
        total = v if total is None else total + v
    if total is None:
        raise ValueError("apply_linear needs a nonzero element")
    return total


def convolve(f: Callable[[Monomial], object], g: Callable[[Monomial], object],
             x) -> object:
    """(f * g)(x) = sum over Delta(x) of f(left) g(right), in the target."""
    delta = coproduct(x)
    total = None
    for (left, right), c in delta.terms():
        v = c * (f(left) * g(right))
        total = v if total is None else total + v
    if total is None:
        raise ValueError("convolution of the zero element")
    return total


def identity_morphism(m: Monomial) -> HopfElement:
    return HopfElement.of(m)


def eta_eps(m: Monomial) -> HopfElement:
    """The convolution unit H -> H: u o counit."""
    return HopfElement.one() * counit(m)


_ANTIPODE_CACHE: dict = {}


def antipode_recursive(x) -> HopfElement:
    """S from the grading recursion; an algebra morphism since H is
    commutative, so monomials map to products of generator antipodes."""
    if isinstance(x, Generator):
        return _antipode_gen(x)
    if isinstance(x, Monomial):
        out = HopfElement.one()
        for g in x.gens:
            out = out * _antipode_gen(g)
        return out
    total = HopfElement.zero()
    for m, c in x.terms():
        total = total + antipode_recursive(m) * c
    return total


def _antipode_gen(gen: Generator) -> HopfElement:
    cached = _ANTIPODE_CACHE.get(gen)
    if cached is not None:
        return cached
    acc = HopfElement.of(gen, Fraction(-1))
    for sub, cograph in gen.subdivergences:
        acc = acc - antipode_recursive(sub) * HopfElement.of(cograph)
    _ANTIPODE_CACHE[gen] = acc
    return acc


def convolution_power_term(i: int, m: Monomial) -> HopfElement:
    """u_i of the geometric antipode series: u_0 = eta o eps and
    u_{i+1} = (eta eps - id) * u_i."""
    if i == 0:
        return eta_eps(m)
    total = HopfElement.zero()
    for (left, right), c in coproduct_monomial(m).terms():
        factor = eta_eps(left) - HopfElement.of(left)
        if factor.is_zero():
            continue
        tail = convolution_power_term(i - 1, right)
        if tail.is_zero():
            continue
        total = total + (factor * tail) * c
    return total


def antipode_geometric(x) -> HopfElement:
    """S as the convolution-geometric series, truncated at the degree: the
    connected grading kills every u_k with k > deg."""
    if isinstance(x, Generator):
        x = HopfElement.of(x)
    elif isinstance(x, Monomial):
        x = HopfElement.of(x)
    total = HopfElement.zero()
    for m, c in x.terms():
        acc = HopfElement.zero()
        for i in range(m.degree + 1):
            acc = acc + convolution_power_term(i, m)
        total = total + acc * c
    return total


# ---------------------------------------------------------------------------
# nesting specifications
# ---------------------------------------------------------------------------

class NestingSpec:
    """An ordered corpus of generators with resolved subdivergence data."""

    def __init__(self, generators: Iterable[Generator]):
        gens = tuple(generators)
        by_id: dict = {}
        for g in gens:
            if g.gid in by_id:
                raise SchemaError(f"duplicate generator id {g.gid!r}",
                                  pointer=f"/generators/{g.gid}")
            by_id[g.gid] = g
        self.generators = gens
        self.by_id = by_id

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def in_degree_order(self) -> tuple:
        return tuple(sorted(self.generators, key=lambda g: (g.degree, g.gid)))

    def to_json(self) -> dict:
        out = []
        for g in self.generators:
            entry: dict = {"id": g.gid, "degree": g.degree}
            entry["subdivergences"] = [
                {"sub": list(sub.gids()), "cograph": cog.gid}
                for sub, cog in g.subdivergences]
            if g.graph is not None:
                entry["graph"] = g.graph.to_json()
            out.append(entry)
        return {"generators": out}

    @classmethod
    def from_json(cls, obj) -> "NestingSpec":
        if not isinstance(obj, dict) or "generators" not in obj:
            raise SchemaError("nesting document needs a 'generators' list",
                              pointer="")
        raw = obj["generators"]
        declared: dict = {}
        for i, entry in enumerate(raw):
            gid = entry.get("id")
            if not isinstance(gid, str) or not gid:
                raise SchemaError("generator id must be a non-empty string",
                                  pointer=f"/generators/{i}/id")
            if gid in declared:
                raise SchemaError(f"duplicate generator id {gid!r}",
                                  pointer=f"/generators/{i}/id")
            deg = entry.get("degree")
            if not isinstance(deg, int) or deg < 1:
                raise SchemaError(
                    f"generator {gid!r} needs an integer degree >= 1; "
                    "degree-0 entries would break connectedness and make "
                    "the nesting recursion cyclic",
                    pointer=f"/generators/{i}/degree")
            declared[gid] = (i, entry)

        built: dict = {}

        def build(gid: str, chain: tuple) -> Generator:
            if gid in built:
                return built[gid]
            if gid in chain:
                raise SchemaError(
                    "cyclic nesting: " + " -> ".join(chain + (gid,)),
                    pointer=f"/generators/{declared[gid][0]}")
            i, entry = declared[gid]
            deg = entry["degree"]
            subs = []
            for j, sd in enumerate(entry.get("subdivergences", ())):
                ptr = f"/generators/{i}/subdivergences/{j}"
                sub_ids = sd.get("sub")
                cog_id = sd.get("cograph")
                if not isinstance(sub_ids, list) or not sub_ids:
                    raise SchemaError("'sub' must be a non-empty id list",
                                      pointer=ptr + "/sub")
                gens = []
                for k, sid in enumerate(sub_ids):
                    if sid not in declared:
                        raise SchemaError(f"unknown generator id {sid!r}",
                                          pointer=f"{ptr}/sub/{k}")
                    gens.append(build(sid, chain + (gid,)))
                if cog_id not in declared:
                    raise SchemaError(f"unknown generator id {cog_id!r}",
                                      pointer=ptr + "/cograph")
                cog = build(cog_id, chain + (gid,))
                sub = Monomial(gens)
                if sub.degree + cog.degree != deg:
                    raise SchemaError(
                        f"degrees {sub.degree} + {cog.degree} != {deg}",
                        pointer=ptr)
                subs.append((sub, cog))
            graph = None
            if "graph" in entry:
                graph = FeynmanGraph.from_json(entry["graph"])
                loops = graph.gradings().loops
                if loops != deg:
                    raise SchemaError(
                        f"attached graph has loop number {loops}, "
                        f"declared degree {deg}",
                        pointer=f"/generators/{i}/graph")
            g = Generator(gid, deg, subs, graph)
            built[gid] = g
            return g

        ordered = []
        for gid in declared:
            ordered.append(build(gid, ()))
        return cls(ordered)

    @classmethod
    def from_json_text(cls, text: str) -> "NestingSpec":
        return cls.from_json(json.loads(text))


def element_to_json(x: HopfElement) -> list:
    from .scalars import rational_to_string
    return [[rational_to_string(c), list(m.gids())] for m, c in x.terms()]


def tensor_to_json(x: TensorElement) -> list:
    from .scalars import rational_to_string
    return [[rational_to_string(c), list(a.gids()), list(b.gids())]
            for (a, b), c in x.terms()]


# ---------------------------------------------------------------------------
# building nesting data from graphs
# ---------------------------------------------------------------------------

def default_divergence_predicate(sub: FeynmanGraph) -> bool:
    """Ships as the default: one-particle irreducible with at least one loop."""
    return (sub.gradings().loops >= 1
            and sub.is_connected()
            and sub.is_one_particle_irreducible())


def corpus_from_graphs(roots: Iterable[FeynmanGraph],
                       divergent=default_divergence_predicate) -> NestingSpec:
    """Build a NestingSpec from graphs: subdivergences are the vertex-induced
    subgraphs (possibly several disjoint pieces) every component of which the
    predicate marks divergent, paired with the contracted cograph.

    Generator ids are assigned in discovery order; isomorphic graphs share a
    generator.  Every root must be connected with loop number >= 1.
    """
    from .graphs import GraphStructureError, contract, induced_subgraph
    registry: dict = {}
    order: list = []

    def gen_for(graph: FeynmanGraph) -> Generator:
        canon, rep = graph.canonical_form()
        if canon in registry:
            return registry[canon]
        loops = rep.gradings().loops
        if loops < 1 or not rep.is_connected():
            raise GraphStructureError(
                "generators must be connected with loop number >= 1",
                loops=loops)
        subs = []
        internals = rep.internal_vertices
        for mask in range(1, 1 << len(internals)):
            selection = [internals[i] for i in range(len(internals))
                         if mask >> i & 1]
            try:
                induced = induced_subgraph(rep, selection)
            except GraphStructureError:
                continue
            comps = induced.components()
            total_loops = 0
            pieces = []
            ok = True
            for comp in comps:
                piece = induced_subgraph(
                    induced, comp) if len(comps) > 1 else induced
                if not divergent(piece):
                    ok = False
                    break
                total_loops += piece.gradings().loops
                pieces.append(piece)
            if not ok or total_loops < 1 or total_loops >= loops:
                continue
            cograph = contract(rep, selection)
            sub_mono = Monomial(tuple(gen_for(p) for p in pieces))
            subs.append((sub_mono, gen_for(cograph)))
        gid = f"g{len(order)}"
        gen = Generator(gid, loops, tuple(subs), rep)
        registry[canon] = gen
        order.append(gen)
        return gen

    for root in roots:
        gen_for(root)
    return NestingSpec(order)
