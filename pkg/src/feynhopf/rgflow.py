"""Scale action, scale-independence of counterterms, the one-parameter
renormalization-group elements, and exact beta extraction.

All scale dependence is polynomial: the scaled character multiplies each
generator value by exp(t * eps * L), truncated in eps, with polynomial-in-t
coefficients.  The group law is checked as an identity of two-variable
polynomials; beta is a coefficient extraction, never a numerical derivative.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Mapping

from .errors import ResidualPoleError
from .hopf import Generator, Monomial, NestingSpec, antipode_recursive
from .renorm import Character, CheckReport, bp_run
from .scalars import (LaurentSeries, TPoly, exp_eps_poly, lift_to_tpoly,
                      rational_to_string)


def degree_grading(gen: Generator) -> int:
    """Default grading for the scale action: the generator degree, which is
    the loop number whenever a graph is attached."""
    return gen.degree


def scale_character(F: Character, corpus: NestingSpec,
                    grading: Callable[[Generator], int] = degree_grading,
                    ) -> Character:
    """Gamma -> exp(t eps L(Gamma)) F(Gamma) with TPoly coefficients."""
    t = TPoly.variable()
    values = {}
    for gen in corpus:
        factor = exp_eps_poly(t * grading(gen), F.truncation, F.pole_bound)
        values[gen.gid] = factor * lift_to_tpoly(F.value_gen(gen))
    return Character(values, F.truncation, F.pole_bound,
                     label=(F.label + "@scaled") if F.label else "scaled")


def _t_free(series: LaurentSeries, negative_only: bool = False) -> bool:
    for k, c in series.terms():
        if negative_only and k >= 0:
            continue
        if isinstance(c, TPoly) and not c.is_constant():
            return False
    return True


def pole_part_scale_independence(F: Character, corpus: NestingSpec,
                                 grading=degree_grading) -> CheckReport:
    """Run BP on the scaled character and report, per generator, whether the
    counterterm is free of the scale variable."""
    scaled = scale_character(F, corpus, grading)
    entries = bp_run(scaled, corpus)
    report = CheckReport("counterterms are scale-independent")
    for gen in corpus.in_degree_order():
        c = entries[gen.gid].counterterm
        ok = _t_free(c)
        report.add(gen.gid, ok, "" if ok else f"C({gen.gid}) = {c!r}")
    return report


class RGElement:
    """The one-parameter group element: a polynomial in t per generator,
    extended multiplicatively to monomials."""

    def __init__(self, values: Mapping[str, TPoly]):
        self.values = dict(values)

    def value_gen(self, gen: Generator) -> TPoly:
        return self.values[gen.gid]

    def value(self, m: Monomial) -> TPoly:
        out = TPoly.constant(1)
        for g in m.gens:
            out = out * self.values[g.gid]
        return out

    def at(self, t_value) -> dict:
        return {gid: p.evaluate(t_value) for gid, p in self.values.items()}

    def to_json(self, max_degree: int | None = None) -> dict:
        out = {}
        for gid in sorted(self.values):
            coeffs = self.values[gid].to_json()
            if max_degree is not None:
                coeffs = coeffs[:max_degree + 1]
            out[gid] = coeffs
        return out


def rg_element(F: Character, corpus: NestingSpec,
               grading=degree_grading) -> RGElement:
    """rg_t per generator: the eps^0 part of C * theta_{t eps}(C o S), after
    asserting that every negative eps coefficient vanishes identically in t.

    A surviving pole means the supplied data violates the scale-independence
    assumption, so the z -> D limit does not exist."""
    entries = bp_run(F, corpus)
    minus = Character({g: entries[g].counterterm for g in entries},
                      F.truncation, F.pole_bound)

    def c_inv(m: Monomial) -> LaurentSeries:
        return minus.value_element(antipode_recursive(m))

    t = TPoly.variable()
    values = {}
    for gen in corpus.in_degree_order():
        total = LaurentSeries.zero(F.truncation, F.pole_bound)
        from .hopf import coproduct_monomial
        for (left, right), coeff in coproduct_monomial(Monomial.of(gen)).terms():
            lhs = lift_to_tpoly(minus.value(left))
            scale = exp_eps_poly(t * right.degree, F.truncation, F.pole_bound)
            rhs = scale * lift_to_tpoly(c_inv(right))
            total = total + (lhs * rhs) * coeff
        if not _t_free(total, negative_only=True) or \
                not total.pole_part().is_zero():
            raise ResidualPoleError(
                f"rg limit does not exist at {gen.gid!r}: residual pole "
                f"{total.pole_part()!r}", generator=gen.gid)
        v = total.coefficient(0)
        values[gen.gid] = v if isinstance(v, TPoly) else TPoly.constant(v)
    return RGElement(values)


# -- two-variable polynomials for the group law -----------------------------

def _bipoly_from(p: TPoly, slot: int) -> dict:
    out = {}
    for k, c in enumerate(p.coeffs):
        if c:
            out[(k, 0) if slot == 0 else (0, k)] = c
    return out


def _bipoly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            s = out.get(key, 0) + c1 * c2
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out


def _bipoly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for key, c in b.items():
        s = out.get(key, 0) + c
        if s:
            out[key] = s
        elif key in out:
            del out[key]
    return out


def _substitute_t_plus_s(p: TPoly) -> dict:
    """t -> t + s by binomial expansion."""
    out: dict = {}
    for n, c in enumerate(p.coeffs):
        if not c:
            continue
        for k in range(n + 1):
            key = (k, n - k)
            s = out.get(key, 0) + c * math.comb(n, k)
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out


def rg_group_law_check(rg: RGElement, corpus: NestingSpec) -> CheckReport:
    """rg_{t+s} = rg_t * rg_s as exact identities of polynomials in (t, s):
    the left side substitutes, the right side convolves one copy in t against
    one copy in s through the coproduct."""
    from .hopf import coproduct_monomial
    report = CheckReport("one-parameter group law")
    for gen in corpus.in_degree_order():
        lhs = _substitute_t_plus_s(rg.value_gen(gen))
        rhs: dict = {}
        for (left, right), coeff in coproduct_monomial(Monomial.of(gen)).terms():
            term = _bipoly_mul(_bipoly_from(rg.value(left), 0),
                               _bipoly_from(rg.value(right), 1))
            rhs = _bipoly_add(rhs, {k: coeff * c for k, c in term.items()})
        ok = lhs == rhs
        report.add(gen.gid, ok, "" if ok else f"lhs {lhs} != rhs {rhs}")
    return report


def flow_consistency_check(F: Character, corpus: NestingSpec,
                           grading=degree_grading) -> CheckReport:
    """Scaled renormalized values at eps = 0 equal rg_t convolved with the
    unscaled renormalized values at eps = 0, as exact polynomials in t."""
    from .hopf import coproduct_monomial
    scaled = scale_character(F, corpus, grading)
    scaled_entries = bp_run(scaled, corpus)
    base_entries = bp_run(F, corpus)
    rg = rg_element(F, corpus, grading)

    def r0(m: Monomial) -> Fraction:
        out = Fraction(1)
        for g in m.gens:
            out *= base_entries[g.gid].renormalized.at_zero()
        return out

    report = CheckReport("flow law: scaled R at 0 = rg_t * R_0")
    for gen in corpus.in_degree_order():
        got = scaled_entries[gen.gid].renormalized.coefficient(0)
        if not isinstance(got, TPoly):
            got = TPoly.constant(got)
        want = TPoly()
        for (left, right), coeff in coproduct_monomial(Monomial.of(gen)).terms():
            want = want + rg.value(left) * r0(right) * coeff
        ok = got == want
        report.add(gen.gid, ok, "" if ok else f"got {got!r}, want {want!r}")
    return report


def beta(rg: RGElement) -> dict:
    """Generator of the one-parameter group: d/dt at t = 0, i.e. the t^1
    coefficient of each rg value."""
    return {gid: p.coefficient(1) for gid, p in sorted(rg.values.items())}


def rg_report(F: Character, corpus: NestingSpec, t_degree: int | None = None,
              ) -> dict:
    """Everything the CLI emits: rg polynomials, the beta table, and the
    scale-independence, group-law and flow-law reports."""
    independence = pole_part_scale_independence(F, corpus)
    rg = rg_element(F, corpus)
    group = rg_group_law_check(rg, corpus)
    flow = flow_consistency_check(F, corpus)
    return {
        "rg": rg.to_json(max_degree=t_degree),
        "beta": {gid: rational_to_string(v)
                 for gid, v in beta(rg).items()},
        "checks": {
            "scale_independence": independence.to_json(),
            "group_law": group.to_json(),
            "flow_law": flow.to_json(),
        },
    }
