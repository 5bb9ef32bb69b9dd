"""Evaluation maps, relation checking, completeness probes, integral
representations, and ideal-membership certificates.

A membership certificate realizes F = (Q_{imax,i})_s * R_s + sum(c * I1-gen)
with every piece explicit; the checker re-expands the combination and
confirms syntactic equality, reporting any non-integral cofactors instead
of failing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import INF, UniPoly, pval
from .errors import InsufficientDepth, MalformedInput, NotInIdeal
from .expandval import full_expansion, truncate
from .keychain import IMAX, KeyChain, segment
from .presentrel import GeneratorSet, i1_decompose, ideal_generators
from .rewrite import is_neat, total_reduction, total_s_building
from .xpoly import XPoly, mu0


def eval_e(chain: KeyChain, F: XPoly) -> UniPoly:
    """The evaluation X_i -> Qt_i(x), exactly in Q[x]."""
    star = set(chain.star_positions)
    for k in F.variables():
        if k not in star:
            raise MalformedInput(f"variable X_{k} out of range for this chain")
    images = {k: chain.entries[k].Qt for k in range(len(chain.entries))}
    return F.eval_unipoly(images)


def eval_eta(chain: KeyChain, F: XPoly):
    """(is_zero, value): zero means g divides the evaluation; otherwise the
    value of the image under the branch's valuation."""
    h = eval_e(chain, F)
    rem = h % chain.g
    if rem.is_zero:
        return True, INF
    return False, chain.nu(rem).value


@dataclass(frozen=True)
class RelationCheck:
    kind: str
    target: object
    source: int
    passed: bool
    details: dict


def check_relations(chain: KeyChain):
    """Assert the defining identities of every generator: kernel membership
    for I1, the h*g identity for I2, mu0 = 0, positive b-values inside I*,
    neatness flags, and strictly decreasing v(b) along the final plateau."""
    gens = ideal_generators(chain)
    ctx = chain.ctx
    out = []
    for gen in gens.i1:
        ev = eval_e(chain, gen.relation_poly)
        neat = is_neat(chain, gen.Q_poly)
        details = {
            "kernel": ev.is_zero,
            "mu0_zero": mu0(ctx, gen.Q_poly) == 0,
            "b_positive": pval(ctx, gen.b) > 0,
            "q_neat": neat.neat,
            "relation_neat": is_neat(chain, gen.relation_poly).neat,
            "neat_note": is_neat(chain, gen.relation_poly).note,
        }
        ok = details["kernel"] and details["mu0_zero"] and details["b_positive"] \
            and details["q_neat"]
        out.append(RelationCheck("I1", gen.target, gen.source, ok, details))
    prev = None
    for gen in sorted(gens.i2, key=lambda g: g.source):
        ev = eval_e(chain, gen.Q_poly)
        hg = chain.g * gen.h
        vb = pval(ctx, gen.b)
        details = {
            "h_times_g": ev == hg,
            "mu0_zero": mu0(ctx, gen.Q_poly) == 0,
            "q_neat": is_neat(chain, gen.Q_poly).neat,
            "v_b": vb,
            "v_b_decreasing": prev is None or vb < prev,
        }
        prev = vb
        ok = all(details[k] for k in ("h_times_g", "mu0_zero", "q_neat", "v_b_decreasing"))
        out.append(RelationCheck("I2", IMAX, gen.source, ok, details))
    return out


def completeness_probe(chain: KeyChain, f: UniPoly):
    """Position of a chain element q with deg q <= deg f whose truncation
    computes nu(f), or an insufficient-depth report on shallow prefixes.
    Constants are trivially witnessed by the first entry."""
    if f.is_zero:
        raise MalformedInput("probe of the zero polynomial")
    if f.degree == 0:
        return 0
    target = chain.nu(f).value
    for i in chain.star_positions:
        if chain.entries[i].Q.degree > f.degree:
            continue
        if truncate(chain, i, f) == target:
            return i
    if chain.complete and chain.g.degree <= f.degree:
        # nu_g(f) = nu(f mod g) = nu(f): the last key always witnesses here
        return chain.imax_pos
    if chain.complete:
        raise AssertionError("complete chain failed the completeness probe")
    raise InsufficientDepth(
        f"no witness of degree <= {f.degree} in a depth-{len(chain.entries)} prefix")


def integral_rep(chain: KeyChain, h: UniPoly) -> XPoly:
    """Representation of an integral element h(eta) as a polynomial with
    coefficients in O_K in the normalized generators."""
    if h.is_zero:
        return XPoly.zero()
    val = chain.nu(h).value
    if val < 0:
        raise MalformedInput(f"h has negative value {val}: not integral")
    if h.degree >= chain.g.degree:
        raise MalformedInput("need deg h < deg g")
    if h.degree == 0:
        return XPoly.const(h.coeffs[0])
    for i in chain.star_positions:
        if truncate(chain, i, h) == val:
            exp = full_expansion(chain, i, h)
            out = exp.as_xpoly()
            if not out.is_integral:
                raise AssertionError("expansion at an exact position not integral")
            return out
    raise InsufficientDepth("no position computes nu(h) in this prefix")


@dataclass(frozen=True)
class Certificate:
    target: XPoly
    anchor: int               # final-plateau source of the I2 reference
    level: int
    i2_poly: XPoly            # (Q_{imax, anchor})_s
    i2_cofactor: XPoly        # R_s
    i1_parts: tuple           # ((target, cofactor), ...)
    denominators: tuple       # ((label, lcm), ...) empty when fully integral

    def re_expand(self, gens: GeneratorSet) -> XPoly:
        acc = self.i2_poly * self.i2_cofactor
        for tgt, cof in self.i1_parts:
            acc = acc + cof * gens.i1_by_target(tgt).relation_poly
        return acc


def _membership_anchor(chain: KeyChain, s: int) -> int:
    seg = segment(chain)
    if chain.complete:
        return chain.imax_pos - 1
    final = seg.plateaus[-1]
    anchor = final.first + s
    if anchor not in final.positions:
        raise InsufficientDepth(
            f"level {s} exceeds the available offsets of the truncated plateau")
    return anchor


def membership(chain: KeyChain, F: XPoly) -> Certificate:
    """Certificate that F lies in I1 + I2.

    Follows the constructive route: total s-building of F, total reduction,
    exact division by h_i g(X_0), total s-building of the quotient, then
    explicit I1 cofactors for the difference by top-down elimination."""
    gens = ideal_generators(chain)
    ctx = chain.ctx
    if not F.is_zero and mu0(ctx, F) < 0:
        raise MalformedInput("membership requires mu0(F) >= 0")
    is_zero, val = eval_eta(chain, F)
    if not is_zero:
        raise NotInIdeal(f"F evaluates to a nonzero element of value {val}")
    seg = segment(chain)
    s = max((seg.offset(k) for k in F.variables()), default=0)
    anchor = _membership_anchor(chain, s)
    s = max(s, seg.offset(anchor))
    by_source = {g.source: g for g in gens.i2}
    gen2 = by_source[anchor]
    f_s = total_s_building(chain, F, s, through=anchor)
    tred = total_reduction(chain, f_s)
    gi = chain.g * gen2.h  # h_i g(x); the X_0 notation is the same data
    quot, rem = divmod(tred, gi)
    if not rem.is_zero:
        raise NotInIdeal("total reduction is not divisible by g")
    r_poly = XPoly.from_unipoly(quot, 0)
    r_s = (total_s_building(chain, r_poly, s, through=anchor)
           if not r_poly.is_zero else r_poly)
    q_s = total_s_building(chain, gen2.Q_poly, s, through=anchor)
    d = F - q_s * r_s
    cof = i1_decompose(chain, d, gens) if not d.is_zero else {}
    denominators = []
    if not r_s.is_integral:
        denominators.append(("i2-cofactor", r_s.denominator_lcm()))
    parts = []
    for tgt in sorted(cof):
        c = cof[tgt]
        parts.append((tgt, c))
        if not c.is_integral:
            denominators.append((f"i1-cofactor-{tgt}", c.denominator_lcm()))
    cert = Certificate(F, anchor, s, q_s, r_s, tuple(parts), tuple(denominators))
    if cert.re_expand(gens) != F:
        raise AssertionError("certificate failed to re-expand to its target")
    return cert
