"""Command-line surface: drive chain construction, presentation output,
rewriting, probing and certificate workflows from JSON config files.

Exit status 0 on success, 2 on mathematical rejection (ramified branch,
not-in-ideal, ambiguous branch, insufficient depth), 1 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .algebra import INF, UniPoly, ValuedFieldCtx
from .errors import MalformedInput, MathRejection
from .expandval import full_expansion, truncate
from .keychain import (KeyChain, build_chain, segment, validate,
                       validation_passed)
from .presentrel import ideal_generators, redundancy_cofactor
from .rewrite import (building, is_neat, reduction, total_reduction,
                      total_s_building)
from .verify import check_relations, completeness_probe, membership
from .xpoly import XPoly

COMMANDS = ("chain", "present", "eval", "expand", "build", "reduce", "member", "check")

CONFIG_FIELDS = {"p", "g", "branch", "depth", "mode", "payload", "seed"}


# -- scalar and polynomial text formats --------------------------------------

def fmt_value(v) -> str:
    if v is INF:
        return "inf"
    f = Fraction(v)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_value(s):
    if s == "inf":
        return INF
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise MalformedInput(f"bad rational {s!r}: {e}")


def fmt_unipoly(u: UniPoly):
    return [fmt_value(c) for c in u.coeffs]


def parse_unipoly(arr) -> UniPoly:
    if not isinstance(arr, list):
        raise MalformedInput("polynomial must be a coefficient array")
    return UniPoly(tuple(parse_value(c) for c in arr))


def fmt_xpoly(F: XPoly):
    return [{"c": fmt_value(c), "e": {str(k): v for k, v in m}}
            for m, c in F.sorted_terms()]


def parse_xpoly(arr) -> XPoly:
    if not isinstance(arr, list):
        raise MalformedInput("xpoly must be a term array")
    terms = []
    for item in arr:
        if not isinstance(item, dict) or set(item) != {"c", "e"}:
            raise MalformedInput(f"bad xpoly term {item!r}")
        mono = tuple(sorted((int(k), int(v)) for k, v in item["e"].items()))
        terms.append((mono, parse_value(item["c"])))
    return XPoly(terms)


def serialize(doc) -> str:
    """Canonical text: sorted keys, no float anywhere."""
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def deserialize(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"parse error at line {e.lineno} column {e.colno}: {e.msg}")


# -- config -------------------------------------------------------------------

class JobConfig:
    def __init__(self, doc: dict):
        if not isinstance(doc, dict):
            raise MalformedInput("config must be an object")
        unknown = set(doc) - CONFIG_FIELDS
        if unknown:
            raise MalformedInput(f"unknown config fields: {sorted(unknown)}")
        if "p" not in doc or "g" not in doc:
            raise MalformedInput("config needs p and g")
        self.ctx = ValuedFieldCtx(doc["p"])
        self.g = parse_unipoly(doc["g"])
        branch = doc.get("branch", "unique")
        if branch != "unique":
            if not isinstance(branch, list) or not all(
                    isinstance(x, list) and len(x) == 2 for x in branch):
                raise MalformedInput("branch must be \"unique\" or a list of index pairs")
        self.branch = branch
        self.depth = doc.get("depth", 16)
        if not isinstance(self.depth, int) or self.depth < 1:
            raise MalformedInput("depth must be a positive integer")
        self.mode = doc.get("mode", "full")
        if self.mode not in ("full", "collapsed"):
            raise MalformedInput(f"unknown mode {self.mode!r}")
        self.payload = doc.get("payload", {})
        self.seed = doc.get("seed", 0)

    def chain(self) -> KeyChain:
        return build_chain(self.ctx, self.g, self.branch, self.depth, self.mode)


# -- document builders ----------------------------------------------------------

def chain_doc(chain: KeyChain) -> dict:
    seg = segment(chain)
    report = validate(chain)
    return {
        "status": chain.status,
        "mode": chain.mode,
        "entries": [{
            "position": e.position,
            "Q": fmt_unipoly(e.Q),
            "gamma": fmt_value(e.gamma),
            "a": fmt_value(e.a) if e.a is not None else None,
            "Qt": fmt_unipoly(e.Qt),
        } for e in chain.entries],
        "plateaus": [{
            "q": p.q, "degree": p.degree, "positions": list(p.positions),
            "first": p.first, "flag": p.flag,
        } for p in seg.plateaus],
        "n_plus": {str(k): v for k, v in seg.n_plus.items()},
        "successor_pairs": [{"i": i, "ell": str(ell), "kind": kind,
                             "level": seg.level(ell, i),
                             "neat": seg.is_neat_pair(ell, i)}
                            for (i, ell, kind) in seg.succ_pairs],
        "validation": [{"name": c.name, "subject": str(c.subject),
                        "passed": c.passed} for c in report],
        "validation_passed": validation_passed(report),
        "branch_log": [{"step": b.step, "factor_pick": b.factor_pick,
                        "slope_pick": b.slope_pick,
                        "n_factors": len(b.factor_options),
                        "n_slopes": len(b.slope_options)}
                       for b in chain.branch_log],
    }


def generator_doc(gen) -> dict:
    doc = {
        "kind": gen.kind,
        "target": str(gen.target),
        "source": gen.source,
        "b": fmt_value(gen.b),
        "Q": fmt_xpoly(gen.Q_poly),
        "level": gen.level,
    }
    if gen.relation_poly is not None:
        doc["relation"] = fmt_xpoly(gen.relation_poly)
    return doc


def present_doc(chain: KeyChain) -> dict:
    gens = ideal_generators(chain)
    doc = {
        "I1": [generator_doc(g) for g in gens.i1],
        "I2": [generator_doc(g) for g in gens.i2],
    }
    seg = segment(chain)
    final = seg.plateaus[-1]
    if final.flag == "truncated-infinite" and len(final.positions) >= 2:
        reds = []
        ps = final.positions
        for i, i2 in zip(ps, ps[1:]):
            c0, cof = redundancy_cofactor(chain, i, i2)
            reds.append({"i": i, "i_prime": i2, "c0": fmt_value(c0),
                         "cofactors": {str(t): fmt_xpoly(c) for t, c in cof.items()}})
        doc["redundancy"] = reds
    return doc


def run(command: str, config: JobConfig, trace: bool = False) -> dict:
    if command not in COMMANDS:
        raise MalformedInput(f"unknown command {command!r}")
    chain = config.chain()
    if command == "chain":
        return chain_doc(chain)
    if command == "present":
        return present_doc(chain)
    if command == "eval":
        f = parse_unipoly(_payload_field(config, "poly"))
        table = {}
        for i in chain.star_positions:
            table[str(i)] = fmt_value(truncate(chain, i, f))
        nu = chain.nu(f)
        return {"truncations": table, "nu": fmt_value(nu.value), "method": nu.method}
    if command == "expand":
        f = parse_unipoly(_payload_field(config, "poly"))
        anchor = _payload_field(config, "anchor")
        exp = full_expansion(chain, int(anchor), f)
        return {
            "anchor": exp.anchor,
            "terms": fmt_xpoly(exp.as_xpoly()),
            "nu_value": fmt_value(exp.nu_value),
            "index_tuple": list(exp.index_tuple),
        }
    if command in ("build", "reduce"):
        F = parse_xpoly(_payload_field(config, "xpoly"))
        steps = [] if trace else None
        if "pair" in config.payload:
            i, ell = config.payload["pair"]
            op = building if command == "build" else reduction
            out = op(chain, F, int(i), int(ell), steps)
            doc = {"result": fmt_xpoly(out)}
        elif command == "build":
            s = int(_payload_field(config, "s"))
            out = total_s_building(chain, F, s, steps)
            neat = is_neat(chain, out)
            doc = {"result": fmt_xpoly(out), "neat": neat.neat, "level": neat.level}
        else:
            out = total_reduction(chain, F, steps)
            doc = {"result": fmt_unipoly(out)}
        if trace:
            doc["trace"] = [{"pair": list(st.pair), "target": str(st.target),
                             "direction": st.direction,
                             "cofactor": fmt_xpoly(st.cofactor)} for st in steps]
        return doc
    if command == "member":
        F = parse_xpoly(_payload_field(config, "xpoly"))
        cert = membership(chain, F)
        return {
            "anchor": cert.anchor,
            "level": cert.level,
            "i2_poly": fmt_xpoly(cert.i2_poly),
            "i2_cofactor": fmt_xpoly(cert.i2_cofactor),
            "i1_parts": [{"target": t, "cofactor": fmt_xpoly(c)}
                         for t, c in cert.i1_parts],
            "denominators": [{"part": label, "lcm": d}
                             for label, d in cert.denominators],
        }
    if command == "check":
        return check_doc(chain, config)
    raise AssertionError


def _payload_field(config: JobConfig, name: str):
    if name not in config.payload:
        raise MalformedInput(f"payload field {name!r} missing")
    return config.payload[name]


def check_doc(chain: KeyChain, config: JobConfig) -> dict:
    """A compact property-suite report: validation, relation identities and
    seeded random probes of monotonicity and completeness."""
    rng = random.Random(config.seed)
    report = validate(chain)
    rels = check_relations(chain)
    mono_ok = 0
    mono_bad = 0
    probe_ok = 0
    probe_insufficient = 0
    degg = chain.g.degree
    for _ in range(25):
        f = UniPoly([rng.randrange(-64, 65) for _ in range(degg + 1)])
        if f.is_zero:
            continue
        vals = [truncate(chain, i, f) for i in chain.star_positions]
        nu = chain.nu(f).value
        seq = vals + [nu]
        if all(a <= b for a, b in zip(seq, seq[1:])):
            mono_ok += 1
        else:
            mono_bad += 1
        try:
            completeness_probe(chain, f)
            probe_ok += 1
        except MathRejection:
            probe_insufficient += 1
    return {
        "validation_passed": validation_passed(report),
        "relations_passed": all(c.passed for c in rels),
        "relation_checks": [{"kind": c.kind, "target": str(c.target),
                             "source": c.source, "passed": c.passed}
                            for c in rels],
        "monotonicity": {"ok": mono_ok, "violations": mono_bad},
        "completeness_probe": {"witnessed": probe_ok,
                               "insufficient_depth": probe_insufficient},
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="valring")
    ap.add_argument("--config", required=True)
    ap.add_argument("--command", required=True)
    ap.add_argument("--output")
    ap.add_argument("--trace", action="store_true")
    ap.add_argument("--seed", type=int)
    args = ap.parse_args(argv)
    try:
        with open(args.config) as fh:
            doc = deserialize(fh.read())
        config = JobConfig(doc)
        if args.seed is not None:
            config.seed = args.seed
        out = run(args.command, config, trace=args.trace)
        text = serialize(out)
        status = 0
    except MalformedInput as e:
        text = serialize({"error": e.reason, "message": str(e)})
        status = 1
    except MathRejection as e:
        text = serialize({"error": e.reason, "message": str(e)})
        status = 2
    except FileNotFoundError as e:
        text = serialize({"error": "malformed-input", "message": str(e)})
        status = 1
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
