"""Command-line surface for the diagram-to-topology pipeline.

Subcommands:

* ``validate <file>``: structural validation report.
* ``cover <file> --z0 Z --w0 W [-o OUT]``: branched double cover.
* ``homology <file> --flavor link|knot [--json]``: graded GF(2) homology.
* ``ss <file> --flavor link|knot [--pages N] [--json]``: localization
  spectral sequence pages (the file must carry involution data).
* ``murasugi --cover-poly P --quotient-poly Q --lambda L --p P --r R``:
  standalone congruence checker.
* ``report <quotient-file> <cover-file> [--lambda L]``: genus bound,
  fibredness transfer, and Thurston-norm bookkeeping.
* ``examples list`` / ``examples run <name>``: run the built-in
  pipelines and diff against their stored expected outputs.

Diagram arguments accept either a path or a built-in name.  JSON is the
single structured output format; exit code 0 means success, 1 a
computation or validation failure, 2 a usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from . import diagram as diag
from .complexes import differential, homology
from .errors import EquifloerError
from .invariants import (
    LaurentPoly,
    PeriodicityConfig,
    knot_polynomial_from_complex,
    murasugi_check,
    pin_absolute,
    pinned_homology,
    topology_report,
)
from .tate import grading_correspondence, involution_map, tate_pages

SCHEMA = "equifloer/1"


def _load_diagram(spec):
    names = {e["name"] for e in diag.builtin_index()}
    if spec in names:
        return diag.get_builtin(spec)
    try:
        with open(spec) as fh:
            text = fh.read()
    except OSError as exc:
        raise EquifloerError(f"cannot read {spec!r}: {exc.strerror}") from exc
    return diag.parse_diagram(text)


def _plain_diagram(obj):
    return obj.diagram if isinstance(obj, diag.EquivariantDiagram) else obj


def _equivariant(obj):
    if isinstance(obj, diag.EquivariantDiagram):
        return obj
    return diag.equivariant_from_diagram(obj)


def _emit(payload, as_json, human):
    if as_json:
        print(json.dumps(payload, indent=1, sort_keys=True, default=str))
    else:
        human(payload)


def _fmt_frac(v):
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else \
        f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# polynomial flag syntax: terms c*t^e joined by + and -, e integer or a
# half like 3/2; bare integers allowed
# ---------------------------------------------------------------------------

_TERM = re.compile(
    r"^(?:(?P<coeff>-?\d+)\s*\*?\s*)?"
    r"(?:t(?:\^(?P<exp>-?\d+(?:/2)?))?)?$")


def _split_terms(s):
    """Split on + and - at term boundaries (not inside exponents)."""
    chunks = []
    cur = ""
    for ch in s:
        if ch in "+-" and cur and cur[-1] not in "^/":
            chunks.append(cur)
            cur = ch
        else:
            cur += ch
    if cur:
        chunks.append(cur)
    return chunks


def parse_poly(text):
    s = text.replace(" ", "")
    if not s:
        raise EquifloerError("empty polynomial")
    chunks = _split_terms(s)
    coeffs = {}
    for chunk in chunks:
        sign = -1 if chunk.startswith("-") else 1
        body = chunk.lstrip("+-")
        m = _TERM.match(body)
        if not m or (m.group("coeff") is None and "t" not in body):
            raise EquifloerError(f"cannot parse polynomial term {chunk!r}")
        coeff = int(m.group("coeff") or 1) * sign
        if "t" in body:
            exp = Fraction(m.group("exp") or 1)
        else:
            exp = Fraction(0)
        key = (int(2 * exp),)
        coeffs[key] = coeffs.get(key, 0) + coeff
    return LaurentPoly(coeffs, ("t",))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args):
    d = _plain_diagram(_load_diagram(args.file))
    rep = diag.validate(d)
    payload = {"schema": SCHEMA, "name": d.name, **rep.as_dict()}

    def human(p):
        print(f"{d.name}: {'PASS' if p['passed'] else 'FAIL'}")
        for f in p["failures"]:
            print(f"  [{f['rule']}] {f['detail']}")

    _emit(payload, args.json, human)
    return 0 if rep.passed else 1


def cmd_cover(args):
    d = _plain_diagram(_load_diagram(args.file))
    eq = diag.branched_double_cover(d, args.z0, args.w0)
    text = eq.diagram.to_json()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.output}: {eq.diagram.point_count} intersections, "
              f"{len(eq.diagram.regions)} regions")
    else:
        print(text)
    return 0


def cmd_homology(args):
    d = _plain_diagram(_load_diagram(args.file))
    cx = differential(d, args.flavor)
    h = homology(cx)
    payload = {"schema": SCHEMA, "name": d.name, "flavor": args.flavor,
               "total_rank": h.total_rank, "blocks": h.as_payload(),
               "gradings": "relative to the lexicographically first generator"}

    def human(p):
        print(f"{d.name} ({args.flavor}): total rank {p['total_rank']}")
        for b in p["blocks"]:
            grad = ", ".join(f"A[{k}]={v}" for k, v in b["gradings"].items())
            print(f"  {grad}  M={b['maslov_rel']}  rank {b['rank']}")

    _emit(payload, args.json, human)
    return 0


def cmd_ss(args):
    obj = _load_diagram(args.file)
    eq = _equivariant(obj)
    cx = differential(eq.diagram, args.flavor)
    tau = involution_map(eq, cx)
    pages = tate_pages(cx, tau, r_max=args.pages)
    payload = {"schema": SCHEMA, "name": eq.diagram.name,
               "flavor": args.flavor,
               "pages": [p.as_payload() for p in pages]}

    def human(p):
        for page in p["pages"]:
            total = sum(b["rank"] for b in page["blocks"])
            line = f"E_{page['r']}: total rank {total}"
            if page["stabilized"]:
                line += "  (stabilized; E_infinity rank "
                line += f"{page['e_infinity_total']})"
            print(line)
            for b in page["blocks"]:
                print(f"   A=({', '.join(b['grading'])})  rank {b['rank']}"
                      f"  d_{page['r']} rank {b['d_r_rank']}")

    _emit(payload, args.json, human)
    return 0


def cmd_murasugi(args):
    cfg = PeriodicityConfig(q=args.p ** args.r, p=args.p, r=args.r,
                            lam=getattr(args, "lambda"))
    cover = parse_poly(args.cover_poly)
    quotient = parse_poly(args.quotient_poly)
    out = murasugi_check(cover, quotient, cfg)
    payload = {"schema": SCHEMA, "holds": out["holds"],
               "witness_shift": out["witness_shift"],
               "p": args.p, "q": cfg.q, "lambda": cfg.lam}

    def human(p):
        verdict = "holds" if p["holds"] else "FAILS"
        print(f"Murasugi congruence {verdict} (p={p['p']}, q={p['q']}, "
              f"lambda={p['lambda']}, shift={p['witness_shift']})")

    _emit(payload, args.json, human)
    return 0 if out["holds"] else 1


def _pair_pipeline(quotient, eq, lam):
    """Shared pipeline: homologies, pinning, pages, congruence, report."""
    cover = eq.diagram
    cfg = PeriodicityConfig(q=2, p=2, r=1, lam=lam)
    out = {"schema": SCHEMA, "quotient": quotient.name, "cover": cover.name,
           "lambda": lam}
    from .gradings import enumerate_generators

    out["generator_counts"] = {
        "quotient": len(enumerate_generators(quotient)),
        "cover": len(enumerate_generators(cover)),
    }
    data = {}
    for flavor in ("link", "knot"):
        cq = differential(quotient, flavor)
        hq = homology(cq)
        cc = differential(cover, flavor)
        hc = homology(cc)
        pin_q = pin_absolute(hq, cfg)
        pin_c = pin_absolute(hc, cfg)
        hq_p = pinned_homology(hq, pin_q)
        hc_p = pinned_homology(hc, pin_c)
        ccp = pin_c.apply_complex(cc)
        tau = involution_map(eq, ccp)
        pages = tate_pages(ccp, tau)
        corr = grading_correspondence(pages, hq_p, lam, flavor)
        data[flavor] = {"hq": hq_p, "hc": hc_p, "pages": pages, "cx_q": cq,
                        "cx_c": cc}
        out[flavor] = {
            "quotient_rank": hq.total_rank,
            "cover_rank": hc.total_rank,
            "pages": [p.as_payload() for p in pages],
            "correspondence": {
                "total_e_infinity": corr["total_e_infinity"],
                "total_quotient": corr["total_quotient"],
                "gradings": [
                    {"cover": [_fmt_frac(g) for g in row["cover_grading"]],
                     "quotient": [_fmt_frac(g) for g in row["quotient_grading"]],
                     "rank": row["rank"], "e1_rank": row["e1_rank"]}
                    for row in corr["gradings"]
                ],
            },
        }
    delta_c = knot_polynomial_from_complex(data["link"]["cx_c"], cfg)
    delta_q = knot_polynomial_from_complex(data["link"]["cx_q"], cfg)
    out["alexander"] = {
        "cover": repr(delta_c),
        "quotient": repr(delta_q),
        "murasugi": murasugi_check(delta_c, delta_q, cfg),
    }
    out["report"] = topology_report(
        data["knot"]["hc"], data["knot"]["hq"], data["knot"]["pages"], cfg,
        cover_link=data["link"]["hc"], quotient_link=data["link"]["hq"])
    return out


def _infer_lambda(quotient):
    """Linking number from the axis breadth of the quotient link homology.

    The axis Alexander breadth of the link homology is the Thurston
    norm of the axis dual plus one, which is the linking number when
    the axis is an unknot spanned by a punctured disk.
    """
    from .invariants import _breadth

    cq = differential(quotient, "link")
    hq = homology(cq)
    return int(_breadth(hq, cq.axis))


def cmd_report(args):
    quotient = _plain_diagram(_load_diagram(args.quotient))
    eq = _equivariant(_load_diagram(args.cover))
    if eq.quotient is None:
        eq.quotient = quotient
        eq.project_points = {p: p.rsplit("^", 1)[0]
                             for p in eq.diagram.intersections}
    lam = getattr(args, "lambda")
    if lam is None:
        lam = _infer_lambda(quotient)
    out = _pair_pipeline(quotient, eq, lam)

    def human(p):
        rep = p["report"]
        print(f"{p['cover']} over {p['quotient']} (lambda = {p['lambda']})")
        print(f"  genus: cover {rep['genus_cover']}, "
              f"quotient {rep['genus_quotient']}")
        ed = rep["edmonds"]
        print(f"  genus bound 2g + (lambda-1)/2 = {ed['bound']}: "
              f"{'holds' if ed['holds'] else 'FAILS'}"
              f"{' (sharp)' if ed['sharp'] else ''}")
        print(f"  fibred: cover {rep['fibred_cover']}, "
              f"quotient {rep['fibred_quotient']}")
        mur = p["alexander"]["murasugi"]
        print(f"  Delta cover {p['alexander']['cover']}; quotient "
              f"{p['alexander']['quotient']}; congruence "
              f"{'holds' if mur['holds'] else 'FAILS'}")
        for bad in rep["inconsistencies"]:
            print(f"  INCONSISTENT: {bad}")

    _emit(out, args.json, human)
    return 0 if not out["report"]["inconsistencies"] else 1


def _expected_payload(name):
    from importlib.resources import files

    return files("equifloer.data").joinpath(f"expected/{name}.json").read_text()


def cmd_examples(args):
    pairs = sorted({e["pair"] for e in diag.builtin_index()})
    if args.action == "list":
        for e in diag.builtin_index():
            print(f"{e['name']:18} {e['kind']:9} pair={e['pair']} "
                  f"lambda={e['lambda']}")
        return 0
    name = args.name
    if name not in pairs:
        raise EquifloerError(f"unknown example {name!r}; pairs: {pairs}")
    entry = {e["kind"]: e for e in diag.builtin_index() if e["pair"] == name}
    quotient = diag.get_builtin(entry["quotient"]["name"])
    eq = diag.get_builtin(entry["cover"]["name"])
    out = _pair_pipeline(quotient, eq, entry["cover"]["lambda"])
    got = json.dumps(out, indent=1, sort_keys=True, default=str)
    expected = _expected_payload(name).strip()
    if got.strip() != expected:
        print(got)
        print(f"MISMATCH against stored expected output for {name!r}",
              file=sys.stderr)
        return 1
    knot = out["knot"]
    ranks = [sum(b["rank"] for b in p["blocks"]) for p in knot["pages"]]
    print(f"{name}: generators {out['generator_counts']}, knot-flavor page "
          f"ranks {ranks}, E_infinity {knot['correspondence']['total_e_infinity']}"
          f" -- matches stored golden output")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="equifloer",
        description="Link Floer homology of doubly-periodic knots: "
                    "equivariant diagrams, localization spectral sequence, "
                    "and classical corollaries.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check diagram invariants")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("cover", help="branched double cover over z0/w0")
    p.add_argument("file")
    p.add_argument("--z0", required=True)
    p.add_argument("--w0", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_cover)

    p = sub.add_parser("homology", help="graded GF(2) homology")
    p.add_argument("file")
    p.add_argument("--flavor", choices=("link", "knot"), required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_homology)

    p = sub.add_parser("ss", help="localization spectral sequence")
    p.add_argument("file")
    p.add_argument("--flavor", choices=("link", "knot"), required=True)
    p.add_argument("--pages", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_ss)

    p = sub.add_parser("murasugi", help="mod-p Alexander congruence")
    p.add_argument("--cover-poly", required=True)
    p.add_argument("--quotient-poly", required=True)
    p.add_argument("--lambda", dest="lambda", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_murasugi)

    p = sub.add_parser("report", help="genus/fibredness report for a pair")
    p.add_argument("quotient")
    p.add_argument("cover")
    p.add_argument("--lambda", dest="lambda", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("examples", help="golden example pipelines")
    p.add_argument("action", choices=("list", "run"))
    p.add_argument("name", nargs="?")
    p.set_defaults(fn=cmd_examples)

    return ap


def run(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except EquifloerError as exc:
        print(f"error: {exc.tag}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file-not-found: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
