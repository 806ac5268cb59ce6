"""Command line front end and the text file format.

File grammar (line oriented, ``#`` starts a comment, indices are 1-based)::

    lla p=5 c=2 dim=3
    labels a b c
    levels 2 1 1
    bracket 2 3 -> 1:1

``flag <i> : <row> <row> ...`` (rows written ``1,0,2``) may replace ``levels``.
Bilinear structures use a sibling block::

    bilinear p=5 dimv=2 dimw=1
    beta 1 2 -> 1:1

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error, 3 undecided.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import gfp
from .amalgam import AmalgamInvariantError, amalgam_violations, amalgamate, is_embedding
from .free_lie import free_lla
from .lla import Lla, LlaError, LlaHom, SearchRefused, from_levels, validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


class FormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


# -- Lla files ---------------------------------------------------------------------------------

@dataclass
class LlaFile:
    algebra: Lla
    comments: list[str] = field(default_factory=list)


def _header(parts: list[str], keys: Sequence[str], lineno: int) -> dict[str, int]:
    out = {}
    for tok in parts:
        if "=" not in tok:
            raise FormatError(lineno, f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        if k not in keys:
            raise FormatError(lineno, f"unknown header key {k!r}")
        try:
            out[k] = int(v)
        except ValueError:
            raise FormatError(lineno, f"{k} must be an integer") from None
    missing = [k for k in keys if k not in out]
    if missing:
        raise FormatError(lineno, f"header is missing {', '.join(missing)}")
    return out


def _terms(toks: list[str], dim: int, lineno: int) -> tuple[int, ...]:
    v = [0] * dim
    for tok in toks:
        try:
            k, x = tok.split(":")
            k, x = int(k), int(x)
        except ValueError:
            raise FormatError(lineno, f"bad term {tok!r}, expected index:coeff") from None
        if not 1 <= k <= dim:
            raise FormatError(lineno, f"index {k} out of range 1..{dim}")
        v[k - 1] += x
    return tuple(v)


def _row(tok: str, dim: int, lineno: int) -> tuple[int, ...]:
    try:
        r = tuple(int(x) for x in tok.split(","))
    except ValueError:
        raise FormatError(lineno, f"bad row {tok!r}") from None
    if len(r) != dim:
        raise FormatError(lineno, f"row {tok!r} has length {len(r)}, expected {dim}")
    return r


def _split_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        yield lineno, raw, line


def parse_lla(text: str) -> LlaFile:
    head = None
    comments: list[str] = []
    labels = levels = None
    flags: dict[int, list] = {}
    brackets: dict[tuple[int, int], tuple[int, ...]] = {}
    for lineno, raw, line in _split_lines(text):
        if not line:
            if head is None and raw.strip().startswith("#"):
                comments.append(raw.rstrip())
            continue
        word, *rest = line.split()
        if head is None:
            if word != "lla":
                raise FormatError(lineno, "file must start with an 'lla' header")
            head = _header(rest, ("p", "c", "dim"), lineno)
            try:
                gfp.check_modulus(head["p"])
            except ValueError as exc:
                raise FormatError(lineno, str(exc)) from None
            continue
        dim, c = head["dim"], head["c"]
        if word == "labels":
            if len(rest) != dim:
                raise FormatError(lineno, f"expected {dim} labels")
            labels = rest
        elif word == "levels":
            if flags:
                raise FormatError(lineno, "levels and flag lines conflict")
            try:
                levels = [int(x) for x in rest]
            except ValueError:
                raise FormatError(lineno, "levels must be integers") from None
            if len(levels) != dim or any(not 1 <= x <= c for x in levels):
                raise FormatError(lineno, f"expected {dim} levels in 1..{c}")
        elif word == "flag":
            if levels is not None:
                raise FormatError(lineno, "levels and flag lines conflict")
            if len(rest) < 2 or rest[1] != ":":
                raise FormatError(lineno, "expected 'flag <i> : <rows>'")
            try:
                i = int(rest[0])
            except ValueError:
                raise FormatError(lineno, "flag index must be an integer") from None
            if not 1 <= i <= c + 1:
                raise FormatError(lineno, f"flag index must lie in 1..{c + 1}")
            flags[i] = [_row(t, dim, lineno) for t in rest[2:]]
        elif word == "bracket":
            if len(rest) < 3 or rest[2] != "->":
                raise FormatError(lineno, "expected 'bracket <i> <j> -> <k>:<c> ...'")
            try:
                i, j = int(rest[0]), int(rest[1])
            except ValueError:
                raise FormatError(lineno, "bracket indices must be integers") from None
            if not (1 <= i < j <= dim):
                raise FormatError(lineno, f"need 1 <= i < j <= {dim}")
            if (i, j) in brackets:
                raise FormatError(lineno, f"bracket {i} {j} given twice")
            brackets[(i, j)] = _terms(rest[3:], dim, lineno)
        else:
            raise FormatError(lineno, f"unknown keyword {word!r}")
    if head is None:
        raise FormatError(0, "empty file")
    p, c, dim = head["p"], head["c"], head["dim"]
    sc = {(i - 1, j - 1): v for (i, j), v in brackets.items()}
    try:
        if levels is not None:
            L = from_levels(p, c, dim, sc, levels, labels)
        elif flags:
            fl = [flags.get(i, []) for i in range(1, c + 2)]
            if 1 not in flags:
                fl[0] = gfp.identity(dim)
            L = Lla(p, c, dim, sc, fl, labels)
        else:
            L = Lla(p, c, dim, sc, None, labels)
    except LlaError as exc:
        raise FormatError(0, str(exc)) from None
    return LlaFile(L, comments)


def _levels_of(L: Lla) -> list[int] | None:
    """Per-basis-vector levels when every P_i is spanned by basis vectors."""
    levels = [L.level(e) for e in L.basis()]
    if any(x > L.c for x in levels):
        return None
    for i in range(1, L.c + 2):
        want = [gfp.unit(k, L.dim) for k in range(L.dim) if levels[k] >= i]
        if gfp.span(want, L.p) != L.P(i):
            return None
    return levels


def _fmt_terms(v: Sequence[int]) -> str:
    return " ".join(f"{k + 1}:{x}" for k, x in enumerate(v) if x)


def serialize_lla(obj: Lla | LlaFile) -> str:
    f = obj if isinstance(obj, LlaFile) else LlaFile(obj)
    L = f.algebra
    lines = list(f.comments)
    lines.append(f"lla p={L.p} c={L.c} dim={L.dim}")
    if L.labels != [f"e{k + 1}" for k in range(L.dim)]:
        lines.append("labels " + " ".join(L.labels))
    levels = _levels_of(L)
    if levels is not None:
        if L.dim:
            lines.append("levels " + " ".join(map(str, levels)))
    else:
        for i in range(2, L.c + 1):
            rows = " ".join(",".join(map(str, r)) for r in L.P(i))
            lines.append(f"flag {i} : {rows}".rstrip())
    for (i, j) in sorted(L.sc):
        lines.append(f"bracket {i + 1} {j + 1} -> {_fmt_terms(L.sc[(i, j)])}")
    return "\n".join(lines) + "\n"


def read_lla(path: str) -> LlaFile:
    with open(path, encoding="utf-8") as fh:
        return parse_lla(fh.read())


# -- bilinear blocks ---------------------------------------------------------------------------

def parse_bilinear(text: str):
    from .nil2 import BilinearStruct, Nil2Error

    head = None
    beta = {}
    for lineno, _, line in _split_lines(text):
        if not line:
            continue
        word, *rest = line.split()
        if head is None:
            if word != "bilinear":
                raise FormatError(lineno, "file must start with a 'bilinear' header")
            head = _header(rest, ("p", "dimv", "dimw"), lineno)
            continue
        if word != "beta" or len(rest) < 3 or rest[2] != "->":
            raise FormatError(lineno, "expected 'beta <i> <j> -> <k>:<c> ...'")
        try:
            i, j = int(rest[0]), int(rest[1])
        except ValueError:
            raise FormatError(lineno, "beta indices must be integers") from None
        if not 1 <= i < j <= head["dimv"]:
            raise FormatError(lineno, f"need 1 <= i < j <= {head['dimv']}")
        beta[(i - 1, j - 1)] = _terms(rest[3:], head["dimw"], lineno)
    if head is None:
        raise FormatError(0, "empty file")
    try:
        return BilinearStruct(head["p"], head["dimv"], head["dimw"], beta)
    except (Nil2Error, ValueError) as exc:
        raise FormatError(0, str(exc)) from None


def serialize_bilinear(B) -> str:
    lines = [f"bilinear p={B.p} dimv={B.dim_v} dimw={B.dim_w}"]
    for (i, j) in sorted(B.beta):
        lines.append(f"beta {i + 1} {j + 1} -> {_fmt_terms(B.beta[(i, j)])}")
    return "\n".join(lines) + "\n"


# -- reporting ---------------------------------------------------------------------------------

class Report:
    def __init__(self, out):
        self.out = out
        self.checks: list[dict] = []
        self.data: dict = {}

    def say(self, text: str = "") -> None:
        print(text, file=self.out)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append({"name": name, "ok": bool(ok), "detail": detail})
        self.say(f"{'ok  ' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
        return ok

    @property
    def failed(self) -> bool:
        return any(not c["ok"] for c in self.checks)

    def write(self, path: str | None, status: str, code: int) -> None:
        if not path:
            return
        doc = {"status": status, "exit_code": code, "checks": self.checks, "data": self.data}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _emit(text: str, path: str | None, rep: Report) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep.say(f"wrote {path}")
    else:
        rep.out.write(text)


def _parse_rows(text: str | None, ncols: int) -> list[tuple[int, ...]] | None:
    if text is None:
        return None
    rows = [r for r in text.split(";") if r.strip()]
    out = []
    for r in rows:
        v = tuple(int(x) for x in r.split(","))
        if len(v) != ncols:
            raise ValueError(f"row {r!r} should have {ncols} entries")
        out.append(v)
    return out


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


# -- subcommands -------------------------------------------------------------------------------

def cmd_free(args, rep: Report) -> int:
    alpha = _int_list(args.alpha)
    if len(alpha) != args.n:
        raise ValueError(f"expected {args.n} weights, got {len(alpha)}")
    L = free_lla(args.n, alpha, args.c, args.p)
    rep.data["dim"] = L.dim
    _emit(serialize_lla(L), args.output, rep)
    return EXIT_OK


def _trace_lines(r, indent: str = "") -> list[str]:
    from .amalgam import Stage1Trace, Stage2Trace, Stage3Trace

    tr = r.trace
    out = [f"{indent}{r.kind}: dim S = {r.S.dim}"]
    if isinstance(tr, Stage1Trace):
        extra = f", {tr.degenerate}" if tr.degenerate else ""
        out[-1] += f", levels ({tr.alpha}, {tr.beta}), base dim {tr.base_dim}{extra}"
    elif isinstance(tr, Stage2Trace):
        out[-1] += f", mu={tr.mu} nu={tr.nu} rank={tuple(tr.rank_in)} ending {tr.ending or '-'}"
        for name, i, got, want in tr.gains:
            out.append(f"{indent}  lev({name})_{i} = {got} >= {want}")
        for st in tr.steps:
            out.extend(_trace_lines(st.child, indent + "  "))
        if tr.final is not None:
            out.extend(_trace_lines(tr.final, indent + "  "))
    elif isinstance(tr, Stage3Trace):
        for ch in tr.children:
            out.extend(_trace_lines(ch, indent + "  "))
    return out


def _inclusion(C: Lla, T: Lla, text: str | None) -> LlaHom:
    rows = _parse_rows(text, T.dim)
    if rows is None:
        if C.dim > T.dim:
            raise ValueError("the common substructure is larger than a factor")
        rows = [gfp.unit(k, T.dim) for k in range(C.dim)]
    if len(rows) != C.dim:
        raise ValueError(f"expected {C.dim} image rows")
    return LlaHom(C, T, rows)


def cmd_amalgamate(args, rep: Report) -> int:
    A, B, C = (read_lla(x).algebra for x in (args.A, args.B, args.over))
    iA, iB = _inclusion(C, A, args.into_a), _inclusion(C, B, args.into_b)
    for f, name in ((iA, "C -> A"), (iB, "C -> B")):
        if not rep.check(f"{name} is an embedding", is_embedding(f)):
            return EXIT_FAIL
    r = amalgamate(A, B, iA, iB, check=False)
    problems = amalgam_violations(r)
    rep.check("amalgam invariants", not problems, "; ".join(problems))
    rep.data.update({"dim": r.S.dim, "kind": r.kind})
    trace = _trace_lines(r)
    if args.trace:
        for line in trace:
            rep.say("# " + line)
    _emit(serialize_lla(r.S), args.output, rep)
    return EXIT_FAIL if rep.failed else EXIT_OK


def cmd_lazard(args, rep: Report) -> int:
    from .lazard import bch, discrepancy_in_P3, group_of, lie_of
    from .nil2 import group_axioms

    if args.action == "bch":
        c, p = int(args.target[0]), int(args.target[1])
        rep.say(str(bch(c, p)))
        return EXIT_OK
    L = read_lla(args.target[0]).algebra
    if L.c >= L.p:
        raise ValueError("the correspondence needs c < p")
    rng = random.Random(args.seed)
    G = group_of(L)
    rep.check("lie_of(group_of(L)) = L", lie_of(G) == L)
    if L.p ** L.dim <= 125:
        els = list(G.elements())
    else:
        els = [tuple(rng.randrange(L.p) for _ in range(L.dim)) for _ in range(min(args.samples, 20))]
    bad = group_axioms(G, els)
    rep.check("group axioms and exponent p", not bad, "; ".join(bad[:3]))
    pairs = [(tuple(rng.randrange(L.p) for _ in range(L.dim)),
              tuple(rng.randrange(L.p) for _ in range(L.dim))) for _ in range(args.samples)]
    rep.check("commutator minus bracket lies in P_3",
              all(discrepancy_in_P3(G, a, b) for a, b in pairs))
    return EXIT_FAIL if rep.failed else EXIT_OK


def cmd_verify(args, rep: Report) -> int:
    from .lazard import discrepancy_in_P3, group_of, lie_of
    from .lla import der_laz, hom_check, identity_hom, Violation

    L = read_lla(args.file).algebra
    v = validate(L)
    rep.check("structure (Jacobi and flag)", v is None, str(v) if v else "")
    if v is not None:
        return EXIT_FAIL
    rep.check("identity is an embedding", is_embedding(identity_hom(L)))
    D = der_laz(L)
    inner = [L.ad(e) for e in L.basis()]
    rep.check("inner derivations are Lazard derivations",
              all(D.contains(d) for d in inner) if L.c >= 2 else True)
    rep.check("derivation algebra is valid", validate(D.algebra) is None)
    if 1 <= L.c < L.p:
        rng = random.Random(args.seed)
        G = group_of(L)
        rep.check("Lazard round trip", lie_of(G) == L)
        pairs = [(tuple(rng.randrange(L.p) for _ in range(L.dim)),
                  tuple(rng.randrange(L.p) for _ in range(L.dim))) for _ in range(args.samples)]
        rep.check("commutator minus bracket lies in P_3",
                  all(discrepancy_in_P3(G, a, b) for a, b in pairs))
    rep.data["flag_dims"] = list(L.flag_dims())
    return EXIT_FAIL if rep.failed else EXIT_OK


def cmd_witness(args, rep: Report) -> int:
    from . import witnesses as W

    if args.kind == "sop3":
        inst = W.build_sop3(args.n, args.p)
        rep.check("SOP3 algebra is valid", validate(inst.V) is None)
        for k in range(args.n):
            r = W.sop3_claim1(inst, k)
            rep.check(f"claim 1, k={k}", r.ok,
                      ", ".join(name for name, ok in r.equations if not ok))
        for i in range(args.n):
            for j in range(i + 1, args.n):
                ref = W.sop3_claim2(inst, i, j)
                rep.check(f"claim 2, i={i} j={j}", ref.contradiction, ref.reason)
                if args.verbose:
                    for line in ref.lines():
                        rep.say("    " + line)
        if args.output:
            _emit(serialize_lla(inst.V), args.output, rep)
    elif args.kind == "ip":
        X = [_int_list(t) for t in (args.X or "").split(";") if t.strip()]
        ip = W.build_ip_witness(args.c, args.p, args.m, X)
        for t, van in sorted(ip.vanishing.items()):
            rep.check(f"tuple {t}: vanishes={van}", van == (t in ip.X))
        rep.data["dim"] = ip.quotient.dim
        if args.output:
            _emit(serialize_lla(ip.quotient), args.output, rep)
    else:
        if args.kind == "heisenberg":
            L = W.heisenberg_gadget(args.i, args.j, args.c, args.p)
        else:
            L = W.level_raiser(args.n, args.c, args.p)
        rep.check("gadget is valid", validate(L) is None)
        _emit(serialize_lla(L), args.output, rep)
    return EXIT_FAIL if rep.failed else EXIT_OK


def cmd_generic(args, rep: Report) -> int:
    from . import witnesses as W
    from .lla import abelian

    L = read_lla(args.start).algebra if args.start else abelian(args.p, args.c, 0)
    for r in range(1, args.rounds + 1):
        res = W.generic_round(L, args.budget, ceiling=args.iso_ceiling)
        L = res.L
        ok = validate(L) is None and is_embedding(res.inclusion)
        rep.check(f"round {r}: dim {L.dim}, witnessed {len(res.witnessed)}, added {len(res.added)}", ok)
    if L.c == 2:
        ax = W.t2p_axiom_check(L, random.Random(args.seed), args.samples)
        rep.check(f"extension axioms ({ax})", not ax.violated, "; ".join(ax.violated[:3]))
        rep.data["pending"] = len(ax.pending)
    rep.data["dim"] = L.dim
    if args.output:
        _emit(serialize_lla(L), args.output, rep)
    return EXIT_FAIL if rep.failed else EXIT_OK


def cmd_nil2(args, rep: Report) -> int:
    from . import nil2 as N

    if args.action == "roundtrip":
        with open(args.file, encoding="utf-8") as fh:
            B = parse_bilinear(fh.read())
        G = N.group_from_bilinear(B)
        small = B.p ** (B.dim_v + B.dim_w) <= 125
        bad = N.group_axioms(G) if small else N.group_axioms(G, G.generators())
        rep.check("group axioms", not bad, "; ".join(bad[:3]))
        F = N.functor_F(G)
        fV = gfp.identity(B.dim_v)
        fW = [gfp.vscale(-1, e, B.p) for e in gfp.identity(B.dim_w)]
        rep.check("F(G(B)) is isomorphic to B", N.bilinear_isomorphism(B, F.bilinear, fV, fW))
        rep.say(serialize_bilinear(F.bilinear).rstrip())
    else:
        from .lazard import group_of

        L = read_lla(args.file).algebra
        if L.c != 2:
            raise ValueError("functor needs a class-2 algebra")
        G = group_of(L)
        F = N.functor_F(G, L.P(2))
        B, _, _ = N.bilinear_of_lla(L)
        rep.check("F(group) agrees with the bracket form", F.bilinear == B)
        rep.say(serialize_bilinear(F.bilinear).rstrip())
    return EXIT_FAIL if rep.failed else EXIT_OK


# -- argument parsing --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--iso-ceiling", type=int, default=8)
    common.add_argument("--samples", type=int, default=50)
    common.add_argument("--report", help="write a JSON summary here")

    ap = argparse.ArgumentParser(prog="lazlie", parents=[common],
                                 description="Lazard Lie algebras over prime fields")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("free", parents=[common], help="free nilpotent algebra on a Hall basis")
    s.add_argument("n", type=int)
    s.add_argument("alpha", help="comma separated generator levels")
    s.add_argument("c", type=int)
    s.add_argument("p", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_free)

    s = sub.add_parser("amalgamate", parents=[common], help="free amalgam of A and B over C")
    s.add_argument("A")
    s.add_argument("B")
    s.add_argument("--over", required=True)
    s.add_argument("--into-a", help="images of C's basis in A, rows separated by ';'")
    s.add_argument("--into-b", help="images of C's basis in B")
    s.add_argument("--trace", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_amalgamate)

    s = sub.add_parser("lazard", parents=[common], help="BCH data or a round trip through the group")
    s.add_argument("action", choices=["bch", "round-trip"])
    s.add_argument("target", nargs="+", help="'c p' for bch, a file for round-trip")
    s.set_defaults(func=cmd_lazard)

    s = sub.add_parser("verify", parents=[common], help="run the invariant battery on a file")
    s.add_argument("suite", choices=["suite"])
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("witness", parents=[common], help="explicit witness algebras")
    s.add_argument("kind", choices=["sop3", "ip", "heisenberg", "raiser"])
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--c", type=int, default=2)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--i", type=int, default=1)
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--X", help="tuples separated by ';', entries by ','")
    s.add_argument("--verbose", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("generic", parents=[common], help="bounded saturation rounds")
    s.add_argument("--rounds", type=int, default=1)
    s.add_argument("--budget", type=int, default=2)
    s.add_argument("--c", type=int, default=2)
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--start")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_generic)

    s = sub.add_parser("nil2", parents=[common], help="class-2 groups and bilinear maps")
    s.add_argument("action", choices=["roundtrip", "functor"])
    s.add_argument("file")
    s.set_defaults(func=cmd_nil2)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    rep = Report(out)
    try:
        code = args.func(args, rep)
    except SearchRefused as exc:
        rep.say(f"undecided: {exc}")
        code = EXIT_UNDECIDED
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except AmalgamInvariantError as exc:
        rep.check("amalgam construction", False, str(exc))
        code = EXIT_FAIL
    status = {EXIT_OK: "ok", EXIT_FAIL: "violation", EXIT_USAGE: "usage",
              EXIT_UNDECIDED: "undecided"}[code]
    rep.write(getattr(args, "report", None), status, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
