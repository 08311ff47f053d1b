"""Command line driver: run a script, print one report per command.

Output goes to stdout (or --out) and is byte-deterministic; timing and
diagnostics go to stderr.  Exit codes: 0 success, 1 parse error,
2 capability error (the backend cannot do it exactly), 3 domain error
(well-formed input outside an operation's domain), 4 internal error.
"""

import argparse
import json
import sys
import time

from . import parser as _parser
from .errors import CapabilityError, DomainError, ParseError
from .linalg import TauSubmodule, diagonalize, hermite
from .varieties import (annihilator_of_points, intersect_varieties, quotient,
                        sum_varieties, zeros)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CAPABILITY = 2
EXIT_DOMAIN = 3
EXIT_INTERNAL = 4

_FLAG_NAMES = ("a_in_ker_delta", "bad_prime_suspected",
               "lifted_to_perfect_closure")


def _mat_strs(mat):
    return [[str(e) for e in row] for row in mat.rows]


def _vec_strs(vec):
    return [str(x) for x in vec]


def _variety_summary(V):
    return {
        "ambient": V.n,
        "field": str(V.desc),
        "dimension": V.dimension,
        "finite_part_dim": V.finite_part_dim,
        "irreducible": V.is_irreducible,
        "vanishing_basis": _mat_strs(V.module.basis()),
    }


def _flags(lifted=False, a_in_ker_delta=False, bad_prime_suspected=False):
    return {
        "a_in_ker_delta": a_in_ker_delta,
        "bad_prime_suspected": bad_prime_suspected,
        "lifted_to_perfect_closure": lifted,
    }


def _run_diag(cmd):
    (_, mat), = cmd.args["args"]
    dd = diagonalize(mat)
    result = {
        "diagonal": _vec_strs(dd.diagonal()),
        "rank": dd.rank,
        "U": _mat_strs(dd.U),
        "U_inv": _mat_strs(dd.U_inv),
        "V": _mat_strs(dd.V),
        "V_inv": _mat_strs(dd.V_inv),
        "field": str(dd.desc),
    }
    return result, _flags(lifted=dd.lifted)


def _run_hermite(cmd):
    (_, mat), = cmd.args["args"]
    H, T = hermite(mat)
    return {"H": _mat_strs(H), "T": _mat_strs(T)}, _flags()


def _run_radical(cmd):
    (_, mat), = cmd.args["args"]
    sat = TauSubmodule(mat).saturate()
    result = {"generators": _mat_strs(sat.basis()), "field": str(sat.desc)}
    return result, _flags(lifted=sat.desc != mat.desc)


def _run_zeros(cmd):
    (_, mat), = cmd.args["args"]
    V = zeros(mat)
    return _variety_summary(V), _flags(lifted=V.lifted)


def _run_annihilator(cmd, desc):
    (_, pts), = cmd.args["args"]
    if not pts:
        raise DomainError("annihilator needs at least one point")
    mod = annihilator_of_points(desc, pts, len(pts[0]))
    return ({"ambient": mod.n, "generators": _mat_strs(mod.basis())},
            _flags())


def _run_dim(cmd):
    (_, V), = cmd.args["args"]
    result = {
        "dimension": V.dimension,
        "finite_part_dim": V.finite_part_dim,
        "rank": V.rank,
        "irreducible": V.is_irreducible,
    }
    return result, _flags(lifted=V.lifted)


def _run_tangent(cmd):
    (_, V), = cmd.args["args"]
    basis = V.tangent_space()
    return ({"dimension": len(basis), "basis": [_vec_strs(v) for v in basis]},
            _flags(lifted=V.lifted))


def _run_image(cmd):
    (_, f), = cmd.args["args"]
    W = f.image()
    return _variety_summary(W), _flags(lifted=W.lifted)


def _run_kernel(cmd):
    (_, f), = cmd.args["args"]
    W = f.kernel()
    return _variety_summary(W), _flags(lifted=W.lifted)


def _run_preimage(cmd):
    (_, f), (_, Z) = cmd.args["args"]
    W = f.preimage(Z)
    return _variety_summary(W), _flags(lifted=W.lifted)


def _run_sum(cmd):
    (_, a), (_, b) = cmd.args["args"]
    W = sum_varieties(a, b)
    return _variety_summary(W), _flags(lifted=W.lifted)


def _run_intersect(cmd):
    (_, a), (_, b) = cmd.args["args"]
    W = intersect_varieties(a, b)
    return _variety_summary(W), _flags(lifted=W.lifted)


def _run_quotient(cmd):
    (_, V), (_, U) = cmd.args["args"]
    Q, pi = quotient(V, U)
    result = _variety_summary(Q)
    result["projection"] = _mat_strs(pi.matrix)
    return result, _flags(lifted=Q.lifted)


def _run_separable(cmd):
    (kind, obj), = cmd.args["args"]
    if kind == "ore":
        return {"separable": obj.is_separable}, _flags()
    return {"separable": obj.is_separable()}, _flags()


def _run_torsion(cmd):
    m = cmd.args["module"]
    rep = m.torsion(cmd.args["a"])
    result = {
        "a": str(rep.a),
        "finite": rep.is_finite,
        "dim_fq": rep.dim_fq,
        "kernel": _variety_summary(rep.variety),
    }
    return result, _flags(lifted=rep.lifted,
                          a_in_ker_delta=rep.a_in_ker_delta,
                          bad_prime_suspected=rep.bad_prime_suspected)


def _run_torsionpoints(cmd):
    m = cmd.args["module"]
    pts, factors = m.torsion_points(cmd.args["a"])
    rendered = sorted(_vec_strs(p) for p in pts)
    result = {
        "a": str(cmd.args["a"]),
        "count": len(pts),
        "points": rendered,
        "invariant_factors": [str(f) for f in factors],
        "field": str(pts[0][0].desc) if pts and pts[0] else str(m.desc),
    }
    return result, _flags()


def _run_rank(cmd):
    m = cmd.args["module"]
    rr = m.rank(cmd.args.get("budget"))
    result = {
        "rank": rr.rank,
        "estimates": [{"prime": str(pi), "estimate": e}
                      for pi, e in rr.estimates],
        "bad_primes": [str(pi) for pi in rr.bad_primes],
        "method": rr.method,
    }
    return result, _flags(bad_prime_suspected=bool(rr.bad_primes))


def _run_tate(cmd):
    m = cmd.args["module"]
    tr = m.tate_check(cmd.args["pi"], cmd.args["n"])
    result = {
        "prime": str(tr.prime),
        "n_max": tr.n_max,
        "rank": tr.rank,
        "dims": list(tr.dims),
        "ok": tr.ok,
    }
    return result, _flags()


def _run_jacobian(cmd):
    m = cmd.args["module"]
    J = m.jacobian(cmd.args["H"])
    return _variety_summary(J), _flags(lifted=J.lifted)


def _run_gmax(cmd):
    m = cmd.args["module"]
    G = m.g_max(cmd.args["H"])
    result = _variety_summary(G)
    result["sufficiently_generic"] = (G.dimension == 0
                                      and G.finite_part_dim == 0)
    return result, _flags(lifted=G.lifted)


_RUNNERS = {
    "diag": _run_diag,
    "hermite": _run_hermite,
    "radical": _run_radical,
    "zeros": _run_zeros,
    "dim": _run_dim,
    "tangent": _run_tangent,
    "image": _run_image,
    "kernel": _run_kernel,
    "preimage": _run_preimage,
    "sum": _run_sum,
    "intersect": _run_intersect,
    "quotient": _run_quotient,
    "separable": _run_separable,
    "torsion": _run_torsion,
    "torsionpoints": _run_torsionpoints,
    "rank": _run_rank,
    "tate": _run_tate,
    "jacobian": _run_jacobian,
    "gmax": _run_gmax,
}


def run_script(text, clock=None):
    """Parse and execute a script; returns the document to be printed.

    Raises ParseError / CapabilityError / DomainError / AlgebraError;
    the command line wrapper maps those to exit codes.  ``clock``
    receives (command echo, seconds) per command when given.
    """
    script = _parser.parse(text)
    reports = []
    for cmd in script.commands:
        start = time.perf_counter()
        if cmd.name == "annihilator":
            result, flags = _run_annihilator(cmd, script.desc)
        else:
            result, flags = _RUNNERS[cmd.name](cmd)
        if clock is not None:
            clock(cmd.echo, time.perf_counter() - start)
        for name in _FLAG_NAMES:
            assert name in flags
        reports.append({"command": cmd.echo, "flags": flags,
                        "result": result})
    return {"schema": 1, "field": str(script.desc), "reports": reports}


def render_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_text(doc):
    lines = [f"field {doc['field']}"]
    for rep in doc["reports"]:
        lines.append("")
        lines.append(f"== {rep['command']}")
        body = dict(rep["result"])
        for name in _FLAG_NAMES:
            if rep["flags"][name]:
                body[f"flag:{name}"] = True
        for key in sorted(body):
            val = body[key]
            if isinstance(val, list) and val and isinstance(val[0], list):
                lines.append(f"{key}:")
                for row in val:
                    lines.append("  [" + ", ".join(str(x) for x in row) + "]")
            elif isinstance(val, list):
                lines.append(f"{key}: [" + ", ".join(
                    json.dumps(x) if isinstance(x, str) else str(x)
                    for x in val) + "]")
            elif isinstance(val, dict):
                lines.append(f"{key}:")
                for k2 in sorted(val):
                    lines.append(f"  {k2}: {json.dumps(val[k2])}")
            else:
                lines.append(f"{key}: {json.dumps(val)}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="qvar",
        description="run a script of variety and module commands")
    ap.add_argument("script", help="script file, or - for stdin")
    ap.add_argument("--json", action="store_true",
                    help="emit one JSON document instead of text")
    ap.add_argument("--out", metavar="FILE",
                    help="write the report to FILE instead of stdout")
    ap.add_argument("--seed", type=int, default=0,
                    help="accepted for interface stability; every "
                         "computation here is deterministic")
    ns = ap.parse_args(argv)

    if ns.script == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(ns.script, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_PARSE

    def clock(echo, seconds):
        print(f"[{seconds:.3f}s] {echo}", file=sys.stderr)

    try:
        doc = run_script(text, clock=clock)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except CapabilityError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAPABILITY
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as e:
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL

    out = render_json(doc) if ns.json else render_text(doc)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
