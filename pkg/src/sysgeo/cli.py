"""Command-line entry points.

One `main_*` function per console script; all output is plain text or
JSON on stdout so results can be piped and diffed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import pathlib
import sys

import numpy as np

from . import generators, hodge, hypersurface, systole, verify
from .homology import h1_dual_bases, homology
from .lattice import (
    GAMMA_PRIME,
    LatticeBasis,
    berge_martinet_product,
    dual_critical_search,
    dual_lattice,
    format_lattice,
    hermite_invariant,
    lambda1,
    read_lattice,
)
from .simplicial import (
    build_cover,
    format_mesh,
    product_complex,
    read_cover,
    read_mesh,
    validate,
    volume,
)


def _read(path):
    return pathlib.Path(path).read_text()


def _mesh(path):
    return read_mesh(_read(path))


def _threads():
    """Cap BLAS/solver parallelism when SYSVERIFY_THREADS is set."""
    n = os.environ.get("SYSVERIFY_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


# ---------------------------------------------------------------------------
# syslat


def main_syslat(argv=None) -> int:
    p = argparse.ArgumentParser(prog="syslat", description=None)
    sub = p.add_subparsers(dest="cmd", required=True)
    pi = sub.add_parser("info", help="invariants of a lattice file")
    pi.add_argument("file")
    ps = sub.add_parser("search", help="search for a large lambda1(L)lambda1(L*)")
    ps.add_argument("--dim", type=int, required=True)
    ps.add_argument("--budget", type=int, default=100000)
    ps.add_argument("--seed", type=int, default=0)
    a = p.parse_args(argv)
    if a.cmd == "info":
        L = read_lattice(_read(a.file))
        out = {
            "rank": L.rank,
            "det": L.det(),
            "lambda1": lambda1(L),
            "lambda1_dual": lambda1(dual_lattice(L)),
            "berge_martinet_product": berge_martinet_product(L),
            "hermite_invariant": hermite_invariant(L),
        }
        if L.rank in GAMMA_PRIME:
            out["gamma_prime_ceiling"] = GAMMA_PRIME[L.rank]
        print(json.dumps(out, indent=2))
    else:
        L, value = dual_critical_search(a.dim, a.budget, seed=a.seed)
        print(json.dumps({"product": value}, indent=2))
        print(format_lattice(L), end="")
    return 0


# ---------------------------------------------------------------------------
# sysmesh


def main_sysmesh(argv=None) -> int:
    p = argparse.ArgumentParser(prog="sysmesh")
    sub = p.add_subparsers(dest="cmd", required=True)
    pc = sub.add_parser("check", help="structural and metric diagnostics")
    pc.add_argument("file")
    ph = sub.add_parser("homology", help="Betti numbers and torsion")
    ph.add_argument("file")
    ph.add_argument("--ring", choices=["z", "z2"], default="z")
    pv = sub.add_parser("cover", help="build a cover from a coloring file")
    pv.add_argument("file")
    pv.add_argument("coloring")
    pp = sub.add_parser("product", help="staircase product of two meshes")
    pp.add_argument("a")
    pp.add_argument("b")
    a = p.parse_args(argv)
    if a.cmd == "check":
        X, g = _mesh(a.file)
        d = validate(X, g)
        out = {k: getattr(d, k) for k in (
            "closed_under_faces", "connected", "pure", "pseudomanifold",
            "orientable", "metric_ok")}
        out["violations"] = d.violations
        out["volume"] = volume(X, g) if d.metric_ok else None
        print(json.dumps(out, indent=2))
        return 0 if d.metric_ok and d.pseudomanifold else 1
    if a.cmd == "homology":
        X, _ = _mesh(a.file)
        h = homology(X, "Z" if a.ring == "z" else "Z2")
        print(json.dumps({"ring": a.ring, "betti": h.betti,
                          "torsion": h.torsion}, indent=2))
        return 0
    if a.cmd == "cover":
        X, g = _mesh(a.file)
        spec = read_cover(_read(a.coloring))
        C, gc, info = build_cover(X, g, spec)
        sys.stderr.write(json.dumps({"sheets": info["sheets"],
                                     "components": info["components"]}) + "\n")
        print(format_mesh(C, gc), end="")
        return 0
    X1, g1 = _mesh(a.a)
    X2, g2 = _mesh(a.b)
    P, gp = product_complex(X1, g1, X2, g2)
    print(format_mesh(P, gp), end="")
    return 0


# ---------------------------------------------------------------------------
# syssys


def main_syssys(argv=None) -> int:
    p = argparse.ArgumentParser(prog="syssys")
    p.add_argument("mesh")
    p.add_argument("--invariant", choices=["sysh1", "pisys1", "stsys1", "sys1"],
                   default="sys1")
    p.add_argument("--ring", choices=["z", "z2"], default="z")
    p.add_argument("--covers", help="directory of cover coloring files")
    a = p.parse_args(argv)
    X, g = _mesh(a.mesh)
    covers = []
    if a.covers:
        for f in sorted(pathlib.Path(a.covers).glob("*")):
            covers.append(read_cover(f.read_text()))
    ring = "Z" if a.ring == "z" else "Z2"
    if a.invariant == "sysh1":
        sv = systole.sysh1(X, g, ring)
    elif a.invariant == "pisys1":
        sv = systole.pisys1_upper(X, g, covers or None)
    elif a.invariant == "stsys1":
        sv = systole.stsys1(X, g)
    else:
        sv = systole.sys1_aggregate(X, g, covers or None)
    print(json.dumps({
        "invariant": a.invariant,
        "value": sv.value if math.isfinite(sv.value) else "inf",
        "witness": sv.witness,
        "exactness": sv.exactness,
        "provenance": sv.provenance,
    }, indent=2, default=str))
    return 0


# ---------------------------------------------------------------------------
# syshodge


def main_syshodge(argv=None) -> int:
    p = argparse.ArgumentParser(prog="syshodge")
    p.add_argument("mesh")
    p.add_argument("--class", dest="cls", default="auto-shortest",
                   help="cocycle file (one edge value per line) or auto-shortest")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit-profile", metavar="CSV")
    a = p.parse_args(argv)
    X, g = _mesh(a.mesh)
    if a.cls == "auto-shortest":
        from .lattice import lambda1_gram_vector
        _, cocycles, _ = h1_dual_bases(X)
        G, _, _ = hodge.period_gram(X, g)
        _, coeffs = lambda1_gram_vector(G)
        omega = np.zeros(len(cocycles[0]))
        for c, w in zip(coeffs, cocycles):
            omega += c * np.asarray(w, dtype=float)
    else:
        omega = np.array([float(ln) for ln in _read(a.cls).split()])
    f = hodge.circle_map(X, g, omega)
    data = hodge.sweep(X, g, f, samples=a.samples, seed=a.seed)
    out = {
        "l2_norm": hodge.l2_norm(f.form),
        "comass": hodge.comass(f.form),
        "min_slice": data.min_volume,
        "t_min": data.t_min,
        "mean_slice": data.mean_volume,
        "coarea_integral": data.coarea_integral,
        "profile_integral": data.profile_integral,
    }
    print(json.dumps(out, indent=2))
    if a.emit_profile:
        with open(a.emit_profile, "w") as fh:
            fh.write("t,slice_volume\n")
            for t, v in zip(data.ts, data.volumes):
                fh.write(f"{t:.12g},{v:.12g}\n")
    return 0


# ---------------------------------------------------------------------------
# sysz2


def main_sysz2(argv=None) -> int:
    p = argparse.ArgumentParser(prog="sysz2")
    p.add_argument("mesh")
    p.add_argument("--mode", choices=["exact", "heuristic"], default="exact")
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args(argv)
    X, g = _mesh(a.mesh)
    sv = hypersurface.sys_codim1_z2(X, g, mode=a.mode, timeout=a.timeout,
                                    seed=a.seed)
    print(json.dumps({
        "value": sv.value,
        "exactness": sv.exactness,
        "witness_class": sv.witness["class"],
        "witness_faces": [list(f) for f in sv.witness["faces"]],
        "per_class": sv.provenance["classes"],
    }, indent=2, default=str))
    return 0


# ---------------------------------------------------------------------------
# sysverify


def _gen_mesh(a):
    if a.space == "torus":
        B = read_lattice(_read(a.lattice)).basis if a.lattice else np.eye(a.rank)
        X, g, _ = generators.gen_flat_torus(B, a.subdivisions)
        return X, g
    if a.space == "rp2":
        return generators.gen_rp2(a.scale)
    Xa, ga = generators.gen_circle(a.segments, a.scale)
    Xb, gb = generators.gen_rp2()
    return product_complex(Xa, ga, Xb, gb)


def main_sysverify(argv=None) -> int:
    _threads()
    p = argparse.ArgumentParser(prog="sysverify")
    sub = p.add_subparsers(dest="cmd", required=True)
    pr = sub.add_parser("run", help="full inequality verification on a mesh")
    pr.add_argument("mesh")
    pr.add_argument("--covers", help="directory of cover colorings (unused stages skip)")
    pr.add_argument("--exact-timeout", type=float, default=120.0)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--json", dest="json_out")
    pr.add_argument("--profile", dest="profile_out")
    pg = sub.add_parser("gen", help="write a generated example mesh to stdout")
    pg.add_argument("space", choices=["torus", "rp2", "product"])
    pg.add_argument("--lattice", help="lattice file for torus")
    pg.add_argument("--rank", type=int, default=2)
    pg.add_argument("--subdivisions", type=int, default=4)
    pg.add_argument("--scale", type=float, default=1.0)
    pg.add_argument("--segments", type=int, default=4)
    a = p.parse_args(argv)
    if a.cmd == "gen":
        X, g = _gen_mesh(a)
        print(format_mesh(X, g), end="")
        return 0
    X, g = _mesh(a.mesh)
    rep = verify.verify_inequality12(
        X, g, name=os.path.basename(a.mesh),
        exact_timeout=a.exact_timeout, seed=a.seed)
    text = rep.to_json()
    print(text)
    if a.json_out:
        pathlib.Path(a.json_out).write_text(text + "\n")
    if a.profile_out and rep.b1 >= 1 and X.dim in (2, 3):
        main_syshodge([a.mesh, "--emit-profile", a.profile_out,
                    "--seed", str(a.seed)])
    worst = rep.worst
    if worst == verify.VIOLATED:
        return 1
    if worst == verify.SOFT:
        return 2
    return 0
