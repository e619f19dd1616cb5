"""Command-line front end.

Every command except ``gen`` prints a JSON report embedding its certificate
and the tolerance that produced it. Exit codes: 0 the property holds, 1 it
fails (with a certificate), 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import convexity as cx
from . import serialization as ser
from .dilation import dilation_defects, naimark_dilate
from .errors import NotDominatedError, PovmError
from .generators import random_povm, random_pvm, toeplitz_povm, trine_povm
from .matrix_kernel import DEFAULT_TOL, Tolerance, allclose
from .povm import FinitePOVM, is_pvm, measure_isomorphic, support, validate
from .ucp import choi, is_cp, is_homomorphism, ucp_from_povm

__all__ = ["CliReport", "run", "main"]

COMMANDS = ("check", "dilate", "extreme", "cstar", "rn", "zhou", "probe", "km", "choi", "equiv", "iso", "gen")


@dataclass
class CliReport:
    command: list
    exit_code: int
    verdicts: dict = field(default_factory=dict)
    certificate: dict | None = None
    tolerance: dict | None = None
    error: dict | None = None
    raw: dict | None = None  # gen emits a bare POVM document
    out: str | None = None

    def to_json(self) -> dict:
        if self.raw is not None:
            return self.raw
        out = {"command": self.command, "verdicts": self.verdicts}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.error is not None:
            out["error"] = self.error
        out["tolerance"] = self.tolerance
        out["exit_code"] = self.exit_code
        return out


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inp", default="-", help="input POVM JSON (default: stdin)")
    common.add_argument("--in2", dest="inp2", help="second POVM JSON")
    common.add_argument("--tol", type=float, help="single tolerance applied to eps_eq, eps_psd, eps_rank")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--verify", dest="verify", action="store_true", default=True)
    common.add_argument("--no-verify", dest="verify", action="store_false")

    parser = argparse.ArgumentParser(prog="cstar-povm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "probe":
            p.add_argument("--subset", required=True, help="comma-separated outcome labels")
            p.add_argument("--r", type=float)
            p.add_argument("--s", type=float)
        if name == "gen":
            p.add_argument("--kind", choices=["random", "pvm", "trine", "toeplitz"], default="random")
            p.add_argument("--dim", type=int, default=2)
            p.add_argument("--n", type=int, default=3)
            p.add_argument("--m", type=int, default=8)
            p.add_argument("--arcs", type=int, default=4)
    return parser


def _read(path: str | None, name: str) -> FinitePOVM:
    if path is None:
        raise PovmError(f"{name} is required")
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise PovmError(f"cannot read {path}: {exc.strerror}") from exc
    return ser.load_povm(text)


class _Unverified(PovmError):
    pass


def _require(ok: bool, what: str):
    if not ok:
        raise _Unverified(f"emitted certificate failed re-verification: {what}")


def _check(p: FinitePOVM, tol: Tolerance):
    r = validate(p, tol)
    failed = [name for name, ok in (("psd", r.psd_ok), ("normalized", r.normalized)) if not ok]
    verdicts = {"psd_ok": r.psd_ok, "normalized": r.normalized, "bounded": r.bounded,
                "is_pvm": is_pvm(p, tol), "support": list(support(p, tol))}
    if failed:
        verdicts["violated"] = failed
    return 0 if not failed else 1, verdicts, {"total": ser.matrix_to_json(r.total)}


def _dilate(p, tol, verify):
    dil = naimark_dilate(p, tol)
    doc = ser.dilation_to_json(dil)
    if verify:
        bad = dilation_defects(ser.dilation_from_json(doc), tol)
        _require(not bad and allclose(ser.dilation_from_json(doc).source.effects, p.effects, tol.check),
                 ",".join(bad) or "source")
    return 0, {"dilation_dim": dil.dilation_dim}, doc


def _extreme(p, tol, verify):
    res = cx.extreme_test(p, tol)
    cert = {"dilation": ser.dilation_to_json(res.dilation)}
    if res.witness is not None:
        cert["witness_D"] = ser.matrix_to_json(res.witness)
        if verify:
            d = ser.matrix_from_json(cert["witness_D"])
            _require(allclose(res.dilation.compress(d), np.zeros((p.dim, p.dim)), tol.check)
                     and np.linalg.norm(d, 2) > 0.5, "V^* D V = 0")
    return (0 if res.extreme else 1), {"extreme": res.extreme}, cert


def _cstar(p, tol, verify, seed):
    res = cx.cstar_extreme_test(p, tol, seed)
    if res.cstar_extreme:
        return 0, {"cstar_extreme": True, "verdict": "C*-extreme (spectral)"}, {"kind": "spectral"}
    cert = {
        "kind": "decomposition",
        "decomposition": ser.combination_to_json(res.certificate),
        "first_component_equivalence": ser.equivalence_to_json(res.equivalence, list(p.outcomes)),
        "alpha": res.alpha,
    }
    if verify:
        comb = ser.combination_from_json(cert["decomposition"])
        _require(not cx.decomposition_defects(comb, p, tol), "decomposition")
        word = cert["first_component_equivalence"]["word"]
        t1 = cx.word_trace(comb.terms[0].component.effects, word)
        t2 = cx.word_trace(p.effects, word)
        _require(abs(t1 - t2) > tol.check, "distinguishing word")
    return 1, {"cstar_extreme": False, "verdict": "not C*-extreme"}, cert


def _rn(mu, nu, tol, verify):
    try:
        rn = cx.radon_nikodym(nu, mu, tol)
    except NotDominatedError as exc:
        return 1, {"dominated": False, "reason": str(exc)}, None
    doc = ser.derivative_to_json(rn)
    if verify:
        d = ser.matrix_from_json(doc["D"])
        _require(not cx.derivative_defects(cx.RadonNikodymDerivative(d, rn.dilation), nu, tol), "derivative")
    return 0, {"dominated": True}, doc


def _zhou(mu, nu, tol, verify, seed):
    res = cx.zhou_test(mu, nu, tol, seed=seed)
    cert = {"equivalence": ser.equivalence_to_json(res.certificate, list(mu.outcomes))}
    if res.exists_S:
        cert["S"] = ser.matrix_to_json(res.S)
        if verify:
            s = ser.matrix_from_json(cert["S"])
            _require(all(allclose(s.conj().T @ a @ s, b, tol.check) for a, b in zip(mu.effects, nu.effects)), "S")
        return 0, {"exists_S": True}, cert
    if res.exists_S is False and verify:
        _require(not cx.certificate_defects(res.certificate, mu, res.reduced, tol), "word")
    return 1, {"exists_S": res.exists_S, "refutes_cstar_extremity": res.exists_S is False}, cert


def _probe(p, tol, args):
    subset = [x.strip() for x in args.subset.split(",") if x.strip()]
    r, s = (args.r, args.s) if args.r is not None and args.s is not None else cx.default_probe_window(p, subset, tol)
    nu = cx.spectral_probe(p, subset, r, s, tol)
    return 0, {"r": r, "s": s, "lower_bound": cx.probe_lower_bound(r, s)}, {"nu": ser.povm_to_json(nu)}


def _km(p, tol, verify):
    comb = cx.krein_milman_decompose(p, tol)
    doc = ser.combination_to_json(comb)
    if verify:
        _require(not cx.decomposition_defects(ser.combination_from_json(doc), p, tol, need_proper=False),
                 "recombination")
    return 0, {"terms": len(comb.terms)}, doc


def _choi(p, tol):
    u = ucp_from_povm(p, tol)
    ok = is_cp(u, tol)
    return (0 if ok else 1), {"is_cp": ok, "is_homomorphism": is_homomorphism(u, tol)}, {"choi": ser.matrix_to_json(choi(u))}


def _equiv(p1, p2, tol, verify, seed):
    cert = cx.unitary_equivalent(p1, p2, tol, seed=seed)
    if verify:
        _require(not cx.certificate_defects(cert, p1, p2, tol), "equivalence")
    return (0 if cert.verdict == cx.EQUIVALENT else 1), {"verdict": cert.verdict}, \
        ser.equivalence_to_json(cert, list(p1.outcomes))


def _iso(p1, p2, tol):
    w = measure_isomorphic(p1, p2, tol)
    if w is None:
        return 1, {"isomorphic": False}, None
    return 0, {"isomorphic": True}, {"mapping": dict(w.mapping)}


def _gen(args) -> FinitePOVM:
    if args.kind == "random":
        return random_povm(args.dim, args.n, args.seed)
    if args.kind == "pvm":
        return random_pvm(args.dim, args.n, args.seed)
    if args.kind == "trine":
        return trine_povm()
    return toeplitz_povm(args.m, args.arcs)


def run(argv: Sequence[str]) -> CliReport:
    argv = list(argv)
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        code = 0 if exc.code == 0 else 2
        return CliReport(argv, code, error={"kind": "usage"} if code else None, tolerance=DEFAULT_TOL.to_dict())
    tol = Tolerance.uniform(args.tol) if args.tol is not None else DEFAULT_TOL
    report = CliReport(argv, 2, tolerance=tol.to_dict(), out=args.out)
    try:
        if args.command == "gen":
            report.raw = ser.povm_to_json(_gen(args))
            report.exit_code = 0
            return report
        p = _read(args.inp, "--in")
        cmd = args.command
        if cmd == "check":
            code, verdicts, cert = _check(p, tol)
        elif cmd == "dilate":
            code, verdicts, cert = _dilate(p, tol, args.verify)
        elif cmd == "extreme":
            code, verdicts, cert = _extreme(p, tol, args.verify)
        elif cmd == "cstar":
            code, verdicts, cert = _cstar(p, tol, args.verify, args.seed)
        elif cmd == "rn":
            code, verdicts, cert = _rn(p, _read(args.inp2, "--in2"), tol, args.verify)
        elif cmd == "zhou":
            code, verdicts, cert = _zhou(p, _read(args.inp2, "--in2"), tol, args.verify, args.seed)
        elif cmd == "probe":
            code, verdicts, cert = _probe(p, tol, args)
        elif cmd == "km":
            code, verdicts, cert = _km(p, tol, args.verify)
        elif cmd == "choi":
            code, verdicts, cert = _choi(p, tol)
        elif cmd == "equiv":
            code, verdicts, cert = _equiv(p, _read(args.inp2, "--in2"), tol, args.verify, args.seed)
        else:
            code, verdicts, cert = _iso(p, _read(args.inp2, "--in2"), tol)
    except ser.DocumentError as exc:
        report.error = {"kind": "document", "message": str(exc), "location": exc.location}
        return report
    except PovmError as exc:
        report.error = {"kind": type(exc).__name__, "message": str(exc)}
        return report
    report.exit_code = code
    report.verdicts = verdicts
    report.certificate = cert
    return report


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report = run(argv)
    text = json.dumps(report.to_json(), indent=2)
    if report.out:
        with open(report.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
