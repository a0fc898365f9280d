"""Command-line entry point: ``qhom verify | homology | algebra``.

Reports are JSON with sorted keys and no timestamps, so identical configs give
byte-identical files.  Wall-clock times go to a ``*.timings.json`` sidecar.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb
from pathlib import Path

from .freealg import NCPoly
from .homology import (ChainDimTooLarge, ComplexError, duality_check_B, expected_syzygy_dims,
                       homology_dims, koszul_table, kunneth_mismatches, laurent_complex)
from .linalg import GenericRankUncertain
from .qalgebras import (ConfluenceFailure, NotAHomomorphism, build_a_tensor_d,
                        build_general_algebra, build_laurent_algebra, build_matrix_algebra,
                        build_special_algebra, center_bounded, check_factorization_bijection,
                        gl_factorization_iso, homomorphism_witness, is_central, modular_sigma,
                        quantum_determinant, same_span)
from .quadratic import (ConstructionError, ConventionMismatch, NotFrobenius, QuadraticData,
                        build_dual_algebra, check_nakayama_identity, dual_names, dual_relations,
                        frobenius_certificate, frobenius_functional, matrix_quadratic_data,
                        nakayama, quadratic_dual, random_complementary_pairs,
                        same_relation_space, sigma_exponent_grid, sigma_from_nakayama)
from .rewrite import describe_rules, format_presentation
from .scalars import InvalidSpecialization, Q, ScalarField, check_q0, format_scalar, parse_scalar

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# exceptions that mean "a mathematical check failed", as opposed to a bug
CHECK_ERRORS = (ConfluenceFailure, NotAHomomorphism, NotFrobenius, ConventionMismatch,
                ConstructionError, ComplexError, GenericRankUncertain)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    N: int = 2
    q_mode: str = "specialized"
    q0: Fraction = Fraction(2)
    q_check: Fraction = Fraction(3, 2)
    n_max: int | None = None
    d_max: int = 8
    center_degree: int = 6
    output_dir: str = "."
    format: str = "both"
    seed: int = 0
    partial: bool = False
    allow_uncertified: bool = False
    chain_limit: int = 200_000

    def validate(self):
        if self.N < 1:
            raise UsageError("--n must be positive")
        if self.q_mode == "specialized":
            try:
                check_q0(self.q0)
            except InvalidSpecialization as e:
                raise UsageError(str(e)) from None
        if self.d_max < 0:
            raise UsageError("--dmax must be non-negative")

    @property
    def field(self) -> ScalarField:
        if self.q_mode == "symbolic":
            return ScalarField.symbolic()
        return ScalarField(q0=self.q0, q_check=self.q_check)

    @property
    def points(self) -> tuple:
        """Rational points used for checks that need a number for q."""
        if self.q_mode == "symbolic":
            return (Fraction(2), Fraction(3, 2))
        return self.field.points

    @property
    def q(self):
        return Q if self.q_mode == "symbolic" else self.q0

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("output_dir")  # where files go does not change their content
        return d


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if isinstance(x, NCPoly):
        return str(x)
    return format_scalar(x)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


# -- verify -------------------------------------------------------------------------

class Suite:
    def __init__(self):
        self.sections: list[dict] = []
        self.timings: dict = {}

    def run(self, name, fn):
        t0 = time.perf_counter()
        try:
            status, details = fn()
            witness = None
        except CHECK_ERRORS as e:
            status, details = "fail", {}
            witness = {"error": type(e).__name__, "message": str(e)}
            w = getattr(e, "witness", None)
            if w is not None:
                witness["witness"] = w
        self.timings[name] = round(time.perf_counter() - t0, 3)
        sec = {"name": name, "status": status, "details": details}
        if witness is not None:
            sec["witness"] = witness
        self.sections.append(sec)
        return sec

    @property
    def passed(self) -> bool:
        return all(s["status"] != "fail" for s in self.sections)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


class Verifier:
    """Builds the algebras once and runs each check as a report section."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.N = cfg.N
        self.full = self.N * self.N <= 4 or not cfg.partial
        self.certifiable_A = self.N <= 2
        self._cache: dict = {}

    def get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def B(self):
        return self.get("B", lambda: build_matrix_algebra(self.N, q=self.cfg.q))

    def Bq(self, q0):
        if self.cfg.q_mode == "specialized" and q0 == self.cfg.q0:
            return self.B()
        return self.get(("B", q0), lambda: build_matrix_algebra(self.N, q=q0))

    def A(self, q=None):
        q = self.cfg.q if q is None else q
        return self.get(("A", q), lambda: build_special_algebra(
            self.N, q=q, allow_uncertified=not self.certifiable_A))

    def C(self):
        return self.get("C", lambda: build_general_algebra(
            self.N, q=self.cfg.q, allow_uncertified=not self.certifiable_A))

    def dual(self, q=None):
        q = self.cfg.q if q is None else q
        return self.get(("Bdual", q), lambda: build_dual_algebra(self.N, q=q))

    # each check returns (status, details)

    def confluence(self):
        rows = {}
        ok = True
        for name, alg in (("B", self.B()), ("Bdual", self.dual())):
            rep = alg.report
            rows[name] = {"overlapCount": rep.overlap_count, "allResolved": rep.all_resolved}
            ok &= rep.all_resolved
        for name, build in (("A", self.A), ("C", self.C)):
            rep = build().report
            entry = {"overlapCount": rep.overlap_count, "allResolved": rep.all_resolved}
            if not self.certifiable_A:
                entry["note"] = "presentation not confluent at this N; only reductions to 0 are used"
            else:
                ok &= rep.all_resolved
            rows[name] = entry
        if self.N == 2:
            rows["B"]["expectedOverlapCount"] = 4
            ok &= rows["B"]["overlapCount"] == 4
        return _status(ok), rows

    def pbw_dims(self):
        B, D = self.B(), self.dual()
        n2 = self.N * self.N
        got = [B.system.graded_dimension(d) for d in range(7)]
        want = [comb(d + n2 - 1, d) for d in range(7)]
        dgot, dwant = D.graded_dims(), [comb(n2, n) for n in range(n2 + 1)]
        return _status(got == want and dgot == dwant), {
            "B": got, "BExpected": want, "Bdual": dgot, "BdualExpected": dwant}

    def determinant(self):
        B = self.B()
        det = quantum_determinant(self.N, B.gens, B.q)
        central = is_central(det, B)
        fixed = modular_sigma(B)(det) == B.nf(det)
        return _status(central and fixed), {"detq": str(det), "central": central,
                                            "sigmaInvariant": fixed}

    def sigma_automorphism(self):
        rows = {}
        for name, alg in (("B", self.B()), ("A", self.A()), ("C", self.C())):
            f = modular_sigma(alg)
            g = modular_sigma(alg, inverse=True)
            w = homomorphism_witness(f) or homomorphism_witness(g)
            rows[name] = {"homomorphism": w is None}
            if w is not None:
                raise NotAHomomorphism(f"sigma fails on {name}", str(w))
        return "pass", {"algebras": rows, "exponents": sigma_exponent_grid(self.N)}

    def koszul_dual(self):
        details = {}
        ok = True
        for q0 in self.cfg.points:
            mine = quadratic_dual(matrix_quadratic_data(self.Bq(q0)), dual_names(self.N))
            hand = QuadraticData(mine.gens, dual_relations(self.N, mine.gens, q0))
            cmp = same_relation_space(mine, hand)
            details[format_scalar(q0)] = cmp
            ok &= cmp["equal"]
        return _status(ok), details

    def frobenius(self):
        D = self.dual()
        cert = frobenius_certificate(D, frobenius_functional(D), self.cfg.field)
        return _status(cert.ok), cert.to_json()

    def nakayama_sigma(self):
        details = {}
        ok = True
        for q0 in self.cfg.points:
            D = self.dual(q0)
            h = frobenius_functional(D)
            nk = nakayama(D, h)
            if self.N * self.N <= 4:
                pairs, mode = None, "exhaustive"
            else:
                pairs, mode = random_complementary_pairs(D, 500, self.cfg.seed), "seeded sample"
            bad = check_nakayama_identity(D, h, nk, pairs)
            sigma_from_nakayama(nk, self.Bq(q0))  # raises on mismatch
            details[format_scalar(q0)] = {
                "diagonal": nk.diagonal, "exponents": nk.exponent_grid(self.N),
                "sign": sorted(set(nk.signs.values())), "identityFailures": bad,
                "identityCheck": mode}
            ok &= nk.diagonal and bad == 0
        return _status(ok), {"points": details, "sigmaExponents": sigma_exponent_grid(self.N)}

    def _tables(self):
        """(twisted tables per point, untwisted table at the first point, syzygies)."""
        def build():
            n_max = None if self.full else 3
            d_max = self.cfg.d_max if self.full else min(self.cfg.d_max, 5)
            tw = {}
            syz = None
            for q0 in self.cfg.points:
                t, _, syz = koszul_table(self.N, "sigma", d_max, q0, n_max, self.cfg.chain_limit)
                tw[q0] = t
            un, _, _ = koszul_table(self.N, "none", d_max, self.cfg.points[0], n_max,
                                    self.cfg.chain_limit)
            return tw, un, syz
        return self.get("tables", build)

    def koszul_complex(self):
        tw, un, syz = self._tables()
        dims = [s.dim for s in syz]
        want = expected_syzygy_dims(self.N, len(syz) - 1)
        t = next(iter(tw.values()))
        euler = t.euler_ok()
        ok = dims == want and euler is not False
        return _status(ok), {"syzygyDims": dims, "expected": want, "dSquaredZero": True,
                             "eulerCharacteristic": "skipped (truncated)" if euler is None else euler}

    def homology_duality(self):
        tw, un, syz = self._tables()
        first = self.cfg.points[0]
        t = tw[first]
        agree = all(x.entries == t.entries for x in tw.values())
        top = self.N * self.N
        details = {"twisted": {format_scalar(q): x.records() for q, x in tw.items()},
                   "pointsAgree": agree}
        if not self.full:
            details["scope"] = f"partial (n <= {t.max_n})"
            return ("partial" if agree else "fail"), details
        rows = duality_check_B(self.N, self.cfg.d_max, first, table=t)
        details["duality"] = [{"d": r.d, "homology": r.homology, "center": r.center} for r in rows]
        details["topRow"] = {"n": top, "dims": t.row(top)}
        ok = agree and all(r.ok for r in rows)
        return _status(ok), details

    def dimension_drop(self):
        if not self.full:
            return "skipped", {"reason": "top homological degree not computed in a partial run"}
        if not any(e for row in sigma_exponent_grid(self.N) for e in row):
            return "skipped", {"reason": "sigma is the identity at this N, so no drop is expected"}
        tw, un, _ = self._tables()
        t = tw[self.cfg.points[0]]
        top = self.N * self.N
        a, b = un.row(top), t.row(top)
        ok = all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))
        return _status(ok), {"n": top, "degrees": t.degrees, "untwisted": a, "twisted": b}

    def centers(self):
        if not self.certifiable_A:
            return "skipped", {"reason": f"A({self.N}) has no certified normal form"}
        D = self.cfg.center_degree
        q0 = self.cfg.points[0]
        A = self.A(q0)
        B = self.Bq(q0)
        za = center_bounded(A, D)
        one = NCPoly.one(A.gens)
        a_ok = same_span(za, [one])
        zb = center_bounded(B, D)
        det = B.nf(quantum_determinant(self.N, B.gens, q0))
        powers = [NCPoly.one(B.gens)]
        while len(powers) * self.N <= D:
            powers.append(B.mul(powers[-1], det))
        b_ok = same_span(zb, powers)
        return _status(a_ok and b_ok), {"degree": D, "dimCenterA": len(za), "dimCenterB": len(zb),
                                        "AIsScalars": a_ok, "BIsDetPowers": b_ok}

    def factorization(self):
        if not self.certifiable_A:
            return "skipped", {"reason": f"A({self.N}) has no certified normal form"}
        q0 = self.cfg.points[0]
        C = build_general_algebra(self.N, q=q0)
        AD = build_a_tensor_d(self.N, q=q0)
        f = gl_factorization_iso(self.N, q0, C, AD)
        w = homomorphism_witness(f)
        if w is not None:
            raise NotAHomomorphism("C -> A (x) D is not a homomorphism", str(w))
        rows = check_factorization_bijection(f, max_len=4, max_weight=2)
        return "pass", {"homomorphism": True, "boxes": rows}

    def laurent_kunneth(self):
        q0 = self.cfg.points[0]
        L = laurent_complex(-3, 3, q0=q0)
        h = homology_dims(L)
        ones = all(v == 1 for v in h.entries.values()) and len(h.entries) == 14
        twisted = homology_dims(laurent_complex(-3, 3, twist_scalar=q0 ** 2, q0=q0))
        zero = all(v == 0 for v in twisted.entries.values())
        bad = kunneth_mismatches(L, L, h, h)
        # the matrix-algebra factor, kept small: internal degrees <= 4 (3 when N = 3)
        dk = 4 if self.N <= 2 else 3
        kt, kc, _ = koszul_table(self.N, "sigma", dk, q0)
        small = laurent_complex(-1, 1, q0=q0)
        bad2 = kunneth_mismatches(small, kc, homology_dims(small), kt)
        ok = ones and zero and not bad and not bad2
        return _status(ok), {"laurentDims": h.records(), "topDegree": h.top_nonzero(),
                             "twistedByQ2Vanishes": zero, "kunnethLaurentLaurent": len(bad) == 0,
                             "kunnethLaurentKoszul": len(bad2) == 0,
                             "mismatches": [list(map(str, m)) for m in (bad + bad2)][:10]}

    def run(self) -> Suite:
        s = Suite()
        for name, fn in (
            ("confluence", self.confluence),
            ("pbwDimensions", self.pbw_dims),
            ("determinant", self.determinant),
            ("sigmaAutomorphism", self.sigma_automorphism),
            ("koszulDual", self.koszul_dual),
            ("frobenius", self.frobenius),
            ("nakayamaSigma", self.nakayama_sigma),
            ("koszulComplex", self.koszul_complex),
            ("homologyDuality", self.homology_duality),
            ("dimensionDrop", self.dimension_drop),
            ("centers", self.centers),
            ("glFactorization", self.factorization),
            ("laurentKunneth", self.laurent_kunneth),
        ):
            s.run(name, fn)
        return s


def _specializations(cfg: RunConfig) -> dict:
    if cfg.q_mode == "symbolic":
        return {"mode": "symbolic", "numericPoints": list(cfg.points)}
    return {"mode": "specialized", "q0": cfg.q0, "qCheck": cfg.q_check}


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.N > 3:
        raise UsageError("verify supports N <= 3")
    if cfg.N == 3 and not cfg.partial:
        raise UsageError("N = 3 runs only the partial suite; pass --partial")
    suite = Verifier(cfg).run()
    specs = _specializations(cfg)
    hom = next(s for s in suite.sections if s["name"] == "homologyDuality")
    specs["pointsAgree"] = hom["details"].get("pointsAgree")
    stem = f"verify_N{cfg.N}"
    report = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "verify",
        "config": cfg.to_json(),
        "specializations": specs,
        "sections": suite.sections,
        "verdict": "pass" if suite.passed else "fail",
        "timingsFile": f"{stem}.timings.json",
    }
    out = _write(cfg, f"{stem}.json", dumps(report))
    _write(cfg, f"{stem}.timings.json", dumps({"seconds": suite.timings}))
    for s in suite.sections:
        print(f"{s['name']:20s} {s['status']}")
    print(f"verdict: {report['verdict']}  ({out})")
    if not suite.passed:
        for s in suite.sections:
            if s["status"] == "fail":
                print(f"FAILED {s['name']}: {s.get('witness', s['details'])}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- homology -----------------------------------------------------------------------

def cmd_homology(cfg: RunConfig, twist: str) -> int:
    if cfg.N not in (1, 2, 3):
        raise UsageError("homology supports N in {1, 2, 3}")
    if cfg.q_mode == "symbolic":
        raise UsageError("homology needs a rational --q")
    n_max = cfg.n_max
    if cfg.N == 3 and n_max is None:
        n_max = 3
    t0 = time.perf_counter()
    try:
        tables = {q0: koszul_table(cfg.N, twist, cfg.d_max, q0, n_max, cfg.chain_limit)[0]
                  for q0 in cfg.field.points}
    except ChainDimTooLarge as e:
        raise UsageError(f"{e}; lower --dmax or raise --chain-limit") from None
    elapsed = round(time.perf_counter() - t0, 3)
    t = tables[cfg.q0]
    agree = all(x.entries == t.entries for x in tables.values())
    stem = f"homology_N{cfg.N}_{twist}_d{cfg.d_max}"
    if cfg.format in ("csv", "both"):
        _write(cfg, f"{stem}.csv", t.to_csv())
    if cfg.format in ("json", "both"):
        report = {"schemaVersion": SCHEMA_VERSION, "command": "homology", "twist": twist,
                  "config": cfg.to_json(),
                  "specializations": {**_specializations(cfg), "pointsAgree": agree},
                  "maxN": t.max_n, "partial": t.partial, "rows": t.records(),
                  "timingsFile": f"{stem}.timings.json"}
        _write(cfg, f"{stem}.json", dumps(report))
        _write(cfg, f"{stem}.timings.json", dumps({"seconds": {"homology": elapsed}}))
    for n in range(t.max_n + 1):
        print(f"H_{n}: " + " ".join(str(v) for v in t.row(n)))
    if not agree:
        print("tables differ between specializations", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- algebra ------------------------------------------------------------------------

def cmd_algebra(cfg: RunConfig, which: str) -> int:
    N, q = cfg.N, cfg.q
    d_max = cfg.d_max
    desc: dict = {"schemaVersion": SCHEMA_VERSION, "command": "algebra", "which": which,
                  "config": cfg.to_json(), "specializations": _specializations(cfg)}
    try:
        if which == "Bdual":
            alg = build_dual_algebra(N, q=q)
            system, report = alg.system, alg.report
            desc["gradedDims"] = alg.graded_dims()
            desc["sigmaExponents"] = None
        else:
            if which == "B":
                alg = build_matrix_algebra(N, q=q, certify=True)
            elif which == "A":
                alg = build_special_algebra(N, q=q, certify=True,
                                            allow_uncertified=cfg.allow_uncertified)
            elif which == "C":
                alg = build_general_algebra(N, q=q, certify=True,
                                            allow_uncertified=cfg.allow_uncertified)
            else:
                alg = build_laurent_algebra(q=q)
            system, report = alg.system, alg.report
            if which == "B":
                desc["gradedDims"] = [system.graded_dimension(d) for d in range(d_max + 1)]
            elif which == "D":
                wt = {system.gens.index(n): v for n, v in alg.weights.items()}
                counts = {e: 0 for e in range(-d_max, d_max + 1)}
                for w in system.normal_words_upto(d_max):
                    counts[sum(wt[x] for x in w)] += 1
                desc["gradedDims"] = {str(e): c for e, c in counts.items()}
            else:
                desc["normalWordsByLength"] = [len(system.normal_words(d)) for d in range(d_max + 1)]
            if which == "D":
                desc["sigmaExponents"] = None
            else:
                desc["sigmaExponents"] = sigma_exponent_grid(N)
                desc["detq"] = str(quantum_determinant(N, system.gens, q))
    except ConfluenceFailure as e:
        raise UsageError(f"{e}; pass --allow-uncertified to build it anyway") from None
    desc["generators"] = list(system.gens.names)
    desc["rules"] = describe_rules(system)
    desc["confluence"] = {"overlapCount": report.overlap_count, "allResolved": report.all_resolved,
                          "certified": report.all_resolved}
    out = _write(cfg, f"algebra_N{N}_{which}.json", dumps(desc))
    _write(cfg, f"algebra_N{N}_{which}.presentation.txt", format_presentation(system))
    print(f"{which}(N={N}): {len(desc['generators'])} generators, {len(desc['rules'])} rules, "
          f"confluent={report.all_resolved}  ({out})")
    return EXIT_OK


# -- plumbing -----------------------------------------------------------------------

def _write(cfg: RunConfig, name: str, text: str) -> Path:
    d = Path(cfg.output_dir)
    d.mkdir(parents=True, exist_ok=True)
    p = d / name
    p.write_text(text)
    return p


def _q_arg(text):
    if text == "symbolic":
        return text
    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qhom", description="Twisted Hochschild homology checks "
                                "for quantum matrix algebras.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="matrix size N")
    common.add_argument("--q", type=_q_arg, default=None,
                        help="rational value of q, or 'symbolic' (default 2; algebra: symbolic)")
    common.add_argument("--dmax", type=int, default=None, help="internal degree cutoff")
    common.add_argument("--nmax", type=int, default=None, help="homological degree cutoff")
    common.add_argument("--center-degree", type=int, default=6)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--format", choices=["json", "csv", "both"], default="both")
    common.add_argument("--output-dir", default=None,
                        help="default: $QHOM_OUTPUT_DIR or the current directory")
    common.add_argument("--allow-uncertified", action="store_true")
    common.add_argument("--chain-limit", type=int, default=200_000,
                        help="refuse chain spaces larger than this")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run the full check suite")
    v.add_argument("--partial", action="store_true", help="bounded suite (needed for N = 3)")
    h = sub.add_parser("homology", parents=[common], help="Koszul homology tables")
    h.add_argument("--twist", choices=["sigma", "none"], default="sigma")
    a = sub.add_parser("algebra", parents=[common], help="algebra descriptor")
    a.add_argument("which", choices=["B", "A", "C", "Bdual", "D"])
    return p


def config_from_args(args) -> RunConfig:
    q = args.q
    if q is None:
        q = "symbolic" if args.command == "algebra" else Fraction(2)
    symbolic = q == "symbolic"
    q0 = Fraction(2) if symbolic else q
    d_max = args.dmax
    if d_max is None:
        d_max = 6 if args.command == "algebra" else (8 if args.n <= 2 else 5)
    return RunConfig(
        N=args.n, q_mode="symbolic" if symbolic else "specialized", q0=q0,
        q_check=Fraction(2) if q0 == Fraction(3, 2) else Fraction(3, 2),
        n_max=args.nmax, d_max=d_max, center_degree=args.center_degree,
        output_dir=args.output_dir or os.environ.get("QHOM_OUTPUT_DIR", "."),
        format=args.format, seed=args.seed, partial=getattr(args, "partial", False),
        allow_uncertified=args.allow_uncertified, chain_limit=args.chain_limit)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        cfg.validate()
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "homology":
            return cmd_homology(cfg, args.twist)
        return cmd_algebra(cfg, args.which)
    except UsageError as e:
        print(f"qhom: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
