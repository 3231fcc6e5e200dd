"""Command-line front end.

Exit codes: 0 every report passed, 1 some report failed, 2 usage,
configuration or I/O error.
"""

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__, suites
from . import deficit as dfc
from . import stochastic as st
from .errors import ConfigurationError, DomainError, NumericalError, RangeError
from .functionals import GaussQuadSpec, NodalData, load_corpus
from .quadrature import DEFAULT_QUAD
from .reports import CheckReport, merge, to_csv, to_json

__all__ = ["RunManifest", "main", "run_suite"]

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SUITES = ("identities", "inequalities", "mc", "pde", "asymptotics", "specfun")

# grid keys accepted per suite, with their defaults
GRID_KEYS = {
    "identities": {
        "beckner_p": list(suites.BECKNER_GRID),
        "hoelder_pairs": [list(pq) for pq in suites.HOELDER_GRID],
        "inrd_v": list(suites.INRD_V),
        "z": list(suites.REPRESENTATION_Z),
        "alpha": list(suites.LAPLACE_ALPHA),
        "hoelder_limit_p": [0.5, 1.0, 2.0],
    },
    "inequalities": {"nodes_per_axis": 80},
    "mc": {"paths": 100_000, "steps": 1024, "functions": None},
    "pde": {
        "beckner_p": list(suites.BECKNER_GRID),
        "hoelder_pairs": [list(pq) for pq in suites.HOELDER_GRID],
        "s": list(suites.PDE_S),
        "x": list(suites.PDE_X),
        "h": suites.PDE_STEP,
    },
    "asymptotics": {"p": list(suites.ASYMPTOTIC_P)},
    "specfun": {},
}


class UsageError(Exception):
    """Bad arguments or configuration; maps to exit code 2."""


@dataclass
class RunManifest:
    """Everything that determines a suite run.

    Attributes
    ----------
    suite : one of ``identities, inequalities, mc, pde, asymptotics, specfun``.
    grids : suite parameters overriding the defaults in ``GRID_KEYS``.
    corpus : ``"standard"`` or a path to a corpus JSON document.
    seed : Monte Carlo seed.
    output : JSON report path; the CSV goes next to it with suffix ``.csv``.
    tolerance_overrides : report-name prefix -> tolerance to judge against.
    """

    suite: str
    grids: dict = field(default_factory=dict)
    corpus: str = "standard"
    seed: int = 0
    output: str = None
    tolerance_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigurationError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if not isinstance(self.grids, dict) or not isinstance(self.tolerance_overrides, dict):
            raise ConfigurationError("grids and tolerance_overrides must be objects")
        unknown = set(self.grids) - set(GRID_KEYS[self.suite])
        if unknown:
            raise ConfigurationError(f"unknown grid keys for suite {self.suite}: {sorted(unknown)}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        for k, v in self.tolerance_overrides.items():
            if not isinstance(v, (int, float)) or not v >= 0:
                raise ConfigurationError(f"tolerance override for {k!r} must be a nonnegative number")

    def grid(self, key):
        return self.grids.get(key, GRID_KEYS[self.suite][key])

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"manifest is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigurationError("manifest must be a JSON object")
        names = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - names
        if unknown:
            raise ConfigurationError(f"unknown manifest keys: {sorted(unknown)}")
        if "suite" not in doc:
            raise ConfigurationError("manifest needs a 'suite'")
        return cls(**doc)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                return cls.from_json(fh.read())
        except OSError as exc:
            raise ConfigurationError(f"cannot read manifest {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# suites


def _pairs(value):
    return tuple((float(p), float(q)) for p, q in value)


def _prefixed(reports, i):
    for r in reports:
        r.name = f"f{i:03d}:{r.name}"
        r.inputs["function"] = i
    return reports


def _mc_reports(man, workers=1, backend=None, log=None):
    funcs, grade = load_corpus(man.corpus)
    chosen = man.grid("functions")
    chosen = grade if chosen is None else [int(i) for i in chosen]
    if not chosen:
        raise ConfigurationError("no functions selected for the Monte Carlo suite")
    if any(not 0 <= i < len(funcs) for i in chosen):
        raise ConfigurationError("function index out of range")
    out = []
    for i in chosen:
        f = funcs[i]
        cfg = st.McConfig(path_count=int(man.grid("paths")), time_steps=int(man.grid("steps")), seed=man.seed,
                          dimension=f.dimension, workers=workers, backend=backend)
        if log:
            log(f"mc: function {i} (d={f.dimension}), {cfg.path_count} paths x {cfg.time_steps} steps")
        out += _prefixed(st.mc_suite(f, cfg, NodalData(f)), i)
        st.clear_cache()
    return out


def run_suite(man, tolerance=None, workers=1, backend=None, log=None):
    """Run the suite a manifest describes and apply its tolerance overrides."""
    s = man.suite
    if s == "specfun":
        reports = suites.specfun_suite(tolerance)
    elif s == "identities":
        g = man.grid
        reports = (
            suites.normalization_suite(tuple(g("beckner_p")), _pairs(g("hoelder_pairs")))
            + suites.inrd_suite(tuple(g("inrd_v")))
            + suites.representation_suite(tuple(g("z")), tuple(g("beckner_p")), _pairs(g("hoelder_pairs")))
            + suites.laplace_suite(tuple(g("beckner_p")), tuple(g("alpha")))
            + suites.hoelder_limit_suite(tuple(g("hoelder_limit_p")))
        )
    elif s == "pde":
        g = man.grid
        reports = suites.pde_suite(tuple(g("beckner_p")), _pairs(g("hoelder_pairs")), tuple(g("s")), tuple(g("x")),
                                   h=float(g("h")))
    elif s == "asymptotics":
        reports = suites.asymptotic_suite(tuple(man.grid("p")))
    elif s == "inequalities":
        reports = suites.inequality_suite(man.corpus, GaussQuadSpec(nodes_per_axis=int(man.grid("nodes_per_axis"))))
    else:
        reports = _mc_reports(man, workers, backend, log)
    return _apply_overrides(reports, man.tolerance_overrides)


def _apply_overrides(reports, overrides):
    if not overrides:
        return reports
    out = []
    for r in reports:
        tol = None
        for prefix, t in overrides.items():
            if r.name.startswith(prefix):
                tol = float(t)
        if tol is not None:
            r = CheckReport(r.name, r.lhs, r.rhs, tol, r.kind, r.se, r.allowance, r.inputs)
        out.append(r)
    return out


def _meta(man):
    meta = {"suite": man.suite, "grids": man.grids, "corpus": man.corpus, "version": __version__}
    if man.suite == "mc":
        meta["seed"] = man.seed
        meta["paths"] = man.grid("paths")
        meta["steps"] = man.grid("steps")
    if man.tolerance_overrides:
        meta["tolerance_overrides"] = man.tolerance_overrides
    return meta


def _emit(reports, json_path, csv_path, meta, verbose, stream):
    failed = [r for r in reports if not r.passed]
    for r in reports if verbose else failed:
        tag = "pass" if r.passed else "FAIL"
        stream.write(f"{tag} {r.name}: lhs={r.lhs:.10g} rhs={r.rhs:.10g} deficit={r.deficit:.3g} "
                     f"tol={r.tolerance:.3g}\n")
    stream.write(f"{len(reports)} reports, {len(failed)} failed\n")
    try:
        if json_path:
            with open(json_path, "w") as fh:
                fh.write(to_json(reports, **meta) + "\n")
        if csv_path:
            with open(csv_path, "w", newline="") as fh:
                fh.write(to_csv(reports))
    except OSError as exc:
        raise UsageError(f"cannot write report: {exc}") from exc
    return EXIT_FAIL if failed else EXIT_PASS


def _outputs(args, man):
    json_path = args.json or man.output
    csv_path = args.csv
    if csv_path is None and man.output and man.output.endswith(".json"):
        csv_path = man.output[:-5] + ".csv"
    return json_path, csv_path


# ---------------------------------------------------------------------------
# command handlers


def _manifest_from_args(args, suite):
    man = RunManifest.load(args.manifest) if getattr(args, "manifest", None) else RunManifest(suite)
    if man.suite != suite:
        raise ConfigurationError(f"manifest is for suite {man.suite!r}, not {suite!r}")
    grids = dict(man.grids)
    for key in GRID_KEYS[suite]:
        val = getattr(args, key, None)
        if val is not None:
            grids[key] = val
    seed = args.seed if getattr(args, "seed", None) is not None else man.seed
    corpus = args.corpus if getattr(args, "corpus", None) is not None else man.corpus
    return RunManifest(suite, grids, corpus, seed, man.output, man.tolerance_overrides)


def cmd_verify(args, suite, stream):
    man = _manifest_from_args(args, suite)
    log = (lambda msg: sys.stderr.write(msg + "\n")) if args.verbose else None
    reports = run_suite(man, getattr(args, "tolerance", None), getattr(args, "workers", 1) or 1,
                        getattr(args, "backend", None), log)
    json_path, csv_path = _outputs(args, man)
    return _emit(reports, json_path, csv_path, _meta(man), args.verbose, stream)


def _parse_number(text):
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _tail_bound(v_max):
    """Bound on the phi integrand mass beyond the truncation point."""
    lam = min(40.0, 10.0 / math.sqrt(v_max)) if v_max > 0 else 40.0
    gauss = math.exp(-0.5 * v_max * lam * lam) / v_max if v_max > 0 else math.inf
    return lam, min((lam + 1.0) * math.exp(-lam), gauss)


def _kink_nodes(z, rate, quad):
    v0 = quad.kink_delta / rate
    n_geo = int(math.ceil(math.log2(0.5 * z / v0))) if 0.5 * z > v0 else 0
    return n_geo, quad.kink_left + n_geo * quad.kink_panel + quad.kink_right


def cmd_deficit_eval(args, stream):
    p, s, x, q = args.p, args.s, args.x, args.q
    quad = DEFAULT_QUAD
    if q is not None:
        params = dfc.HoelderParams(p, q)
        value = float(dfc.j_fun(params, s, x))
        info = {"function": "J", "p": p, "q": q, "s": s, "x": x, "value": value}
        if x > 0 and s > 0:
            z = s / x**q
            n_geo, nodes = _kink_nodes(z, 0.5 * q * q, quad)
            info["provenance"] = {
                "z": z, "graded_panels": n_geo, "v_nodes": nodes,
                "inner": f"exp-sinh, levels <= {quad.es_max_level}, t in [-{quad.es_t_left}, {quad.es_t_right}]",
                "rel_tol": quad.rel_tol,
            }
        else:
            info["provenance"] = {"closed_form": "J(0, x) = 0" if s == 0 else "J(s, 0) = s**(p/q) J(1, 0)"}
    elif args.closed_form:
        value = float(dfc.big_f_closed_form(p, s, x))
        info = {"function": "F", "p": p, "s": s, "x": x, "value": value, "provenance": {"closed_form": True}}
    else:
        try:
            params = dfc.BecknerParams(p)
        except DomainError as exc:
            raise UsageError(f"{exc}; use --closed-form") from exc
        value = float(dfc.big_f(params, s, x))
        info = {"function": "F", "p": p, "s": s, "x": x, "value": value}
        if x > 0 and s > 0:
            z = s * x ** (2.0 - 2.0 * p)
            n_geo, nodes = _kink_nodes(z, params.c, quad)
            lam_max, tail = _tail_bound(params.c * z)
            info["provenance"] = {
                "z": z, "graded_panels": n_geo, "v_nodes": nodes, "phi_nodes": quad.phi_nodes,
                "phi_truncation": lam_max, "phi_tail_bound": tail,
            }
        else:
            info["provenance"] = {"closed_form": "F(0, x) = 0" if s == 0 else "F(s, 0) = s**a F(1, 0)"}
    stream.write(json.dumps(info, indent=2) + "\n")
    return EXIT_PASS


def cmd_report_merge(args, stream):
    texts = []
    for path in args.inputs:
        try:
            with open(path) as fh:
                texts.append(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        reports = merge(*texts)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed report file: {exc}") from exc
    return _emit(reports, args.json, args.csv, {"merged": list(args.inputs)}, args.verbose, stream)


# ---------------------------------------------------------------------------
# parser


def _output_flags(sp):
    sp.add_argument("--json", help="write the JSON report here")
    sp.add_argument("--csv", help="write the CSV report here")
    sp.add_argument("-v", "--verbose", action="store_true", help="print every report row")


def _suite_flags(sp, suite):
    sp.add_argument("--manifest", help="run manifest (JSON)")
    _output_flags(sp)
    if suite in ("inequalities", "mc"):
        sp.add_argument("--corpus", help="'standard' or a corpus JSON path")
    if suite == "inequalities":
        sp.add_argument("--nodes-per-axis", dest="nodes_per_axis", type=int)
    if suite == "mc":
        sp.add_argument("--seed", type=int)
        sp.add_argument("--paths", type=int)
        sp.add_argument("--steps", type=int)
        sp.add_argument("--functions", type=int, nargs="+", help="corpus indices (default: the MC-grade set)")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--backend", choices=("numba", "numpy"))
    sp.set_defaults(handler=lambda a, s: cmd_verify(a, suite, s))


def build_parser():
    ap = argparse.ArgumentParser(prog="becknerlab", description="Numerical checks of improved functional inequalities.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="group", required=True)

    g = sub.add_parser("specfun", help="special-function checks").add_subparsers(dest="cmd", required=True)
    sp = g.add_parser("check", help="gamma, erfc and Macdonald-function invariants")
    _suite_flags(sp, "specfun")
    sp.add_argument("--tolerance", type=float, help="replace every identity tolerance")

    g = sub.add_parser("deficit", help="deficit functions").add_subparsers(dest="cmd", required=True)
    sp = g.add_parser("eval", help="evaluate F (or J with --q) at one point")
    sp.add_argument("--p", type=_parse_number, required=True)
    sp.add_argument("--q", type=_parse_number)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--closed-form", action="store_true", help="closed form at p = 4/3 or 6/5")
    sp.set_defaults(handler=cmd_deficit_eval)
    _suite_flags(g.add_parser("pde", help="finite-difference PDE residuals"), "pde")
    _suite_flags(g.add_parser("asymptotics", help="large-s behaviour of F"), "asymptotics")

    _suite_flags(sub.add_parser("ineq", help="inequality suite").add_subparsers(dest="cmd", required=True)
                 .add_parser("verify", help="all inequalities on a corpus"), "inequalities")
    _suite_flags(sub.add_parser("mc", help="Monte Carlo suite").add_subparsers(dest="cmd", required=True)
                 .add_parser("verify", help="path-space identities and bounds"), "mc")

    g = sub.add_parser("verify", help="run a suite by name").add_subparsers(dest="cmd", required=True)
    for name in SUITES:
        sp = g.add_parser(name)
        _suite_flags(sp, name)
        if name == "specfun":
            sp.add_argument("--tolerance", type=float, help="replace every identity tolerance")

    g = sub.add_parser("report", help="report files").add_subparsers(dest="cmd", required=True)
    sp = g.add_parser("merge", help="concatenate JSON reports")
    sp.add_argument("inputs", nargs="+")
    _output_flags(sp)
    sp.set_defaults(handler=cmd_report_merge)
    return ap


def main(argv=None, stream=None):
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    try:
        return args.handler(args, stream)
    except (UsageError, ConfigurationError, DomainError, RangeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
