"""
Command line driver: ``gjzeta verify <target>`` and ``gjzeta compute <object>``.

Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration,
3 inconclusive (an enumeration budget was hit), 4 precision or level budget
exhausted.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from sympy import isprime

from .chars import DepthError, MultChar, make_field
from .exactnum import format_poly, series_to_json
from .models import (
    LevelError,
    NewformSearchError,
    StabilizationError,
    matrix_coefficient,
    newform,
    newform_pair,
    projection_matrix,
    projection_level,
)
from .padic import PrecisionError
from .reps import BATTERY, LanglandsDatum, UnsupportedError, datum_from_tokens, l_factor, parse_char
from . import zeta as Z

log = logging.getLogger("gjzeta")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_PRECISION = 0, 1, 2, 3, 4

TARGETS = ("main-theorem", "gj-spherical", "rs-nn1", "rs-nn", "propagation", "phi-invariance",
           "projection", "conductor", "oracle-equivalence")
OBJECTS = ("l-factor", "zeta", "whittaker", "newform", "beta")
DEFAULT_PROPAGATION_G = ("1,0;0,1", "p,0;0,1", "p^2,0;0,1", "1,0;0,p")


class ConfigError(ValueError):
    """Invalid session configuration."""


@dataclass
class SessionConfig:
    p: int = 3
    n: int = 2
    chars: List[str] = field(default_factory=list)
    alphas: List[str] = field(default_factory=list)
    alphas_prime: List[str] = field(default_factory=list)
    T: int = 3
    strategy: str = "hermite"
    max_level: int = 8
    max_cosets: Optional[int] = None
    tail_bound: str = "1/1000000"
    samples: Optional[int] = None
    seed: int = 0
    g: List[str] = field(default_factory=list)
    lam: Optional[str] = None
    phi: str = "main"
    corrupt: bool = False
    out: Optional[str] = None
    format: str = "table"
    threads: int = 1
    timings: bool = False
    dump_newform: bool = False

    # fields that do not change what is computed
    _presentation = ("out", "format", "threads", "timings")

    def validate(self) -> "SessionConfig":
        if not isinstance(self.p, int) or not isprime(self.p):
            raise ConfigError(f"p must be a prime, got {self.p!r}")
        if not isinstance(self.n, int) or not 1 <= self.n <= 4:
            raise ConfigError("n must be between 1 and 4")
        if not self.chars:
            self.chars = ["triv"] * self.n
        if len(self.chars) != self.n:
            raise ConfigError(f"{len(self.chars)} characters given for n = {self.n}")
        for tok in self.chars:
            try:
                parse_char(self.p, tok, "a")
            except Exception as exc:
                raise ConfigError(str(exc)) from exc
        if self.alphas and len(self.alphas) != self.n:
            raise ConfigError("--alphas needs one entry per character")
        for a in list(self.alphas) + list(self.alphas_prime):
            _parse_alpha(a)
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.strategy not in ("hermite", "brute"):
            raise ConfigError("strategy must be hermite or brute")
        if self.max_level < 0:
            raise ConfigError("max-level must be >= 0")
        if self.max_cosets is not None and self.max_cosets < 1:
            raise ConfigError("max-cosets must be positive")
        try:
            tb = Fraction(self.tail_bound)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad tail bound {self.tail_bound!r}") from exc
        if tb <= 0:
            raise ConfigError("tail bound must be positive")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("samples must be positive")
        if self.format not in ("json", "csv", "table"):
            raise ConfigError("format must be json, csv or table")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.phi not in Z.SHAPES:
            raise ConfigError(f"phi must be one of {Z.SHAPES}")
        for g in self.g:
            parse_matrix(g, self.p)
        return self

    def canonical(self) -> dict:
        d = asdict(self)
        for k in self._presentation:
            d.pop(k, None)
        return d

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _parse_alpha(a: str):
    """A Satake variable name or an exact rational."""
    a = str(a).strip()
    try:
        return Fraction(a)
    except (ValueError, ZeroDivisionError):
        pass
    if not a.isidentifier():
        raise ConfigError(f"bad Satake parameter {a!r}")
    return a


def parse_matrix(text: str, p: int):
    """'a,b;c,d' with entries integers, fractions, 'p' or 'p^k' (k may be negative)."""
    rows = []
    for r in text.split(";"):
        row = []
        for e in r.split(","):
            e = e.strip().replace("**", "^")
            try:
                if "p" in e:
                    sign = -1 if e.startswith("-") else 1
                    e = e.lstrip("-")
                    coef, _, rest = e.partition("p")
                    c = Fraction(coef.rstrip("*") or 1)
                    k = int(rest[1:]) if rest.startswith("^") else (1 if not rest else None)
                    if k is None:
                        raise ValueError(e)
                    row.append(sign * c * Fraction(p) ** k)
                else:
                    row.append(Fraction(e))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad matrix entry {e!r}") from exc
        rows.append(row)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ConfigError(f"matrix {text!r} is not square")
    return rows


def build_datum(cfg: SessionConfig, names: Optional[Sequence] = None, prefix: str = "a",
                tokens: Optional[Sequence[str]] = None) -> LanglandsDatum:
    tokens = list(tokens or cfg.chars)
    names = [_parse_alpha(a) for a in names] if names else [f"{prefix}{i + 1}" for i in range(len(tokens))]
    return datum_from_tokens(cfg.p, tokens, names)


def rs_pair(cfg: SessionConfig, rank_prime: int):
    """(pi, pi') sharing one coefficient field, distinct Satake variables."""
    names = [_parse_alpha(a) for a in cfg.alphas] if cfg.alphas else [f"a{i + 1}" for i in range(cfg.n)]
    names2 = ([_parse_alpha(a) for a in cfg.alphas_prime] if cfg.alphas_prime
              else [f"b{i + 1}" for i in range(rank_prime)])
    if len(names2) != rank_prime:
        raise ConfigError(f"--alphas-prime needs {rank_prime} entries")
    chars = [parse_char(cfg.p, t, names[i]) for i, t in enumerate(cfg.chars)]
    chars2 = [MultChar.trivial(cfg.p, nm) for nm in names2]
    F = make_field(chars + chars2, cfg.p, 0)
    return LanglandsDatum(chars, F), LanglandsDatum(chars2, F)


# ---------------------------------------------------------------------------
# verify targets: each returns (outcome, report items); outcome is a bool or
# one of "pass" / "fail" / "inconclusive"
# ---------------------------------------------------------------------------


def _series_rows(reports):
    rows = []
    for r in reports:
        for i, (a, b) in enumerate(zip(r.lhs, r.rhs)):
            rows.append([r.name, i, str(a), str(b), (a - b).normalized().is_zero()])
    return rows


def verify_main_theorem(cfg: SessionConfig):
    pi = build_datum(cfg, cfg.alphas)
    pair = newform_pair(pi, cfg.max_level)
    r = Z.gj_main_theorem(pi, cfg.T, cfg.strategy, cfg.corrupt, pair, cfg.max_cosets)
    return r.equal, [r]


def verify_gj_spherical(cfg: SessionConfig):
    pi = build_datum(cfg, cfg.alphas)
    r = Z.gj_spherical(pi, cfg.T, cfg.strategy, cfg.corrupt, cfg.max_cosets)
    return r.equal, [r]


def verify_rs_nn1(cfg: SessionConfig):
    pi, pit = rs_pair(cfg, cfg.n - 1)
    r = Z.rs_integral_nn1_spherical(pi, pit, cfg.T, cfg.corrupt)
    return r.equal, [r]


def verify_rs_nn(cfg: SessionConfig):
    pi, pit = rs_pair(cfg, cfg.n)
    r = Z.rs_integral_nn_spherical(pi, pit, cfg.T, "zero" if cfg.phi == "zero" else "row", cfg.corrupt)
    return r.equal, [r]


def verify_propagation(cfg: SessionConfig):
    if cfg.n != 2:
        raise UnsupportedError("propagation is implemented for n = 2")
    names = cfg.alphas or ["1/2", "1/3"]
    pit = build_datum(cfg, names, tokens=["triv", "triv"])
    if any(c.is_symbolic for c in pit.chars):
        raise ConfigError("propagation needs rational Satake parameters (--alphas 1/2,1/3)")
    out = []
    status = "pass"
    for text in cfg.g or DEFAULT_PROPAGATION_G:
        rep = Z.propagation_check(pit, parse_matrix(text, cfg.p), Fraction(cfg.tail_bound), corrupt=cfg.corrupt)
        out.append(rep)
        if rep.status == "fail":
            status = "fail"
        elif rep.status == "inconclusive" and status == "pass":
            status = "inconclusive"
    return status, out


def verify_phi_invariance(cfg: SessionConfig):
    pi = build_datum(cfg, cfg.alphas)
    rep = Z.phi_k_invariance_check(pi, cfg.samples or 100, cfg.seed, cfg.corrupt)
    return rep.passed, [rep]


def verify_projection(cfg: SessionConfig):
    pi = build_datum(cfg, cfg.alphas)
    pair = newform_pair(pi, cfg.max_level)
    rep = Z.projection_identity_check(pi, cfg.samples or 50, cfg.seed, cfg.corrupt, pair)
    idem = Z.idempotence_check(pi)
    equi = Z.k0_equivariance_check(pair, seed=cfg.seed)
    rep.extra.update({"idempotent": idem, "k0_equivariant": equi})
    return rep.passed and idem and equi, [rep]


def conductor_case(p: int, tokens: Sequence[str], max_level: int, corrupt: bool) -> dict:
    """Discovered conductor, the vanishing of Pi^m below it, and the dimension."""
    pi = datum_from_tokens(p, tokens)
    expected = pi.predicted_conductor
    # a conductor beyond predicted + 1 fails either way; stop the search there
    try:
        nf = newform(pi, min(max_level, expected + 1), twist=not corrupt, check_prediction=False)
        found, dim, seeds = nf.conductor, nf.dimension, nf.seeds_checked
    except NewformSearchError as exc:
        found, dim, seeds = None, 0, 0
        log.info("search failed: %s", exc)
    below = {}
    for m in range(0, expected):
        if 0 < m < pi.omega_conductor:
            below[str(m)] = "not a character"
            continue
        M = projection_matrix(pi, m, projection_level(pi, m), twist=not corrupt)
        below[str(m)] = "zero" if not any(M[x] for x in M) else "nonzero"
    ok = found == expected and dim == 1 and all(v != "nonzero" for v in below.values())
    return {"p": p, "chars": list(tokens), "predicted": expected, "discovered": found, "dimension": dim,
            "seeds_proportional": seeds, "below_conductor": below, "passed": ok}


def _battery_jobs(cfg: SessionConfig):
    if cfg.n == 2 and cfg.chars == ["triv", "triv"]:
        return [BATTERY[name] for name in BATTERY]
    return [tuple(cfg.chars)]


def _pool_map(fn, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        futs = [ex.submit(fn, *j) for j in jobs]
        return [f.result() for f in futs]


def verify_conductor(cfg: SessionConfig):
    jobs = [(cfg.p, toks, cfg.max_level, cfg.corrupt) for toks in _battery_jobs(cfg)]
    cases = _pool_map(conductor_case, jobs, cfg.threads)
    return all(c["passed"] for c in cases), cases


def oracle_case(p: int, tokens: Sequence[str], T: int, corrupt: bool):
    pi = datum_from_tokens(p, tokens)
    return Z.oracle_equivalence(pi, T, corrupt=corrupt)


def whittaker_oracle(p: int, bound: int = 4) -> List[dict]:
    """CS vs the GL_2 Jacquet integral on diag(p^l1, p^l2), |l1| + |l2| <= bound."""
    from .whittaker import jacquet_integral_gl2, spherical_whittaker_cs, whittaker_spec

    spec = whittaker_spec(datum_from_tokens(p, ["triv", "triv"]), "psi", 1)
    out = []
    for l1 in range(-bound, bound + 1):
        for l2 in range(-bound + abs(l1), bound - abs(l1) + 1):
            g = [[Fraction(p) ** l1, 0], [0, Fraction(p) ** l2]]
            a = spherical_whittaker_cs(spec, (l1, l2))
            b = jacquet_integral_gl2(spec, g)
            out.append({"lambda": [l1, l2], "cs": str(a), "jacquet": str(b), "equal": (a - b).normalized().is_zero()})
    return out


def verify_oracle_equivalence(cfg: SessionConfig):
    if cfg.n != 2:
        raise UnsupportedError("oracle-equivalence runs the GL_2 battery")
    T = min(cfg.T, 3)
    jobs = [(cfg.p, toks, T, cfg.corrupt) for toks in _battery_jobs(cfg)]
    reports = [r for batch in _pool_map(oracle_case, jobs, cfg.threads) for r in batch]
    whit = whittaker_oracle(cfg.p)
    ok = all(r.equal for r in reports) and all(w["equal"] for w in whit)
    return ok, reports + [("whittaker", whit)]


VERIFY = {
    "main-theorem": verify_main_theorem,
    "gj-spherical": verify_gj_spherical,
    "rs-nn1": verify_rs_nn1,
    "rs-nn": verify_rs_nn,
    "propagation": verify_propagation,
    "phi-invariance": verify_phi_invariance,
    "projection": verify_projection,
    "conductor": verify_conductor,
    "oracle-equivalence": verify_oracle_equivalence,
}


def _item_json(item, timings: bool):
    if isinstance(item, Z.ZetaReport):
        return item.to_json(timings)
    if isinstance(item, tuple):
        return {"check": item[0], "cases": item[1]}
    if hasattr(item, "to_json"):
        return item.to_json()
    return item


def _item_table(item) -> str:
    if isinstance(item, Z.ZetaReport):
        return item.table()
    if isinstance(item, Z.PropagationReport):
        j = item.to_json()
        return (f"g={j['g']}  lhs={j['lhs']}  rhs={j['rhs_partial']}  |diff|<={float(item.diff_bound):.3g}"
                f"  tail={j['tail']}  window={j['window']}  {j['status']}")
    if isinstance(item, Z.IdentityReport):
        return (f"{item.name}: {item.samples} samples (seed {item.seed}), "
                f"{len(item.failures)} failures, extra={item.extra}")
    if isinstance(item, tuple):
        bad = [c for c in item[1] if not c["equal"]]
        return f"{item[0]}: {len(item[1])} cases, {len(bad)} mismatches"
    return json.dumps(item, sort_keys=True)


def _item_csv_rows(item):
    if isinstance(item, Z.ZetaReport):
        return _series_rows([item])
    if isinstance(item, Z.PropagationReport):
        j = item.to_json()
        return [["propagation", json.dumps(j["g"]), j["lhs"], j["rhs_partial"], item.passed]]
    if isinstance(item, Z.IdentityReport):
        return [[item.name, item.samples, item.seed, len(item.failures), item.passed]]
    if isinstance(item, tuple):
        return [[item[0], json.dumps(c["lambda"]), c["cs"], c["jacquet"], c["equal"]] for c in item[1]]
    return [[k, json.dumps(v, sort_keys=True)] for k, v in sorted(item.items())]


def render(payload: dict, items, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "index", "computed", "reference", "ok"])
        for it in items:
            for row in _item_csv_rows(it):
                w.writerow(row)
        return buf.getvalue().rstrip("\n")
    lines = [f"{payload.get('target') or payload.get('object')}  config {payload['config_hash']}"]
    lines += [_item_table(it) for it in items]
    if "status" in payload:
        lines.append(f"status: {payload['status']}")
    return "\n".join(lines)


def emit(cfg: SessionConfig, payload: dict, items, stem: str):
    text = render(payload, items, cfg.format)
    print(text)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}.json").write_text(render(payload, items, "json") + "\n")
        (out / f"{stem}.txt").write_text(render(payload, items, "table") + "\n")
        if cfg.format == "csv":
            (out / f"{stem}.csv").write_text(text + "\n")


def _base_payload(cfg: SessionConfig) -> dict:
    return {"config": cfg.canonical(), "config_hash": cfg.hash(), "seed": cfg.seed}


def cmd_verify(target: str, cfg: SessionConfig) -> int:
    outcome, items = VERIFY[target](cfg)
    if outcome is True or outcome == "pass":
        status, code = "pass", EXIT_OK
    elif outcome == "inconclusive":
        status, code = "inconclusive", EXIT_INCONCLUSIVE
    else:
        status, code = "fail", EXIT_FAIL
    payload = _base_payload(cfg)
    payload.update({"target": target, "status": status, "items": [_item_json(i, cfg.timings) for i in items]})
    first = next((i for i in items if isinstance(i, Z.ZetaReport) and not i.equal), None)
    if first is not None:
        payload["first_mismatch"] = {"check": first.name, "coefficient": first.first_mismatch}
    emit(cfg, payload, items, f"verify-{target}")
    return code


# ---------------------------------------------------------------------------
# compute objects
# ---------------------------------------------------------------------------


def _phi_for(cfg: SessionConfig, pi: LanglandsDatum):
    if cfg.phi in ("main", "row"):
        return Z.SBFunction(cfg.phi, pi.n, pi.p, pi)
    return Z.SBFunction(cfg.phi, pi.n, pi.p)


def cmd_compute(obj: str, cfg: SessionConfig) -> int:
    payload = _base_payload(cfg)
    payload["object"] = obj
    pi = build_datum(cfg, cfg.alphas)
    if obj == "l-factor":
        s = l_factor(pi, cfg.T)
        payload["series"] = series_to_json(s)
        payload["coefficients"] = [str(s[i]) for i in range(s.T)]
    elif obj == "zeta":
        run = Z.gj_zeta_run(pi, _phi_for(cfg, pi), cfg.T, cfg.strategy, newform_pair(pi, cfg.max_level),
                            max_cosets=cfg.max_cosets)
        payload["series"] = series_to_json(run.series)
        payload["coefficients"] = [str(run.series[i]) for i in range(run.series.T)]
        payload["level"] = run.level
    elif obj == "whittaker":
        from .whittaker import jacquet_integral_gl2, spherical_whittaker_cs, whittaker_spec

        if cfg.lam is not None:
            lam = tuple(int(x) for x in cfg.lam.split(","))
            val = spherical_whittaker_cs(whittaker_spec(pi), lam)
            payload["lambda"] = list(lam)
        elif cfg.g:
            val = None
            for depth in range(0, 9):
                try:
                    val = jacquet_integral_gl2(whittaker_spec(pi, "psi", depth), parse_matrix(cfg.g[0], cfg.p))
                    break
                except DepthError:
                    continue
            if val is None:
                raise DepthError("no psi depth up to 8 suffices for this g")
            payload["g"] = cfg.g[0]
        else:
            raise ConfigError("compute whittaker needs --lam or --g")
        payload["value"] = str(val)
    elif obj == "newform":
        nf = newform(pi, cfg.max_level)
        payload.update({"conductor": nf.conductor, "dimension": nf.dimension, "level": nf.vector.level})
        if cfg.dump_newform:
            payload["table"] = nf.vector.to_json()
    elif obj == "beta":
        if not cfg.g:
            raise ConfigError("compute beta needs --g")
        pair = newform_pair(pi, cfg.max_level)
        g = parse_matrix(cfg.g[0], cfg.p)
        payload.update({"g": cfg.g[0], "conductor": pair.conductor,
                        "value": format_poly(matrix_coefficient(pair, g, certify=True))})
    text_items = [{k: v for k, v in payload.items() if k not in ("config", "series", "table")}]
    emit(cfg, payload, text_items, f"compute-{obj}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _csv_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--chars", type=_csv_list, help="e.g. quad,triv")
    common.add_argument("--alphas", type=_csv_list, help="Satake names or rationals, e.g. a1,a2 or 1/2,1/3")
    common.add_argument("--alphas-prime", dest="alphas_prime", type=_csv_list,
                        help="Satake names for the second datum of a Rankin-Selberg integral")
    common.add_argument("--T", type=int, help="number of series coefficients")
    common.add_argument("--strategy", choices=("hermite", "brute"))
    common.add_argument("--max-level", dest="max_level", type=int, help="conductor search budget")
    common.add_argument("--max-cosets", dest="max_cosets", type=int, help="enumeration budget per shell")
    common.add_argument("--tail-bound", dest="tail_bound", help="exact rational, e.g. 1/1000000")
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--g", action="append", help="matrix 'a,b;c,d', entries may use p^k")
    common.add_argument("--lam", help="torus exponents for compute whittaker, e.g. 2,0")
    common.add_argument("--phi", choices=Z.SHAPES)
    common.add_argument("--corrupt", "--corrupt-phi", dest="corrupt", action="store_const", const=True,
                        help="negative control: apply the target's corruption hook")
    common.add_argument("--out", help="directory for report files")
    common.add_argument("--format", choices=("json", "csv", "table"))
    common.add_argument("--config", help="JSON file with any of the options above")
    common.add_argument("--threads", type=int, help="worker processes (default $GJZETA_THREADS or 1)")
    common.add_argument("--timings", action="store_const", const=True, help="include runtimes in JSON")
    common.add_argument("--dump-newform", dest="dump_newform", action="store_const", const=True)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gjzeta", description="Exact local zeta integrals for GL_n over Q_p.")
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run an identity check")
    v.add_argument("target", choices=TARGETS)
    c = sub.add_parser("compute", parents=[common], help="print an exact object")
    c.add_argument("object", choices=OBJECTS)
    return parser


def config_from_args(args: argparse.Namespace) -> SessionConfig:
    values = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    env_threads = os.environ.get("GJZETA_THREADS")
    if env_threads and "threads" not in values:
        try:
            values["threads"] = int(env_threads)
        except ValueError as exc:
            raise ConfigError("GJZETA_THREADS must be an integer") from exc
    known = set(SessionConfig.__dataclass_fields__)
    for k in list(values):
        key = k.replace("-", "_")
        if key not in known:
            raise ConfigError(f"unknown config key {k!r}")
        values[key] = values.pop(k)
    for k in known:
        val = getattr(args, k, None)
        if val is not None:
            values[k] = val
    for k in ("chars", "alphas", "alphas_prime", "g"):
        if isinstance(values.get(k), str):
            values[k] = _csv_list(values[k]) if k != "g" else [values[k]]
    if "n" not in values and values.get("chars"):
        values["n"] = len(values["chars"])
    if "tail_bound" in values:
        values["tail_bound"] = str(values["tail_bound"])
    try:
        cfg = SessionConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "verify":
            return cmd_verify(args.target, cfg)
        return cmd_compute(args.object, cfg)
    except (ConfigError, UnsupportedError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Z.BudgetExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (PrecisionError, StabilizationError, LevelError, DepthError) as exc:
        print(f"precision/level budget exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except NewformSearchError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
