"""Command line driver: build, certify, count, verify, profile.

Exit codes: 0 pass, 1 a mathematical check failed, 2 input error,
3 time budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from collections import Counter
from fractions import Fraction
from importlib import metadata

from .exterior import DUAL, Multivector
from .field import Field
from .structure import (
    Certificate,
    ParameterError,
    StructureError,
    build_instance,
    certify,
    find_certified,
    instance_from_forms,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
FORMAT = "kuchle-instance/1"

log = logging.getLogger("kuchle")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# instance files


def _scalar_text(x) -> str:
    if hasattr(x, "v"):
        return str(x.v)
    return str(Fraction(x))


def _parse_scalar(text, field: Field):
    try:
        return field.parse_element(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse {text!r} in {field!r}: {exc}") from exc


def _terms(entries, grade, name, field: Field):
    out = {}
    for e in entries:
        if not isinstance(e, (list, tuple)) or len(e) != grade + 1:
            raise InputError(f"{name}: each entry needs {grade} indices and a coefficient, got {e!r}")
        idx = tuple(e[:grade])
        if any(not isinstance(i, int) or not 0 <= i <= 6 for i in idx):
            raise InputError(f"{name}: indices must be integers in 0..6, got {idx}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise InputError(f"{name}: indices must be strictly increasing, got {idx}")
        if idx in out:
            raise InputError(f"{name}: monomial {idx} listed twice")
        out[idx] = _parse_scalar(e[grade], field)
    return Multivector.from_terms(field, 7, grade, out, DUAL)


def _form_entries(form: Multivector):
    return [list(idx) + [_scalar_text(c)] for idx, c in form.terms()]


def read_instance(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("instance file must hold a JSON object")
    if "field" not in data:
        raise InputError("instance file needs a 'field' entry")
    try:
        Field.parse(str(data["field"]))
    except ValueError as exc:
        raise InputError(f"bad field {data['field']!r}: {exc}") from exc
    has_params = "params" in data
    has_forms = "lambda" in data or "mu" in data
    if has_params == has_forms:
        raise InputError("give exactly one of 'params' or explicit 'lambda' and 'mu'")
    if has_forms and not ("lambda" in data and "mu" in data):
        raise InputError("explicit instances need both 'lambda' and 'mu'")
    return data


def canonical_text(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def file_field(data) -> Field:
    return Field.parse(str(data["field"]))


def forms_over(data: dict, field: Field):
    """(λ, μ, ν or None) over ``field``; rational entries are reduced when field is F_q."""
    src = file_field(data)
    if "params" in data:
        M, K = _params_over(data, field)
        inst = build_instance(M, K, field)
        lam, mu = inst.lam, inst.mu
    else:
        lam = _reduce(_terms(data["lambda"], 4, "lambda", src), field)
        mu = _reduce(_terms(data["mu"], 2, "mu", src), field)
    return lam, mu, _nu_over(data, field)


def _nu_over(data, field: Field):
    if data.get("nu") is None:
        return None
    return _reduce(_terms(data["nu"], 3, "nu", file_field(data)), field)


def _lift(x):
    return Fraction(x.v) if hasattr(x, "v") else Fraction(x)


def _reduce(form: Multivector, field: Field) -> Multivector:
    if form.field == field:
        return form
    try:
        coeffs = tuple(field(_lift(c)) for c in form.coeffs)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"coefficients are not defined over {field!r}: {exc}") from exc
    return Multivector(form.dim, form.grade, form.variance, coeffs, field)


def _params_over(data, field: Field):
    src = file_field(data)
    p = data["params"]
    if not isinstance(p, dict) or "M" not in p or "K" not in p:
        raise InputError("'params' needs 'M' (6 values) and 'K' (3 values)")
    if len(p["M"]) != 6 or len(p["K"]) != 3:
        raise InputError("'params' needs exactly 6 values of M and 3 of K")
    try:
        M = [field(_lift(_parse_scalar(x, src))) for x in p["M"]]
        K = [field(_lift(_parse_scalar(x, src))) for x in p["K"]]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"parameters are not defined over {field!r}: {exc}") from exc
    return M, K


def instance_over(data: dict, field: Field):
    """An Instance over ``field`` (certified or not) plus ν or None."""
    if "params" in data:
        M, K = _params_over(data, field)
        inst = build_instance(M, K, field)
        return inst, _nu_over(data, field)
    lam, mu, nu = forms_over(data, field)
    return instance_from_forms(lam, mu), nu


# ---------------------------------------------------------------------------
# reports


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if hasattr(x, "v") or isinstance(x, Fraction):
        return _scalar_text(x)
    return str(x)


def certificate_block(cert: Certificate, field: Field) -> dict:
    items = {}
    for name in Certificate.ITEMS:
        it = getattr(cert, name)
        items[name] = {"ok": it.ok, "witness": _jsonable(it.witness), "note": it.note}
    block = {"field": repr(field), "pass": cert.passed, "items": items}
    if cert.normal is not None:
        block["normal_form"] = {
            "M": _jsonable(list(cert.normal.M)),
            "K_projective": _jsonable(list(cert.normal.projective_K())),
        }
    if cert.errors:
        block["errors"] = list(cert.errors)
    return block


class Report:
    def __init__(self, command: str, args, input_hash: str | None):
        self.data = {
            "tool": "kuchle",
            "version": _version(),
            "command": command,
            "input_hash": input_hash,
            "seed": getattr(args, "seed", None),
        }
        self.timings = {}
        self.start = time.monotonic()

    def put(self, key, value):
        self.data[key] = value

    def timed(self, key, seconds):
        self.timings[key] = round(seconds, 3)

    def finish(self, exit_code: int) -> dict:
        self.data["exit_code"] = exit_code
        self.timings["total"] = round(time.monotonic() - self.start, 3)
        self.data["timings"] = self.timings
        return self.data


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _strip_time(d: dict, key: str, report: Report) -> dict:
    d = dict(d)
    if "seconds" in d:
        report.timed(key, d.pop("seconds"))
    return d


def emit(report: Report, exit_code: int, args) -> int:
    data = report.finish(exit_code)
    text = json.dumps(_jsonable(data), indent=2) + "\n"
    if args.json_out == "-":
        sys.stdout.write(text)
    elif args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
    return exit_code


def say(args, msg: str):
    if args.json_out != "-":
        print(msg)


# ---------------------------------------------------------------------------
# commands


def cmd_build(args) -> int:
    report = Report("build", args, None)
    if args.random:
        if args.q is None:
            raise InputError("--random needs --q (a prime field)")
        field = Field(args.q)
        res = find_certified(field, seed=args.seed, retries=args.retries)
        hist = dict(sorted(Counter(res.rejections).items()))
        report.put("attempts", res.attempts)
        report.put("rejections", hist)
        say(args, f"sampled {res.attempts} parameter sets; rejections: {hist or 'none'}")
        if res.instance is None:
            say(args, "no certified instance found")
            return emit(report, EXIT_FAIL, args)
        M, K = res.instance.params
        data = {"format": FORMAT, "field": field.describe(),
                "params": {"M": [_scalar_text(x) for x in M], "K": [_scalar_text(x) for x in K]},
                "seed": args.seed}
    elif args.from_file:
        src = read_instance(args.from_file)
        field = file_field(src)
        lam, mu, nu = forms_over(src, field)
        data = {"format": FORMAT, "field": field.describe()}
        if "params" in src:
            M, K = _params_over(src, field)
            build_instance(M, K, field)
            data["params"] = {"M": [_scalar_text(x) for x in M], "K": [_scalar_text(x) for x in K]}
        else:
            data["lambda"] = _form_entries(lam)
            data["mu"] = _form_entries(mu)
        if nu is not None:
            data["nu"] = _form_entries(nu)
        if src.get("seed") is not None:
            data["seed"] = src["seed"]
    else:
        if args.M is None or args.K is None:
            raise InputError("give --M and --K, or --random, or --from")
        field = Field(args.q) if args.q else Field.parse(args.field)
        M = [_parse_scalar(x, field) for x in args.M]
        K = [_parse_scalar(x, field) for x in args.K]
        build_instance(M, K, field)  # validates, raising ParameterError
        data = {"format": FORMAT, "field": field.describe(),
                "params": {"M": [_scalar_text(x) for x in M], "K": [_scalar_text(x) for x in K]}}
    text = canonical_text(data)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        say(args, f"wrote {args.out}")
    else:
        if args.json_out != "-":
            sys.stdout.write(text)
    report.put("instance", data)
    return emit(report, EXIT_OK, args)


def _load(args):
    data = read_instance(args.instance)
    digest = hashlib.sha256(canonical_text(data).encode()).hexdigest()
    return data, digest


def _field_for(args, data) -> Field:
    if getattr(args, "q", None):
        return Field(args.q)
    return file_field(data)


def _certify_at(data, field, report, args, key="certificate"):
    """Returns (instance or None, ν, certificate or None)."""
    try:
        inst, nu = instance_over(data, field)
    except ParameterError as exc:
        report.put(key, {"field": repr(field), "pass": False,
                         "parameter_errors": [[f, c, m] for f, c, m in exc.problems]})
        return None, None, None
    except StructureError:
        lam, mu, nu = forms_over(data, field)
        cert = certify(lam, mu)
        report.put(key, certificate_block(cert, field))
        return None, nu, cert
    cert = certify(inst.lam, inst.mu)
    report.put(key, certificate_block(cert, field))
    return inst, nu, cert


def cmd_certify(args) -> int:
    data, digest = _load(args)
    report = Report("certify", args, digest)
    field = _field_for(args, data)
    t0 = time.monotonic()
    _, _, cert = _certify_at(data, field, report, args)
    report.timed("certify", time.monotonic() - t0)
    if cert is None:
        for f, c, m in report.data["certificate"]["parameter_errors"]:
            say(args, f"{c} ({f}): {m}")
        say(args, f"parameters do not define an instance over {field!r}")
        return emit(report, EXIT_FAIL, args)
    for name in Certificate.ITEMS:
        it = getattr(cert, name)
        say(args, f"{name:20s} {'pass' if it.ok else 'FAIL'}  witness={_jsonable(it.witness)}")
    say(args, "certified" if cert.passed else f"not certified: {', '.join(cert.failures())}")
    return emit(report, EXIT_OK if cert.passed else EXIT_FAIL, args)


def _need_q(args, data) -> list:
    qs = getattr(args, "q_list", None) or ([args.q] if getattr(args, "q", None) else [])
    if not qs:
        f = file_field(data)
        if not f.is_finite:
            raise InputError("counting needs --q for a rational instance")
        qs = [f.char]
    for q in qs:
        if q < 5:
            raise InputError(f"q = {q}: certified runs need an odd prime q >= 5")
        Field(q)
    return qs


def _geometry(data, q, report, args, key):
    from .fingeom import Geometry

    field = Field(q)
    inst, nu, cert = _certify_at(data, field, report, args, key)
    if inst is None or cert is None or not cert.passed:
        return None, nu
    return Geometry(inst, nu), nu


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds
        self.start = time.monotonic()

    def left(self):
        if self.seconds is None:
            return None
        return max(0.0, self.seconds - (time.monotonic() - self.start))


def cmd_count(args) -> int:
    from .fingeom import VarietyId, count, sample_nu

    data, digest = _load(args)
    report = Report("count", args, digest)
    try:
        variety = VarietyId.parse(args.variety)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    (q,) = _need_q(args, data)[:1]
    geom, nu = _geometry(data, q, report, args, "certificate")
    if geom is None:
        say(args, f"instance is not certified over F_{q}; refusing to count")
        return emit(report, EXIT_FAIL, args)
    if variety in (VarietyId.X4, VarietyId.Sigma) and geom.nu is None:
        nu, attempts = sample_nu(geom, args.seed)
        geom.set_nu(nu)
        report.put("nu", {"source": "sampled", "attempts": attempts, "terms": _form_entries(nu)})
    budget = Budget(args.budget_seconds)
    rep = count(variety, geom, args.threads, budget.left())
    d = _strip_time(rep.as_dict(), f"count:{variety.value}", report)
    report.put("count", d)
    say(args, f"{variety.value} over F_{q}: observed {rep.observed}"
        + ("" if rep.expected is None else f", expected {rep.expected}"))
    code = EXIT_FAIL if rep.passed is False else EXIT_OK
    return emit(report, code, args)


FAST_VARIETIES = (
    "LGr3Wbar_lambda", "X5", "F_flag", "S_surface", "Z_scroll", "GrXi2W", "Dlm", "LGr2Wbar",
    "LGr3Wbar", "LGr3W_odd", "GrLambda5W", "Qdual_lambda", "ZeroLocus_gr26", "ZeroLocus_gr46",
)


def verify_at(data, q, args, report, budget: Budget) -> dict:
    """Run the verification suite at one q; returns a dict with a 'pass' entry."""
    from . import fingeom
    from .fingeom import VarietyId
    from .motive import reconcile

    out = {}
    key = f"q={q}"
    geom, nu = _geometry(data, q, report, args, f"certificate_q{q}")
    if geom is None:
        out["refused"] = "instance not certified"
        out["pass"] = False
        return out
    reports = []
    for name in FAST_VARIETIES:
        rep = fingeom.count(VarietyId(name), geom, args.threads, budget.left())
        reports.append(rep)
        report.timed(f"{key}:count:{name}", rep.seconds)
    out["counts"] = {r.variety: {k: v for k, v in r.as_dict().items() if k != "seconds"}
                     for r in reports}
    rec = reconcile(reports)
    out["verdicts"] = [v.as_dict() for v in rec.verdicts]
    t0 = time.monotonic()
    prof = fingeom.rank_profile(geom, "LGr_section", args.threads, budget.left())
    out["rank_profile_LGr_section"] = _strip_time(prof.as_dict(), f"{key}:profile", report)
    mid = fingeom.flag_middle_count(geom, args.threads)
    lgr = out["counts"]["LGr3Wbar_lambda"]["observed"]
    out["flag_middle"] = {**mid, "expected": (1 + q + q * q) * lgr,
                          "pass": mid["middle"] == (1 + q + q * q) * lgr}
    out["projection"] = fingeom.projection_check(geom, args.threads)
    out["sigma_fibration"] = fingeom.sigma_fibration(geom, threads=args.threads)
    special = fingeom.special_checks(geom, args.seed, args.threads)
    out["special_checks"] = _strip_time(special.as_dict(), f"{key}:special", report)
    report.timed(f"{key}:structure_checks", time.monotonic() - t0)
    ok = (
        rec.passed and prof.passed and out["flag_middle"]["pass"]
        and out["projection"]["injective"] and out["projection"]["image_equals_Dlm"]
        and out["sigma_fibration"]["all_fibers_q_plus_1"] and special.passed
    )
    if args.level == "full":
        gr4 = fingeom.rank_profile(geom, "Gr4_section", args.threads, budget.left())
        out["rank_profile_Gr4_section"] = _strip_time(gr4.as_dict(), f"{key}:gr4", report)
        ff = fingeom.fourfold_counts(geom, nu, args.seed, args.threads, budget.left())
        out["fourfold"] = {
            k: (_strip_time(v.as_dict(), f"{key}:{k}", report) if hasattr(v, "as_dict") else v)
            for k, v in ff.items()
        }
        ok = ok and gr4.passed and ff["Sigma"].passed is not False
    out["pass"] = bool(ok)
    return out


def cmd_verify(args) -> int:
    data, digest = _load(args)
    report = Report("verify", args, digest)
    qs = _need_q(args, data)
    budget = Budget(args.budget_seconds)
    results = {}
    for q in qs:
        results[f"q={q}"] = verify_at(data, q, args, report, budget)
        r = results[f"q={q}"]
        say(args, f"q={q}: {'pass' if r['pass'] else 'FAIL'}")
        for v in r.get("verdicts", []):
            say(args, f"  {v['name']:18s} {'pass' if v['pass'] else 'FAIL'}  {v['detail']}")
        if "refused" in r:
            say(args, f"  refused: {r['refused']}")
    report.put("level", args.level)
    report.put("results", results)
    code = EXIT_OK if all(r["pass"] for r in results.values()) else EXIT_FAIL
    return emit(report, code, args)


def cmd_profile(args) -> int:
    from . import fingeom

    data, digest = _load(args)
    report = Report("profile", args, digest)
    (q,) = _need_q(args, data)[:1]
    geom, _ = _geometry(data, q, report, args, "certificate")
    if geom is None:
        say(args, f"instance is not certified over F_{q}; refusing to profile")
        return emit(report, EXIT_FAIL, args)
    prof = fingeom.rank_profile(geom, args.domain, args.threads, args.budget_seconds)
    report.put("profile", _strip_time(prof.as_dict(), "profile", report))
    say(args, f"{args.domain} over F_{q}: {prof.histogram}  {'pass' if prof.passed else 'FAIL'}")
    return emit(report, EXIT_OK if prof.passed else EXIT_FAIL, args)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads for counting")
    common.add_argument("--budget-seconds", type=float, default=None,
                        help="give up with exit code 3 after this many seconds")
    common.add_argument("--json-out", default=None, help="write the JSON report here ('-' for stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="kuchle", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="write a canonical instance file")
    b.add_argument("--M", nargs=6, metavar="M_i")
    b.add_argument("--K", nargs=3, metavar="K_i")
    b.add_argument("--field", default="rational", help="rational, or an odd prime")
    b.add_argument("--q", type=int, help="shorthand for a prime field")
    b.add_argument("--random", action="store_true", help="sample until certification passes")
    b.add_argument("--retries", type=int, default=200)
    b.add_argument("--from", dest="from_file", help="canonicalize an existing instance file")
    b.add_argument("-o", "--out", help="output path (default: stdout)")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("certify", parents=[common], help="check the genericity assumptions")
    c.add_argument("instance")
    c.add_argument("--q", type=int, help="certify over F_q instead of the file's field")
    c.set_defaults(func=cmd_certify)

    n = sub.add_parser("count", parents=[common], help="count F_q-points of one variety")
    n.add_argument("instance")
    n.add_argument("--variety", required=True)
    n.add_argument("--q", type=int)
    n.set_defaults(func=cmd_count)

    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("instance")
    v.add_argument("--q", type=int, nargs="+", dest="q_list")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("profile", parents=[common], help="rank histogram of the map λ̂")
    p.add_argument("instance")
    p.add_argument("--q", type=int)
    p.add_argument("--domain", choices=("LGr_section", "Gr4_section"), default="LGr_section")
    p.set_defaults(func=cmd_profile)
    return ap


def main(argv=None) -> int:
    from .fingeom import BudgetExceeded, UnsupportedField

    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ParameterError as exc:
        for fld, code, msg in exc.problems:
            print(f"error: {code} ({fld}): {msg}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, UnsupportedField) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
