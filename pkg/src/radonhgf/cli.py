"""Command-line front end: ``radonhgf <command> [flags]``.

Every command prints JSON on stdout and a one-line-per-check table on
stderr. Exit status is 0 when every check passes, 1 when any check fails
and 2 for invalid input or a resource-guard rejection.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
import json
import os
import sys

from radonhgf import contiguity, jordan, kernels, matint, weyl
from radonhgf.jordan import AlphaParams, Partition
from radonhgf.report import ResourceGuardError, VerificationReport, _jsonable, numeric_report

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_SEED = 20240611
DEFAULT_TOL = 1e-9

# per-command symbolic guards, lifted by --lift-guards
GUARDS = {"capelli": 3, "cayley": 4, "capelli-2": 3, "contiguity": 2}


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _floats(text):
    out = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            v = complex(tok.replace(" ", ""))
        except ValueError:
            raise InputError(f"not a number: {tok!r}") from None
        out.append(v.real if v.imag == 0 else v)
    if not out:
        raise InputError("empty number list")
    return out


def build_parser():
    p = _Parser(prog="radonhgf", description="Exact and numeric checks for matrix hypergeometric integrands.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    names = [
        "capelli",
        "cayley",
        "theta",
        "char",
        "validate-params",
        "contiguity",
        "proof-identity",
        "normal-form",
        "beta",
        "gamma",
        "beta-contiguity",
        "gamma-contiguity",
        "verify-all",
    ]
    for name in names:
        s = sub.add_parser(name)
        s.add_argument("--r", type=int)
        s.add_argument("--m", type=int)
        s.add_argument("--lambda", dest="lam")
        s.add_argument("--alpha")
        s.add_argument("--a")
        s.add_argument("--b")
        s.add_argument("--i", type=int)
        s.add_argument("--j", type=int)
        s.add_argument("--seed", type=int, default=DEFAULT_SEED)
        s.add_argument("--tol", type=float)
        s.add_argument("--nodes", type=int, default=matint.DEFAULT_NODES)
        s.add_argument("--mode", choices=["symbolic", "numeric", "quad", "mc"])
        s.add_argument("--variant")
        s.add_argument("--kind")
        s.add_argument("--trials", type=int)
        s.add_argument("--input")
        s.add_argument("--output")
        s.add_argument("--max-r", type=int)
        s.add_argument("--lift-guards", action="store_true")
        s.add_argument("--precision", choices=["double", "mp"], default="double")
        s.add_argument("--perturb", type=int, default=0, help="negative-control perturbation")
        s.add_argument("--no-timing", action="store_true", help="omit elapsed_ms for byte-stable output")
    return p


def _guard(args, command):
    if args.lift_guards:
        return None
    return args.max_r if args.max_r is not None else GUARDS[command]


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InputError("missing required flag(s): " + ", ".join("--" + n.replace("lam", "lambda") for n in missing))


def _partition(args):
    _need(args, "lam")
    try:
        return Partition.parse(args.lam)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _alpha(args):
    try:
        return AlphaParams.parse(args.alpha)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON input {path}: {exc}") from None


def _values(data):
    """Result object for evaluation commands; ``status`` is always pass."""
    return VerificationReport(check=data.pop("check"), params=data.pop("params"), status="pass", details=data)


# --------------------------------------------------------------------------
# commands


def cmd_capelli(args):
    _need(args, "r")
    return [weyl.capelli_check(args.r, max_r=_guard(args, "capelli"), shift_perturb=args.perturb)]


def cmd_cayley(args):
    _need(args, "r")
    guard = _guard(args, "cayley")
    reps = [weyl.cayley_check(args.r, max_r=guard, b_perturb=args.perturb)]
    if guard is None or args.r <= GUARDS["capelli-2"]:
        reps.append(weyl.capelli2_check(args.r))
    return reps


def cmd_theta(args):
    if args.input:
        h = jordan.tmp_from_json(_read_json(args.input))
        thetas = [jordan.tmp_to_json(jordan.TruncMatPoly([c]))["coeffs"][0] for c in jordan.tmp_log(h).coeffs[1:]]
        return [_values({"check": "theta-eval", "params": {"input": args.input}, "theta": thetas})]
    return [jordan.check_theta_expansion(args.r or 2)]


def cmd_char(args):
    lam = _partition(args)
    if args.input:
        _need(args, "alpha")
        obj = _read_json(args.input)
        blocks = [jordan.tmp_from_json(b) for b in obj["blocks"]] if isinstance(obj, dict) else None
        if blocks is None:
            raise InputError("char input must be {\"blocks\": [TruncMatPoly, ...]}")
        alpha = _alpha(args)
        value = jordan.char_lambda(lam, blocks[0].r, blocks, alpha)
        log = jordan.char_lambda_log(lam, blocks[0].r, blocks, alpha)
        return [_values({"check": "char-eval", "params": {"lambda": list(lam.parts), "alpha": str(alpha)},
                         "value": complex(value), "log_value": complex(log)})]
    _need(args, "r", "m")
    return [contiguity.check_character_covariance(lam, args.r, args.m, args.trials or 20, args.seed,
                                                  args.tol or DEFAULT_TOL)]


def cmd_validate_params(args):
    lam = _partition(args)
    _need(args, "m", "alpha")
    try:
        res = jordan.validate_params(lam, args.m, _alpha(args))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = VerificationReport(
        check="validate-params",
        params={"lambda": list(lam.parts), "m": args.m, "alpha": args.alpha},
        status="pass" if res.ok else "fail",
        details=res.to_dict(),
    )
    return [rep]


def cmd_contiguity(args):
    lam = _partition(args)
    _need(args, "r", "m", "i", "j")
    mode = args.mode or "numeric"
    if mode == "symbolic":
        if set(lam.parts) != {1}:
            raise InputError("symbolic mode covers lambda = (1, ..., 1) only")
        guard = _guard(args, "contiguity")
        return [contiguity.check_nonconf_integrand(args.r, args.m, args.i, args.j, n=lam.length, max_r=guard)]
    return [
        contiguity.check_conf_integrand(
            lam, args.r, args.m, args.i, args.j,
            alpha=_alpha(args) if args.alpha else None,
            trials=args.trials or 20, seed=args.seed, tol=args.tol or 1e-8,
            exponent_perturb=args.perturb, precision=args.precision,
        )
    ]


def cmd_proof_identity(args):
    _need(args, "kind", "r")
    return [contiguity.check_proof_identities(args.kind, args.r, args.trials or 10, args.seed, args.tol or DEFAULT_TOL)]


def cmd_normal_form(args):
    lam = _partition(args)
    if args.input:
        try:
            z = contiguity.ZPoint.from_json(_read_json(args.input))
            nf = contiguity.normal_form_3blocks(lam, z, args.variant)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        enc = lambda mat: [[str(x) if isinstance(x, (int, Fraction)) else complex(x) for x in row] for row in mat]  # noqa: E731
        return [_values({
            "check": "normal-form-eval",
            "params": {"lambda": list(lam.parts), "variant": nf.variant},
            "g": enc(nf.g),
            "h": [jordan.tmp_to_json(h) for h in nf.h],
            "x": nf.x.to_json(),
            "variants_tried": nf.tried,
        })]
    _need(args, "r")
    return [contiguity.check_normal_forms(lam, args.r, args.trials or 100, args.seed, args.variant)]


def cmd_gamma(args):
    _need(args, "r", "a")
    if args.mode == "mc":
        rows = [{"a": a, "mc": matint.gamma_r_mc(args.r, a, seed=args.seed), "closed": matint.gamma_r_closed(args.r, a)}
                for a in _floats(args.a)]
        errs = [abs(row["mc"] / row["closed"] - 1) for row in rows]
        return [numeric_report("gamma-mc", {"r": args.r, "a": _floats(args.a)}, errs, args.tol or matint.MC_TOL,
                               seed=args.seed, details={"values": rows})]
    spec = matint.QuadratureSpec("gauss_laguerre_0inf", args.nodes, args.r)
    return [matint.check_gamma_closed(args.r, _floats(args.a), spec, args.tol or 1e-8)]


def cmd_beta(args):
    _need(args, "r", "a", "b")
    pairs = list(zip(_floats(args.a), _floats(args.b)))
    if args.mode == "mc":
        rows = [{"a": a, "b": b, "mc": matint.beta_r_mc(args.r, a, b, seed=args.seed),
                 "closed": matint.beta_r_closed(args.r, a, b)} for a, b in pairs]
        errs = [abs(row["mc"] / row["closed"] - 1) for row in rows]
        return [numeric_report("beta-mc", {"r": args.r, "pairs": pairs}, errs, args.tol or matint.MC_TOL,
                               seed=args.seed, details={"values": rows})]
    spec = matint.QuadratureSpec("gauss_legendre_01", args.nodes, args.r)
    return [matint.check_beta_closed(args.r, pairs, spec, args.tol or 1e-8)]


def cmd_gamma_contiguity(args):
    _need(args, "r", "a")
    spec = matint.QuadratureSpec("gauss_laguerre_0inf", args.nodes, args.r)
    return [matint.check_gamma_contiguity(args.r, _floats(args.a), spec, args.tol or DEFAULT_TOL)]


def cmd_beta_contiguity(args):
    _need(args, "r", "a", "b")
    spec = matint.QuadratureSpec("gauss_legendre_01", args.nodes, args.r)
    return [matint.check_beta_contiguity(args.r, list(zip(_floats(args.a), _floats(args.b))), spec, args.tol or 1e-8)]


# --------------------------------------------------------------------------
# verify-all


def suite(max_r=2, seed=DEFAULT_SEED):
    """Declaration-ordered ``(label, dotted function, kwargs, expect_pass)`` tasks."""
    rs = range(1, max_r + 1)
    tasks = []
    add = lambda fn, expect=True, **kw: tasks.append((fn, kw, expect))  # noqa: E731
    for r in rs:
        add("weyl.capelli_check", r=r, max_r=None)
    for r in rs:
        add("weyl.cayley_check", r=r, max_r=None)
    for r in rs:
        add("weyl.capelli2_check", r=r)
    add("jordan.check_theta_expansion", r=2)
    for r in range(1, min(max_r, 2) + 1):
        add("contiguity.check_operator_structure", r=r, m=r + 1)
        for n in (2, 3):
            for m in range(r + 1, 5):
                for i in range(1, n + 1):
                    for j in range(1, n + 1):
                        if i != j:
                            add("contiguity.check_nonconf_integrand", r=r, m=m, i=i, j=j, n=n)
    for lam in ((1, 1, 1), (2, 1), (2, 2), (3, 1)):
        for r in range(1, min(max_r, 2) + 1):
            m = max(r + 1, 2 * r)
            for i in range(1, len(lam) + 1):
                for j in range(1, len(lam) + 1):
                    if i != j:
                        add("contiguity.check_conf_integrand", lam=lam, r=r, m=m, i=i, j=j, trials=20, seed=seed,
                            tol=1e-8)
    for r in range(1, min(max_r, 2) + 1):
        for m in range(r + 1, 4):
            add("contiguity.check_covariance_lemma", r=r, m=m, trials=20, seed=seed)
        add("contiguity.check_character_covariance", lam=(2, 1), r=r, m=2 * r, trials=20, seed=seed)
    for r in range(1, min(max_r, 2) + 1):
        add("contiguity.check_normal_forms", lam=(1, 1, 1), r=r, draws=100, seed=seed)
        for var in ("1", "2"):
            add("contiguity.check_normal_forms", lam=(2, 1), r=r, draws=100, seed=seed, variant=var)
        add("contiguity.check_u_factor", r=r, seed=seed)
        for kind in ("beta_13", "beta_12", "beta_23", "gamma_21", "gamma_12", "expdet"):
            add("contiguity.check_proof_identities", kind=kind, r=r, trials=10, seed=seed)
    add("contiguity.check_proof_identities", kind="expdet", r=3, trials=10, seed=seed, tol=1e-10)
    for r in (1, 2):
        add("matint.check_gamma_closed", r=r, a_list=[r + 1, r + 1.5, r + 3], tol=1e-8)
    add("matint.check_gamma_closed", r=3, a_list=[4], tol=1e-6)
    for r in (1, 2):
        add("matint.check_beta_closed", r=r, pairs=[(r + 1, r + 2), (r + 1.5, r + 2.5)], tol=1e-8)
        add("matint.check_gamma_contiguity", r=r, a_list=[r + 1, r + 2.5], tol=1e-9)
        add("matint.check_beta_contiguity", r=r, pairs=[(r + 1, r + 1), (r + 1, r + 2), (r + 1.5, r + 0.5)],
            tol=1e-8)
    # negative controls: each perturbed check must fail
    add("weyl.capelli_check", expect=False, r=2, shift_perturb=1)
    add("weyl.cayley_check", expect=False, r=2, b_perturb=1)
    add("contiguity.check_conf_integrand", expect=False, lam=(2, 2), r=2, m=4, i=1, j=2, trials=5, seed=seed,
        tol=1e-8, exponent_perturb=1)
    add("contiguity.check_conf_integrand", expect=False, lam=(1, 1, 1), r=2, m=4, i=1, j=2, trials=5, seed=seed,
        tol=1e-8, exponent_perturb=1)
    return tasks


_MODULES = {"weyl": weyl, "jordan": jordan, "contiguity": contiguity, "matint": matint}


def run_task(task):
    fn_name, kwargs, expect = task
    mod, fn = fn_name.split(".")
    rep = getattr(_MODULES[mod], fn)(**kwargs)
    if not expect:
        inner = rep.status
        rep.details = {**rep.details, "negative_control": True, "perturbed_status": inner}
        rep.check = "negative-control:" + rep.check
        rep.status = "pass" if inner == "fail" else "fail"
    return rep


def worker_count():
    env = os.environ.get("RADON_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise InputError(f"RADON_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise InputError("RADON_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def verify_all(max_r=2, seed=DEFAULT_SEED, workers=None):
    tasks = suite(max_r, seed)
    workers = workers or worker_count()
    if workers == 1:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_task, tasks, chunksize=1))


def cmd_verify_all(args):
    max_r = args.max_r if args.max_r is not None else 2
    if max_r < 1:
        raise InputError("--max-r must be >= 1")
    if max_r > 4 and not args.lift_guards:
        raise ResourceGuardError(f"verify-all with max_r={max_r} exceeds the guard 4; pass --lift-guards")
    return verify_all(max_r, args.seed)


COMMANDS = {
    "capelli": cmd_capelli,
    "cayley": cmd_cayley,
    "theta": cmd_theta,
    "char": cmd_char,
    "validate-params": cmd_validate_params,
    "contiguity": cmd_contiguity,
    "proof-identity": cmd_proof_identity,
    "normal-form": cmd_normal_form,
    "beta": cmd_beta,
    "gamma": cmd_gamma,
    "beta-contiguity": cmd_beta_contiguity,
    "gamma-contiguity": cmd_gamma_contiguity,
    "verify-all": cmd_verify_all,
}


def render(reports, args):
    timing = not args.no_timing
    items = [r.to_dict(timing=timing) for r in reports]
    for item in items:
        item.setdefault("seed", None)
        if item["seed"] is None:
            item["seed"] = args.seed
    passed = sum(r.passed for r in reports)
    doc = {
        "command": args.command,
        "backend": kernels.BACKEND,
        "reports": items,
        "summary": {"total": len(reports), "passed": passed, "failed": len(reports) - passed},
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        reports = COMMANDS[args.command](args)
    except (InputError, ResourceGuardError, ValueError, KeyError, ZeroDivisionError, ArithmeticError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}), file=sys.stdout)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = render(reports, args)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    print(text)
    for r in reports:
        print(r.summary_line(), file=sys.stderr)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
