"""Command-line front end.

Every subcommand builds a :class:`~symdyn.report.Report` and prints it as an
aligned table, CSV or JSON. Values come from built-in defaults, then flags
(``--depth``, ``--set key=value`` ...), then the ``--config`` file, which has
the last word. Exit status: 0 complete or PASS, 1 FAIL verdict, 2 error.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from . import __version__
from .algebraic import perron_root
from .beta_transform import BetaMap, forward_nonexpansive_probe, separated_entropy
from .config import KEYS, TASKS, RunConfig, build_model, build_potential, load_config, parse_value
from .entropy import (counting_bounds_check, entropy_estimate, model_pressure_estimate, pressure_estimate,
                      spectral_pressure)
from .errors import ConfigError, ResourceError, SymdynError
from .language import OrbitCollection, automaton_counts, collection_counts, enumerate_language
from .measures import (empirical_mme, gibbs_check, invariance_defect, max_cylinder_deviation, parry_measure,
                       periodic_orbits)
from .models import BetaModel, SFTModel, sft_from_matrix
from .potentials import LocallyConstant
from .report import Report, emit_report
from .specification import (build_decomposition, check_specification, check_specification_grown,
                            subshift_gap_check, verify_uniqueness_hypotheses)
from .words import format_word

COLUMNS = {
    "enumerate": ["n", "count"],
    "entropy": ["n", "count", "point_estimate", "running_fekete"],
    "pressure": ["n", "logsum_upper", "logsum_lower", "point_estimate"],
    "spec-check": ["v", "u", "w", "u2"],
    "decompose": ["n", "L", "Cp", "G", "Cs"],
    "verify-uniqueness": ["M", "verdict", "tau", "basis", "min_density"],
    "mme": ["word", "empirical", "reference", "difference"],
    "gibbs": ["n", "K_lower", "K_upper"],
    "periodic": ["n", "per_n", "trace", "undecided"],
    "beta-code": ["k", "digit", "certain", "interval_lo", "interval_hi"],
    "entropy-gap": ["N", "realized", "predicted", "count_Y", "count_X", "max_multiplicity", "multiplicity_bound",
                    "pass"],
    "separated": ["n", "lambda_lower", "estimate"],
}

DESCRIPTIONS = {
    "enumerate": "count the words of each length (and optionally dump them to --out)",
    "entropy": "growth-rate estimate of log #L_n",
    "pressure": "growth of the partition sums of a potential",
    "spec-check": "search for a specification gap or a counterexample pair",
    "decompose": "split the language into prefix, core and suffix collections",
    "verify-uniqueness": "specification of each G^M, entropy gap and G^M density",
    "mme": "time-averaged empirical measure against the reference measure",
    "gibbs": "Gibbs ratios of the reference measure at a hypothesised entropy",
    "periodic": "periodic-point counts and the exponential constant",
    "beta-code": "digits of a point under x -> beta x mod 1 with certainty flags",
    "entropy-gap": "window-surgery word counts for a proper subshift",
    "separated": "greedy (n, eps)-separated set sizes for a beta map",
}


def _window(cfg: RunConfig):
    return cfg.get("window")


def _exact_entropy(model) -> float | None:
    if isinstance(model, SFTModel):
        return perron_root(model.matrix).log()
    if isinstance(model, BetaModel) and model.beta is not None:
        return math.log(model.beta.value)
    return None


def task_enumerate(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    depth = cfg.get("depth", 12)
    L = enumerate_language(model, depth)
    out = cfg.get("out")
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            L.dump(fh)
    rows = [{"n": n, "count": c} for n, c in enumerate(L.counts, 1)]
    return Report("enumerate", COLUMNS["enumerate"], rows, {"model": model.describe(), "depth": depth},
                  plot={"x": "n", "y": ["count"], "logy": True, "ylabel": "#L_n"})


def task_entropy(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    depth = cfg.get("depth", 20)
    counts = automaton_counts(model, depth) if not isinstance(model, BetaModel) else enumerate_language(model, depth).counts
    est = entropy_estimate(counts, _window(cfg), subadditive=True)
    rows = [{"n": r["n"], "count": r["count_or_logsum"], "point_estimate": r["point_estimate"],
             "running_fekete": r["running_fekete"]} for r in est.rows()]
    summary = {"model": model.describe(), "estimate": est.estimate, "bracket": list(est.bracket()),
               **{k: v for k, v in est.summary().items() if k != "regression"}}
    exact = _exact_entropy(model)
    hlines = []
    if exact is not None:
        summary["exact"] = exact
        hlines.append({"y": exact, "label": "exact"})
    return Report("entropy", COLUMNS["entropy"], rows, summary,
                  plot={"x": "n", "y": ["point_estimate", "running_fekete"], "hlines": hlines,
                        "ylabel": "log #L_n / n"})


def task_pressure(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    depth = cfg.get("depth", 16)
    phi = build_potential(cfg, model.alphabet_size)
    if isinstance(phi, LocallyConstant) and isinstance(model, SFTModel):
        est = model_pressure_estimate(model, phi, depth, _window(cfg))
        method = "transfer"
    else:
        est = pressure_estimate(enumerate_language(model, depth + 2), phi, _window(cfg))
        method = "enumeration"
    rows = [{"n": r["n"], "logsum_upper": r["count_or_logsum"], "logsum_lower": r["lower_logsum"],
             "point_estimate": r["point_estimate"]} for r in est.rows()]
    summary = {"model": model.describe(), "potential": phi.describe(), "method": method,
               "estimate": est.estimate, "bracket": list(est.bracket())}
    hlines = []
    if isinstance(phi, LocallyConstant) and isinstance(model, SFTModel):
        summary["spectral"] = spectral_pressure(model, phi)
        hlines.append({"y": summary["spectral"], "label": "log spectral radius"})
    return Report("pressure", COLUMNS["pressure"], rows, summary,
                  plot={"x": "n", "y": ["point_estimate"], "hlines": hlines, "ylabel": "log Z_n / n"})


def task_spec_check(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    depth = cfg.get("depth", 10)
    tau_max = cfg.get("tau_max", 4)
    L = enumerate_language(model, depth)
    variant = cfg.get("variant", "leq")
    if cfg.get("grow", "no") == "yes":
        cert = check_specification_grown(L, None, tau_max, depth, variant)
    else:
        cert = check_specification(L, None, tau_max, depth, variant, seed=cfg.get("seed", 0))
    A = model.alphabet_size
    limit = cfg.get("glue_rows", 50)
    rows = [{"v": format_word(e.v, A), "u": format_word(e.u, A), "w": format_word(e.w, A),
             "u2": None if e.u2 is None else format_word(e.u2, A)} for e in cert.glue[:limit]]
    summary = {"model": model.describe(), **cert.to_dict(A)}
    return Report("spec-check", COLUMNS["spec-check"], rows, summary, "PASS" if cert.certified else "FAIL")


def _decomposition(cfg: RunConfig, L):
    rule = cfg.get("rule", "beta-canonical" if isinstance(L.model, BetaModel) else "trivial")
    phi = build_potential(cfg, L.alphabet_size) if rule == "threshold" else None
    return build_decomposition(L, rule, phi=phi, r=cfg.get("r"))


def task_decompose(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    depth = cfg.get("depth", 12)
    L = enumerate_language(model, depth)
    dec = _decomposition(cfg, L)
    checked = dec.check_cover()
    cols = [dec.collection(k) for k in ("prefix", "good", "suffix")]
    counts = [collection_counts(c, depth) for c in cols]
    rows = [{"n": n, "L": L.count(n), "Cp": counts[0][n - 1], "G": counts[1][n - 1], "Cs": counts[2][n - 1]}
            for n in range(1, depth + 1)]
    summary = {"model": model.describe(), "rule": dec.rule, "words_split": checked, **dec.meta}
    return Report("decompose", COLUMNS["decompose"], rows, summary, "PASS",
                  plot={"x": "n", "y": ["L", "Cp", "G", "Cs"], "logy": True, "ylabel": "count"})


def task_verify_uniqueness(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    depth = cfg.get("depth", 12)
    L = enumerate_language(model, depth)
    dec = _decomposition(cfg, L)
    rep = verify_uniqueness_hypotheses(dec, cfg.get("M", [0, 1, 2, 3]), cfg.get("tau_max", 6), depth, _window(cfg))
    summary = {
        "model": model.describe(),
        "rule": dec.rule,
        "h_bad": None if rep.h_bad is None else rep.h_bad.estimate,
        "bad_counts": rep.bad_counts,
        "h_total": rep.h_total.estimate,
        "h_exact": rep.exact_h,
        "gap": rep.gap,
        "density": {str(M): d for M, d in rep.density.items()},
    }
    return Report("verify-uniqueness", COLUMNS["verify-uniqueness"], rep.rows(), summary,
                  "PASS" if rep.passed else "FAIL")


def task_mme(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    n = cfg.get("n", 14)
    d = cfg.get("cyl_depth", 3)
    mu = empirical_mme(model, n, d)
    A = model.alphabet_size
    ref = parry_measure(model) if isinstance(model, SFTModel) else None
    L = enumerate_language(model, d)
    rows = []
    for ell in range(1, d + 1):
        for w in L.iter_words(ell):
            e = mu.mass(w)
            r = ref.mass(w) if ref is not None else None
            rows.append({"word": format_word(w, A), "empirical": e, "reference": r,
                         "difference": None if r is None else float(e) - r})
    summary = {"model": model.describe(), "n": n, "cylinder_depth": d,
               "invariance_defect": [float(x) for x in invariance_defect(mu)]}
    verdict = None
    if ref is not None:
        dev = max_cylinder_deviation(mu, ref, L, d)
        tol = cfg.get("tol", 0.02)
        summary.update({"max_deviation": dev, "tolerance": tol})
        verdict = "PASS" if dev <= tol else "FAIL"
    return Report("mme", COLUMNS["mme"], rows, summary, verdict)


def task_gibbs(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    if not isinstance(model, SFTModel):
        raise ConfigError("the gibbs task needs an SFT model (the reference measure is the Parry measure)")
    depth = cfg.get("depth", 18)
    L = enumerate_language(model, depth)
    h = cfg.get("h", _exact_entropy(model))
    rep = gibbs_check(parry_measure(model), L, h, depth=depth)
    summary = {"model": model.describe(), "h": h, "stable": rep.stable, "variation": rep.variation,
               "K": rep.running_K[-1]}
    return Report("gibbs", COLUMNS["gibbs"], rep.rows(), summary, "PASS" if rep.passed else "FAIL",
                  plot={"x": "n", "y": ["K_lower", "K_upper"], "logy": True, "ylabel": "Gibbs ratio bounds"})


def task_periodic(cfg: RunConfig) -> Report:
    model = build_model(cfg)
    depth = cfg.get("depth", 12)
    h = _exact_entropy(model)
    rep = periodic_orbits(model, depth, h)
    traces = None
    if isinstance(model, SFTModel):
        import numpy as np

        M = model.matrix.astype(object)
        P = np.identity(len(M), dtype=object)
        traces = []
        for _ in range(depth):
            P = P.dot(M)
            traces.append(int(np.trace(P)))
    rows = [{**r, "trace": None if traces is None else traces[r["n"] - 1]} for r in rep.rows()]
    ok = rep.drift_ok and (traces is None or traces == rep.counts)
    summary = {"model": model.describe(), "h": h, "C_empirical": rep.C_emp, "drift_ok": rep.drift_ok}
    return Report("periodic", COLUMNS["periodic"], rows, summary, "PASS" if ok else "FAIL",
                  plot={"x": "n", "y": ["per_n"], "logy": True, "ylabel": "#Per_n"})


def task_beta_code(cfg: RunConfig) -> Report:
    bmap = BetaMap(cfg.require("beta"))
    x = cfg.require("x")
    n = cfg.get("depth", 12)
    digits, flags = bmap.code(x, n)
    rows = []
    for k in range(1, n + 1):
        iv = bmap.interval_of_word(digits[:k])
        lo, hi = (None, None) if iv is None else (bmap.arith.to_float(iv[0]), bmap.arith.to_float(iv[1]))
        rows.append({"k": k, "digit": digits[k - 1], "certain": flags[k - 1], "interval_lo": lo, "interval_hi": hi})
    summary = {"beta": str(cfg.require("beta")), "x": str(x), "exact_arithmetic": bmap.exact,
               "z_prefix": format_word(bmap.z_prefix(min(n, 24), strict=False), bmap.n_digits)}
    if cfg.get("horizon") is not None:
        eps = cfg.get("eps", Fraction(1, 10))
        summary["probe"] = [float(v) for v in forward_nonexpansive_probe(bmap, x, eps, cfg.get("horizon"))]
    return Report("beta-code", COLUMNS["beta-code"], rows, summary)


def task_entropy_gap(cfg: RunConfig) -> Report:
    X = build_model(cfg)
    Y = sft_from_matrix(cfg.require("y_matrix"))
    alpha = cfg.require("alpha")
    rows, ok = [], True
    for N in cfg.get("N", [2, 4, 6]):
        rep = subshift_gap_check(X, Y, cfg.require("marker"), alpha, cfg.get("window_size", 4), N,
                                 tau_max=cfg.get("tau_max", 4))
        rows.append(rep.row())
        ok = ok and rep.passed
    summary = {"X": X.describe(), "Y": Y.describe(), "alpha": float(alpha)}
    return Report("entropy-gap", COLUMNS["entropy-gap"], rows, summary, "PASS" if ok else "FAIL",
                  plot={"x": "N", "y": ["realized", "predicted", "count_Y"], "logy": True, "ylabel": "words"})


def task_separated(cfg: RunConfig) -> Report:
    bmap = BetaMap(cfg.require("beta"))
    eps = cfg.get("eps", Fraction(1, 10))
    n_max = cfg.get("depth", 12)
    G = cfg.get("resolution", 10**9)
    est = separated_entropy(bmap, eps, n_max, Fraction(1, G), _window(cfg))
    rows = [{"n": r["n"], "lambda_lower": r["count_or_logsum"], "estimate": r["point_estimate"]} for r in est.rows()]
    summary = {"beta": str(cfg.require("beta")), "eps": float(eps), "resolution": f"1/{G}",
               "estimate": est.estimate, "log_beta": math.log(bmap.value), **est.summary()}
    return Report("separated", COLUMNS["separated"], rows, summary,
                  plot={"x": "n", "y": ["estimate"], "hlines": [{"y": math.log(bmap.value), "label": "log beta"}],
                        "ylabel": "log Lambda_n / n"})


HANDLERS = {
    "enumerate": task_enumerate,
    "entropy": task_entropy,
    "pressure": task_pressure,
    "spec-check": task_spec_check,
    "decompose": task_decompose,
    "verify-uniqueness": task_verify_uniqueness,
    "mme": task_mme,
    "gibbs": task_gibbs,
    "periodic": task_periodic,
    "beta-code": task_beta_code,
    "entropy-gap": task_entropy_gap,
    "separated": task_separated,
}


def run(values: dict) -> Report:
    cfg = RunConfig(values)
    task = cfg.require("task")
    return HANDLERS[task](cfg)


def _keys_help() -> str:
    return "\n".join(f"  {k:<12} {h}" for k, (_, h) in KEYS.items())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdyn", description="Symbolic dynamics toolkit: languages, entropy, pressure, measures, gluing.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="configuration keys (for --set and --config files):\n" + _keys_help()
        + "\n\nenvironment: SYMDYN_NODE_BUDGET caps the number of enumerated words (default 60000000)"
        + "\nexit status: 0 complete or PASS, 1 FAIL verdict, 2 error")
    parser.add_argument("--version", action="version", version=f"symdyn {__version__}")
    sub = parser.add_subparsers(dest="task", metavar="TASK")
    sub.required = True
    for task in TASKS:
        p = sub.add_parser(task, help=DESCRIPTIONS[task], description=DESCRIPTIONS[task],
                           epilog="CSV columns: " + ",".join(COLUMNS[task]),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", help="key = value file; its values override flags")
        p.add_argument("--depth", help="word length / enumeration depth")
        p.add_argument("--tau-max", dest="tau_max", help="largest gap searched")
        p.add_argument("--window", help="estimation window a:b")
        p.add_argument("--format", choices=("table", "csv", "json"), help="output format (default table)")
        p.add_argument("--out", help="write the report (or the word list, for enumerate) here")
        p.add_argument("--plot-dir", dest="plot_dir", help="render a figure into this directory")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="any configuration key")
    return parser


def _collect(args) -> dict:
    values = {"task": args.task}
    for key in ("depth", "tau_max", "window", "format", "out", "plot_dir"):
        raw = getattr(args, key)
        if raw is not None:
            values[key] = parse_value(key, str(raw))
    for item in args.set:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = parse_value(key.strip(), raw)
    if args.config:
        file_values = load_config(args.config)
        if "task" in file_values and file_values["task"] != args.task:
            raise ConfigError(f"config is for task {file_values['task']!r}, not {args.task!r}")
        values.update(file_values)
    return values


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        values = _collect(args)
        report = run(values)
        fmt = values.get("format", "table")
        out = values.get("out") if args.task != "enumerate" else None
        text = emit_report(report, fmt, out)
        if out is None:
            sys.stdout.write(text)
        if values.get("plot_dir"):
            from .plotting import render

            path = render(report, values["plot_dir"])
            if path:
                sys.stderr.write(f"figure: {path}\n")
    except ConfigError as exc:
        sys.stderr.write(f"symdyn: configuration error: {exc}\n")
        return 2
    except ResourceError as exc:
        sys.stderr.write(f"symdyn: resource budget exceeded: {exc}\n")
        return 2
    except SymdynError as exc:
        sys.stderr.write(f"symdyn: {type(exc).__name__}: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"symdyn: cannot write output: {exc}\n")
        return 2
    return 1 if report.verdict == "FAIL" else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
