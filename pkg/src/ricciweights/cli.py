"""Command line driver: single-algebra subcommands and the batch resolver."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    LieAlgebra,
    ParseError,
    format_fraction,
    is_nice_basis,
    is_nilpotent,
    jacobi_check,
    lower_central_series_dims,
    parse_algebra,
    serialize,
)
from .exactlin.derivations import derivation_space, diagonal_derivations, torus_from_weights
from .filtration import SearchStats, search_filtration
from .grading import first_G_sequence, format_weight, g1_obstructions, grading_from_torus
from .metric import (
    AdaptationError,
    MetricSpec,
    build_filtration_metric,
    build_grading_metric,
    compare_ricci,
    parse_sigma,
    random_sigma_params,
    sigma_diagonal_metric,
    verify_ricci_flat,
)
from .records import AlgebraRecord, parse_metric, parse_rationals, parse_records, parse_subst, parse_weights

log = logging.getLogger("ricciweights")

STRATEGIES = {"g": "grading", "f": "filtration", "s": "sigma"}


@dataclass
class Outcome:
    name: str
    outcome: str
    algebra: str = ""
    weights: list[str] | None = None
    adapted_basis: list[str] | None = None
    metric: MetricSpec | None = None
    formula_zero: bool = False
    koszul_zero: bool = False
    diagnostics: list[str] = field(default_factory=list)
    expect: str | None = None
    seconds: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out: dict = {"name": self.name, "outcome": self.outcome}
        if self.weights is not None:
            out["weights"] = self.weights
        if self.adapted_basis is not None:
            out["adapted_basis"] = self.adapted_basis
        out["metric"] = self.metric.to_json() if self.metric is not None else None
        out["certificate"] = {"formula_zero": self.formula_zero, "koszul_zero": self.koszul_zero}
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _basis_names(order) -> list[str]:
    return [f"e_{i + 1}" for i in order]


def _certify(res: Outcome, L: LieAlgebra, g: MetricSpec) -> bool:
    v = verify_ricci_flat(L, g)
    res.metric = g
    res.formula_zero, res.koszul_zero = v.formula_zero, v.koszul_zero
    return v.flat


def _try_grading(rec: AlgebraRecord, res: Outcome, torus_mode: str) -> bool:
    L = rec.algebra
    if torus_mode == "from-file" and rec.torus is not None:
        T = torus_from_weights(L, rec.torus)
    else:
        T = diagonal_derivations(L)
    if T.rank == 0:
        res.diagnostics.append("grading: no diagonal derivations")
        return False
    G = grading_from_torus(L, T)
    obstructions = g1_obstructions(G)
    if obstructions:
        cycles = "; ".join(o.describe() for o in obstructions)
        res.diagnostics.append(f"grading: (G1) cannot hold: {cycles}")
        return False
    S = first_G_sequence(G)
    if S is None:
        res.diagnostics.append("grading: no weight sequence satisfies (G1)-(G5)")
        return False
    names = None if T.rank == 1 else [f"l{i + 1}" for i in range(T.rank)]
    g = build_grading_metric(L, G, S)
    if not _certify(res, L, g):
        res.diagnostics.append("grading: constructed metric is not Ricci-flat")
        return False
    res.outcome = "grading"
    res.weights = [format_weight(w, names) for w in S.weights]
    res.adapted_basis = _basis_names(S.order)
    return True


def _try_filtration(rec: AlgebraRecord, res: Outcome) -> bool:
    L = rec.algebra
    stats = SearchStats()
    W = search_filtration(L, stats=stats)
    if W is None:
        res.diagnostics.append(f"filtration: no adapted filtration in this basis ({stats.orders} orders)")
        return False
    g = build_filtration_metric(L, W)
    if not _certify(res, L, g):
        res.diagnostics.append("filtration: constructed metric is not Ricci-flat")
        return False
    res.outcome = "filtration"
    res.weights = [str(w) for w in W.weights]
    res.adapted_basis = _basis_names(W.order)
    return True


def _try_sigma(rec: AlgebraRecord, res: Outcome, seed: int | None, samples: int) -> bool:
    if not rec.sigma:
        return False
    L = rec.algebra
    sigma = parse_sigma(rec.sigma, L.n)
    if rec.sigma_params is not None:
        g = sigma_diagonal_metric(L.n, sigma, rec.sigma_params)
        if not _certify(res, L, g):
            res.diagnostics.append("sigma: metric with the given parameters is not Ricci-flat")
            return False
    else:
        import random

        probe = sigma_diagonal_metric(L.n, sigma, random_sigma_params(sigma, random.Random(seed)))
        verdict = verify_ricci_flat(L, probe, mode="generic", samples=samples, seed=seed)
        if not verdict:
            res.diagnostics.append("sigma: not Ricci-flat for generic parameters")
            return False
        res.diagnostics.append(f"sigma: {verdict.describe()}")
        if not _certify(res, L, probe):
            return False
    res.outcome = "sigma"
    res.weights = [format_fraction(x) for x in res.metric.params]
    res.adapted_basis = None
    return True


def resolve_record(rec: AlgebraRecord, strategy: str = "g,f,s", torus_mode: str = "diagonal",
                   seed: int | None = 0, samples: int = 5) -> Outcome:
    """Grading, then filtration, then the sigma ansatz (or any other order)."""
    t0 = time.perf_counter()
    res = Outcome(rec.name, "unresolved", algebra=serialize(rec.algebra), expect=rec.expect)
    L = rec.algebra
    bad = jacobi_check(L)
    if bad:
        k, a, b, c, v = bad[0]
        res.outcome = "error"
        res.diagnostics.append(f"Jacobi identity fails: d(de^{k + 1}) has {v} e^{{{a + 1}{b + 1}{c + 1}}}")
        return res
    if not is_nilpotent(L):
        res.outcome = "error"
        res.diagnostics.append("algebra is not nilpotent")
        return res
    for step in strategy.split(","):
        step = STRATEGIES.get(step.strip(), step.strip())
        res.metric = None
        try:
            if step == "grading" and _try_grading(rec, res, torus_mode):
                break
            if step == "filtration" and _try_filtration(rec, res):
                break
            if step == "sigma" and _try_sigma(rec, res, seed, samples):
                break
        except (AdaptationError, ValueError) as exc:
            res.diagnostics.append(f"{step}: {exc}")
        res.metric = None
        res.formula_zero = res.koszul_zero = False
    res.seconds = time.perf_counter() - t0
    return res


def _resolve_star(args):
    return resolve_record(*args)


def run_batch(records: list[AlgebraRecord], strategy: str = "g,f,s", jobs: int = 1,
              torus_mode: str = "diagonal", seed: int | None = 0, samples: int = 5) -> list[Outcome]:
    """Resolve every record; results follow input order whatever ``jobs`` is."""
    tasks = [(r, strategy, torus_mode, seed, samples) for r in records]
    if jobs <= 1 or len(tasks) <= 1:
        return [_resolve_star(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_resolve_star, tasks))


# ---------------------------------------------------------------------------
# Report formats
# ---------------------------------------------------------------------------

def format_text(results: list[Outcome], timing: bool = False) -> str:
    lines = []
    for r in results:
        head = f"{r.name}: {r.outcome}"
        if r.expect and r.expect != r.outcome:
            head += f"  (expected {r.expect})"
        if timing:
            head += f"  [{r.seconds:.2f}s]"
        lines.append(head)
        lines.append(f"  algebra: {r.algebra}")
        if r.weights is not None:
            lines.append(f"  {'parameters' if r.outcome == 'sigma' else 'weights'}: {','.join(r.weights)}")
        if r.adapted_basis is not None:
            lines.append(f"  adapted basis: {','.join(r.adapted_basis)}")
        if r.metric is not None:
            lines.append(f"  metric: {r.metric.human()}")
            lines.append(f"  ricci: formula {'0' if r.formula_zero else '!=0'}, levi-civita {'0' if r.koszul_zero else '!=0'}")
        for d in r.diagnostics:
            lines.append(f"  note: {d}")
    counts: dict[str, int] = {}
    for r in results:
        counts[r.outcome] = counts.get(r.outcome, 0) + 1
    lines.append("total: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())) if results else "total: 0")
    return "\n".join(lines)


def format_latex(results: list[Outcome]) -> str:
    rows = []
    for r in results:
        if r.outcome in ("grading", "filtration"):
            rows.append(f"{r.algebra} & {','.join(r.adapted_basis or [])} & {','.join(r.weights or [])}\\\\")
        elif r.outcome == "sigma":
            sig = r.metric.sigma
            pairs = " ".join(f"{i + 1}{sig[i] + 1}" for i in range(len(sig)) if i < sig[i])
            rows.append(f"{r.algebra} & {pairs} & \\\\")
        else:
            rows.append(f"{r.algebra} & {r.outcome} & \\\\")
    return "\n".join(rows)


def render(results: list[Outcome], fmt: str, timing: bool = False) -> str:
    if fmt == "json":
        return json.dumps([r.to_json(timing) for r in results], indent=2, ensure_ascii=False)
    if fmt == "latex-table":
        return format_latex(results)
    return format_text(results, timing)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _algebra_arg(args) -> LieAlgebra:
    subst = parse_subst(args.subst or [])
    return parse_algebra(args.algebra, subst=subst, declared=list(subst))


def cmd_parse(args) -> int:
    L = _algebra_arg(args)
    print(f"dimension: {L.n}")
    print(f"canonical: {serialize(L)}")
    bad = jacobi_check(L)
    print("jacobi: ok" if not bad else f"jacobi: fails ({len(bad)} nonzero coefficients of d^2)")
    if not bad:
        print(f"lower central series: {','.join(map(str, lower_central_series_dims(L)))}")
        print(f"nilpotent: {'yes' if is_nilpotent(L) else 'no'}")
    nice = is_nice_basis(L)
    print(f"nice basis: {'yes' if nice.is_nice else 'no'}")
    return 0 if not bad else 1


def cmd_derivations(args) -> int:
    L = _algebra_arg(args)
    D = derivation_space(L)
    T = diagonal_derivations(L)
    print(f"derivations: {D.dim}")
    print(f"diagonal torus rank: {T.rank}")
    if T.rank:
        names = None if T.rank == 1 else [f"l{i + 1}" for i in range(T.rank)]
        print("weights: " + ",".join(format_weight(w, names) for w in T.weight_rows))
    return 0


def cmd_grading(args) -> int:
    L = _algebra_arg(args)
    if args.torus == "from-file":
        if not args.weights:
            print("error: --torus from-file needs --weights", file=sys.stderr)
            return 2
        T = torus_from_weights(L, parse_weights(args.weights))
    else:
        T = diagonal_derivations(L)
    if T.rank == 0:
        print("no nontrivial diagonal grading")
        return 1
    G = grading_from_torus(L, T)
    names = None if T.rank == 1 else [f"l{i + 1}" for i in range(T.rank)]
    for w, idx in G.layers:
        print(f"layer {format_weight(w, names)}: {','.join(_basis_names(idx))}")
    obstructions = g1_obstructions(G)
    if obstructions:
        print("no weight sequence: (G1) cannot hold: " + "; ".join(o.describe() for o in obstructions))
        return 1
    S = first_G_sequence(G)
    if S is None:
        print("no weight sequence satisfies (G1)-(G5)")
        return 1
    ws, basis = S.format(names)
    print(f"weights: {ws}")
    print(f"adapted basis: {basis}")
    g = build_grading_metric(L, G, S)
    a, b = compare_ricci(L, g)
    print(f"metric: {g.human()}")
    print(f"ricci-flat: {'yes' if a.is_flat and b.is_flat else 'no'}")
    return 0


def cmd_filtration(args) -> int:
    L = _algebra_arg(args)
    W = search_filtration(L, prefer_grading=not args.no_grading_seed)
    if W is None:
        print("no adapted filtration in this basis")
        return 1
    basis, weights = W.format()
    print(f"adapted basis: {basis}")
    print(f"weights: {weights}")
    g = build_filtration_metric(L, W)
    a, b = compare_ricci(L, g)
    print(f"metric: {g.human()}")
    print(f"ricci-flat: {'yes' if a.is_flat and b.is_flat else 'no'}")
    return 0


def _fmt_matrix(M) -> str:
    return "\n".join("  [" + ", ".join(format_fraction(x) for x in row) + "]" for row in M)


def cmd_ricci(args) -> int:
    L = _algebra_arg(args)
    if args.metric.lstrip().startswith("["):
        g = MetricSpec(tuple(tuple(Fraction(x) for x in row) for row in json.loads(args.metric)))
    else:
        g = MetricSpec(parse_metric(args.metric, L.n))
    a, b = compare_ricci(L, g)
    print(f"metric: {g.human()}")
    p, q = g.signature()
    print(f"signature: ({p},{q})")
    print("ricci:")
    print(_fmt_matrix(a.ric))
    print(f"ricci-flat: {'yes' if a.is_flat else 'no'} (formula and Levi-Civita agree)")
    return 0 if a.is_flat else 1


def cmd_verify_sigma(args) -> int:
    L = _algebra_arg(args)
    sigma = parse_sigma(args.sigma, L.n)
    if args.params:
        g = sigma_diagonal_metric(L.n, sigma, parse_rationals(args.params))
        v = verify_ricci_flat(L, g)
    else:
        import random

        g = sigma_diagonal_metric(L.n, sigma, random_sigma_params(sigma, random.Random(args.seed)))
        v = verify_ricci_flat(L, g, mode="generic", samples=args.samples, seed=args.seed)
    print(v.describe())
    if not v and v.failing_params:
        print("failing parameters: " + ",".join(format_fraction(x) for x in v.failing_params))
    return 0 if v else 1


def cmd_batch(args) -> int:
    subst = parse_subst(args.subst or [])
    if args.input == "-":
        text, source = sys.stdin.read(), "<stdin>"
    else:
        with open(args.input, encoding="utf-8") as fh:
            text, source = fh.read(), args.input
    records = parse_records(text, subst, source=source)
    results = run_batch(records, args.strategy, args.jobs, args.torus, args.seed, args.samples)
    out = render(results, args.report, args.timing)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    mismatched = [r for r in results if r.expect and r.expect != r.outcome]
    return 1 if mismatched or any(r.outcome == "error" for r in results) else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ricciweights", description="Ricci-flat metrics on nilpotent Lie algebras")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def algebra_cmd(name, help_, func):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("algebra", help="structure equations, e.g. '0,0,e^{12}'")
        sp.add_argument("--subst", action="append", metavar="NAME=RAT", help="parameter value")
        sp.set_defaults(func=func)
        return sp

    algebra_cmd("parse", "parse and check an algebra", cmd_parse)
    algebra_cmd("derivations", "derivations and the diagonal torus", cmd_derivations)
    sp = algebra_cmd("grading", "weight sequence satisfying (G1)-(G5)", cmd_grading)
    sp.add_argument("--torus", choices=["diagonal", "from-file"], default="diagonal")
    sp.add_argument("--weights", help="torus weights for --torus from-file, e.g. '2/5 l1,1/5 l1,l2'")
    sp = algebra_cmd("filtration", "filtration satisfying (F1)-(F4)", cmd_filtration)
    sp.add_argument("--no-grading-seed", action="store_true", help="skip the rank-one grading shortcut")
    sp = algebra_cmd("ricci", "Ricci tensor of a metric", cmd_ricci)
    sp.add_argument("--metric", required=True, help="'e^1⊙e^3+e^2⊗e^2' or a JSON matrix")
    sp = algebra_cmd("verify-sigma", "check a sigma-diagonal metric", cmd_verify_sigma)
    sp.add_argument("--sigma", required=True, help="transpositions, e.g. '18 35'")
    sp.add_argument("--params", help="explicit g_1,...,g_n; random samples otherwise")
    sp.add_argument("--samples", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("batch", help="resolve every algebra of a file")
    sp.add_argument("input", help="classification file, or - for stdin")
    sp.add_argument("--subst", action="append", metavar="NAME=RAT")
    sp.add_argument("--strategy", default="g,f,s", help="comma list of g (grading), f (filtration), s (sigma)")
    sp.add_argument("--torus", choices=["diagonal", "from-file"], default="diagonal")
    sp.add_argument("--report", choices=["text", "json", "latex-table"], default="text")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=5)
    sp.add_argument("--timing", action="store_true")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_batch)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
