"""Command-line front end.

    influence compute --data D.csv --pred-col y_pred --partition P.json --measure psi --normalize --out R.tsv
    influence compare A.tsv B.tsv
    influence subsample --data D.csv --per-class N --seed S --out D2.csv
    influence table4

Feature indices in every output are 1-based.  Exit codes: 0 success,
1 validation error, 2 computation error, 3 self-test failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time
from pathlib import Path

from .dataset import Dataset, FeatureSpace, Schema, balanced_subsample, dump_dataset, load_dataset, write_canonical
from .errors import (
    ComputationError,
    ConstantVector,
    FeatureSetMismatch,
    InfluenceError,
    ParseError,
    SelfTestFailure,
    ValidationError,
)
from .fixtures import TABLE4, example_dataset, example_game, table4_partition
from .games import Game, game_from_sample, table_game, weighted_majority
from .indices import IndexVector, banzhaf, banzhaf_owen, banzhaf_owen_mc
from .measures import InfluenceReport, chi, normalize, pearson, psi, rank, weighted_psi
from .partition import (
    LINKAGES,
    DependencyModel,
    Partition,
    hierarchical_partition,
    parse_dependency,
    parse_partition,
    partition_from_spec,
    singleton_partition,
)

MEASURES = ("chi", "psi", "weighted-psi", "banzhaf", "banzhaf-owen", "banzhaf-owen-mc")
DATA_MEASURES = ("chi", "psi", "weighted-psi")
TABLE4_TOL = 1e-9

EXIT_OK, EXIT_VALIDATION, EXIT_COMPUTATION, EXIT_SELFTEST = 0, 1, 2, 3


# Input ---------------------------------------------------------------------

def read_game(path) -> tuple[Game, list[str] | None]:
    """``{"weights": [...], "quota": q}`` or ``{"table": [...]}``, optional ``"names"``."""
    spec = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(spec, dict):
        raise ParseError(f"{path}: expected a JSON object")
    if "table" in spec:
        g = table_game(spec["table"])
    elif "weights" in spec and "quota" in spec:
        g = weighted_majority(spec["weights"], spec["quota"])
    else:
        raise ParseError(f"{path}: need 'table' or 'weights' and 'quota'")
    names = spec.get("names")
    if names is not None and len(names) != g.k:
        raise ParseError(f"{path}: {len(names)} names for {g.k} players")
    return g, names


def _parse_cluster(spec: str) -> tuple[int, str]:
    params = {}
    for item in spec.split(":", 1)[1].split(","):
        key, _, value = item.partition("=")
        params[key.strip()] = value.strip()
    try:
        k_clusters = int(params["k"])
    except (KeyError, ValueError):
        raise ValidationError(f"bad cluster spec {spec!r}; expected cluster:k=K[,linkage=L]") from None
    linkage = params.get("linkage", "complete")
    if linkage not in LINKAGES:
        raise ValidationError(f"linkage must be one of {LINKAGES}")
    return k_clusters, linkage


def resolve_partition(spec: str, d: Dataset | None, names: list[str]) -> Partition:
    if spec == "singletons":
        return singleton_partition(len(names))
    if spec == "whole":
        return Partition((tuple(range(len(names))),))
    if spec.startswith("cluster:"):
        if d is None:
            raise ValidationError("cluster partitions need --data")
        return hierarchical_partition(d, *_parse_cluster(spec))
    if d is not None:
        return parse_partition(spec, d.space)
    raw = json.loads(Path(spec).read_text(encoding="utf-8"))
    return partition_from_spec(raw, FeatureSpace.binary(len(names), names))


# Output --------------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, float) and v != v:
        return "nan"
    return repr(v) if isinstance(v, float) else str(v)


def _rank_positions(scores) -> list[int]:
    pos = [0] * len(scores)
    for r, (i, _) in enumerate(rank(scores), start=1):
        pos[i] = r
    return pos


def report_rows(report: InfluenceReport | IndexVector, names) -> list[dict]:
    if isinstance(report, IndexVector):
        raw, normalized, stderr = report.values, None, report.stderr
        scores = report.values
    else:
        raw, normalized, stderr = report.raw, report.normalized, None
        scores = report.scores()
    ranks = _rank_positions(scores)
    rows = []
    for i, name in enumerate(names):
        row = {"feature": i + 1, "name": name, "raw": raw[i],
               "normalized": None if normalized is None else normalized[i], "rank": ranks[i]}
        if stderr is not None:
            row["stderr"] = None if stderr[i] != stderr[i] else stderr[i]
        rows.append(row)
    return rows


def report_metadata(report, partition: Partition, dep: DependencyModel | None, extra: dict) -> dict:
    meta = {"measure": getattr(report, "measure", None) or report.method,
            "partition": partition.to_list(one_based=True)}
    if dep is not None:
        meta["dependency"] = ["+" if s > 0 else "-" for s in dep.signs]
    if isinstance(report, InfluenceReport):
        meta["C"] = report.constant_C
        if report.space_counts is not None:
            meta["space_counts"] = list(report.space_counts)
    meta.update(extra)
    return meta


def format_tsv(meta: dict, rows: list[dict]) -> str:
    out = io.StringIO()
    for key, value in meta.items():
        out.write(f"# {key}: {json.dumps(value, separators=(',', ':'))}\n")
    columns = ["feature", "name", "raw", "normalized", "rank"]
    if rows and "stderr" in rows[0]:
        columns.append("stderr")
    out.write("\t".join(columns) + "\n")
    for row in rows:
        out.write("\t".join("" if row[c] is None else _num(row[c]) for c in columns) + "\n")
    return out.getvalue()


def format_json(meta: dict, rows: list[dict], report) -> str:
    body = dict(meta)
    if isinstance(report, IndexVector):
        body["method"] = report.method
        body["values"] = list(report.values)
        if report.stderr is not None:
            body["stderr"] = [None if s != s else s for s in report.stderr]
    body["features"] = rows
    return json.dumps(body, indent=2) + "\n"


def read_report(path) -> tuple[list[tuple[int, str]], list[float]]:
    """Feature ids and the compared value (normalized if present, else raw)."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        rows = json.loads(text)["features"]
    else:
        lines = [line for line in text.splitlines() if line and not line.startswith("#")]
        header = lines[0].split("\t")
        rows = [dict(zip(header, line.split("\t"))) for line in lines[1:]]
    features, values = [], []
    use_normalized = all(r.get("normalized") not in (None, "") for r in rows)
    for r in rows:
        features.append((int(r["feature"]), str(r["name"])))
        values.append(float(r["normalized"] if use_normalized else r["raw"]))
    return features, values


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# Commands ------------------------------------------------------------------

def _load(args) -> Dataset:
    features = tuple(f.strip() for f in args.features.split(",")) if args.features else None
    schema = Schema(response=args.pred_col, features=features, categorical=args.categorical)
    d = load_dataset(args.data, schema, predictions=args.pred_file)
    if d.codes and args.out not in (None, "-"):
        Path(str(args.out) + ".codes.json").write_text(json.dumps(d.codes, indent=2) + "\n", encoding="utf-8")
    return d


def cmd_compute(args) -> int:
    start = time.perf_counter()
    if args.measure in DATA_MEASURES and args.data is None:
        raise ValidationError(f"--measure {args.measure} needs --data")
    if args.data is None and args.game is None:
        raise ValidationError("give --data or --game")
    if args.data is not None and args.game is not None:
        raise ValidationError("give only one of --data and --game")

    d = None
    if args.data is not None:
        d = _load(args)
        if args.per_class is not None:
            d = balanced_subsample(d, args.per_class, args.subsample_seed)
        names = list(d.space.names)
    else:
        g, names = read_game(args.game)
        names = names or [f"X{i + 1}" for i in range(g.k)]

    p = resolve_partition(args.partition, d, names)
    dep = parse_dependency(args.dep, d.space) if (args.dep and d is not None) else None
    if args.dep and d is None:
        raise ValidationError("--dep applies to data measures only")

    extra = {}
    if args.measure in DATA_MEASURES:
        if args.measure == "chi":
            if not p.is_singletons():
                raise ValidationError("chi takes no unions; use --partition singletons or --measure psi")
            report = chi(d)
        elif args.measure == "psi":
            report = psi(d, p, dep)
        else:
            report = weighted_psi(d, p, dep)
        if args.normalize:
            report = normalize(report, d.space, p, dep)
        dep = report.dep
    else:
        if args.normalize:
            raise ValidationError("--normalize applies to chi, psi and weighted-psi")
        g = game_from_sample(d) if d is not None else g
        if args.measure == "banzhaf":
            report = banzhaf(g, workers=args.threads)
        elif args.measure == "banzhaf-owen":
            report = banzhaf_owen(g, p, workers=args.threads)
        else:
            report = banzhaf_owen_mc(g, p, args.mc_samples, args.seed, workers=args.threads)
            extra = {"n_samples": args.mc_samples, "seed": args.seed}

    rows = report_rows(report, names)
    meta = report_metadata(report, p, dep, extra)
    _write(format_json(meta, rows, report) if args.format == "json" else format_tsv(meta, rows), args.out)
    n = d.n if d is not None else 0
    elapsed = time.perf_counter() - start
    print(f"influence: measure={args.measure} k={len(names)} n={n} m={p.m} time={elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    fa, va = read_report(args.report_a)
    fb, vb = read_report(args.report_b)
    if fa != fb:
        raise FeatureSetMismatch("reports cover different features")
    try:
        r = _num(pearson(va, vb))
    except ConstantVector:
        r = "-"
    top = min(args.top, len(fa))
    top_a = {i for i, _ in rank(va, top)}
    top_b = {i for i, _ in rank(vb, top)}
    print(f"pearson\t{r}")
    print(f"top{top}_overlap\t{len(top_a & top_b)}/{top}")
    return EXIT_OK


def cmd_subsample(args) -> int:
    d = _load(args)
    d = balanced_subsample(d, args.per_class, args.seed)
    if args.out in (None, "-"):
        write_canonical(d, sys.stdout)
    else:
        dump_dataset(d, args.out)
    print(f"influence: subsample n={d.n} mass={d.mass}", file=sys.stderr)
    return EXIT_OK


def run_table4() -> list[dict]:
    """Banzhaf-Owen values and normalized pair counts for all fifteen scenarios."""
    g = example_game()
    d = example_dataset()
    rows = []
    for scenario, (blocks, expected) in enumerate(TABLE4, start=1):
        p = table4_partition(scenario)
        bo = banzhaf_owen(g, p).values
        ps = normalize(psi(d, p), d.space).normalized
        err = max(max(abs(a - e), abs(b - e)) for a, b, e in zip(bo, ps, expected))
        rows.append({"scenario": scenario, "partition": blocks, "bo": bo, "psi": ps,
                     "expected": expected, "max_error": err, "ok": err <= TABLE4_TOL})
    return rows


def cmd_table4(args) -> int:
    rows = run_table4()
    fmt = lambda v: "(" + ", ".join(f"{x:.3f}" for x in v) + ")"
    print("scenario\tpartition\tbanzhaf_owen\tpsi_normalized\texpected\tstatus")
    for r in rows:
        part = "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in r["partition"]) + "}"
        status = "ok" if r["ok"] else f"MISMATCH {r['max_error']:.3g}"
        print(f"{r['scenario']}\t{part}\t{fmt(r['bo'])}\t{fmt(r['psi'])}\t{fmt(r['expected'])}\t{status}")
    bad = [r["scenario"] for r in rows if not r["ok"]]
    if bad:
        raise SelfTestFailure(f"scenarios {bad} differ from the expected values")
    return EXIT_OK


# Wiring --------------------------------------------------------------------

def _data_args(sp: argparse.ArgumentParser, required: bool) -> None:
    sp.add_argument("--data", required=required, help="CSV of feature profiles")
    sp.add_argument("--pred-col", default="y_pred", help="column holding the predicted response")
    sp.add_argument("--pred-file", default=None, help="single-column CSV of predictions, one per data row")
    sp.add_argument("--features", default=None, help="comma-separated feature columns (default: all others)")
    sp.add_argument("--categorical", action="store_true", help="dictionary-encode non-integer columns")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="influence", description=__doc__.split("\n")[0])
    ap.add_argument("--error-json", action="store_true", help="print errors as JSON on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute an influence measure or power index")
    _data_args(c, required=False)
    c.add_argument("--game", default=None, help="game JSON (banzhaf measures without data)")
    c.add_argument("--partition", default="singletons",
                   help="singletons | whole | P.json | cluster:k=K[,linkage=complete|average|single]")
    c.add_argument("--dep", default=None, help="dependency model JSON {feature: '+'|'-'}")
    c.add_argument("--measure", choices=MEASURES, default="psi")
    c.add_argument("--normalize", action="store_true", help="divide by the restricted profile space size")
    c.add_argument("--mc-samples", type=int, default=100_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--per-class", type=int, default=None, help="balanced subsample size per class")
    c.add_argument("--subsample-seed", type=int, default=0)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out", default="-")
    c.add_argument("--format", choices=("tsv", "json"), default="tsv")
    c.set_defaults(func=cmd_compute)

    cmp_ = sub.add_parser("compare", help="Pearson correlation and top-k overlap of two reports")
    cmp_.add_argument("report_a")
    cmp_.add_argument("report_b")
    cmp_.add_argument("--top", type=int, default=3)
    cmp_.set_defaults(func=cmd_compare)

    s = sub.add_parser("subsample", help="balanced subsample, written as a canonical dump")
    _data_args(s, required=True)
    s.add_argument("--per-class", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_subsample)

    t = sub.add_parser("table4", help="self-test on the four-feature weighted majority example")
    t.set_defaults(func=cmd_table4)
    return ap


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, SelfTestFailure):
        return EXIT_SELFTEST
    if isinstance(exc, ComputationError):
        return EXIT_COMPUTATION
    return EXIT_VALIDATION


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InfluenceError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        code = _exit_code(exc)
        if args.error_json:
            payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
            print(json.dumps(payload), file=sys.stderr)
        else:
            print(f"influence: error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
