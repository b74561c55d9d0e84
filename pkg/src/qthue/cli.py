"""Command-line workbench over the library modules.

Subcommands cover the whole pipeline: parse a rule file, explore an
evolution, diagonalize chain and labelled-graph operators, run ring
machines, verify the wheelbarrow rule system, assemble penalty
Hamiltonians, and run the acceptance suite.  Output is line oriented
and byte deterministic; ``--json`` switches any command to a single
JSON document, and plotting flags render figures to files next to the
printed numbers.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
parse errors.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import acceptance, graphs, hardness, qrm, qts, wheelbarrow
from . import ulg as ulg_mod
from .linalg import hermitian_eigs

CONFIG_ENV = "QTHUE_CONFIG"


@dataclass(frozen=True)
class Config:
    tolerance: float = 1e-8
    explore_cap: int = qts.DEFAULT_EXPLORE_CAP
    dim_cap: int = 8192
    fmt: str = "text"
    threads: int = 1


def _check_config(c: Config) -> Config:
    if not (0.0 < c.tolerance < 1e-2):
        raise ValueError(f"tolerance {c.tolerance} outside (0, 1e-2)")
    if c.explore_cap <= 0 or c.dim_cap <= 0:
        raise ValueError("caps must be positive")
    if c.threads < 1:
        raise ValueError("threads must be at least 1")
    if c.fmt not in ("text", "json", "dot"):
        raise ValueError(f"unknown output format {c.fmt!r}")
    return c


def load_config(path: str | None = None) -> Config:
    """Defaults, overridden by the JSON file at ``path`` or at the path
    named by the QTHUE_CONFIG environment variable."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    c = Config()
    if path:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {"tolerance", "explore_cap", "dim_cap", "fmt", "threads"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        c = replace(c, **raw)
    return _check_config(c)


def _emit_rows(rows: list, out) -> None:
    for row in rows:
        print("\t".join(str(x) for x in row), file=out)


def _fmt_float(x: float) -> str:
    return f"{x:.12g}"


def _save_plot(path: str, draw) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    draw(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def cmd_rules_parse(args, cfg: Config, out) -> int:
    q = qts.parse_rules(_read(args.file), qudit_dim=args.qudit_dim)
    if args.json or cfg.fmt == "json":
        doc = {
            "symbols": list(q.symbols),
            "quantum": sorted(q.quantum),
            "head_symbols": sorted(q.head_symbols),
            "boundary_symbols": sorted(q.boundary_symbols),
            "qudit_dim": q.qudit_dim,
            "rules": [
                {
                    "lhs": list(r.lhs),
                    "rhs": list(r.rhs),
                    "gate": r.gate_name,
                    "width": len(r.lhs),
                }
                for r in q.rules
            ],
        }
        print(json.dumps(doc, indent=2, sort_keys=True), file=out)
        return 0
    _emit_rows(
        [
            ("symbols", len(q.symbols), " ".join(q.symbols)),
            ("quantum", len(q.quantum), " ".join(sorted(q.quantum))),
            ("rules", len(q.rules)),
            ("qudit_dim", q.qudit_dim),
        ],
        out,
    )
    print(qts.rules_dsl(q), end="", file=out)
    return 0


def _explore(args, cfg: Config):
    q = qts.parse_rules(_read(args.file), qudit_dim=args.qudit_dim)
    seed = q.parse_seed(args.seed)
    cap = args.cap if args.cap is not None else cfg.explore_cap
    ev = qts.explore_evolution(q, seed, cap)
    return q, ev


def cmd_evolve(args, cfg: Config, out) -> int:
    q, ev = _explore(args, cfg)
    if args.dot or cfg.fmt == "dot":
        print(qts.evolution_to_dot(ev), end="", file=out)
        return 0
    if args.json or cfg.fmt == "json":
        print(qts.evolution_to_json(ev), file=out)
        return 0
    _emit_rows(
        [
            ("strings", len(ev.strings)),
            ("edges", len(ev.edges)),
            ("capped", str(ev.capped).lower()),
        ],
        out,
    )
    for s in ev.strings:
        print(q.display(q.unintern(s)), file=out)
    return 0


def cmd_spectrum(args, cfg: Config, out) -> int:
    q, ev = _explore(args, cfg)
    if ev.capped:
        print("exploration hit the cap; spectrum would be truncated", file=sys.stderr)
        return 1
    length = len(ev.seed)
    h = qts.chain_hamiltonian(q, length, block=ev.strings)
    if h.dim > cfg.dim_cap:
        print(f"dimension {h.dim} exceeds the eigensolver cap {cfg.dim_cap}", file=sys.stderr)
        return 1
    spec = hermitian_eigs(h, vectors=False, dim_cap=cfg.dim_cap)
    vals = spec.eigenvalues[: args.k]
    if args.json or cfg.fmt == "json":
        print(
            json.dumps(
                {"dim": h.dim, "eigenvalues": [float(v) for v in vals]},
                sort_keys=True,
            ),
            file=out,
        )
    else:
        _emit_rows([("dim", h.dim)], out)
        _emit_rows([(i, _fmt_float(v)) for i, v in enumerate(vals)], out)
    if args.plot:
        full = spec.eigenvalues

        def draw(ax):
            ax.plot(range(len(full)), full, ".", markersize=4)
            ax.set_xlabel("index")
            ax.set_ylabel("eigenvalue")
            ax.set_title(f"block spectrum, dim {h.dim}")

        _save_plot(args.plot, draw)
    return 0


def cmd_ulg_check_simple(args, cfg: Config, out) -> int:
    u = ulg_mod.from_json(_read(args.file))
    rep = ulg_mod.check_simple(u, cfg.tolerance)
    _emit_rows(
        [
            ("simple", str(rep.simple).lower()),
            ("deviation", _fmt_float(rep.deviation)),
        ],
        out,
    )
    if not rep.simple:
        steps = " ".join(f"{a}-{b}" for a, b in rep.witness_cycle)
        print(f"witness\t{steps}", file=out)
        return 1
    return 0


def cmd_ulg_diagonalize(args, cfg: Config, out) -> int:
    u = ulg_mod.from_json(_read(args.file))
    h = ulg_mod.associated_hamiltonian(u)
    if h.dim > cfg.dim_cap:
        print(f"dimension {h.dim} exceeds the eigensolver cap {cfg.dim_cap}", file=sys.stderr)
        return 1
    spec = hermitian_eigs(h, vectors=True, dim_cap=cfg.dim_cap)
    rep = ulg_mod.check_simple(u, cfg.tolerance)
    rows = [
        ("dim", h.dim),
        ("simple", str(rep.simple).lower()),
        ("residual", _fmt_float(spec.residual_norm)),
    ]
    semiclassical = None
    if rep.simple:
        lap = hermitian_eigs(graphs.laplacian(u.graph), vectors=False).eigenvalues
        expected = np.repeat(lap, u.vertex_dim)
        semiclassical = bool(
            np.max(np.abs(np.asarray(spec.eigenvalues) - expected)) <= 1e-8
        )
        rows.append(("laplacian_match", str(semiclassical).lower()))
    if args.json or cfg.fmt == "json":
        doc = dict((k, v) for k, v in rows)
        doc["eigenvalues"] = [float(v) for v in spec.eigenvalues]
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        _emit_rows(rows, out)
        _emit_rows([(i, _fmt_float(v)) for i, v in enumerate(spec.eigenvalues)], out)
    return 0 if (semiclassical is None or semiclassical) else 1


def _parse_bits(text: str | None):
    if text is None:
        return None
    if not text:
        return []
    return [int(b) for b in text.split(",")]


def cmd_qrm_run(args, cfg: Config, out) -> int:
    tm = qrm.parse_tm(_read(args.file))
    problems = tm.validate()
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return 1
    bits = _parse_bits(args.bits)
    layout = None if bits is None else qrm.input_layout(args.n, bits)
    result = qrm.run_ring(
        tm,
        args.n,
        bits=layout,
        max_applications=args.steps,
        collect_trace=args.trace,
    )
    print(qrm.run_report(result), end="", file=out)
    return 0 if result.halted else 1


def cmd_qrm_difftest(args, cfg: Config, out) -> int:
    tm = qrm.parse_tm(_read(args.file))
    problems = tm.validate()
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return 1
    lo, hi = args.n_min, args.n_max
    if lo > hi:
        raise ValueError(f"empty ring range {lo}..{hi}")
    bits = _parse_bits(args.bits)

    def one(n: int) -> dict:
        layout = None if bits is None else qrm.input_layout(n, bits[: n - 1])
        return qrm.differential_test(tm, n, bits=layout, max_steps=args.steps)

    sizes = list(range(lo, hi + 1))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(one, sizes))
    else:
        reports = [one(n) for n in sizes]
    ok = True
    for rep in reports:
        ok = ok and rep["match"]
        _emit_rows(
            [
                (
                    "n",
                    rep["n"],
                    "match",
                    str(rep["match"]).lower(),
                    "steps",
                    rep["steps"],
                    "applications",
                    rep["applications"],
                    "psi_diff",
                    _fmt_float(rep["psi_diff"]),
                )
            ],
            out,
        )
        if not rep["match"]:
            bad = sorted(k for k, v in rep["checks"].items() if not v)
            print(f"mismatch at n={rep['n']}: {', '.join(bad)}", file=sys.stderr)
    return 0 if ok else 1


def _instance_for_length(n: int) -> wheelbarrow.Instance:
    for c in wheelbarrow.valid_counts(n):
        try:
            inst = wheelbarrow.encode_instance(c)
        except wheelbarrow.EncodingConflict:
            continue
        if inst.n == n:
            return inst
    lengths = []
    for c in wheelbarrow.valid_counts(max(n + 24, 48)):
        try:
            lengths.append(wheelbarrow.encode_instance(c).n)
        except wheelbarrow.EncodingConflict:
            continue
    raise ValueError(
        f"no encodable instance has chain length {n}; "
        f"nearby lengths: {' '.join(str(x) for x in lengths)}"
    )


def cmd_wheelbarrow_explore(args, cfg: Config, out) -> int:
    inst = _instance_for_length(args.n)
    ev = wheelbarrow.explore_instance(inst, cfg.explore_cap)
    hc = wheelbarrow.check_history(ev, build_ulg=False)
    rows = [
        ("c_star", inst.c_star),
        ("n", inst.n),
        ("quantum_cells", inst.quantum_cells),
        ("seed", inst.display()),
        ("capped", str(hc.capped).lower()),
    ]
    inv = dict(sorted(hc.inventory.items()))
    if args.json or cfg.fmt == "json":
        doc = dict((k, v) for k, v in rows)
        doc["inventory"] = inv
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        _emit_rows(rows, out)
        _emit_rows(sorted(inv.items()), out)
    if args.plot:
        census = {k: v for k, v in inv.items() if k not in ("strings", "edges")}

        def draw(ax):
            names = list(census)
            ax.bar(range(len(names)), [census[k] for k in names])
            ax.set_xticks(range(len(names)))
            ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
            ax.set_ylabel("strings")
            ax.set_title(f"evolution census, chain length {inst.n}")

        _save_plot(args.plot, draw)
    return 0


def cmd_wheelbarrow_verify(args, cfg: Config, out) -> int:
    inst = _instance_for_length(args.n)
    rep = wheelbarrow.verify_instance(inst, cfg.explore_cap)
    class_problems = wheelbarrow.check_rule_classes()
    captions = wheelbarrow.caption_checks()
    rows = [
        ("n", rep["n"]),
        ("size", rep["size"]),
        ("bracketed", str(rep["bracketed"]).lower()),
        ("single_head", str(rep["single_head"]).lower()),
        ("pairs", str(rep["pairs_ok"]).lower()),
        ("simple", str(rep["simple"]).lower()),
        ("rule_classes", "ok" if not class_problems else "fail"),
        ("captions", "ok" if all(captions.values()) else "fail"),
    ]
    _emit_rows(rows, out)
    for p in class_problems:
        print(f"rule class: {p}", file=sys.stderr)
    for name, okc in sorted(captions.items()):
        if not okc:
            print(f"caption: {name}", file=sys.stderr)
    ok = rep["ok"] and not class_problems and all(captions.values())
    return 0 if ok else 1


def cmd_hardness_assemble(args, cfg: Config, out) -> int:
    m = args.n
    builder = hardness.toy_accepting if args.accepting else hardness.toy_rejecting
    asm = hardness.assemble_toy(builder, interior=m)
    rep = asm.report()
    eps = float(m) ** -4
    lam = rep["lambda_min"]
    if args.accepting:
        threshold, satisfied = -2.0 + eps, lam <= -2.0 + eps
        side = "<="
    else:
        threshold = -2.0 + (1.0 - eps) / float(m) ** 3
        satisfied, side = lam >= threshold, ">="
    rows = [
        ("class", rep["class"]),
        ("strings", rep["strings"]),
        ("p", _fmt_float(rep["p"])),
        ("lambda_min", _fmt_float(lam)),
        ("bound", _fmt_float(rep["bound"])),
        ("threshold", f"{side} {_fmt_float(threshold)}"),
        ("satisfied", str(satisfied).lower()),
    ]
    if args.json or cfg.fmt == "json":
        doc = dict(rep)
        doc["threshold"] = threshold
        doc["satisfied"] = satisfied
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        _emit_rows(rows, out)
    if args.plot:
        vals = np.linalg.eigvalsh(asm.matrix)

        def draw(ax):
            ax.plot(range(len(vals)), vals, ".", markersize=3)
            ax.axhline(threshold, linestyle="--", linewidth=1)
            ax.set_xlabel("index")
            ax.set_ylabel("energy")
            ax.set_title(f"assembled block, interior {m}")

        _save_plot(args.plot, draw)
    return 0 if satisfied else 1


def cmd_selftest(args, cfg: Config, out) -> int:
    ok = acceptance.run_all(emit=lambda line: print(line, file=out))
    return 0 if ok else 1


def _add_common(p, plot: bool = False) -> None:
    p.add_argument("--json", action="store_true", help="emit one JSON document")
    if plot:
        p.add_argument("--plot", metavar="FILE", help="also render a figure to FILE")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="qthue",
        description="workbench for quantum rewriting systems and their spectra",
    )
    top.add_argument("--config", metavar="FILE", help=f"JSON config (default ${CONFIG_ENV})")
    top.add_argument("--threads", type=int, metavar="N", help="cap worker threads")
    sub = top.add_subparsers(dest="command", required=True)

    rules = sub.add_parser("rules", help="rule file operations")
    rules_sub = rules.add_subparsers(dest="subcommand", required=True)
    rp = rules_sub.add_parser("parse", help="parse and echo a rule file")
    rp.add_argument("file")
    rp.add_argument("--qudit-dim", type=int, default=2)
    _add_common(rp)
    rp.set_defaults(fn=cmd_rules_parse)

    ev = sub.add_parser("evolve", help="explore an evolution from a seed")
    ev.add_argument("file")
    ev.add_argument("--seed", required=True)
    ev.add_argument("--cap", type=int, default=None)
    ev.add_argument("--qudit-dim", type=int, default=2)
    ev.add_argument("--dot", action="store_true", help="emit DOT")
    _add_common(ev)
    ev.set_defaults(fn=cmd_evolve)

    sp = sub.add_parser("spectrum", help="diagonalize a seed's chain block")
    sp.add_argument("file")
    sp.add_argument("--seed", required=True)
    sp.add_argument("--cap", type=int, default=None)
    sp.add_argument("--qudit-dim", type=int, default=2)
    sp.add_argument("-k", type=int, default=8, help="how many low eigenvalues to print")
    _add_common(sp, plot=True)
    sp.set_defaults(fn=cmd_spectrum)

    ug = sub.add_parser("ulg", help="labelled graph operations")
    ug_sub = ug.add_subparsers(dest="subcommand", required=True)
    cs = ug_sub.add_parser("check-simple", help="cycle products against identity")
    cs.add_argument("file")
    cs.set_defaults(fn=cmd_ulg_check_simple)
    dg = ug_sub.add_parser("diagonalize", help="spectrum of the associated operator")
    dg.add_argument("file")
    _add_common(dg)
    dg.set_defaults(fn=cmd_ulg_diagonalize)

    qr = sub.add_parser("qrm", help="ring machine operations")
    qr_sub = qr.add_subparsers(dest="subcommand", required=True)
    rr = qr_sub.add_parser("run", help="run a machine on a ring")
    rr.add_argument("file")
    rr.add_argument("-n", type=int, required=True, help="ring size")
    rr.add_argument("--steps", type=int, default=None, help="head application cap")
    rr.add_argument("--bits", help="comma-separated input bits")
    rr.add_argument("--trace", action="store_true")
    rr.set_defaults(fn=cmd_qrm_run)
    dt = qr_sub.add_parser("difftest", help="ring against direct simulation")
    dt.add_argument("file")
    dt.add_argument("--n-min", type=int, default=4)
    dt.add_argument("--n-max", type=int, default=8)
    dt.add_argument("--steps", type=int, default=200)
    dt.add_argument("--bits", help="comma-separated input bits (truncated per ring)")
    dt.set_defaults(fn=cmd_qrm_difftest)

    wb = sub.add_parser("wheelbarrow", help="the fixed two-local rule system")
    wb_sub = wb.add_subparsers(dest="subcommand", required=True)
    we = wb_sub.add_parser("explore", help="explore the instance of a chain length")
    we.add_argument("-n", type=int, required=True, help="chain length")
    _add_common(we, plot=True)
    we.set_defaults(fn=cmd_wheelbarrow_explore)
    wv = wb_sub.add_parser("verify", help="shape checks on one instance")
    wv.add_argument("-n", type=int, required=True, help="chain length")
    wv.set_defaults(fn=cmd_wheelbarrow_verify)

    hd = sub.add_parser("hardness", help="assembled penalty Hamiltonians")
    hd_sub = hd.add_subparsers(dest="subcommand", required=True)
    ha = hd_sub.add_parser("assemble", help="toy crossing block and its energy test")
    ha.add_argument("-n", type=int, required=True, help="interior length (even, >= 4)")
    grp = ha.add_mutually_exclusive_group(required=True)
    grp.add_argument("--accepting", action="store_true")
    grp.add_argument("--rejecting", action="store_true")
    _add_common(ha, plot=True)
    ha.set_defaults(fn=cmd_hardness_assemble)

    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.set_defaults(fn=cmd_selftest)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = load_config(args.config)
        if args.threads is not None:
            cfg = _check_config(replace(cfg, threads=args.threads))
        return args.fn(args, cfg, sys.stdout)
    except (qts.ParseError, qrm.TmFormatError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
