"""Command-line front end: trace generation, config-driven runs, sweeps.

The run config is one JSON document with nested sections (print the schema
with `prioheap print-defaults`). Reports append to a fixed-column CSV; all
times are simulated nanoseconds. Exit codes: 0 ok, 2 usage or config error,
3 simulated out-of-memory crash (the crash row is still written).
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
from pathlib import Path

from .cache import BaselineCache, GreedyDualPolicy, LruPolicy, Sache, softref_emulation
from .collector import Collector
from .errors import InvalidBound
from .heap import Heap, SizeClassTable
from .refs import Bound
from .workload import (
    CostModel,
    PressureProfile,
    TraceSpec,
    generate_trace,
    parse_trace,
    run_multi_frequency,
    run_pressure,
    run_trace,
    write_trace,
)

REPORT_COLUMNS = [
    "config_id", "bound", "policy", "total_time", "mutator_time", "gc_time",
    "hits", "misses", "miss_service_time", "gc_count", "total_allocation",
    "crashed",
]

DEFAULT_CONFIG = {
    "config_id": "run",
    "seed": 1,
    "output": "report.csv",
    "heap": {
        "capacity_bytes": 16_777_216,
        "size_classes": None,
        "large_object_threshold": 8192,
    },
    "workload": {
        "trace_file": None,
        "unique_keys": 2000,
        "min_value": 10_000,
        "max_value": 50_000,
        "size_alpha": 1.2,
        "request_alpha": 0.1,
        "length": 10_000,
    },
    "cache": {
        "kind": "sache",
        "policy": "lru",
        "bound": {"mode": "fraction_heap", "value": 0.4},
        "eviction_mode": "strict",
        "greedydual_scale": 65536,
        "max_entries": 500,
        "max_weight": None,
    },
    "costs": {
        "hit_cost_per_node_ns": 10,
        "gc_cost_per_marked_byte_ns": 5,
        "gc_fixed_cost_ns": 1_000_000,
        "miss_bandwidth_bytes_per_s": 10_000_000,
    },
    "experiment": {
        "kind": "single",
        "ratio": 1,
        "total_requests": None,
        "softref": False,
        "softref_free_fraction": 0.5,
        "pressure_node_bytes": 4096,
        "pressure_nodes_per_event": 1,
        "gc_series_file": None,
    },
    "value_node_bytes": 40,
    "gc_interval_bytes": None,
}


class ConfigError(ValueError):
    pass


def _merge_checked(defaults: dict, user: dict, path: str = "") -> dict:
    merged = copy.deepcopy(defaults)
    for key, value in user.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown config field: {where}")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where} must be an object")
            merged[key] = _merge_checked(defaults[key], value, where)
        else:
            merged[key] = value
    return merged


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            user = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(user, dict):
        raise ConfigError("config root must be an object")
    config = _merge_checked(DEFAULT_CONFIG, user)
    env_seed = os.environ.get("PRIOHEAP_SEED")
    if env_seed is not None:
        try:
            config["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"PRIOHEAP_SEED must be an integer, got {env_seed!r}")
    return config


def build_heap(config: dict) -> Heap:
    heap_cfg = config["heap"]
    classes = heap_cfg["size_classes"]
    try:
        if classes is None:
            table = SizeClassTable(
                large_object_threshold=heap_cfg["large_object_threshold"])
        else:
            table = SizeClassTable(tuple(classes),
                                   heap_cfg["large_object_threshold"])
        return Heap(heap_cfg["capacity_bytes"], table)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad heap config: {exc}")


def build_bound(cache_cfg: dict) -> Bound:
    bound_cfg = cache_cfg["bound"]
    try:
        return Bound(bound_cfg["mode"], bound_cfg["value"])
    except (KeyError, TypeError, InvalidBound) as exc:
        raise ConfigError(f"bad cache bound: {exc}")


def build_cache(config: dict, heap: Heap, collector: Collector,
                space=None, policy=None, name=None):
    cache_cfg = config["cache"]
    kind = cache_cfg["kind"]
    if kind == "baseline":
        try:
            return BaselineCache(heap, max_entries=cache_cfg["max_entries"],
                                 max_weight=cache_cfg["max_weight"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad baseline cache config: {exc}")
    if kind != "sache":
        raise ConfigError(f"unknown cache kind {kind!r}")
    if policy is None:
        if cache_cfg["policy"] == "lru":
            policy = LruPolicy()
        elif cache_cfg["policy"] == "greedydual":
            policy = GreedyDualPolicy(scale=cache_cfg["greedydual_scale"])
        else:
            raise ConfigError(f"unknown cache policy {cache_cfg['policy']!r}")
    if space is not None:
        return Sache(heap, collector, policy=policy, space=space)
    return Sache(heap, collector, build_bound(cache_cfg), policy=policy,
                 eviction_mode=cache_cfg["eviction_mode"], name=name)


def bound_label(config: dict) -> str:
    cache_cfg = config["cache"]
    if cache_cfg["kind"] == "baseline":
        if cache_cfg["max_entries"] is not None:
            return f"entries:{cache_cfg['max_entries']}"
        return f"weight:{cache_cfg['max_weight']}"
    return build_bound(cache_cfg).label()


def policy_label(config: dict) -> str:
    cache_cfg = config["cache"]
    if cache_cfg["kind"] == "baseline":
        return "baseline-lru"
    return cache_cfg["policy"]


def build_costs(config: dict) -> CostModel:
    try:
        return CostModel(**config["costs"])
    except TypeError as exc:
        raise ConfigError(f"bad costs config: {exc}")


def load_workload(config: dict):
    wl = config["workload"]
    if wl["trace_file"] is not None:
        path = Path(wl["trace_file"])
        if not path.exists():
            raise ConfigError(f"trace file not found: {path}")
        return parse_trace(path)
    spec = TraceSpec(unique_keys=wl["unique_keys"], min_value=wl["min_value"],
                     max_value=wl["max_value"], size_alpha=wl["size_alpha"],
                     request_alpha=wl["request_alpha"], length=wl["length"],
                     seed=config["seed"])
    try:
        spec.validate()
    except ValueError as exc:
        raise ConfigError(f"bad workload config: {exc}")
    return generate_trace(spec)


def report_row(config_id: str, bound: str, policy: str, report) -> list:
    return [config_id, bound, policy, report.total_time_ns,
            report.mutator_time_ns, report.gc_time_ns, report.hits,
            report.misses, report.miss_service_time_ns, report.gc_count,
            report.total_allocation_bytes, int(report.crashed)]


def append_rows(path, rows: list[list]) -> None:
    path = Path(path)
    new_file = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(REPORT_COLUMNS)
        writer.writerows(rows)


def write_gc_series(path, samples) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if not samples:
            writer.writerow(["event_index", "gc_time_ns"])
            return
        writer.writerow(["event_index", "gc_time_ns"]
                        + samples[0].stats.csv_header())
        for sample in samples:
            writer.writerow([sample.event_index, sample.gc_time_ns]
                            + sample.stats.csv_row())


def execute_config(config: dict) -> tuple[list[list], list]:
    """Run one configured experiment; returns (report rows, gc samples)."""
    heap = build_heap(config)
    collector = Collector(heap)
    costs = build_costs(config)
    node_bytes = config["value_node_bytes"]
    interval = config["gc_interval_bytes"]
    exp = config["experiment"]
    kind = exp["kind"]
    label = bound_label(config)
    policy = policy_label(config)
    cid = config["config_id"]

    if kind == "single":
        trace = load_workload(config)
        cache = build_cache(config, heap, collector, name="cache")
        report = run_trace(heap, collector, cache, trace, costs, node_bytes,
                           interval)
        return [report_row(cid, label, policy, report)], report.gc_series

    if kind == "pressure":
        trace = load_workload(config)
        cache = build_cache(config, heap, collector, name="cache")
        profile = PressureProfile(exp["pressure_node_bytes"],
                                  exp["pressure_nodes_per_event"])
        report = run_pressure(heap, collector, cache, trace, profile, costs,
                              node_bytes, interval)
        return [report_row(cid, label, policy, report)], report.gc_series

    if kind == "multi_frequency":
        if config["workload"]["trace_file"] is not None:
            raise ConfigError("multi_frequency generates its own two streams")
        total = exp["total_requests"] or config["workload"]["length"]
        ratio = exp["ratio"]
        config_b = copy.deepcopy(config)
        config_b["seed"] = config["seed"] + 1
        for cfg in (config, config_b):
            cfg["workload"]["length"] = total
        trace_a = load_workload(config)
        trace_b = load_workload(config_b)
        if exp["softref"]:
            space, shared_policy = softref_emulation(
                collector, exp["softref_free_fraction"],
                config["cache"]["eviction_mode"])
            cache_a = build_cache(config, heap, collector, space, shared_policy)
            cache_b = build_cache(config, heap, collector, space, shared_policy)
            label = f"softref_free:{exp['softref_free_fraction']:g}"
        else:
            cache_a = build_cache(config, heap, collector, name="cache_a")
            cache_b = build_cache(config, heap, collector, name="cache_b")
        rep_a, rep_b = run_multi_frequency(heap, collector, cache_a, cache_b,
                                           trace_a, trace_b, ratio, total,
                                           costs, node_bytes)
        return [report_row(f"{cid}:a", label, policy, rep_a),
                report_row(f"{cid}:b", label, policy, rep_b)], rep_a.gc_series

    raise ConfigError(f"unknown experiment kind {kind!r}")


# -- commands ---------------------------------------------------------------


def cmd_gen_trace(args) -> int:
    spec = TraceSpec(unique_keys=args.keys, min_value=args.min,
                     max_value=args.max, size_alpha=args.alpha_size,
                     request_alpha=args.alpha_req, length=args.length,
                     seed=args.seed)
    try:
        trace = generate_trace(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    write_trace(args.out, trace)
    sizes = [e.nbytes for e in trace]
    print(f"wrote {len(trace)} events over {len(set(e.key for e in trace))} keys, "
          f"sizes {min(sizes)}..{max(sizes)} bytes -> {args.out}")
    return 0


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        if args.out:
            config["output"] = args.out
        rows, samples = execute_config(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    append_rows(config["output"], rows)
    series_file = config["experiment"]["gc_series_file"]
    if series_file is None and config["experiment"]["kind"] == "pressure":
        series_file = str(Path(config["output"]).with_suffix("")) + "_gc_series.csv"
    if series_file:
        write_gc_series(series_file, samples)
    crashed = any(row[-1] for row in rows)
    for row in rows:
        print(",".join(str(v) for v in row))
    return 3 if crashed else 0


def cmd_sweep(args) -> int:
    try:
        config = load_config(args.config)
        if args.out:
            config["output"] = args.out
        values = _parse_sweep_values(args.values)
        if args.param not in ("bound", "max_entries"):
            raise ConfigError(f"unknown sweep parameter {args.param!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    crashed = False
    for value in values:
        point = copy.deepcopy(config)
        if args.param == "bound":
            if point["cache"]["kind"] == "baseline":
                point["cache"]["max_entries"] = int(value)
            else:
                point["cache"]["bound"]["value"] = value
        else:
            point["cache"]["max_entries"] = int(value)
        point["config_id"] = f"{config['config_id']}[{args.param}={value:g}]"
        try:
            rows, _ = execute_config(point)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        append_rows(config["output"], rows)
        crashed = crashed or any(row[-1] for row in rows)
        for row in rows:
            print(",".join(str(v) for v in row))
    return 3 if crashed else 0


def _parse_sweep_values(text: str) -> list[float]:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise ConfigError(f"sweep value {token!r} is not a number")
    if not values:
        raise ConfigError("no sweep values given")
    deduped = []
    for v in values:
        if v not in deduped:
            deduped.append(v)
    return deduped


def cmd_print_defaults(_args) -> int:
    print(json.dumps(DEFAULT_CONFIG, indent=2))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prioheap",
        description="Deterministic heap/cache simulator and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-trace", help="generate a synthetic trace file")
    gen.add_argument("--keys", type=int, default=2000)
    gen.add_argument("--min", type=int, default=10_000)
    gen.add_argument("--max", type=int, default=50_000)
    gen.add_argument("--alpha-size", type=float, default=1.2)
    gen.add_argument("--alpha-req", type=float, default=0.1)
    gen.add_argument("--length", type=int, default=10_000)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen_trace)

    run = sub.add_parser("run", help="execute one configured experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="override the config's output CSV path")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run the config once per parameter value")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--param", required=True, help="bound or max_entries")
    sweep.add_argument("--values", required=True, help="comma-separated numbers")
    sweep.add_argument("--out", help="override the config's output CSV path")
    sweep.set_defaults(func=cmd_sweep)

    defaults = sub.add_parser("print-defaults", help="print the default config JSON")
    defaults.set_defaults(func=cmd_print_defaults)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
