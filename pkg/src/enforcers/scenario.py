"""Scenario (JSON) and trace (JSON lines) files."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .environment import GridSpec, build_grid, load_edge_list
from .simulator import AgentSpec, ConfigError, SimConfig, StepRecord

TRACE_VERSION = 1
BUNDLED = ("fig1", "fig2", "fig3_l2", "fig4")


def bundled_path(name: str):
    return resources.files("enforcers").joinpath("scenarios", f"{name}.json")


def resolve_scenario(name_or_path: str) -> tuple[dict, Path | None]:
    """Read a scenario from a path, or by bundled name (``fig1`` or ``fig1.json``)."""
    p = Path(name_or_path)
    if p.is_file():
        return json.loads(p.read_text()), p.parent
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if stem in BUNDLED and str(p.parent) == ".":
        return json.loads(bundled_path(stem).read_text()), None
    raise FileNotFoundError(f"no scenario file or bundled scenario named {name_or_path!r}")


def _vertex(v):
    return tuple(v) if isinstance(v, list) else v


def config_from_dict(data: dict, base: Path | None = None) -> SimConfig:
    try:
        if "grid" in data:
            g = data["grid"]
            env = build_grid(GridSpec(int(g["width"]), int(g["height"])))
        elif "graph" in data:
            path = Path(data["graph"])
            if base is not None and not path.is_absolute():
                path = base / path
            env = load_edge_list(path)
        else:
            raise ConfigError("scenario needs a 'grid' or a 'graph'")
        agents = []
        for a in data["agents"]:
            plan = a.get("plan", "")
            if isinstance(plan, dict):
                agents.append(AgentSpec(str(a["id"]), _vertex(a["start"]), None, int(plan["random_length"])))
            else:
                agents.append(AgentSpec(str(a["id"]), _vertex(a["start"]), str(plan)))
        return SimConfig(
            env=env,
            agents=agents,
            lookahead=int(data.get("lookahead", 3)),
            deviation=int(data.get("deviation", 2)),
            comm_dist=data.get("comm_dist"),
            safety=data.get("safety", "collision"),
            max_ticks=int(data.get("max_ticks", 1000)),
            seed=int(data.get("seed", 0)),
            random_holds=bool(data.get("random_holds", False)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, OSError) as e:
        raise ConfigError(f"malformed scenario: {type(e).__name__}: {e}") from None


def load_scenario(name_or_path: str) -> SimConfig:
    try:
        data, base = resolve_scenario(name_or_path)
    except json.JSONDecodeError as e:
        raise ConfigError(f"scenario is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    return config_from_dict(data, base)


def config_echo(config: SimConfig, plans) -> dict:
    env = config.env
    out = {
        "lookahead": config.lookahead, "deviation": config.deviation, "comm_dist": config.d,
        "safety": config.safety, "max_ticks": config.max_ticks, "seed": config.seed,
        "random_holds": config.random_holds,
        "agents": [{"id": a.id, "start": list(a.start) if isinstance(a.start, tuple) else a.start, "plan": a.plan}
                   for a in plans],
    }
    if env.grid is not None:
        out["grid"] = {"width": env.grid.width, "height": env.grid.height}
    else:
        out["edges"] = [list(e) for e in env.edges]
    return out


def trace_lines(result) -> list[str]:
    header = {"header": {"version": TRACE_VERSION, "config": config_echo(result.config, result.plans)}}
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(json.dumps(r.to_json(), sort_keys=True) for r in result.trace)
    return lines


def write_trace(result, path) -> None:
    Path(path).write_text("\n".join(trace_lines(result)) + "\n")


def read_trace(path) -> tuple[dict | None, list[StepRecord]]:
    header, records = None, []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if "header" in obj:
            header = obj["header"]
            continue
        pos = {a: _vertex(v) for a, v in obj["positions"].items()}
        records.append(StepRecord(obj["tick"], pos, obj.get("groups", []), obj.get("events", [])))
    return header, records
