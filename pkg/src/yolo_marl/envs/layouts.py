"""Render state-vector layout tables; ``python -m yolo_marl.envs.layouts``
regenerates docs/state-layouts.md."""

from __future__ import annotations

from .core import EnvConfig, EnvSpec, LbfConfig, MpeSpreadConfig, make_spec


def layout_table(spec: EnvSpec) -> str:
    lines = ["| component | indices | meaning |", "| --- | --- | --- |"]
    for f in spec.state_layout:
        lines.append(f"| {f.name} | [{f.start}, {f.stop}) | {f.description} |")
    return "\n".join(lines)


def layout_markdown(cfg: EnvConfig) -> str:
    spec = make_spec(cfg)
    head = {
        "lbf": "Level-based foraging: grid coordinates are (row, col) with row 0 "
               "at the top; levels are integers; a food's level drops to 0 when collected.",
        "mpe_spread": "Particle spread: positions in world units within "
                      f"[-{cfg.world_extent}, {cfg.world_extent}]^2, velocities in world "
                      "units per step.",
    }[spec.env_id.value]
    return (f"## `{spec.env_id.value}` ({spec.n_agents} agents, state dim {spec.state_dim})\n\n"
            f"{head}\n\n{layout_table(spec)}\n")


def reference_doc() -> str:
    sections = [
        "# State vector layouts",
        "",
        "Generated by `python -m yolo_marl.envs.layouts`. Index ranges are",
        "half-open `[start, stop)` into the flat float64 global state vector.",
        "",
        layout_markdown(LbfConfig()),
        layout_markdown(MpeSpreadConfig(n_agents=3)),
        layout_markdown(MpeSpreadConfig(n_agents=4)),
    ]
    return "\n".join(sections)


if __name__ == "__main__":
    import pathlib
    import sys

    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("docs/state-layouts.md")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(reference_doc(), encoding="utf-8")
    print(f"wrote {out}")
