"""Command line: ``gen``, ``analyze``, ``pairing`` and ``verify``.

Exit codes: 0 when every applicable verdict passes, 1 on a verification
failure, 2 on bad input (a JSON error object is still written).

Inputs
  * OFF mesh plus a field file (CSV ``vertex_id,value`` or a JSON list/object),
  * a JSON bundle ``{"mesh": {"vertices": [...], "triangles": [...]},
    "field": {...}, "orientation": 1 | -1}``,
  * a named fixture (``--fixture DISK1``; ``DISK1@7`` uses random field seed 7),
  * hand-authored Morse data (``--morse-data file.json``): ``points`` is a
    list of ``{"id", "locus": "interior"|"boundary", "index", "btype": "+"|"-"}``;
    ``N_minus``, ``N_plus``, ``N_boundary`` and ``Phi`` are lists of
    ``[source_id, target_id, count]``; ``eps_minus``/``eps_plus`` map ids to
    ±1; optional ``n``, ``oriented``, ``phi_complete`` and ``schema_version``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from .fixtures import NAMED, BadParameters, FixtureSpec, gen_fixture
from .morse_model import InvalidMorseData, MorseData
from .pl_engine.field import ScalarField, parse_field_csv, parse_field_json
from .pl_engine.mesh import NotManifold, ParseError, SurfaceMesh, load_mesh
from .report import (REPORT_SCHEMA_VERSION, AnalyzeConfig, analyze_mesh, analyze_morse_data,
                     digest, render_text)

INPUT_ERRORS = (ParseError, NotManifold, BadParameters, InvalidMorseData, OSError,
                json.JSONDecodeError, KeyError, TypeError)
DEFAULT_SUITE = ["DISK1", "ANN1", "MOB1", "G2B1", "DISK1@1", "ANN1@1", "MOB1@1", "G2B1@1"]


class InputError(ValueError):
    pass


def fixture_spec(item: str) -> FixtureSpec:
    name, _, seed = item.partition("@")
    if name not in NAMED:
        raise BadParameters(f"unknown fixture {name!r}")
    spec = NAMED[name]
    return replace(spec, field_seed=int(seed)) if seed else spec


def load_inputs(mesh_path: str, field_path: str | None) -> tuple[SurfaceMesh, ScalarField, dict[str, str]]:
    raw = Path(mesh_path).read_bytes()
    inputs = {"mesh": digest(raw)}
    if mesh_path.endswith(".json"):
        mesh = load_mesh(raw, "json")
        bundle = json.loads(raw)
        fobj = bundle.get("field") if isinstance(bundle, dict) else None
    else:
        mesh = load_mesh(raw, "off")
        fobj = None
    if field_path is not None:
        fraw = Path(field_path).read_bytes()
        inputs["field"] = digest(fraw)
        text = fraw.decode("utf-8")
        if field_path.endswith(".json"):
            fld = parse_field_json(json.loads(text), mesh.n_vertices)
        else:
            fld = parse_field_csv(text, mesh.n_vertices)
    elif fobj is not None:
        fld = parse_field_json(fobj, mesh.n_vertices)
    else:
        raise ParseError("no field given (pass a field file or a bundle with a 'field' entry)")
    return mesh, fld, inputs


def _fixture_inputs(mesh: SurfaceMesh, fld: ScalarField, name: str) -> dict[str, str]:
    return {"fixture": name, "mesh": digest(mesh.to_off()), "field": digest(fld.to_csv())}


def run_analysis(args: argparse.Namespace, only_pairing: bool = False) -> dict[str, Any]:
    cfg = AnalyzeConfig(seed=args.seed, pairing=not getattr(args, "no_pairing", False),
                        cross_check=args.cross_check, timings=args.timings)
    if getattr(args, "morse_data", None):
        raw = Path(args.morse_data).read_bytes()
        d = MorseData.from_json(json.loads(raw))
        return analyze_morse_data(d, cfg, {"morse_data": digest(raw)})
    if args.fixture:
        mesh, fld = gen_fixture(fixture_spec(args.fixture))
        inputs = _fixture_inputs(mesh, fld, args.fixture)
    elif args.mesh:
        mesh, fld, inputs = load_inputs(args.mesh, args.field)
    else:
        raise InputError("give a mesh file, --fixture or --morse-data")
    return analyze_mesh(mesh, fld, cfg, inputs, only_pairing=only_pairing)


def verify(items: Sequence[str], cfg: AnalyzeConfig = AnalyzeConfig()) -> dict[str, Any]:
    """Analyze each fixture name or Morse-data file and aggregate; failures are data."""
    rows = []
    for item in items:
        try:
            if item.endswith(".json"):
                raw = Path(item).read_bytes()
                rep = analyze_morse_data(MorseData.from_json(json.loads(raw)), cfg,
                                         {"morse_data": digest(raw)})
            else:
                mesh, fld = gen_fixture(fixture_spec(item))
                rep = analyze_mesh(mesh, fld, cfg, _fixture_inputs(mesh, fld, item))
            rows.append({"name": item, "passed": rep["passed"], "verdicts": rep["verdicts"]})
        except INPUT_ERRORS + (ValueError,) as exc:
            rows.append({"name": item, "passed": False,
                         "error": {"type": type(exc).__name__, "message": str(exc)}})
    return {"schema_version": REPORT_SCHEMA_VERSION, "fixtures": rows,
            "failures": sum(1 for r in rows if not r["passed"]), "total": len(rows)}


def emit(report: dict[str, Any], fmt: str, out: str | None) -> None:
    text = render_text(report) if fmt == "text" else json.dumps(report, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen(args: argparse.Namespace) -> int:
    if args.shape in NAMED:
        spec = NAMED[args.shape]
        if args.field_seed is not None:
            spec = replace(spec, field_seed=args.field_seed)
    else:
        spec = FixtureSpec(args.shape, args.resolution, args.genus, args.holes, args.field_seed)
    mesh, fld = gen_fixture(spec)
    if args.format == "json" or not args.out:
        bundle = {"mesh": mesh.to_json(), "field": fld.to_json(), "orientation": 1,
                  "fixture": spec.name, "orientable": mesh.orientable}
        text = json.dumps(bundle, indent=2) + "\n"
        if args.out:
            Path(args.out + ".json").write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    else:
        Path(args.out + ".off").write_text(mesh.to_off(), encoding="utf-8")
        Path(args.out + ".csv").write_text(fld.to_csv(), encoding="utf-8")
    return 0


def _add_analysis_flags(p: argparse.ArgumentParser, pairing_flag: bool = True) -> None:
    p.add_argument("mesh", nargs="?", help="OFF mesh or JSON bundle")
    p.add_argument("field", nargs="?", help="field file (.csv or .json)")
    p.add_argument("--fixture", help="named fixture, e.g. DISK1 or DISK1@7")
    p.add_argument("--morse-data", help="hand-authored Morse data JSON")
    p.add_argument("--seed", type=int, default=0, help="tie-break / perturbation seed")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--cross-check", action="store_true",
                   help="also re-extract the reversed complex from -f and compare")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    if pairing_flag:
        p.add_argument("--no-pairing", action="store_true", help="skip the duality checks")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morse-lefschetz",
                                 description="Morse complexes of surfaces with boundary")
    sub = ap.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", help="write a fixture mesh and field")
    g.add_argument("shape", help="disk | annulus | mobius | genus | DISK1 | ANN1 | MOB1 | G2B1")
    g.add_argument("--resolution", type=int, default=8)
    g.add_argument("--genus", type=int, default=1)
    g.add_argument("--holes", type=int, default=1)
    g.add_argument("--field-seed", type=int, default=None)
    g.add_argument("--out", help="output prefix (writes PREFIX.off + PREFIX.csv, or PREFIX.json)")
    g.add_argument("--format", choices=["off", "json"], default="off")
    _add_analysis_flags(sub.add_parser("analyze", help="full report for one input"))
    _add_analysis_flags(sub.add_parser("pairing", help="duality checks only"), pairing_flag=False)
    v = sub.add_parser("verify", help="run the fixture suite")
    v.add_argument("items", nargs="*", help="fixture names or Morse-data JSON files")
    v.add_argument("--suite", help="file with one item per line")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--no-pairing", action="store_true")
    v.add_argument("--cross-check", action="store_true")
    v.add_argument("--out")
    v.add_argument("--format", choices=["json", "text"], default="json")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fmt, out = getattr(args, "format", "json"), getattr(args, "out", None)
    try:
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "verify":
            if args.suite:
                items = [s.strip() for s in Path(args.suite).read_text().splitlines() if s.strip()]
            else:
                items = args.items or DEFAULT_SUITE
            cfg = AnalyzeConfig(args.seed, not args.no_pairing, args.cross_check)
            rep = verify(items, cfg)
            emit(rep, fmt, out)
            return 0 if rep["failures"] == 0 else 1
        rep = run_analysis(args, only_pairing=args.command == "pairing")
    except INPUT_ERRORS + (InputError,) as exc:
        err = {"schema_version": REPORT_SCHEMA_VERSION,
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        emit(err, "json" if fmt not in ("json", "text") else fmt, out)
        return 2
    emit(rep, fmt, out)
    return 0 if rep["passed"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
