"""JSON documents, DOT export and the command-line interface."""
import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from dotenv import load_dotenv
from tqdm import tqdm

from constructions import (
    ConstructionBundle,
    Family,
    gen_counterexample,
    gen_general,
    gen_lazy_lb,
    gen_mru_lb,
    lift_iterated,
)
from errors import InvalidParameters, PosetQueueError, SchemaError
from extensions import TieBreak, is_lazy, is_mru, lazy_extension, mru_extension, random_linear_extension
from poset_core import ChainDecomposition, LinearExtension, Poset, build_poset, chain_decomposition, width
from rainbow import QueueLayout, max_rainbow, poset_layout
from search import PrefixConstraint, SearchOptions, queue_number_exact

load_dotenv()

TOOL_NAME = "poset-queues"
__version__ = "1.0.0"
SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

logger = logging.getLogger(__name__)


@dataclass
class PosetDocument:
    elements: List[str]
    relations: List[Tuple[str, str]]
    chains: Optional[List[List[str]]] = None
    metadata: Optional[Dict[str, Any]] = None
    schema_version: str = SCHEMA_VERSION


def _string_list(value, path: str) -> List[str]:
    if not isinstance(value, list):
        raise SchemaError(path, "expected a list")
    for i, item in enumerate(value):
        if not isinstance(item, str):
            raise SchemaError(f"{path}[{i}]", "expected a string")
    return list(value)


def parse_document(data: bytes) -> PosetDocument:
    try:
        raw = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError:
        raise SchemaError("$", "input is not UTF-8")
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})")
    if not isinstance(raw, dict):
        raise SchemaError("$", "expected an object")
    for key in raw:
        if key not in ("schema_version", "elements", "relations", "chains", "metadata"):
            raise SchemaError(f"$.{key}", "unknown key")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError("$.schema_version", f"expected {SCHEMA_VERSION!r}, got {raw.get('schema_version')!r}")
    if "elements" not in raw:
        raise SchemaError("$.elements", "missing")
    elements = _string_list(raw["elements"], "$.elements")
    seen = set()
    for i, name in enumerate(elements):
        if name in seen:
            raise SchemaError(f"$.elements[{i}]", f"duplicate element {name!r}")
        seen.add(name)

    relations = []
    raw_relations = raw.get("relations", [])
    if not isinstance(raw_relations, list):
        raise SchemaError("$.relations", "expected a list")
    for i, pair in enumerate(raw_relations):
        pair = _string_list(pair, f"$.relations[{i}]")
        if len(pair) != 2:
            raise SchemaError(f"$.relations[{i}]", f"expected a pair, got {len(pair)} entries")
        relations.append((pair[0], pair[1]))

    chains = None
    if raw.get("chains") is not None:
        if not isinstance(raw["chains"], list):
            raise SchemaError("$.chains", "expected a list of chains")
        chains = [_string_list(chain, f"$.chains[{i}]") for i, chain in enumerate(raw["chains"])]
    metadata = raw.get("metadata")
    if metadata is not None and not isinstance(metadata, dict):
        raise SchemaError("$.metadata", "expected an object")
    return PosetDocument(elements=elements, relations=relations, chains=chains, metadata=metadata)


def _sorted_mapping(value):
    if isinstance(value, dict):
        return {key: _sorted_mapping(value[key]) for key in sorted(value)}
    if isinstance(value, list):
        return [_sorted_mapping(item) for item in value]
    return value


def serialize_document(document: PosetDocument) -> bytes:
    payload: Dict[str, Any] = {
        "schema_version": document.schema_version,
        "elements": sorted(document.elements),
        "relations": sorted([u, v] for u, v in document.relations),
    }
    if document.chains is not None:
        payload["chains"] = [list(chain) for chain in document.chains]
    if document.metadata is not None:
        payload["metadata"] = _sorted_mapping(document.metadata)
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def document_from_poset(
    poset: Poset, chains: Optional[ChainDecomposition] = None, metadata: Optional[Dict[str, Any]] = None
) -> PosetDocument:
    return PosetDocument(
        elements=list(poset.elements),
        relations=poset.edge_names(),
        chains=chains.names(poset) if chains is not None else None,
        metadata=metadata,
    )


def document_from_bundle(bundle: ConstructionBundle) -> PosetDocument:
    metadata = bundle.metadata()
    if bundle.prescribed_extension is not None:
        metadata["prescribed_extension"] = bundle.prescribed_extension.names(bundle.poset)
    if bundle.expected_rainbow is not None:
        metadata["expected_rainbow"] = bundle.expected_rainbow
    return document_from_poset(bundle.poset, bundle.chains, metadata)


def poset_from_document(document: PosetDocument) -> Tuple[Poset, Optional[ChainDecomposition]]:
    poset = build_poset(document.elements, document.relations)
    chains = ChainDecomposition.from_chains(poset, document.chains) if document.chains else None
    return poset, chains


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(poset: Poset, layout: Optional[QueueLayout] = None) -> str:
    lines = ["digraph {"]
    if layout is None:
        for v in range(poset.size):
            lines.append(f"  {_dot_id(poset.name(v))};")
        for u, v in poset.cover_edges:
            lines.append(f"  {_dot_id(poset.name(u))} -> {_dot_id(poset.name(v))};")
    else:
        lines.append("  rankdir=LR;")
        for rank, v in enumerate(layout.extension.order):
            lines.append(f'  {_dot_id(poset.name(v))} [rank={rank}, pos="{rank},0!"];')
        for (u, v), q in sorted(layout.queue_of.items(), key=lambda item: (item[1], item[0])):
            color = (q - 1) % 9 + 1
            lines.append(
                f'  {_dot_id(poset.name(u))} -> {_dot_id(poset.name(v))} '
                f'[colorscheme=set19, color={color}, label="q{q}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _read(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def _load(path: str) -> Tuple[Poset, Optional[ChainDecomposition], PosetDocument, bytes]:
    data = _read(path)
    document = parse_document(data)
    poset, chains = poset_from_document(document)
    return poset, chains, document, data


def _load_json_list(path: str, what: str):
    try:
        value = json.loads(_read(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"{what} file is not valid JSON: {exc}")
    if not isinstance(value, list):
        raise SchemaError("$", f"{what} file must hold a JSON list")
    return value


def _load_order(path: str) -> List[str]:
    return _string_list(_load_json_list(path, "order"), "$")


def _load_chains(path: str) -> List[List[str]]:
    return [_string_list(chain, f"$[{i}]") for i, chain in enumerate(_load_json_list(path, "chains"))]


def _env_jobs() -> int:
    text = os.getenv("POSET_QUEUES_JOBS", "1")
    try:
        return int(text)
    except ValueError:
        raise InvalidParameters(f"POSET_QUEUES_JOBS must be an integer, got {text!r}")


def _chains_for(args, poset: Poset, document_chains: Optional[ChainDecomposition]) -> ChainDecomposition:
    if getattr(args, "chains", None):
        return ChainDecomposition.from_chains(poset, _load_chains(args.chains))
    return document_chains if document_chains is not None else chain_decomposition(poset)


def _extension_for(args, poset: Poset, chains: ChainDecomposition, document: PosetDocument):
    prescribed = (document.metadata or {}).get("prescribed_extension")
    if args.seed is not None:
        tiebreak = TieBreak.seeded(args.seed)
    elif prescribed:
        tiebreak = TieBreak.replay(prescribed)
    else:
        tiebreak = TieBreak()
    if args.strategy == "lazy":
        return lazy_extension(poset, chains, tiebreak)
    if args.strategy == "mru":
        return mru_extension(poset, chains, tiebreak)
    return random_linear_extension(poset, args.seed or 0), None


def _layout_payload(poset: Poset, layout: QueueLayout) -> Dict[str, Any]:
    return {
        "order": layout.extension.names(poset),
        "queue_count": layout.queue_count,
        "queues": [[[poset.name(u), poset.name(v)] for u, v in queue] for queue in layout.queues()],
    }


def _cmd_analyze(args):
    poset, chains, document, data = _load(args.file)
    chains = _chains_for(args, poset, chains)
    w = len(chains)
    lazy, _ = lazy_extension(poset, chains)
    mru, _ = mru_extension(poset, chains)
    payload = {
        "elements": poset.size,
        "cover_edges": len(poset.cover_edges),
        "reduction_warning": poset.reduction_warning,
        "width": width(poset),
        "chains": chains.names(poset),
        "lazy_rainbow": max_rainbow(lazy, poset.cover_edges)[0],
        "lazy_bound": w * w - w,
        "mru_rainbow": max_rainbow(mru, poset.cover_edges)[0],
        "mru_bound": (w - 1) ** 2 + 1 if w else 0,
    }
    return payload, _digest(data), EXIT_OK


def _cmd_extend(args):
    poset, chains, document, data = _load(args.file)
    chains = _chains_for(args, poset, chains)
    extension, trace = _extension_for(args, poset, chains, document)
    payload = {
        "strategy": args.strategy,
        "order": extension.names(poset),
        "rainbow": max_rainbow(extension, poset.cover_edges)[0],
        "is_lazy": bool(is_lazy(poset, chains, extension)),
        "is_mru": bool(is_mru(poset, chains, extension)),
    }
    if trace is not None:
        payload["reasons"] = trace.reasons()
    return payload, _digest(data), EXIT_OK


def _cmd_rainbow(args):
    poset, _, _, data = _load(args.file)
    extension = LinearExtension.build(poset, _load_order(args.order))
    size, certificate = max_rainbow(extension, poset.cover_edges)
    payload = {
        "rainbow": size,
        "certificate": [[poset.name(u), poset.name(v)] for u, v in certificate.edges],
    }
    return payload, _digest(data), EXIT_OK


def _cmd_layout(args):
    poset, chains, document, data = _load(args.file)
    chains = _chains_for(args, poset, chains)
    extension, _ = _extension_for(args, poset, chains, document)
    layout = poset_layout(poset, extension)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as f:
            f.write(export_dot(poset, layout))
    payload = {"strategy": args.strategy, **_layout_payload(poset, layout)}
    return payload, _digest(data), EXIT_OK


def _generate_bundle(family: str, args) -> ConstructionBundle:
    if family == Family.GENERAL.value:
        return gen_general(args.w)
    if family == Family.LAZY_LB.value:
        return gen_lazy_lb(args.w)
    if family == Family.MRU_LB.value:
        return gen_mru_lb(args.w)
    if family == Family.COUNTEREXAMPLE.value:
        return gen_counterexample(args.p, args.q, args.tilde)
    if family == Family.LIFTED.value:
        return lift_iterated(_generate_bundle(args.base, args), args.levels)
    raise SchemaError("--family", f"unknown family {family!r}")


def _cmd_generate(args):
    bundle = _generate_bundle(args.family, args)
    data = serialize_document(document_from_bundle(bundle))
    with open(args.output, "wb") as f:
        f.write(data)
    payload = {
        "family": bundle.family.value,
        "parameters": bundle.parameters,
        "output": args.output,
        "elements": bundle.poset.size,
        "cover_edges": len(bundle.poset.cover_edges),
        "width": width(bundle.poset),
        "expected_rainbow": bundle.expected_rainbow,
    }
    return payload, _digest(data), EXIT_OK


def _cmd_qn_exact(args):
    poset, _, _, data = _load(args.file)
    pairs = []
    for text in args.constraint or []:
        parts = text.split(",")
        if len(parts) != 2:
            raise SchemaError("--constraint", f"expected 'u,v', got {text!r}")
        pairs.append((parts[0].strip(), parts[1].strip()))
    bar = tqdm(unit="node", file=sys.stderr, disable=not args.progress)
    seen = [0]

    def report(explored, lower, upper):
        bar.update(explored - seen[0])
        seen[0] = explored
        bar.set_postfix(lower=lower, upper=upper)

    options = SearchOptions(
        time_budget=args.time_budget,
        node_budget=args.node_budget,
        initial_upper=args.upper,
        constraints=PrefixConstraint(tuple(pairs)) if pairs else None,
        prune=not args.no_prune,
        jobs=args.jobs if args.jobs is not None else _env_jobs(),
        progress=report if args.progress else None,
    )
    result = queue_number_exact(poset, options)
    bar.close()
    payload = {
        "queue_number": result.upper_bound if result.proven else None,
        "lower_bound": result.lower_bound,
        "upper_bound": result.upper_bound,
        "proven": result.proven,
        "budget_exhausted": result.budget_exhausted,
        "explored": result.explored,
        "leaves": result.leaves,
        "elapsed": round(result.elapsed, 3),
        "certificate": _layout_payload(poset, result.certificate) if result.certificate else None,
    }
    return payload, _digest(data), EXIT_BUDGET if result.budget_exhausted else EXIT_OK


def _cmd_verify_paper(args):
    from paper_verifier import PaperVerifier

    verifier = PaperVerifier.from_config_file(args.config, level=args.level, log_file=args.log)
    rows = verifier.run()
    data = json.dumps(verifier.config, sort_keys=True).encode("utf-8")
    payload = {"level": args.level, "checks": rows}
    return payload, _digest(data), verifier.exit_code(rows)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Queue layouts of posets.")
    parser.add_argument("--human", action="store_true", help="print tables instead of JSON")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="width, chains and heuristic rainbows")
    analyze.add_argument("file")
    analyze.add_argument("--chains")

    for name, text in (("extend", "compute a linear extension"), ("layout", "compute a queue layout")):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("file")
        sub.add_argument("--strategy", choices=("lazy", "mru", "random"), required=True)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--chains")
        if name == "layout":
            sub.add_argument("--dot")

    rainbow = commands.add_parser("rainbow", help="maximum rainbow of a given order")
    rainbow.add_argument("file")
    rainbow.add_argument("--order", required=True)

    generate = commands.add_parser("generate", help="write a construction to a document")
    generate.add_argument("--family", required=True,
                          choices=[f.value for f in Family if f != Family.COUNTEREXAMPLE_TILDE])
    generate.add_argument("--base", default=Family.COUNTEREXAMPLE.value,
                          choices=[f.value for f in Family if f not in (Family.COUNTEREXAMPLE_TILDE, Family.LIFTED)])
    generate.add_argument("--levels", type=int, default=1, help="how many times to lift the base")
    generate.add_argument("--w", type=int, default=2)
    generate.add_argument("--p", type=int, default=6)
    generate.add_argument("--q", type=int, default=2)
    generate.add_argument("--tilde", action="store_true")
    generate.add_argument("-o", "--output", required=True)

    exact = commands.add_parser("qn-exact", help="exact queue number by branch and bound")
    exact.add_argument("file")
    exact.add_argument("--upper", type=int)
    exact.add_argument("--constraint", action="append", help="u,v: u must precede v")
    exact.add_argument("--time-budget", type=float)
    exact.add_argument("--node-budget", type=int)
    exact.add_argument("--jobs", type=int, help="worker threads, POSET_QUEUES_JOBS by default")
    exact.add_argument("--no-prune", action="store_true")
    exact.add_argument("--progress", action="store_true")

    verify = commands.add_parser("verify-paper", help="run the reproduction suite")
    verify.add_argument("--level", choices=("quick", "full"), default="quick")
    verify.add_argument("--config", default="verify_config.json")
    verify.add_argument("--log", default=os.getenv("POSET_QUEUES_VERIFY_LOG", "verify_log.csv"))
    return parser


_COMMANDS = {
    "analyze": _cmd_analyze,
    "extend": _cmd_extend,
    "rainbow": _cmd_rainbow,
    "layout": _cmd_layout,
    "generate": _cmd_generate,
    "qn-exact": _cmd_qn_exact,
    "verify-paper": _cmd_verify_paper,
}


def _print_human(payload: Dict[str, Any]):
    scalars = {k: v for k, v in payload.items() if not isinstance(v, (list, dict))}
    print(pd.DataFrame({"field": list(scalars), "value": list(scalars.values())}).to_string(index=False))
    for key, value in payload.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"\n{key}:")
            print(pd.DataFrame(value).to_string(index=False))


def cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.DEBUG if args.verbose else os.getenv("POSET_QUEUES_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=level, stream=sys.stderr, format="[%(levelname)s] %(name)s: %(message)s")

    try:
        payload, digest, code = _COMMANDS[args.command](args)
    except (PosetQueueError, OSError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        digest, code = None, EXIT_USAGE
    payload = {"tool": TOOL_NAME, "version": __version__, "input_digest": digest, **payload}
    if args.human:
        _print_human(payload)
    else:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    return code


def main():
    sys.exit(cli())


if __name__ == "__main__":
    main()
