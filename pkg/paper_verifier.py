"""Reproduction suite for the published queue-layout bounds.

Every check appends one row to the verification CSV log, the same way the
evaluation runs log their scores, so successive runs can be compared in the
dashboard.
"""
import csv
import json
import logging
import os
import random
import time
from datetime import datetime
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

from dotenv import load_dotenv
from tqdm import tqdm

from constructions import gen_counterexample, gen_general, gen_lazy_lb, gen_mru_lb, lift
from errors import InvalidParameters
from extensions import is_lazy, is_mru, lazy_extension, mru_extension, random_linear_extension
from patterns import find_bbb, find_bwb_forbidden, find_incoming_forbidden, find_w2
from poset_core import (
    ChainDecomposition,
    LinearExtension,
    Poset,
    build_poset,
    chain_decomposition,
    is_linear_extension,
    width,
)
from rainbow import max_rainbow, max_rainbow_exhaustive
from search import (
    PrefixConstraint,
    SearchOptions,
    best_heuristic_layout,
    count_linear_extensions,
    interleaving_bound,
    naive_queue_number,
    queue_number_exact,
    verify_lower_bound,
)
from testkit import corpus, random_poset

load_dotenv()

logger = logging.getLogger(__name__)

LOG_FIELDS = ["timestamp", "level", "check", "claim", "observed", "passed", "proven", "elapsed"]

DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "quick": {
        "corpus_size": 1000,
        "extensions_per_poset": 10,
        "oracle_posets": 200,
        "rainbow_oracle_instances": 500,
        "lift_samples": 100,
        "random_seeds": 20,
        "stretch_time_budget": 60.0,
        "stretch_node_budget": 5_000_000,
    },
    "full": {
        "corpus_size": 1000,
        "extensions_per_poset": 10,
        "oracle_posets": 200,
        "rainbow_oracle_instances": 500,
        "lift_samples": 100,
        "random_seeds": 20,
        "stretch_time_budget": 3600.0,
        "stretch_node_budget": 500_000_000,
    },
}

# (claim, observed, passed, proven); passed is None when a budget ran out first
Outcome = Tuple[str, str, Optional[bool], bool]


def _lazy_bound(w: int) -> int:
    return max(w * w - w, 1)


def _mru_bound(w: int) -> int:
    return (w - 1) ** 2 + 1


class PaperVerifier:
    def __init__(self, level: str = "quick", config: Optional[Dict[str, Dict[str, Any]]] = None,
                 log_file: Optional[str] = None):
        config = config or DEFAULT_CONFIG
        if level not in config:
            raise InvalidParameters(f"Unknown verification level: {level!r}")
        self.level = level
        self.config = {**DEFAULT_CONFIG.get(level, {}), **config[level]}
        self.log_file = log_file or os.getenv("POSET_QUEUES_VERIFY_LOG", "verify_log.csv")
        self._corpus: Optional[List[Tuple[Poset, ChainDecomposition]]] = None

    @classmethod
    def from_config_file(cls, path: str, level: str = "quick", log_file: Optional[str] = None) -> "PaperVerifier":
        if not os.path.exists(path):
            logger.warning("Config file %s not found, using built-in defaults", path)
            return cls(level, DEFAULT_CONFIG, log_file)
        with open(path, "r", encoding="utf-8") as f:
            return cls(level, json.load(f), log_file)

    def checks(self) -> List[Tuple[str, Callable[[], Outcome]]]:
        checks = [
            ("general_construction", self.check_general_construction),
            ("lazy_lower_bound", self.check_lazy_lower_bound),
            ("mru_lower_bound", self.check_mru_lower_bound),
            ("lazy_upper_bound", self.check_lazy_upper_bound),
            ("mru_upper_bound", self.check_mru_upper_bound),
            ("any_extension_bound", self.check_any_extension_bound),
            ("counterexample_exact", self.check_counterexample_exact),
            ("counterexample_tilde_heuristics", self.check_counterexample_tilde_heuristics),
            ("lift_structure", self.check_lift_structure),
            ("oracle_equivalence", self.check_oracle_equivalence),
        ]
        if self.level == "full":
            checks += [
                ("stretch_constrained_counterexample", self.check_stretch_constrained),
                ("stretch_counterexample_tilde", self.check_stretch_tilde),
            ]
        return checks

    def run(self) -> List[Dict[str, Any]]:
        rows = []
        for name, check in tqdm(self.checks(), desc="Verifying", unit="check"):
            started = time.monotonic()
            claim, observed, passed, proven = check()
            row = {
                "timestamp": datetime.now().isoformat(),
                "level": self.level,
                "check": name,
                "claim": claim,
                "observed": observed,
                "passed": passed,
                "proven": proven,
                "elapsed": round(time.monotonic() - started, 3),
            }
            if passed is False:
                logger.error("Check %s failed: %s", name, observed)
            else:
                logger.info("Check %s: %s", name, observed)
            self._log_result(row)
            rows.append(row)
        return rows

    @staticmethod
    def exit_code(rows: List[Dict[str, Any]]) -> int:
        if any(row["passed"] is False for row in rows):
            return 1
        if any(row["passed"] is None for row in rows):
            return 3
        return 0

    def _log_result(self, row: Dict[str, Any]):
        file_exists = os.path.isfile(self.log_file)
        with open(self.log_file, "a", newline="", encoding="utf-8") as csvfile:
            writer = csv.DictWriter(csvfile, fieldnames=LOG_FIELDS)
            if not file_exists:
                writer.writeheader()
            writer.writerow(row)

    def corpus(self) -> List[Tuple[Poset, ChainDecomposition]]:
        """Random posets, each with the decomposition it was generated from."""
        if self._corpus is None:
            specs = corpus(self.config["corpus_size"], widths=(2, 3, 4, 5), max_n=40, seed=0)
            self._corpus = [random_poset(spec) for spec in specs]
        return self._corpus

    def decomposed(self) -> Iterator[Tuple[Poset, ChainDecomposition]]:
        """Every corpus poset twice: with a minimum decomposition and with its generating one."""
        for poset, generating in self.corpus():
            yield poset, chain_decomposition(poset)
            yield poset, generating

    def check_general_construction(self) -> Outcome:
        observed = {}
        for w in (2, 4, 6):
            bundle = gen_general(w)
            observed[w] = max_rainbow(bundle.prescribed_extension, bundle.poset.cover_edges)[0]
        passed = all(observed[w] == w * w for w in observed)
        return "rainbow w^2 for w in 2,4,6", _describe(observed), passed, True

    def check_lazy_lower_bound(self) -> Outcome:
        observed, passed = {}, True
        for w in (2, 3, 4, 5):
            bundle = gen_lazy_lb(w)
            ext = bundle.prescribed_extension
            observed[w] = max_rainbow(ext, bundle.poset.cover_edges)[0]
            lazy = is_lazy(bundle.poset, bundle.chains, ext)
            passed &= bool(lazy) and is_linear_extension(bundle.poset, ext.order) and observed[w] == w * w - w
        return "lazy extension with rainbow w^2-w for w in 2..5", _describe(observed), passed, True

    def check_mru_lower_bound(self) -> Outcome:
        observed, passed = {}, True
        for w in (2, 3, 4, 5):
            bundle = gen_mru_lb(w)
            ext = bundle.prescribed_extension
            observed[w] = max_rainbow(ext, bundle.poset.cover_edges)[0]
            mru = is_mru(bundle.poset, bundle.chains, ext)
            passed &= bool(mru) and observed[w] == _mru_bound(w)
        return "MRU extension with rainbow (w-1)^2+1 for w in 2..5", _describe(observed), passed, True

    def check_lazy_upper_bound(self) -> Outcome:
        violations = 0
        for poset, chains in self.decomposed():
            ext, _ = lazy_extension(poset, chains)
            if max_rainbow(ext, poset.cover_edges)[0] > _lazy_bound(len(chains)):
                violations += 1
            elif find_incoming_forbidden(poset, chains, ext) is not None:
                violations += 1
        observed = f"{violations} violations in {2 * len(self.corpus())} decomposed posets"
        return "lazy rainbow <= w^2-w, no incoming pattern", observed, violations == 0, False

    def check_mru_upper_bound(self) -> Outcome:
        violations = 0
        for poset, chains in self.decomposed():
            ext, _ = mru_extension(poset, chains)
            if max_rainbow(ext, poset.cover_edges)[0] > _mru_bound(len(chains)):
                violations += 1
            elif find_bwb_forbidden(poset, chains, ext) is not None:
                violations += 1
        observed = f"{violations} violations in {2 * len(self.corpus())} decomposed posets"
        return "MRU rainbow <= (w-1)^2+1, no BWB pattern", observed, violations == 0, False

    def check_any_extension_bound(self) -> Outcome:
        violations = checked = 0
        per_poset = self.config["extensions_per_poset"]
        for i, (poset, _) in enumerate(self.corpus()):
            chains = chain_decomposition(poset)
            w = len(chains)
            for k in range(per_poset):
                ext = random_linear_extension(poset, i * per_poset + k)
                checked += 1
                if (
                    find_bbb(poset, chains, ext) is not None
                    or find_w2(poset, chains, ext) is not None
                    or max_rainbow(ext, poset.cover_edges)[0] > w * w
                ):
                    violations += 1
        observed = f"{violations} violations in {checked} extensions"
        return "no BBB/W2 pattern, rainbow <= w^2", observed, violations == 0, False

    def check_counterexample_exact(self) -> Outcome:
        bundle = gen_counterexample(6, 2)
        bound = interleaving_bound(bundle.chains)
        extensions = count_linear_extensions(bundle.poset)
        result = queue_number_exact(bundle.poset)
        certificate_ok = result.certificate is not None and result.certificate.queue_count == 3
        passed = result.proven and result.upper_bound == 3 and certificate_ok and extensions <= bound
        observed = (
            f"queue number {result.upper_bound} (proven={result.proven}), "
            f"{extensions} extensions <= {bound} interleavings, {result.explored} nodes"
        )
        return "G(6,2) needs exactly 3 queues", observed, passed, result.proven

    def check_counterexample_tilde_heuristics(self) -> Outcome:
        bundle = gen_counterexample(31, 22, tilde=True)
        poset = bundle.poset
        mru, _ = mru_extension(poset, bundle.chains)
        mru_rainbow = max_rainbow(mru, poset.cover_edges)[0]
        seeds = range(self.config["random_seeds"])
        best = best_heuristic_layout(poset, ("lazy", "mru", "random"), seeds=seeds, chains=bundle.chains)
        passed = mru_rainbow >= 4 and best.queue_count >= 4
        observed = f"MRU rainbow {mru_rainbow}, best heuristic {best.queue_count} queues"
        return "no heuristic layout of the tilde family uses 3 queues", observed, passed, False

    def check_lift_structure(self) -> Outcome:
        failures = []
        samples = self.config["lift_samples"]
        for name, base in (("recursive base", gen_lazy_lb(2)), ("G(6,2)", gen_counterexample(6, 2))):
            lifted = lift(base).poset
            if width(lifted) != width(base.poset) + 1:
                failures.append(f"{name}: width {width(lifted)}")
            first = [lifted.index_of(f"g1:{x}") for x in base.poset.elements]
            second = [lifted.index_of(f"g2:{x}") for x in base.poset.elements]
            first_set, second_set = set(first), set(second)
            first_edges = [(u, v) for u, v in lifted.cover_edges if u in first_set and v in first_set]
            second_edges = [(u, v) for u, v in lifted.cover_edges if u in second_set and v in second_set]
            v = lifted.index_of("v")
            for seed in range(samples):
                ext = random_linear_extension(lifted, seed)
                pos = ext.position
                if max(pos[x] for x in first) > min(pos[y] for y in second):
                    failures.append(f"{name}: copies interleave for seed {seed}")
                    continue
                # (s,v) nests all of G1 or (v,t) nests all of G2
                if pos[v] > max(pos[x] for x in first):
                    side, inner_edges = "G1", first_edges
                elif pos[v] < min(pos[y] for y in second):
                    side, inner_edges = "G2", second_edges
                else:
                    failures.append(f"{name}: v sits inside both copies for seed {seed}")
                    continue
                whole = max_rainbow(ext, lifted.cover_edges)[0]
                inner = max_rainbow(ext, inner_edges)[0]
                if whole < inner + 1:
                    failures.append(f"{name}: rainbow {whole} < {side} rainbow {inner} + 1 for seed {seed}")
        observed = "; ".join(failures) if failures else f"{2 * samples} extensions consistent"
        return "lifting adds one chain and one queue", observed, not failures, False

    def check_oracle_equivalence(self) -> Outcome:
        mismatches = []
        specs = corpus(self.config["oracle_posets"], widths=(1, 2, 3, 4), max_n=9, seed=1)
        for spec in specs:
            poset, _ = random_poset(spec)
            exact = queue_number_exact(poset)
            naive = naive_queue_number(poset)
            if not exact.proven or exact.upper_bound != naive:
                mismatches.append(f"exact {exact.upper_bound} vs naive {naive} on {spec}")

        rng = random.Random(2)
        instances = self.config["rainbow_oracle_instances"]
        for _ in range(instances):
            ext, edges = _random_edge_instance(rng)
            if max_rainbow(ext, edges)[0] != max_rainbow_exhaustive(ext, edges):
                mismatches.append(f"rainbow mismatch on {edges}")
        observed = "; ".join(mismatches[:5]) if mismatches else (
            f"{self.config['oracle_posets']} posets and {instances} edge sets agree"
        )
        return "exact search and rainbow match brute force", observed, not mismatches, True

    def _stretch_options(self, constraints: Optional[PrefixConstraint] = None) -> SearchOptions:
        return SearchOptions(
            time_budget=self.config["stretch_time_budget"],
            node_budget=self.config["stretch_node_budget"],
            constraints=constraints,
            jobs=int(os.getenv("POSET_QUEUES_JOBS", "1")),
        )

    def _stretch(self, claim: str, poset: Poset, k: int, constraints: Optional[PrefixConstraint] = None) -> Outcome:
        verification = verify_lower_bound(poset, k, self._stretch_options(constraints))
        result = verification.result
        observed = (
            f"lower {result.lower_bound}, upper {result.upper_bound}, "
            f"{result.explored} nodes in {result.elapsed:.1f}s"
        )
        if verification.countermodel is not None:
            return claim, observed + ", countermodel found", False, False
        if not verification.verified:
            return claim, observed + ", budget exhausted", None, False
        return claim, observed, True, True

    def check_stretch_constrained(self) -> Outcome:
        poset = gen_counterexample(14, 6).poset
        return self._stretch("G(14,6) with c14 before b1 needs 4 queues", poset, 4, PrefixConstraint((("c14", "b1"),)))

    def check_stretch_tilde(self) -> Outcome:
        poset = gen_counterexample(31, 22, tilde=True).poset
        return self._stretch("tilde G(31,22) needs 4 queues", poset, 4)


def _describe(values: Dict[int, int]) -> str:
    return ", ".join(f"w={w}: {v}" for w, v in values.items())


def _random_edge_instance(rng: random.Random, max_edges: int = 12):
    n = rng.randint(2, 10)
    names = [f"p{i}" for i in range(n)]
    order = names[:]
    rng.shuffle(order)
    ext = LinearExtension.build(build_poset(names, []), order)
    candidates = [(a, b) for a in range(n) for b in range(n) if ext.position[a] < ext.position[b]]
    edges = rng.sample(candidates, min(len(candidates), rng.randint(0, max_edges)))
    return ext, edges


def main():
    logging.basicConfig(
        level=os.getenv("POSET_QUEUES_LOG_LEVEL", "WARNING").upper(),
        format="[%(levelname)s] %(name)s: %(message)s",
    )
    config_path = "verify_config.json"
    if not os.path.exists(config_path):
        print(f"Note: {config_path} not found, using built-in defaults.")

    print("Initializing verifier...")
    verifier = PaperVerifier.from_config_file(config_path)

    print("Running verification...")
    rows = verifier.run()

    print("\nVerification complete!")
    print(f"Ran {len(rows)} checks")
    print(f"Results have been saved to {verifier.log_file}")

    print("\nCheck Results:")
    for row in rows:
        status = {True: "PASS", False: "FAIL", None: "BUDGET"}[row["passed"]]
        print(f"--- {row['check'].replace('_', ' ').title()} ---")
        print(f"  Claim: {row['claim']}")
        print(f"  Observed: {row['observed']}")
        print(f"  Status: {status} ({row['elapsed']:.2f}s)")
    raise SystemExit(PaperVerifier.exit_code(rows))


if __name__ == "__main__":
    main()
