"""Suite selection and execution."""

from __future__ import annotations

import fnmatch
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .cases import VerificationReport
from .checks import REGISTRY, VERIFY_GRID, Pool, Statement, run_case
from .corpus import corpus_densities, gen_bodies
from .engine import Engine

# statement ids grouped by the part of the theory they exercise
SUITES = {
    "identities": ("Ident.*", "Prop4.1-*", "Prop4.2-*", "Prop4.3-*"),
    "functionals": ("Lemma2.*", "Ineq.*", "Probe.*"),
    "duality": ("Prop3.1", "Prop3.2", "Prop3.5"),
    "comparison": ("Thm3.*", "Cor3.*"),
    "extremal": ("Thm4.*", "Prop4.*", "Ident.tau-reflection"),
    "blaschke": ("Thm5.1", "Cor5.2", "Thm5.3", "Cor5.4", "Ident.blaschke-proj"),
    "monotone": ("Thm5.5*", "Cor5.6*"),
}

# statements of the theory that must be covered by the registry
THEORY_IDS = ("Lemma2.1", "Lemma2.3", "Lemma2.4", "Lemma2.5", "Ineq.Minkowski",
              "Prop3.1", "Prop3.2", "Thm3.3", "Cor3.4", "Prop3.5", "Thm3.6", "Cor3.7",
              "Prop4.1", "Prop4.2", "Prop4.3", "Thm4.4", "Thm4.5", "Thm4.6", "Thm4.7",
              "Thm5.1", "Cor5.2", "Thm5.3", "Cor5.4", "Thm5.5", "Cor5.6")


class UnknownSuiteError(KeyError):
    pass


@dataclass
class SuiteConfig:
    seed: int = 7
    suites: tuple[str, ...] = ("all",)
    dims: tuple[int, ...] = (2, 3)
    grid: dict = field(default_factory=lambda: dict(VERIFY_GRID))
    corpus_size: int = 40
    cases: dict = field(default_factory=lambda: {2: 8, 3: 2})
    tol: float | None = None
    threads: int = 1

    def to_json(self) -> dict:
        d = asdict(self)
        d["suites"] = list(self.suites)
        d["dims"] = list(self.dims)
        d["grid"] = {str(k): v for k, v in self.grid.items()}
        d["cases"] = {str(k): v for k, v in self.cases.items()}
        return d


def select(patterns) -> list[Statement]:
    """Statements matched by suite names or glob patterns over statement ids."""
    chosen = set()
    for pat in patterns:
        if pat in ("all", "*"):
            chosen.update(REGISTRY)
            continue
        globs = SUITES.get(pat, (pat,))
        hit = False
        for g in globs:
            for sid in REGISTRY:
                if fnmatch.fnmatchcase(sid, g):
                    chosen.add(sid)
                    hit = True
        if not hit:
            raise UnknownSuiteError(f"no statement matches suite {pat!r}")
    return [REGISTRY[s] for s in REGISTRY if s in chosen]


def _rng(seed: int, dim: int, sid: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, dim, zlib.crc32(sid.encode())]))


def build_cases(config: SuiteConfig, statements) -> list[tuple]:
    jobs = []
    for dim in config.dims:
        pool = Pool(dim, tuple(gen_bodies(config.seed, dim, config.corpus_size)),
                    tuple(corpus_densities(dim)))
        n = int(config.cases.get(dim, config.cases.get(str(dim), 0)))
        for stmt in statements:
            rng = _rng(config.seed, dim, stmt.sid)
            for k in range(n):
                jobs.append((stmt, stmt.build(rng, pool), dim, f"{stmt.sid}#{dim}d-{k:02d}"))
    return jobs


def run_suite(config: SuiteConfig) -> VerificationReport:
    t0 = time.perf_counter()
    statements = select(config.suites)
    jobs = build_cases(config, statements)
    engines = {dim: Engine(dim) for dim in config.dims}

    def run(job):
        stmt, params, dim, cid = job
        return run_case(stmt, params, engines[dim], int(config.grid.get(dim, config.grid.get(str(dim)))),
                        cid, config.tol)

    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as ex:
            cases = list(ex.map(run, jobs))
    else:
        cases = [run(j) for j in jobs]
    cases.sort(key=lambda c: c.case_id)
    grid = {str(d): {"resolution": int(config.grid.get(d, config.grid.get(str(d)))),
                     "size": engines[d].grid(int(config.grid.get(d, config.grid.get(str(d))))).size}
            for d in config.dims}
    return VerificationReport(",".join(config.suites), config.seed, grid, cases,
                              time.perf_counter() - t0, config.to_json())
