"""Checks of the closed-form Max4PC results against independent computation.

Each checker compares a formula with a quantity obtained some other way
(exact elimination, a second exact method, or a direct construction) and
returns a TheoremCheck. Failures are recorded as data with a witness that
replays through ``verify_tree(prufer_decode(witness.prufer))``.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import cached_property
from math import comb, isclose, sqrt
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .basis import enumerate_family, leaf_anchor_triples, star_family
from .errors import TooSmall
from .linalg import (bareiss_det, char_poly, descartes_inertia, exact_rank,
                     float_eigenvalues, float_inertia, smith_normal_form,
                     symmetric_inertia)
from .models import (BasisSet, CharPoly, CheckId, CheckTally, CorpusSpec,
                     Inertia, SampleSpec, SnfObservation, TheoremCheck,
                     VerifyReport, Witness)
from .pairs import MatrixKind, build_matrix, row_of, submatrix
from .tree import (Tree, all_prufer_sequences, four_point_violations,
                   leaf_profile, prufer_decode, prufer_encode,
                   random_prufer_sequences, star)

logger = logging.getLogger(__name__)

ALL_CHECKS: tuple[CheckId, ...] = tuple(CheckId)

# dimension up to which the floating eigensolver cross-check runs
FLOAT_ORACLE_LIMIT = 66
# largest n whose n^4 quadruples are all checked for the four-point condition
FPC_EXHAUSTIVE_LIMIT = 31
FPC_SAMPLE = 200_000
# star eigenvalues are compared with eigvalsh up to this dimension (n = 50)
STAR_FLOAT_LIMIT = 1225
RANDOM_RUNS = 4
WITNESS_CAP = 50


def formula_rank(n: int, p: int) -> int:
    return 2 * (n - p)


def formula_det(n: int, p: int) -> int:
    return (-1) ** (n - p) * 2 ** (2 * (n - p - 1))


def formula_snf(n: int, p: int) -> list[int]:
    """Invariant factors with zeros first: zeros, 1, 1, then twos."""
    return [0] * (comb(n, 2) - 2 * (n - p)) + [1, 1] + [2] * (2 * (n - p - 1))


def formula_inertia(n: int, p: int) -> Inertia:
    return Inertia(n_zero=comb(n, 2) - 2 * (n - p), n_plus=n - p, n_minus=n - p)


def star_char_poly(n: int) -> CharPoly:
    """x^(C(n,2)-2) (x^2 - 2(n-1)^2 x - (n-1) C(n-1,2))"""
    quadratic = [1, -2 * (n - 1) ** 2, -(n - 1) * comb(n - 1, 2)]
    return CharPoly(coefficients=quadratic + [0] * (comb(n, 2) - 2))


def star_eigenvalues(n: int) -> tuple[float, float]:
    m = n - 1
    root = sqrt(m ** 4 + m * comb(m, 2))
    return (m ** 2 - root, m ** 2 + root)


class TreeVerifier:
    """Lazily builds the matrices and basis family of one tree and checks them."""

    def __init__(self, t: Tree, seed: int = 0):
        self.t = t
        self.seed = seed
        self.n = t.n
        self.profile = leaf_profile(t)
        self.p = self.profile.p
        self.prufer = prufer_encode(t) if t.n >= 2 else []

    @cached_property
    def max4pc(self):
        return build_matrix(self.t, MatrixKind.MAX4PC)

    @cached_property
    def family(self) -> list[BasisSet]:
        return enumerate_family(self.t, max_runs=self.p + RANDOM_RUNS, seed=self.seed)

    def _check(self, check_id: CheckId, expected: Any, computed: Any,
               failure: Witness | None) -> TheoremCheck:
        return TheoremCheck(
            id=check_id,
            status="fail" if failure else "pass",
            expected=expected,
            computed=computed,
            witness=failure,
        )

    def _witness(self, indices: Sequence = (), expected: Any = None,
                 computed: Any = None, detail: str = "") -> Witness:
        return Witness(n=self.n, prufer=list(self.prufer), indices=list(indices),
                       expected=expected, computed=computed, detail=detail)

    def _over_family(self, check_id: CheckId, expected: Any,
                     compute: Callable[[BasisSet], Any]) -> TheoremCheck:
        values = []
        failure = None
        for basis in self.family:
            value = compute(basis)
            values.append(value)
            if failure is None and value != expected:
                failure = self._witness([list(p) for p in basis.pairs], expected, value,
                                        f"start leaf {basis.start_leaf}, policy {basis.policy.mode}")
        return self._check(check_id, expected, sorted(set(values)), failure)

    # -- rank, SNF, inertia -------------------------------------------------

    def check_rank(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        expected = formula_rank(self.n, self.p)
        computed = exact_rank(self.max4pc.entries)
        failure = None if computed == expected else self._witness([], expected, computed)
        return self._check(CheckId.T1_RANK, expected, computed, failure)

    def check_snf(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        expected = formula_snf(self.n, self.p)
        snf = smith_normal_form(self.max4pc.entries)
        computed = snf.zeros_first()
        failure = None
        if computed != expected:
            failure = self._witness([], expected, computed, "invariant factors differ")
        elif snf.rank != exact_rank(self.max4pc.entries):
            failure = self._witness([], snf.rank, exact_rank(self.max4pc.entries),
                                    "nonzero factor count differs from exact rank")
        return self._check(CheckId.T3_SNF, expected, computed, failure)

    def check_inertia(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        expected = formula_inertia(self.n, self.p)
        computed = symmetric_inertia(self.max4pc.entries)
        failure = None
        if computed != expected:
            failure = self._witness([], expected.as_tuple(), computed.as_tuple(), "congruence")
        basis_expected = Inertia(n_zero=0, n_plus=self.n - self.p, n_minus=self.n - self.p)
        for basis in self.family if failure is None else ():
            block = submatrix(self.max4pc, basis.pairs, basis.pairs)
            by_descartes = descartes_inertia(char_poly(block))
            by_congruence = symmetric_inertia(block)
            for method, value in (("descartes", by_descartes), ("congruence", by_congruence)):
                if value != basis_expected:
                    failure = self._witness([list(p) for p in basis.pairs],
                                            basis_expected.as_tuple(), value.as_tuple(),
                                            f"Max4PC[B,B] by {method}")
                    break
            if failure:
                break
        if failure is None and self.max4pc.size <= FLOAT_ORACLE_LIMIT:
            by_float = float_inertia(self.max4pc.entries)
            if by_float != computed:
                failure = self._witness([], computed.as_tuple(), by_float.as_tuple(),
                                        "floating eigensolver disagrees with exact inertia")
        return self._check(CheckId.T5_INERTIA, expected.as_tuple(), computed.as_tuple(), failure)

    # -- basis family -------------------------------------------------------

    def check_basis_det(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        return self._over_family(
            CheckId.T4D_DET, formula_det(self.n, self.p),
            lambda b: bareiss_det(submatrix(self.max4pc, b.pairs, b.pairs)))

    def check_basis_size(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        return self._over_family(
            CheckId.T4B_SIZE, formula_rank(self.n, self.p),
            lambda b: len(b.pairs) if len(set(b.pairs)) == len(b.pairs) else -1)

    def check_basis_span(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        return self._over_family(
            CheckId.T4C_SPAN, formula_rank(self.n, self.p),
            lambda b: exact_rank(submatrix(self.max4pc, b.pairs, None)))

    def check_unique_anchor(self) -> TheoremCheck | None:
        if self.n < 3 or self.t.is_star:
            return None
        return self._over_family(
            CheckId.T4A_UNIQUE, 1, lambda b: len(leaf_anchor_triples(self.t, b)))

    # -- row identities -----------------------------------------------------

    def check_pendant_rows(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        compared = 0
        for leaf in self.profile.pendants:
            q = self.t.neighbors(leaf)[0]
            for u in self.t.vertices:
                if u in (leaf, q):
                    continue
                compared += 1
                diff = row_of(self.max4pc, (u, leaf)) - row_of(self.max4pc, (u, q))
                if not np.all(diff == 1):
                    bad = int(np.argmax(diff != 1))
                    failure = self._witness([[u, leaf], [u, q], list(self.max4pc.index.pair_at(bad))],
                                            1, int(diff[bad]), "row({u,l}) - row({u,q})")
                    return self._check(CheckId.L1_PENDANT_ROW, 1, int(diff[bad]), failure)
        return self._check(CheckId.L1_PENDANT_ROW, 1, f"{compared} row pairs", None)

    def check_component_split(self) -> TheoremCheck | None:
        if self.n < 3:
            return None
        pairs = np.array(self.max4pc.index.pairs)
        compared = 0
        for leaf in self.profile.pendants:
            q = self.t.neighbors(leaf)[0]
            for u in self.t.neighbors(q):
                if u == leaf:
                    continue
                compared += 1
                component = np.array(sorted(self.t.component_without(u, q)))
                inside = np.isin(pairs, component).all(axis=1)
                expected = row_of(self.max4pc, (u, q)) + 2 * inside
                actual = row_of(self.max4pc, (leaf, q))
                if not np.array_equal(expected, actual):
                    bad = int(np.argmax(expected != actual))
                    failure = self._witness(
                        [[leaf, q], [u, q], list(self.max4pc.index.pair_at(bad))],
                        int(expected[bad]), int(actual[bad]), "component split")
                    return self._check(CheckId.L2_COMPONENT_SPLIT, int(expected[bad]),
                                       int(actual[bad]), failure)
        return self._check(CheckId.L2_COMPONENT_SPLIT, "row identity", f"{compared} row pairs", None)

    def check_sibling_leaf(self) -> TheoremCheck | None:
        if self.n <= 3:
            return None
        siblings = [leaf for leaf in self.profile.pendants
                    if sum(1 for w in self.t.neighbors(self.t.neighbors(leaf)[0])
                           if self.t.degree(w) == 1) >= 2]
        if not siblings:
            return None
        full = exact_rank(self.max4pc.entries)
        for leaf in siblings:
            reduced = exact_rank(build_matrix(self.t.remove_leaf(leaf), MatrixKind.MAX4PC).entries)
            if reduced != full:
                failure = self._witness([leaf], full, reduced, f"rank after removing leaf {leaf}")
                return self._check(CheckId.C1_SIBLING_LEAF, full, reduced, failure)
        return self._check(CheckId.C1_SIBLING_LEAF, full, full, None)

    # -- stars --------------------------------------------------------------

    def check_star_det(self) -> TheoremCheck | None:
        if not self.t.is_star:
            return None
        values = []
        for basis in star_family(self.t):
            det = bareiss_det(submatrix(self.max4pc, basis.pairs, basis.pairs))
            values.append(det)
            if det != -1:
                failure = self._witness([list(p) for p in basis.pairs], -1, det)
                return self._check(CheckId.STAR_DET, -1, det, failure)
        return self._check(CheckId.STAR_DET, -1, sorted(set(values)), None)

    def check_star_eigen(self) -> TheoremCheck | None:
        if not self.t.is_star:
            return None
        expected = star_char_poly(self.n)
        computed = char_poly(self.max4pc.entries)
        failure = None
        if computed != expected:
            failure = self._witness([], str(expected), str(computed), "characteristic polynomial")
        elif self.max4pc.size <= STAR_FLOAT_LIMIT:
            eigs = float_eigenvalues(self.max4pc.entries)
            low, high = float(eigs[0]), float(eigs[-1])
            want_low, want_high = star_eigenvalues(self.n)
            if not (isclose(low, want_low, rel_tol=1e-9) and isclose(high, want_high, rel_tol=1e-9)):
                failure = self._witness([], [want_low, want_high], [low, high],
                                        "floating eigenvalues differ from the closed form")
        return self._check(CheckId.STAR_EIGEN, str(expected), str(computed), failure)

    # -- distances ----------------------------------------------------------

    def check_four_point(self) -> TheoremCheck | None:
        if self.n < 2:
            return None
        sample = None if self.n <= FPC_EXHAUSTIVE_LIMIT else FPC_SAMPLE
        bad = four_point_violations(self.t.distances, sample=sample, seed=self.seed)
        failure = None
        if len(bad):
            failure = self._witness(bad[0].tolist(), 0, len(bad), "largest 4PC sum is unique")
        return self._check(CheckId.FPC_MAX2, 0, len(bad), failure)

    def check_parity(self) -> TheoremCheck | None:
        if self.n < 2:
            return None
        high = self.max4pc.entries
        low = build_matrix(self.t, MatrixKind.MIN4PC).entries
        steiner = build_matrix(self.t, MatrixKind.STEINER2).entries
        mismatch = np.argwhere((high + low != 2 * steiner) | ((high - low) % 2 != 0))
        failure = None
        if len(mismatch):
            r, c = (int(v) for v in mismatch[0])
            index = self.max4pc.index
            failure = self._witness(
                [list(index.pair_at(r)), list(index.pair_at(c))],
                2 * int(steiner[r, c]), int(high[r, c] + low[r, c]), "Max4PC + Min4PC vs 2 Steiner2")
        return self._check(CheckId.PARITY_STEINER, 0, len(mismatch), failure)

    def run(self, checks: Iterable[CheckId] | None = None) -> list[TheoremCheck]:
        wanted = set(ALL_CHECKS if checks is None else (CheckId(c) for c in checks))
        results = []
        for check_id, method in self._dispatch():
            if check_id not in wanted:
                continue
            started = time.perf_counter()
            result = method()
            if result is None:
                continue
            result.elapsed_ms = (time.perf_counter() - started) * 1000.0
            if not result.passed:
                logger.info(f"{check_id.value} failed for prufer={self.prufer}: {result.witness}")
            results.append(result)
        return results

    def _dispatch(self):
        return (
            (CheckId.T1_RANK, self.check_rank),
            (CheckId.T4D_DET, self.check_basis_det),
            (CheckId.T3_SNF, self.check_snf),
            (CheckId.T4A_UNIQUE, self.check_unique_anchor),
            (CheckId.T4B_SIZE, self.check_basis_size),
            (CheckId.T4C_SPAN, self.check_basis_span),
            (CheckId.T5_INERTIA, self.check_inertia),
            (CheckId.L1_PENDANT_ROW, self.check_pendant_rows),
            (CheckId.L2_COMPONENT_SPLIT, self.check_component_split),
            (CheckId.C1_SIBLING_LEAF, self.check_sibling_leaf),
            (CheckId.STAR_DET, self.check_star_det),
            (CheckId.STAR_EIGEN, self.check_star_eigen),
            (CheckId.FPC_MAX2, self.check_four_point),
            (CheckId.PARITY_STEINER, self.check_parity),
        )


def verify_tree(t: Tree, checks: Iterable[CheckId | str] | None = None,
                seed: int = 0) -> list[TheoremCheck]:
    return TreeVerifier(t, seed=seed).run(checks)


def verify_star_eigen(n: int) -> TheoremCheck:
    if n < 3:
        raise TooSmall(f"star eigenvalue check needs n >= 3, got {n}")
    return TreeVerifier(star(n)).check_star_eigen()


def _verify_prufer(task: tuple[tuple[int, ...], tuple[str, ...] | None, int]) -> list[TheoremCheck]:
    seq, checks, seed = task
    return verify_tree(prufer_decode(list(seq)), checks, seed)


def sweep(max_exhaustive_n: int, sample_spec: Sequence[SampleSpec | tuple[int, int, int]],
          checks: Iterable[CheckId | str] | None = None, jobs: int = 1,
          seed: int = 0) -> VerifyReport:
    samples = [s if isinstance(s, SampleSpec) else SampleSpec(n=s[0], count=s[1], seed=s[2])
               for s in sample_spec]
    corpus = CorpusSpec(max_exhaustive_n=max_exhaustive_n, samples=samples)

    corpus_seqs: list[tuple[int, ...]] = []
    for n in range(3, max_exhaustive_n + 1):
        corpus_seqs.extend(all_prufer_sequences(n))
    for s in samples:
        corpus_seqs.extend(tuple(seq) for seq in random_prufer_sequences(s.n, s.count, s.seed))
    corpus_seqs.sort(key=lambda seq: (len(seq), seq))

    check_names = None if checks is None else tuple(CheckId(c).value for c in checks)
    tasks = [(seq, check_names, seed) for seq in corpus_seqs]
    logger.info(f"sweep over {len(tasks)} trees with {jobs} worker(s)")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_verify_prufer, tasks, chunksize=32))
    else:
        results = [_verify_prufer(task) for task in tasks]

    tallies = {check_id: CheckTally(id=check_id) for check_id in ALL_CHECKS}
    timing = {check_id.value: 0.0 for check_id in ALL_CHECKS}
    base_case = []
    for seq, tree_checks in zip(corpus_seqs, results):
        for check in tree_checks:
            tally = tallies[check.id]
            timing[check.id.value] += check.elapsed_ms
            if check.passed:
                tally.passed += 1
            else:
                tally.failed += 1
                if len(tally.witnesses) < WITNESS_CAP:
                    tally.witnesses.append(check.witness)
            if check.id is CheckId.T3_SNF and len(seq) == 1:
                base_case.append(SnfObservation(n=3, prufer=list(seq),
                                                formula=check.expected, computed=check.computed))

    report = VerifyReport(
        corpus=corpus,
        trees_checked=len(corpus_seqs),
        checks=[t for t in tallies.values() if t.passed or t.failed],
        failures=sum(t.failed for t in tallies.values()),
        snf_base_case=base_case,
        timing_ms={k: round(v, 3) for k, v in timing.items() if v},
    )
    logger.info(f"sweep finished: {report.trees_checked} trees, {report.failures} failures")
    return report
