"""Seeded verification suites behind `verify discriminant|lattice|all`.

The elimination suite lives next to the construction it checks
(elimination.verify_parametrisation); this module covers the rest and
merges everything for `verify all`.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from Picard.binary_forms import (
    BinaryForm,
    Mat2,
    discriminant,
    discriminant_polynomial,
    equivariance_weight_check,
    gl2_action,
    random_rational,
    square_factor_form,
)
from Picard.config import Config
from Picard.elimination import build_elimination, verify_parametrisation
from Picard.errors import InvalidParams
from Picard.lattices import congruence_sublattice, lattice_quotient, random_int_matrix, snf_contract_failures
from Picard.observability import Observability
from Picard.picard_engine import (
    delta_weight_check,
    grid_cross_check,
    monotone_stability_check,
    params_from_d,
    parity_check,
    picard_group,
    relation_rank_check,
    unit_count_check,
    valid_params_grid,
)
from Picard.reports import VerificationReport
from Picard.symbolic_core import Family, weighted_degree_check

RANKS = (2, 3, 4)


def _check_trials(trials: int):
    if trials < 1:
        raise InvalidParams("trials must be at least 1")


def verify_discriminant(r: int, d: int, n: Optional[int], trials: int, seed: int) -> VerificationReport:
    _check_trials(trials)
    params = params_from_d(r, d, n or 0)
    m = params.rd
    parameters = {"r": r, "d": d}
    if n is not None:
        parameters["n"] = n
    report = VerificationReport(name="discriminant", seed=seed, trials=trials, parameters=parameters)
    rng = np.random.default_rng(seed)

    forms = [BinaryForm.random(rng, m) for _ in range(trials)]
    matrices = [Mat2.random(rng) for _ in range(trials)]
    with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as executor:
        equivariant = list(executor.map(equivariance_weight_check, forms, matrices))
    good = sum(equivariant)
    report.add("equivariance", good == trials, f"{good}/{trials} (form, matrix) pairs at degree {m}")

    lawful = 0
    for form in forms:
        a, b = Mat2.random(rng), Mat2.random(rng)
        if gl2_action(a @ b, form) == gl2_action(a, gl2_action(b, form)):
            lawful += 1
    report.add("action_law", lawful == trials, f"{lawful}/{trials} forms")

    vanishing = 0
    for _ in range(trials):
        alpha = random_rational(rng, Config.SAMPLE_HEIGHT, nonzero=True)
        beta = random_rational(rng, Config.SAMPLE_HEIGHT)
        cofactor = BinaryForm.random(rng, m - 2)
        if discriminant(square_factor_form(alpha, beta, cofactor)) == 0:
            vanishing += 1
    report.add("repeated_root", vanishing == trials, f"{vanishing}/{trials} forms with a square factor")

    if m <= Config.SYMBOLIC_DISC_MAX_DEGREE:
        homogeneous = weighted_degree_check(discriminant_polynomial(m), {Family.A: 1}, 2 * (m - 1))
        report.add("symbolic_homogeneity", homogeneous, f"degree {2 * (m - 1)} in a_0..a_{m}")
    else:
        report.add("symbolic_homogeneity", True, f"skipped, degree {m} is above {Config.SYMBOLIC_DISC_MAX_DEGREE}")

    cases = [n] if n is not None else [0, 1, 2]
    for case in cases:
        if case > m + 1:
            report.add(f"delta_weight[n={case}]", True, f"skipped, no presentation for n > {m + 1}")
            continue
        holds = delta_weight_check(params.with_points(case), trials, seed)
        report.add(f"delta_weight[n={case}]", holds, f"{trials} random points")
    Observability.log_step("verify_discriminant", parameters, {"passed": report.passed})
    return report


def _snf_suite(rng: np.random.Generator, samples: int) -> List[str]:
    failures = []
    for index in range(samples):
        rows, cols = (int(x) for x in rng.integers(1, 9, size=2))
        matrix = random_int_matrix(rng, rows, cols, 50)
        failures += [f"sample {index} ({rows}x{cols}): {msg}" for msg in snf_contract_failures(matrix)]
    return failures


def _congruence_examples() -> List[str]:
    failures = []
    diagonal = congruence_sublattice(2, [((1, 1), 3)])
    if diagonal.index() != 3 or not diagonal.contains((1, 2)) or diagonal.contains((1, 1)):
        failures.append("{(i,j): 3 | i+j} should have index 3 and contain (1,2) but not (1,1)")
    multiples = congruence_sublattice(1, [((1,), 3)])
    if multiples.index() != 3 or str(lattice_quotient(multiples, [(60,)])) != "Z/20":
        failures.append("3Z modulo 60 should be Z/20")
    return failures


def verify_lattice(
    trials: int,
    seed: int,
    r: Optional[int] = None,
    d: Optional[int] = None,
    n: Optional[int] = None,
) -> VerificationReport:
    _check_trials(trials)
    parameters = {key: value for key, value in (("r", r), ("d", d), ("n", n)) if value is not None}
    report = VerificationReport(name="lattice", seed=seed, trials=trials, parameters=parameters)
    rng = np.random.default_rng(seed)
    ranks: Sequence[int] = (r,) if r is not None else RANKS

    failures = _snf_suite(rng, Config.SNF_SAMPLES)
    report.add("snf_contract", not failures, "; ".join(failures[:3]) or f"{Config.SNF_SAMPLES} random matrices")

    failures = _congruence_examples()
    report.add("congruence_sublattices", not failures, "; ".join(failures) or "index and membership examples")

    grid = grid_cross_check(ranks)
    if d is not None:
        grid = grid[grid["d"] == d]
    if n is not None:
        grid = grid[grid["n"] == n]
    disagreements = grid[~grid["agree"]]
    report.add(
        "far_cross_check",
        disagreements.empty,
        f"{len(grid)} cases" if disagreements.empty else disagreements.to_string(index=False),
    )

    point_counts = [n] if n is not None and n >= 3 else list(range(3, Config.GRID_MAX_N + 1))
    bad = [(rank, count) for rank in ranks for count in point_counts if not relation_rank_check(rank, count)]
    report.add("relation_rank", not bad, f"failing (r, n): {bad}" if bad else f"r in {list(ranks)}, n in {point_counts}")

    bad_counts = [count for count in point_counts if not unit_count_check(count, ranks)]
    report.add("unit_count", not bad_counts, f"failing n: {bad_counts}" if bad_counts else "n(n-3)/2 = C(n,2) - n")

    unstable = [
        (rank, count)
        for rank in ranks
        for count in point_counts
        if count < Config.GRID_MAX_N and not monotone_stability_check(rank, count, count + 1)
    ]
    report.add("monotone_stability", not unstable, f"failing (r, n): {unstable}" if unstable else "n -> n+1 embeddings")

    cases = [
        base.with_points(count)
        for base in valid_params_grid(ranks)
        if d is None or base.d == d
        for count in ([n] if n is not None else range(0, Config.GRID_MAX_N + 1))
    ]
    with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as executor:
        parities = list(executor.map(parity_check, cases))
    wrong = [f"(r={c.r}, g={c.g}, n={c.n})" for c, ok in zip(cases, parities) if not ok]
    report.add("parity", not wrong, ", ".join(wrong[:5]) or f"{len(cases)} cases")

    hyperelliptic = [c for c in cases if c.r == 2]
    off = []
    for case in hyperelliptic:
        expected = 8 * case.g + 4 if case.g % 2 or case.n >= 3 else 4 * case.g + 2
        if picard_group(case).group.torsion_order != expected:
            off.append(case)
    report.add(
        "hyperelliptic",
        not off,
        ", ".join(f"(g={c.g}, n={c.n})" for c in off[:5]) or f"{len(hyperelliptic)} cases with r = 2",
    )
    Observability.log_step("verify_lattice", parameters, {"passed": report.passed})
    return report


def verify_elimination(r: int, d: int, n: int, trials: int, seed: int) -> VerificationReport:
    return verify_parametrisation(build_elimination(r, d, n), trials, seed)


def verify_all(r: int, d: int, n: Optional[int], trials: int, seed: int) -> VerificationReport:
    parameters = {"r": r, "d": d}
    if n is not None:
        parameters["n"] = n
    report = VerificationReport(name="all", seed=seed, trials=trials, parameters=parameters)
    rd = params_from_d(r, d, 0).rd
    for count in ([n] if n is not None else range(3, rd + 2)):
        if 3 <= count <= rd + 1:
            report.extend(verify_elimination(r, d, count, trials, seed), prefix=f"elimination[n={count}].")
    report.extend(verify_discriminant(r, d, n, trials, seed), prefix="discriminant.")
    report.extend(verify_lattice(trials, seed, r=r, d=d, n=n), prefix="lattice.")
    return report
