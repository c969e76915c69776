"""Run configuration, the four run modes, and deterministic output.

Configs are flat ``key=value`` files.  Every run mode returns a table
(metadata dict plus ordered rows) so the CLI and the HTTP service share
one code path.  Output is byte-deterministic: floats are printed with 17
significant digits, CSV uses LF line endings, JSON keys are sorted and
no timestamps are recorded.
"""

import dataclasses
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import (
    CartesianOracle3D,
    LadderConvention,
    ModelParams,
    build_angular_momentum,
    build_full_hamiltonian,
    build_invariant,
    commutator_norm,
    hermiticity_defect,
    interior_mask,
)
from .dynamics import (
    entanglement_trajectory,
    evolve,
    prepare_initial,
    purity_entropy,
    reduce_isospin,
    state_to_vector,
)
from .sectors import (
    block_1d,
    block_2d,
    block_3d,
    block_singlet,
    block_triplet,
    sector_spectra_1d,
    singlet_energy,
)
from .spectra import (
    DegenerateRadicalError,
    cubic_triplet_eigenvalues,
    eigenvalues_alpha0,
    eigenvalues_gauge,
    eigenvalues_massless,
    jacobi_eigensolver,
)

MODES = ("spectrum", "evolve", "sweep", "verify")
FORMATS = ("csv", "json")

_SMALL = 1e-12


@dataclass
class RunConfig:
    """Everything a run needs, overridable from file and command line."""

    mode: str = "spectrum"
    dimension: int = 1
    m: float = 3.2
    A: float = 0.0
    B: float = 1.0
    alpha: float = 1.2
    gamma: float = 0.0
    scale: float = 1.0
    n: int = 0
    j: str = "1/2"
    theta: float = math.pi / 4.0
    t_min: float = 0.0
    t_max: float = 30.0
    t_steps: int = 121
    gamma_min: float = 0.0
    gamma_max: float = 6.4
    gamma_steps: int = 65
    n_range: str = "0:10"
    n_max_truncation: int = 40
    output_path: str = ""
    format: str = "csv"
    seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.t_steps < 1 or self.gamma_steps < 1:
            raise ValueError("step counts must be at least 1")
        if self.t_max < self.t_min:
            raise ValueError("t_max must not be below t_min")
        if self.gamma_max < self.gamma_min:
            raise ValueError("gamma_max must not be below gamma_min")
        if self.n_max_truncation < 4:
            raise ValueError("n_max_truncation must be at least 4")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        parse_n_range(self.n_range)
        parse_half_integer(self.j)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def parse_half_integer(text: str) -> Fraction:
    """Read "1/2", "3/2", ... into an exact half-integer."""
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad half-integer {text!r}: {exc}") from None
    if frac.denominator != 2 or frac <= 0:
        raise ValueError(f"j must be a positive half-integer like 1/2 or 3/2, got {text!r}")
    return frac


def parse_n_range(text: str) -> list:
    """Sector list: "a:b" inclusive, a single value, or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            lo_s, hi_s = text.split(":", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ValueError("upper bound below lower bound")
            return list(range(lo, hi + 1))
        if "," in text:
            return [int(piece) for piece in text.split(",")]
        return [int(text)]
    except ValueError as exc:
        raise ValueError(f"bad n_range {text!r}: {exc}") from None


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    raw = raw.strip()
    if kind in (int, "int"):
        return int(raw)
    if kind in (float, "float"):
        return float(raw)
    return raw


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Flat key=value lines into a field dict; blank lines and # comments ok."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"{source}:{lineno}: unknown field {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: field {key!r}: {exc}") from None
    return values


def load_config(path: str, overrides: dict = None) -> RunConfig:
    with open(path, "r") as handle:
        text = handle.read()
    values = parse_config_text(text, source=path)
    if overrides:
        values.update(overrides)
    config = RunConfig(**values)
    config.validate()
    return config


def serialize_config(config: RunConfig) -> str:
    """Inverse of parse_config_text up to formatting; round-trips exactly."""
    lines = []
    for field in dataclasses.fields(RunConfig):
        value = getattr(config, field.name)
        if isinstance(value, float):
            rendered = format_float(value)
        else:
            rendered = str(value)
        lines.append(f"{field.name}={rendered}")
    return "\n".join(lines) + "\n"


def params_from_config(config: RunConfig) -> ModelParams:
    return ModelParams(
        dimension=config.dimension,
        m=config.m,
        A=config.A,
        B=config.B,
        alpha=config.alpha,
        gamma=config.gamma,
        convention=LadderConvention(scale=config.scale),
    )


def _params_metadata(config: RunConfig) -> dict:
    return {
        "dimension": config.dimension,
        "m": config.m,
        "A": config.A,
        "B": config.B,
        "alpha": config.alpha,
        "gamma": config.gamma,
        "scale": config.scale,
        "seed": config.seed,
    }


# ---------------------------------------------------------------------------
# spectrum mode


def _closed_form_case(params: ModelParams) -> str:
    """Which closed-form family, if any, covers these couplings."""
    if abs(params.alpha) < _SMALL:
        return "alpha0"
    if (abs(params.m) < _SMALL and abs(params.gamma) < _SMALL
            and abs(params.A * params.B) < _SMALL):
        return "massless"
    if abs(params.A) < _SMALL and abs(params.B - 1.0) < _SMALL:
        return "gauge"
    return "none"


def _closed_generic(params: ModelParams, n: int, case: str):
    """(values sorted ascending, branch labels) or (None, None)."""
    if case == "alpha0":
        sys = eigenvalues_alpha0(n, params)
    elif case == "massless":
        sys = eigenvalues_massless(n, params)
    elif case == "gauge":
        try:
            sys = eigenvalues_gauge(n, params)
        except DegenerateRadicalError:
            return None, None
    else:
        return None, None
    labels = [f"E{b}" for b in sys.branch_map] if sys.branch_map else None
    return sys.values, labels


def run_spectrum(config: RunConfig) -> dict:
    """Sector-by-sector table: closed form beside the numeric route."""
    params = params_from_config(config)
    sector_ids = parse_n_range(config.n_range)
    case = _closed_form_case(params)
    columns = ["sector", "branch", "E_closed", "E_numeric", "abs_dev"]
    rows = []

    def emit(sector: str, closed, closed_labels, numeric):
        for k, e_num in enumerate(numeric):
            e_closed = None if closed is None else float(closed[k])
            label = closed_labels[k] if closed_labels else f"E{k + 1}"
            dev = None if e_closed is None else abs(e_closed - float(e_num))
            rows.append({
                "sector": sector,
                "branch": label,
                "E_closed": e_closed,
                "E_numeric": float(e_num),
                "abs_dev": dev,
            })

    if config.dimension == 1:
        sing = block_singlet(params)
        emit("singlet", [singlet_energy(params)], ["S1"],
             jacobi_eigensolver(sing.entries).values)
        trip = block_triplet(params)
        emit("triplet", cubic_triplet_eigenvalues(params), ["T1", "T2", "T3"],
             jacobi_eigensolver(trip.entries).values)
        for n in sector_ids:
            blk = block_1d(n, params)
            numeric = jacobi_eigensolver(blk.entries).values
            closed, labels = _closed_generic(params, n, case)
            emit(f"n={n}", closed, labels, numeric)
    elif config.dimension == 2:
        emit("singlet", [singlet_energy(params)], ["S1"],
             jacobi_eigensolver(block_singlet(params).entries).values)
        for n in sector_ids:
            blk = block_2d(n, params)
            numeric = jacobi_eigensolver(blk.entries).values
            closed, labels = _closed_generic(params, n, case)
            emit(f"nR={n}", closed, labels, numeric)
    else:
        j = parse_half_integer(config.j)
        for n in sector_ids:
            if n < 1:
                raise ValueError("dimension-3 sectors need n >= 1")
            blk = block_3d(n, j, params)
            numeric = jacobi_eigensolver(blk.entries).values
            emit(f"n={n},j={j}", None, None, numeric)

    metadata = _params_metadata(config)
    metadata.update({
        "mode": "spectrum",
        "closed_form_case": case,
        "n_range": config.n_range,
        "branch_note": "E1..E4 follow the closed-form branch order when a "
                       "closed form applies, otherwise ascending order",
    })
    if config.dimension == 3:
        metadata["j"] = config.j
    return {"metadata": metadata, "columns": columns, "rows": rows}


# ---------------------------------------------------------------------------
# evolve and sweep modes


def _time_grid(config: RunConfig) -> np.ndarray:
    return np.linspace(config.t_min, config.t_max, config.t_steps)


def run_evolve(config: RunConfig) -> dict:
    params = params_from_config(config)
    times = _time_grid(config)
    points = entanglement_trajectory(config.n, config.theta, params, times)
    rows = [{"t": p.t, "purity": p.purity, "entropy": p.entropy} for p in points]
    metadata = _params_metadata(config)
    metadata.update({
        "mode": "evolve",
        "n": config.n,
        "theta": config.theta,
        "t_min": config.t_min,
        "t_max": config.t_max,
        "t_steps": config.t_steps,
        "entropy_log": "natural",
    })
    return {"metadata": metadata, "columns": ["t", "purity", "entropy"], "rows": rows}


@dataclass
class SweepResult:
    """Entanglement grid over (gamma, t), gamma-major ordering."""

    metadata: dict
    points: list

    @property
    def columns(self) -> list:
        return ["gamma", "t", "purity", "entropy"]

    def rows(self) -> list:
        return [{"gamma": p.gamma, "t": p.t, "purity": p.purity,
                 "entropy": p.entropy} for p in self.points]

    def mean_entropy_by_gamma(self) -> "tuple[np.ndarray, np.ndarray]":
        gammas = np.array(sorted({p.gamma for p in self.points}))
        sums = {g: [] for g in gammas}
        for p in self.points:
            sums[p.gamma].append(p.entropy)
        means = np.array([np.mean(sums[g]) for g in gammas])
        return gammas, means


def run_sweep(config: RunConfig) -> SweepResult:
    """Trajectory per gamma; worker pool results gathered in grid order."""
    base = params_from_config(config)
    times = _time_grid(config)
    gammas = np.linspace(config.gamma_min, config.gamma_max, config.gamma_steps)

    def one(gamma: float):
        params = dataclasses.replace(base, gamma=float(gamma))
        return entanglement_trajectory(config.n, config.theta, params, times)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            per_gamma = list(pool.map(one, gammas))
    else:
        per_gamma = [one(g) for g in gammas]

    points = [p for traj in per_gamma for p in traj]
    metadata = _params_metadata(config)
    metadata.update({
        "mode": "sweep",
        "n": config.n,
        "theta": config.theta,
        "t_min": config.t_min,
        "t_max": config.t_max,
        "t_steps": config.t_steps,
        "gamma_min": config.gamma_min,
        "gamma_max": config.gamma_max,
        "gamma_steps": config.gamma_steps,
        "ordering": "gamma-major, t-minor",
        "entropy_log": "natural",
    })
    del metadata["gamma"]
    return SweepResult(metadata=metadata, points=points)


# ---------------------------------------------------------------------------
# verify mode


def _verify_closed_forms(rng: np.random.Generator, draws: int):
    """Max deviation of each closed-form family against the Jacobi route."""
    conv = LadderConvention()
    worst = {"gauge": 0.0, "alpha0": 0.0, "massless": 0.0, "triplet": 0.0}
    skipped = 0
    for _ in range(draws):
        n = int(rng.integers(0, 51))
        m = float(rng.uniform(0.0, 5.0))
        alpha = float(rng.uniform(0.05, 3.0))
        gamma = float(rng.uniform(0.0, 5.0))
        a_c = float(rng.uniform(-2.0, 2.0))
        b_c = float(rng.uniform(-2.0, 2.0))

        p_gauge = ModelParams(1, m, 0.0, 1.0, alpha, gamma, conv)
        try:
            closed = eigenvalues_gauge(n, p_gauge).values
            numeric = jacobi_eigensolver(block_1d(n, p_gauge).entries).values
            worst["gauge"] = max(worst["gauge"], float(np.max(np.abs(closed - numeric))))
        except DegenerateRadicalError:
            skipped += 1

        p_a0 = ModelParams(1, m, a_c, b_c, 0.0, gamma, conv)
        closed = eigenvalues_alpha0(n, p_a0).values
        numeric = jacobi_eigensolver(block_1d(n, p_a0).entries).values
        worst["alpha0"] = max(worst["alpha0"], float(np.max(np.abs(closed - numeric))))

        # massless closed form lives on the A*B = 0 slice
        if rng.random() < 0.5:
            p_m0 = ModelParams(1, 0.0, a_c, 0.0, alpha, 0.0, conv)
        else:
            p_m0 = ModelParams(1, 0.0, 0.0, b_c, alpha, 0.0, conv)
        closed = eigenvalues_massless(n, p_m0).values
        numeric = jacobi_eigensolver(block_1d(n, p_m0).entries).values
        worst["massless"] = max(worst["massless"], float(np.max(np.abs(closed - numeric))))

        p_tr = ModelParams(1, m, a_c, b_c, alpha, gamma, conv)
        closed = cubic_triplet_eigenvalues(p_tr)
        numeric = jacobi_eigensolver(block_triplet(p_tr).entries).values
        worst["triplet"] = max(worst["triplet"], float(np.max(np.abs(closed - numeric))))
    return worst, skipped


def _verify_dynamics(config: RunConfig):
    """Norm and conserved-quantity drift plus purity/entropy bounds."""
    params = dataclasses.replace(params_from_config(config), dimension=1)
    state0 = prepare_initial(config.n, config.theta, params)
    n_max = max(config.n + 6, 8)
    h_full = build_full_hamiltonian(params, n_max)
    i_full = build_invariant(params, n_max)
    times = np.linspace(0.0, 30.0, 61)
    norms, energies, invariants, bound_violation = [], [], [], 0.0
    for t in times:
        state = evolve(state0, float(t), params)
        vec = state_to_vector(state, h_full.basis)
        norms.append(float(np.vdot(vec, vec).real))
        energies.append(float(np.vdot(vec, h_full.entries @ vec).real))
        invariants.append(float(np.vdot(vec, i_full.entries @ vec).real))
        purity, entropy = purity_entropy(reduce_isospin(state))
        bound_violation = max(bound_violation,
                              0.5 - purity, purity - 1.0,
                              -entropy, entropy - math.log(2.0))
    norm_drift = float(np.max(np.abs(np.array(norms) - 1.0)))
    energy_drift = float(np.max(energies) - np.min(energies))
    invariant_drift = float(np.max(invariants) - np.min(invariants))
    return norm_drift, energy_drift, invariant_drift, max(bound_violation, 0.0)


def _verify_schmidt(config: RunConfig) -> float:
    """Reduced-density route vs a partial trace over the truncated space."""
    params = dataclasses.replace(params_from_config(config), dimension=1)
    state0 = prepare_initial(config.n, config.theta, params)
    n_max = max(config.n + 6, 8)
    basis = build_full_hamiltonian(params, n_max).basis
    worst = 0.0
    for t in (0.0, 1.7, 5.3, 12.1):
        state = evolve(state0, t, params)
        vec = state_to_vector(state, basis)
        rho = np.zeros((2, 2), dtype=complex)
        for i, lab_i in enumerate(basis.labels):
            for k, lab_k in enumerate(basis.labels):
                if lab_i[0] == lab_k[0] and lab_i[1] == lab_k[1]:
                    r = 0 if lab_i[2] == 1 else 1
                    c = 0 if lab_k[2] == 1 else 1
                    rho[r, c] += vec[i] * np.conj(vec[k])
        direct = np.sort(np.linalg.eigvalsh(rho))
        shortcut = np.sort(reduce_isospin(state).eigenvalues)
        worst = max(worst, float(np.max(np.abs(direct - shortcut))))
    return worst


def run_verify(config: RunConfig) -> dict:
    """Cross-check the whole stack; report one row per check."""
    params = params_from_config(config)
    conv = params.convention
    rng = np.random.default_rng(config.seed)
    checks = []

    def add(name: str, measured: float, bound: float):
        checks.append({
            "check": name,
            "status": "pass" if measured <= bound else "fail",
            "measured": float(measured),
            "bound": float(bound),
        })

    p1 = dataclasses.replace(params, dimension=1)
    p2 = dataclasses.replace(params, dimension=2)
    p3 = dataclasses.replace(params, dimension=3)

    h1 = build_full_hamiltonian(p1, 20)
    h2 = build_full_hamiltonian(p2, 6)
    h3 = build_full_hamiltonian(p3, 6, quanta_max=6)
    add("hermiticity_d1", hermiticity_defect(h1), 1e-12)
    add("hermiticity_d2", hermiticity_defect(h2), 1e-12)
    add("hermiticity_d3", hermiticity_defect(h3), 1e-12)

    mask1 = interior_mask(h1.basis)
    mask2 = interior_mask(h2.basis)
    mask3 = interior_mask(h3.basis)
    i1 = build_invariant(p1, 20)
    i2 = build_invariant(p2, 6)
    i2b = build_invariant(p2, 6, which="J3T3")
    i3 = build_invariant(p3, 6, quanta_max=6)
    add("invariant_commutator_d1", commutator_norm(h1, i1, mask1), 1e-10)
    add("invariant_commutator_d2", commutator_norm(h2, i2, mask2), 1e-10)
    add("invariant_commutator_d2_axial", commutator_norm(h2, i2b, mask2), 1e-10)
    add("invariant_commutator_d3", commutator_norm(h3, i3, mask3), 1e-10)

    jx, jy, jz = build_angular_momentum(h3.basis, conv)
    worst_j = max(commutator_norm(h3, comp, mask3) for comp in (jx, jy, jz))
    add("angular_momentum_commutator_d3", worst_j, 1e-10)

    interior, edge = sector_spectra_1d(
        p1, config.n_max_truncation, solver=lambda mat: jacobi_eigensolver(mat).values)
    everything = np.sort(np.concatenate(
        list(interior.values()) + list(edge.values())))
    h_trunc = build_full_hamiltonian(p1, config.n_max_truncation)
    full_vals = np.linalg.eigvalsh(h_trunc.entries)
    add("sector_vs_full_d1", float(np.max(np.abs(everything - full_vals))), 1e-9)

    worst, skipped = _verify_closed_forms(rng, draws=400)
    add("closed_form_gauge", worst["gauge"], 1e-8)
    add("closed_form_alpha0", worst["alpha0"], 1e-10)
    add("closed_form_massless", worst["massless"], 1e-10)
    add("closed_form_triplet", worst["triplet"], 1e-10)

    oracle_params = ModelParams(3, 0.8, 0.3, 0.6, 1.0, 1.4, conv)
    oracle = CartesianOracle3D(oracle_params, quanta_max=6)
    worst_d3 = 0.0
    for n, j in ((1, Fraction(1, 2)), (1, Fraction(3, 2)), (2, Fraction(1, 2))):
        blk = block_3d(n, j, oracle_params)
        tiled = np.sort(np.tile(np.linalg.eigvalsh(blk.entries), int(2 * j + 1)))
        got = oracle.sector_values(n, j)
        worst_d3 = max(worst_d3, float(np.max(np.abs(got - tiled))))
    add("sector_multiset_d3", worst_d3, 1e-8)

    norm_drift, energy_drift, invariant_drift, violation = _verify_dynamics(config)
    add("dynamics_norm_drift", norm_drift, 1e-12)
    add("dynamics_energy_drift", energy_drift, 1e-10)
    add("dynamics_invariant_drift", invariant_drift, 1e-10)
    add("dynamics_bounds", violation, 1e-10)

    add("schmidt_shortcut", _verify_schmidt(config), 1e-10)

    ok = all(row["status"] == "pass" for row in checks)
    metadata = _params_metadata(config)
    metadata.update({
        "mode": "verify",
        "ok": ok,
        "draws": 400,
        "degenerate_radical_draws_skipped": skipped,
    })
    return {"metadata": metadata, "columns": ["check", "status", "measured", "bound"],
            "rows": checks}


# ---------------------------------------------------------------------------
# emission


def format_float(x: float) -> str:
    return "%.17g" % x


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def emit_csv(columns: list, rows: list) -> str:
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(format_cell(row[c]) for c in columns) + "\n")
    return out.getvalue()


def emit_json(metadata: dict, rows: list) -> str:
    return json.dumps({"metadata": metadata, "rows": rows},
                      indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_table(table: dict, fmt: str) -> str:
    if fmt == "csv":
        return emit_csv(table["columns"], table["rows"])
    if fmt == "json":
        return emit_json(table["metadata"], table["rows"])
    raise ValueError(f"unknown format {fmt!r}")


def run_mode(config: RunConfig) -> dict:
    """Dispatch on mode; always returns a metadata/columns/rows table."""
    if config.mode == "spectrum":
        return run_spectrum(config)
    if config.mode == "evolve":
        return run_evolve(config)
    if config.mode == "sweep":
        sweep = run_sweep(config)
        return {"metadata": sweep.metadata, "columns": sweep.columns,
                "rows": sweep.rows()}
    if config.mode == "verify":
        return run_verify(config)
    raise ValueError(f"unknown mode {config.mode!r}")
