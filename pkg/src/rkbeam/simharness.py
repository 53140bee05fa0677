"""Deterministic 2-D simulation scenarios: reconstruction, beamforming, extraction.

Every run is a pure function of its :class:`ScenarioConfig`. Random streams
are derived from ``(seed, stream, frequency index)`` so frequencies can be
processed in any order or concurrently without changing the output.
"""
import dataclasses
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .beamformer import directivity_index, extraction_matrix, pattern_table, simple_weights
from .directivity import Directivity, plane_wave_response, rk_directional_derivative
from .harmonics import basis_degrees, n_basis, project_directivity, sph_harm_all
from .kernelfield import KernelField, MicArray, build_c, estimate_spectrum, reconstruct, solve_coeffs
from .specialfn import big_j, surface_area

__all__ = [
    "ScenarioConfig",
    "ConfigError",
    "PlaneWave",
    "KernelAtOrigin",
    "ModeField",
    "ScenarioResult",
    "wavenumber",
    "gen_array",
    "scenario_array",
    "load_array",
    "save_array",
    "sample_field",
    "field_values",
    "add_noise",
    "mne",
    "mne_details",
    "eval_grid",
    "run_reconstruction",
    "run_beamforming",
    "run_extraction",
    "write_result",
]

STREAM_ARRAY = 0
STREAM_NOISE = 1
MNE_FLOOR_DB = -300.0


class ConfigError(ValueError):
    pass


def _default_freqs():
    return tuple(float(f) for f in np.geomspace(100.0, 8000.0, 40))


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 1
    d: int = 2
    n_mics: int = 30
    side: float = 0.4
    nu_max: int = 2
    snr_db: float = 30.0
    lam: float = 0.001
    relative_lambda: bool = False
    c_sound: float = 343.0
    frequencies: tuple = field(default_factory=_default_freqs)
    eval_side: float = 0.5
    eval_grid_n: int = 51
    look_angle: float = math.pi / 4
    source_angle: float = math.pi / 4
    n_quad: int = 3600
    array_file: Optional[str] = None

    def __post_init__(self):
        if self.d != 2:
            raise ConfigError("scenarios are two-dimensional (d = 2)")
        if self.n_mics < 1:
            raise ConfigError("n_mics must be at least 1")
        if self.lam < 0:
            raise ConfigError("lam must be non-negative")
        if not self.frequencies or any(f <= 0 for f in self.frequencies):
            raise ConfigError("frequencies must be a non-empty list of positive values")
        object.__setattr__(self, "frequencies", tuple(float(f) for f in self.frequencies))

    @property
    def look_direction(self):
        return np.array([math.cos(self.look_angle), math.sin(self.look_angle)])

    @property
    def source_direction(self):
        return np.array([math.cos(self.source_angle), math.sin(self.source_angle)])

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_text(self):
        """Flat ``key = value`` form accepted by :meth:`from_text`."""
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                v = ""
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, tuple):
                v = ", ".join(_fmt(x) for x in v)
            elif isinstance(v, float):
                v = _fmt(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, base=None):
        base = cls() if base is None else base
        changes = {}
        types = {f.name: f for f in dataclasses.fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, val = (p.strip() for p in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                changes[key] = _parse_value(key, getattr(base, key), val)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
        return dataclasses.replace(base, **changes)

    @classmethod
    def load(cls, path, base=None):
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {str(path)!r}: {exc.strerror}") from None
        return cls.from_text(text, base)


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _parse_value(key, current, val):
    if key == "frequencies":
        return tuple(float(x) for x in val.replace(",", " ").split())
    if key == "array_file":
        return val or None
    if isinstance(current, bool):
        if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"not a boolean: {val!r}")
        return val.lower() in ("true", "1", "yes")
    if isinstance(current, int):
        return int(val)
    return float(val)


@dataclass(frozen=True)
class PlaneWave:
    direction: np.ndarray
    amplitude: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError("plane-wave direction must be a unit vector")
        object.__setattr__(self, "direction", u)


@dataclass(frozen=True)
class KernelAtOrigin:
    """The kernel centred at the origin: equal-amplitude plane waves from all directions."""

    d: int = 2


@dataclass(frozen=True)
class ModeField:
    """Interior field ``sum p_nu^mu J_{d,nu}(k|r|) Y_nu^mu(r/|r|)``."""

    d: int
    nu_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (n_basis(self.d, self.nu_max),):
            raise ValueError("wrong number of mode coefficients")
        object.__setattr__(self, "coeffs", c)

    def spectrum_coeffs(self):
        """Harmonic coefficients of the angular spectrum: ``i^nu p_nu^mu``."""
        return (1j ** basis_degrees(self.d, self.nu_max)) * self.coeffs


@dataclass
class ScenarioResult:
    """Rows of one scenario plus optional auxiliary tables (e.g. beam patterns)."""

    name: str
    config: ScenarioConfig
    columns: list
    rows: list
    tables: dict = field(default_factory=dict)


def wavenumber(freq_hz, c_sound=343.0):
    return 2.0 * math.pi * freq_hz / c_sound


def _rng(seed, stream, index=0):
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream, index]))


def gen_array(cfg):
    """Random directional array inside the centred ``side x side`` square.

    Coefficients have real and imaginary parts uniform in ``[-1, 1]``; the
    omnidirectional coefficient is then rescaled (phase kept) so its
    magnitude lies in ``[0.5, 1.5] * sqrt(2 pi)``.
    """
    rng = _rng(cfg.seed, STREAM_ARRAY)
    d = cfg.d
    nb = n_basis(d, cfg.nu_max)
    pos = rng.uniform(-cfg.side / 2, cfg.side / 2, size=(cfg.n_mics, d))
    raw = rng.uniform(-1.0, 1.0, size=(cfg.n_mics, nb, 2))
    coeffs = raw[..., 0] + 1j * raw[..., 1]
    unit = math.sqrt(surface_area(d))
    c0 = coeffs[:, 0]
    mag = np.abs(c0)
    phase = np.where(mag > 0, c0 / np.where(mag > 0, mag, 1.0), 1.0)
    coeffs[:, 0] = phase * unit * (0.5 + mag / math.sqrt(2.0))
    return MicArray(pos, tuple(Directivity(d, cfg.nu_max, c) for c in coeffs))


def load_array(path):
    """Read an array file: one sensor per line, ``x, y, <directivity record>``."""
    positions, dirs = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vals = [float(v) for v in line.replace(",", " ").split()]
            d = int(vals[2])
            positions.append(vals[:d])
            dirs.append(Directivity.from_record(vals[d:]))
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"{path}:{lineno}: malformed array line ({exc})") from None
    if not positions:
        raise ConfigError(f"{path}: no sensors")
    return MicArray(np.array(positions), tuple(dirs))


def save_array(array, path):
    lines = ["# x, y, d, nu_max, re_0, im_0, re_1, im_1, ..."]
    for pos, z in zip(array.positions, array.directivities):
        lines.append(", ".join(_fmt(float(v)) for v in list(pos) + z.to_record()))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def scenario_array(cfg):
    if cfg.array_file:
        try:
            return load_array(cfg.array_file)
        except OSError as exc:
            raise ConfigError(f"cannot read array file {cfg.array_file!r}: {exc.strerror}") from None
    return gen_array(cfg)


def sample_field(spec, array, k):
    """Noiseless sensor outputs for a test field, in array order."""
    if not k > 0:
        raise ValueError("wavenumber must be positive")
    pos = array.positions
    if isinstance(spec, PlaneWave):
        gain = spec.amplitude * np.exp(1j * spec.phase)
        return np.array(
            [gain * plane_wave_response(z, spec.direction, k, r) for r, z in zip(pos, array.directivities)]
        )
    origin = np.zeros(array.d)
    if isinstance(spec, KernelAtOrigin):
        # zeta_n'(d) applied to kappa_k(., 0) at r_n
        return np.array([rk_directional_derivative(z, k, r, origin) for r, z in zip(pos, array.directivities)])
    if isinstance(spec, ModeField):
        spec_c = spec.spectrum_coeffs()
        out = []
        for r, z in zip(pos, array.directivities):
            deg = spec.nu_max + z.nu_max

            def product(dirs, z=z):
                y = sph_harm_all(spec.d, spec.nu_max, dirs) @ spec_c
                return y * (sph_harm_all(z.d, z.nu_max, dirs) @ z.coeffs)

            g, _ = project_directivity(spec.d, product, deg, n_quad=4 * deg + 8)
            out.append(rk_directional_derivative(Directivity(spec.d, deg, g), k, r, origin))
        return np.array(out)
    raise TypeError(f"unknown field spec {spec!r}")


def field_values(spec, k, points):
    """Pressure of a test field at points of shape ``(..., d)``."""
    points = np.asarray(points, dtype=float)
    if isinstance(spec, PlaneWave):
        return spec.amplitude * np.exp(1j * spec.phase) * np.exp(-1j * k * (points @ spec.direction))
    dist = np.linalg.norm(points, axis=-1)
    if isinstance(spec, KernelAtOrigin):
        return big_j(points.shape[-1], 0, k * dist).astype(complex)
    if isinstance(spec, ModeField):
        radial = np.stack([big_j(spec.d, n, k * dist) for n in range(spec.nu_max + 1)], axis=-1)
        nu = basis_degrees(spec.d, spec.nu_max)
        return (radial[..., nu] * sph_harm_all(spec.d, spec.nu_max, points)) @ spec.coeffs
    raise TypeError(f"unknown field spec {spec!r}")


def add_noise(s, snr_db, rng):
    """Add circular complex Gaussian noise at the given per-element mean SNR.

    ``snr_db = inf`` returns the input unchanged.
    """
    s = np.asarray(s, dtype=complex)
    power = float(np.mean(np.abs(s) ** 2))
    if power == 0.0:
        raise ValueError("cannot calibrate noise against an all-zero signal")
    if math.isinf(snr_db) and snr_db > 0:
        return s.copy()
    sigma = math.sqrt(power * 10.0 ** (-snr_db / 10.0) / 2.0)
    return s + sigma * (rng.standard_normal(s.shape) + 1j * rng.standard_normal(s.shape))


def mne_details(ref, est):
    """Mean normalised error in dB and the number of excluded reference points."""
    ref = np.asarray(ref).reshape(-1)
    est = np.asarray(est).reshape(-1)
    if ref.shape != est.shape:
        raise ValueError("reference and estimate differ in length")
    keep = np.abs(ref) >= 1e-12
    if not np.any(keep):
        raise ValueError("no evaluation points left after excluding |ref| < 1e-12")
    ratio = np.abs(ref[keep] - est[keep]) / np.abs(ref[keep])
    with np.errstate(divide="ignore"):
        per_point = np.maximum(20.0 * np.log10(ratio), MNE_FLOOR_DB)
    return float(np.mean(per_point)), int(np.count_nonzero(~keep))


def mne(ref, est):
    return mne_details(ref, est)[0]


def eval_grid(cfg):
    x = np.linspace(-cfg.eval_side / 2, cfg.eval_side / 2, cfg.eval_grid_n)
    gx, gy = np.meshgrid(x, x, indexing="xy")
    return np.stack([gx.ravel(), gy.ravel()], axis=-1)


def _threads():
    try:
        return max(1, int(os.environ.get("RKBEAM_THREADS", "1")))
    except ValueError:
        return 1


def _sweep(cfg, fn):
    items = list(enumerate(cfg.frequencies))
    workers = min(_threads(), len(items))
    if workers == 1:
        return [fn(i, f) for i, f in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda it: fn(*it), items))


def _noisy(cfg, s, index):
    return add_noise(s, cfg.snr_db, _rng(cfg.seed, STREAM_NOISE, index))


def run_reconstruction(cfg, array=None):
    """Plane-wave reconstruction with true directivities (Proposed) and ignoring them (Omni)."""
    array = scenario_array(cfg) if array is None else array
    omni = array.as_omni()
    grid = eval_grid(cfg)
    wave = PlaneWave(cfg.source_direction)

    def one(i, f):
        k = wavenumber(f, cfg.c_sound)
        s = _noisy(cfg, sample_field(wave, array, k), i)
        ref = field_values(wave, k, grid)
        out = {"freq_hz": f, "k": k}
        for label, arr in (("proposed", array), ("omni", omni)):
            C = build_c(arr, k)
            a = solve_coeffs(C, s, cfg.lam, cfg.relative_lambda)
            est = reconstruct(KernelField(a, array.positions, k), grid)
            out[f"mne_{label}_db"], n_excl = mne_details(ref, est)
            if label == "proposed":
                out["cond_c"] = float(np.linalg.cond(C.entries))
        out["n_excluded"] = n_excl
        return out

    rows = _sweep(cfg, one)
    cols = ["freq_hz", "k", "mne_proposed_db", "mne_omni_db", "cond_c", "n_excluded"]
    return ScenarioResult("reconstruction", cfg, cols, [[r[c] for c in cols] for r in rows])


def run_beamforming(cfg, array=None):
    """Simple beamformer at the origin: directivity index and normalised pattern per frequency."""
    array = scenario_array(cfg) if array is None else array
    phi = cfg.look_direction

    def one(i, f):
        k = wavenumber(f, cfg.c_sound)
        w = simple_weights(build_c(array, k), array, k, phi, None, cfg.lam, cfg.relative_lambda)
        di = directivity_index(w, array, k, phi, cfg.n_quad)
        return [f, k, di], [[f, *row] for row in pattern_table(w, array, k, phi)]

    out = _sweep(cfg, one)
    res = ScenarioResult("beamforming", cfg, ["freq_hz", "k", "di_db"], [r for r, _ in out])
    res.tables["patterns"] = (
        ["freq_hz", "angle_deg", "re", "im", "magnitude_db"],
        [row for _, rows in out for row in rows],
    )
    return res


def run_extraction(cfg, array=None):
    """Extract the plane-wave component from the look direction out of the kernel field."""
    array = scenario_array(cfg) if array is None else array
    phi = cfg.look_direction
    grid = eval_grid(cfg)

    def one(i, f):
        k = wavenumber(f, cfg.c_sound)
        s = _noisy(cfg, sample_field(KernelAtOrigin(array.d), array, k), i)
        C = build_c(array, k)
        W = extraction_matrix(C, array, k, phi, grid, cfg.lam, cfg.relative_lambda).W
        extracted = np.conj(W).T @ s
        desired = np.exp(-1j * k * (grid @ phi))
        a = solve_coeffs(C, s, cfg.lam, cfg.relative_lambda)
        p_b = estimate_spectrum(KernelField(a, array.positions, k), phi)
        return [f, k, mne(desired, extracted), abs(p_b), float(np.angle(p_b))]

    rows = _sweep(cfg, one)
    return ScenarioResult("extraction", cfg, ["freq_hz", "k", "mne_db", "amplitude", "phase_rad"], rows)


def _csv_text(columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _atomic_write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_result(result, out_dir):
    """Write ``<name>.csv``, one CSV per auxiliary table and a ``.meta`` sidecar.

    The sidecar is a valid config file (comment lines carry the version and
    the frequency-to-wavenumber rule), so re-running from it reproduces the
    CSVs byte for byte.
    """
    out_dir = Path(out_dir)
    paths = []
    main = out_dir / f"{result.name}.csv"
    _atomic_write(main, _csv_text(result.columns, result.rows))
    paths.append(main)
    for tname, (cols, rows) in result.tables.items():
        p = out_dir / f"{result.name}_{tname}.csv"
        _atomic_write(p, _csv_text(cols, rows))
        paths.append(p)
    meta = (
        f"# rkbeam {__version__}\n"
        f"# scenario = {result.name}\n"
        f"# k = 2 pi freq_hz / c_sound, c_sound = {_fmt(result.config.c_sound)} m/s\n"
        + result.config.to_text()
    )
    meta_path = out_dir / f"{result.name}.meta"
    _atomic_write(meta_path, meta)
    paths.append(meta_path)
    return paths
