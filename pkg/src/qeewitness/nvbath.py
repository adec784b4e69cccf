"""13C nuclear-spin environments of an NV centre.

Positions are in nm relative to the vacancy, with the NV axis (and the
static field) along +z of the simulation frame.  Couplings are the row
``(A_zx, A_zy, A_zz)`` of the hyperfine tensor in rad/us; Larmor
frequencies are in rad/us.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import constants

from .errors import ValidationError

GAMMA_E = 28.02        # GHz/T
GAMMA_N_C13 = 10.71    # MHz/T
B_FIELD = 0.02         # T (200 G)
LATTICE_CONSTANT = 0.3567  # nm
NATURAL_ABUNDANCE = 0.011


_FCC_BASIS = np.array([[0, 0, 0], [0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]])
_DIAMOND_BASIS = np.vstack([_FCC_BASIS, _FCC_BASIS + 0.25])


@dataclass(frozen=True)
class LatticeConfig:
    bath_radius: float = 4.0
    abundance: float = NATURAL_ABUNDANCE
    seed: int = 0
    lattice_constant: float = LATTICE_CONSTANT
    exclusion_radius: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.exclusion_radius < self.bath_radius:
            raise ValidationError("need 0 < exclusion_radius < bath_radius")
        if not 0.0 <= self.abundance <= 1.0:
            raise ValidationError("abundance must lie in [0, 1]")
        if self.lattice_constant <= 0:
            raise ValidationError("lattice_constant must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class ContactModel:
    """Fermi-contact envelope ``amplitude * exp(-2 r / decay_length)`` for r <= cutoff.

    ``amplitude`` is in rad/us.  The defaults put the term near 2 pi x 1 MHz at
    0.15 nm; the model is disabled unless asked for.
    """

    enabled: bool = False
    amplitude: float = 2 * np.pi * np.e ** 2
    decay_length: float = 0.15
    cutoff_radius: float = 0.5

    def __post_init__(self):
        if self.decay_length <= 0 or self.cutoff_radius < 0:
            raise ValidationError("contact decay_length must be > 0 and cutoff_radius >= 0")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if not self.enabled:
            return np.zeros_like(r)
        return np.where(r <= self.cutoff_radius,
                        self.amplitude * np.exp(-2.0 * r / self.decay_length), 0.0)


@dataclass(frozen=True)
class BathSpin:
    position: tuple
    A: tuple = (0.0, 0.0, 0.0)
    larmor: float = 0.0
    polarization: float = 0.0

    def __post_init__(self):
        if abs(self.polarization) > 1:
            raise ValidationError("polarization must lie in [-1, 1]")
        if not np.all(np.isfinite(self.A)):
            raise ValidationError("couplings must be finite")


@dataclass(eq=False)
class Bath:
    """Struct-of-arrays nuclear bath; ``bath[k]`` gives a :class:`BathSpin`."""

    positions: np.ndarray
    couplings: np.ndarray
    polarization: np.ndarray
    larmor: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        n = len(self.positions)
        self.couplings = np.asarray(self.couplings, dtype=float).reshape(n, 3)
        self.polarization = np.asarray(self.polarization, dtype=float).reshape(n)
        self.larmor = float(self.larmor)
        if np.any(np.abs(self.polarization) > 1):
            raise ValidationError("polarization must lie in [-1, 1]")

    def __len__(self):
        return len(self.positions)

    def __getitem__(self, k) -> BathSpin:
        return BathSpin(tuple(self.positions[k]), tuple(self.couplings[k]),
                        self.larmor, float(self.polarization[k]))

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def distances(self) -> np.ndarray:
        return np.linalg.norm(self.positions, axis=1)

    @classmethod
    def from_spins(cls, spins, larmor=None, meta=None) -> "Bath":
        spins = list(spins)
        if larmor is None:
            larmors = {s.larmor for s in spins}
            if len(larmors) > 1:
                raise ValidationError("all spins in a bath share one Larmor frequency")
            larmor = larmors.pop() if larmors else 0.0
        return cls(np.array([s.position for s in spins], dtype=float).reshape(-1, 3),
                   np.array([s.A for s in spins], dtype=float).reshape(-1, 3),
                   np.array([s.polarization for s in spins], dtype=float),
                   larmor, dict(meta or {}))

    def with_polarization(self, p) -> "Bath":
        return Bath(self.positions.copy(), self.couplings.copy(),
                    np.broadcast_to(np.asarray(p, dtype=float), (len(self),)).copy(),
                    self.larmor, dict(self.meta))

    def equals(self, other: "Bath") -> bool:
        """Bitwise equality of all numeric content."""
        return (self.larmor == other.larmor
                and np.array_equal(self.positions, other.positions)
                and np.array_equal(self.couplings, other.couplings)
                and np.array_equal(self.polarization, other.polarization))


def larmor_frequency(b_z: float, gamma_n: float = GAMMA_N_C13) -> float:
    """Nuclear Larmor angular frequency in rad/us for ``b_z`` in T and ``gamma_n`` in MHz/T."""
    return 2.0 * np.pi * gamma_n * b_z


def dipolar_prefactor(gamma_e: float = GAMMA_E, gamma_n: float = GAMMA_N_C13) -> float:
    """``(mu0/4pi) h gamma_e gamma_n`` in rad/us * nm^3 (gamma_e in GHz/T, gamma_n in MHz/T)."""
    hz_m3 = constants.mu_0 / (4 * np.pi) * constants.h * (gamma_e * 1e9) * (gamma_n * 1e6)
    return 2.0 * np.pi * hz_m3 * 1e27 * 1e-6


def generate_sites(cfg: LatticeConfig) -> np.ndarray:
    """All diamond lattice sites with ``exclusion_radius < |r| <= bath_radius``.

    The vacancy sits on a lattice site at the origin and the crystal [111]
    direction is rotated onto +z.  Sites are ordered by distance, ties broken
    lexicographically, so the output is fully deterministic.
    """
    a = cfg.lattice_constant
    n = int(np.ceil(cfg.bath_radius / a)) + 1
    cells = np.arange(-n, n + 1, dtype=float)
    grid = np.stack(np.meshgrid(cells, cells, cells, indexing="ij"), axis=-1).reshape(-1, 1, 3)
    frac = (grid + _DIAMOND_BASIS[None, :, :]).reshape(-1, 3)
    u, v, w = (frac * a).T
    # crystal [111] onto +z; exact sums keep on-axis sites exactly on the axis
    pos = np.column_stack([(u - v) / np.sqrt(2.0), (u + v - 2.0 * w) / np.sqrt(6.0),
                           (u + v + w) / np.sqrt(3.0)])
    r = np.linalg.norm(pos, axis=1)
    keep = (r > cfg.exclusion_radius) & (r <= cfg.bath_radius)
    pos, r = pos[keep], r[keep]
    order = np.lexsort((pos[:, 2], pos[:, 1], pos[:, 0], r))
    return pos[order]


def sample_bath(sites, cfg: LatticeConfig, b_z: float = B_FIELD,
                gamma_n: float = GAMMA_N_C13) -> Bath:
    """Occupy each site with 13C independently with probability ``cfg.abundance``.

    Couplings are left at zero and polarizations at 0.
    """
    sites = np.asarray(sites, dtype=float).reshape(-1, 3)
    rng = np.random.default_rng(int(cfg.seed))
    occupied = rng.random(len(sites)) < cfg.abundance
    pos = sites[occupied]
    n = len(pos)
    meta = {"lattice": asdict(cfg), "b_z": b_z, "gamma_n": gamma_n}
    return Bath(pos, np.zeros((n, 3)), np.zeros(n), larmor_frequency(b_z, gamma_n), meta)


def _nv_frame(nv_axis) -> np.ndarray:
    ez = np.asarray(nv_axis, dtype=float)
    norm = np.linalg.norm(ez)
    if not np.isfinite(norm) or norm == 0:
        raise ValidationError("nv_axis must be a non-zero vector")
    ez = ez / norm
    if np.array_equal(ez, [0.0, 0.0, 1.0]):
        return np.eye(3)
    ref = np.array([1.0, 0.0, 0.0]) if abs(ez[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    ex = ref - ez * (ref @ ez)
    ex /= np.linalg.norm(ex)
    return np.array([ex, np.cross(ez, ex), ez])


def hyperfine_couplings(positions, gamma_e: float = GAMMA_E, gamma_n: float = GAMMA_N_C13,
                        contact: ContactModel | None = None, nv_axis=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Rows ``(A_zx, A_zy, A_zz)`` for nuclei at ``positions`` (nm), in rad/us.

    Dipolar part ``D / r^3 (delta_jz - 3 n_j n_z)`` with ``n = r/|r|``; the
    contact term is added to ``A_zz`` only, and only within its cutoff.
    Components refer to a frame whose z axis is ``nv_axis``.
    """
    pos = np.asarray(positions, dtype=float).reshape(-1, 3)
    pos = pos @ _nv_frame(nv_axis).T
    r = np.linalg.norm(pos, axis=1)
    if np.any(r == 0):
        raise ValidationError("nuclear position coincides with the qubit")
    n = pos / r[:, None]
    a = (dipolar_prefactor(gamma_e, gamma_n) / r ** 3)[:, None] * (-3.0 * n * n[:, 2:3])
    a[:, 2] += dipolar_prefactor(gamma_e, gamma_n) / r ** 3
    if contact is not None and contact.enabled:
        a[:, 2] += contact(r)
    return a


def compute_couplings(spin: BathSpin, gamma_e: float = GAMMA_E, gamma_n: float = GAMMA_N_C13,
                      contact: ContactModel | None = None, nv_axis=(0.0, 0.0, 1.0)) -> BathSpin:
    a = hyperfine_couplings([spin.position], gamma_e, gamma_n, contact, nv_axis)[0]
    return replace(spin, A=tuple(float(x) for x in a))


def couple_bath(bath: Bath, gamma_e: float = GAMMA_E, gamma_n: float = GAMMA_N_C13,
                contact: ContactModel | None = None, nv_axis=(0.0, 0.0, 1.0)) -> Bath:
    a = hyperfine_couplings(bath.positions, gamma_e, gamma_n, contact, nv_axis)
    meta = dict(bath.meta, gamma_e=gamma_e,
                contact=asdict(contact) if contact is not None else asdict(ContactModel()))
    return Bath(bath.positions.copy(), a, bath.polarization.copy(), bath.larmor, meta)


def apply_polarization(bath: Bath, r_p: float, p_inner: float = 1.0) -> Bath:
    """Nuclei with ``|r| <= r_p`` get polarization ``p_inner``, the rest stay fully mixed."""
    if r_p < 0:
        raise ValidationError("r_p must be >= 0")
    if abs(p_inner) > 1:
        raise ValidationError("p_inner must lie in [-1, 1]")
    p = np.where(bath.distances <= r_p, float(p_inner), 0.0)
    out = bath.with_polarization(p)
    out.meta.update(r_p=r_p, p_inner=p_inner)
    return out


def build_bath(cfg: LatticeConfig, b_z: float = B_FIELD, gamma_e: float = GAMMA_E,
               gamma_n: float = GAMMA_N_C13, contact: ContactModel | None = None,
               r_p: float = 0.0, p_inner: float = 1.0) -> Bath:
    """Sites, random occupation, couplings and polarization profile in one call."""
    bath = sample_bath(generate_sites(cfg), cfg, b_z, gamma_n)
    bath = couple_bath(bath, gamma_e, gamma_n, contact)
    return apply_polarization(bath, r_p, p_inner)


# -- text serialization ------------------------------------------------------

_MAGIC = "# qeewitness-bath 1"
_COLUMNS = "index x_nm y_nm z_nm A_zx A_zy A_zz p"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps_bath(bath: Bath) -> str:
    lines = [_MAGIC,
             "# larmor " + _fmt(bath.larmor),
             "# meta " + json.dumps(bath.meta, sort_keys=True),
             "# " + _COLUMNS]
    for k in range(len(bath)):
        row = [*bath.positions[k], *bath.couplings[k], bath.polarization[k]]
        lines.append(" ".join([str(k)] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def loads_bath(text: str) -> Bath:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _MAGIC:
        raise ValidationError("not a bath file (missing header)")
    larmor, meta, rows = None, {}, []
    for line in lines[1:]:
        if line.startswith("# larmor "):
            larmor = float(line[len("# larmor "):])
        elif line.startswith("# meta "):
            meta = json.loads(line[len("# meta "):])
        elif line.startswith("#") or not line.strip():
            continue
        else:
            fields = line.split()
            if len(fields) != 8 or int(fields[0]) != len(rows):
                raise ValidationError(f"malformed bath record: {line!r}")
            rows.append([float(v) for v in fields[1:]])
    if larmor is None:
        raise ValidationError("bath file has no larmor header")
    data = np.array(rows, dtype=float).reshape(-1, 7)
    return Bath(data[:, :3], data[:, 3:6], data[:, 6], larmor, meta)


def write_bath(path, bath: Bath) -> None:
    Path(path).write_text(dumps_bath(bath))


def read_bath(path) -> Bath:
    return loads_bath(Path(path).read_text())
