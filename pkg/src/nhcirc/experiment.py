"""End-to-end pipelines: prepare dual eigenstates per k, measure spin
textures through the swap-test circuit, unwrap the complex angle and
accumulate Bloch / non-Bloch winding numbers."""

from __future__ import annotations

from dataclasses import dataclass
import json
import math

import numpy as np

from .errors import (
    AmbiguousBranchError,
    DomainError,
    ExceptionalPointError,
    NumericalError,
    OrthogonalStatesError,
)
from .linalg import SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z
from .statevector import StateVector
from .genexp import generalized_expectation, generalized_expectation_batch
from .evolution import prepare_dual_pair, select_alpha
from . import ssh

# below this |<psi_l|psi_r>| the identity denominator is unusable and the
# sigma_y/sigma_x ratio fallback kicks in
EP_OVERLAP_THRESHOLD = 1e-6


@dataclass
class PrepConfig:
    """Dual-eigenstate preparation knobs (evolution time in units 1/t2)."""

    t_final: float = 10.0
    steps: int = 1
    alpha: complex | str = "auto"


@dataclass
class MeasConfig:
    """Measurement mode: exact expectations, or shot sampling when shots is set."""

    shots: int | None = None
    seed: int = 0

    @property
    def mode(self) -> str:
        return "exact" if self.shots is None else "sampled"


@dataclass
class TextureSample:
    k: float
    nx: complex
    ny: complex
    nz: complex
    phi: complex
    overlap_mag: float
    mode: str  # "exact" | "sampled" | suffixed "+ratio" on EP fallback


@dataclass
class WindingResult:
    value: float
    n_samples: int
    method: str  # "measured" | "oracle"
    residual_im: float


def k_grid(n_samples: int) -> np.ndarray:
    """Uniform closed-loop grid over [-pi, pi), endpoint identified."""
    return -math.pi + 2 * math.pi * np.arange(n_samples) / n_samples


def _auto_alpha(d: ssh.DVector) -> complex:
    e = ssh.band_energy(d)
    return select_alpha(e, -e)


def _phi_from_components(ny: complex, nx: complex) -> complex:
    """Principal-value complex arctan(ny/nx); pi/2 when nx vanishes."""
    if abs(nx) < 1e-300 or abs(ny / nx) > 1e150:
        return complex(math.pi / 2)
    return complex(np.arctan(ny / nx))


def measure_texture(
    k: float,
    p: ssh.SSHParams,
    prep: PrepConfig | None = None,
    meas: MeasConfig | None = None,
    ep_threshold: float = EP_OVERLAP_THRESHOLD,
) -> TextureSample:
    """Prepare the dual pair at momentum k and measure the spin texture.

    With ``alpha="auto"`` the rotation targets the upper band (+sqrt(d.d),
    principal branch) so the measured components carry the same sign as the
    analytic texture.  Near an exceptional point, where <psi_l|psi_r>
    vanishes, the angle is recovered from the sigma_y/sigma_x ratio instead
    (phi is unaffected by the band sign or the lost normalization).
    """
    prep = prep or PrepConfig()
    meas = meas or MeasConfig()
    d = ssh.d_vector(k, p)
    h = d.matrix()
    alpha = _auto_alpha(d) if prep.alpha == "auto" else complex(alpha_value(prep.alpha))
    pair, _, _ = prepare_dual_pair(h, prep.t_final, prep.steps, alpha)
    psi_l = StateVector(1, pair.psi_l)
    psi_r = StateVector(1, pair.psi_r)
    overlap_mag = abs(pair.overlap)

    seed = meas.seed + int(1e6 * (k + 4.0))  # decorrelate k-points

    if overlap_mag >= ep_threshold:
        try:
            comps = [
                r.value
                for r in generalized_expectation_batch(
                    psi_l, psi_r, [[SIGMA_X], [SIGMA_Y], [SIGMA_Z]],
                    shots=meas.shots, seed=seed,
                )
            ]
            phi = _phi_from_components(comps[1], comps[0])
            return TextureSample(
                k=k, nx=comps[0], ny=comps[1], nz=comps[2],
                phi=complex(phi), overlap_mag=overlap_mag, mode=meas.mode,
            )
        except OrthogonalStatesError:
            pass  # fall through to the ratio mode

    ratio = generalized_expectation(
        psi_l, psi_r, [SIGMA_Y], [SIGMA_X], shots=meas.shots, seed=seed + 7
    ).value
    phi = complex(np.arctan(ratio))
    nan = complex(float("nan"), float("nan"))
    return TextureSample(
        k=k, nx=nan, ny=nan, nz=nan,
        phi=complex(phi), overlap_mag=overlap_mag, mode=meas.mode + "+ratio",
    )


def alpha_value(alpha) -> complex:
    """Parse an alpha policy value.

    Accepts a complex number, a complex literal ('1', '-1', '1j',
    '0.98+0.2j'), or a unit-phase form 'exp(i*EXPR)' where EXPR is a float
    or a pi fraction like 'pi/16' or '3*pi/8'.
    """
    if isinstance(alpha, (complex, int, float)):
        return complex(alpha)
    text = str(alpha).strip().lower().replace(" ", "")
    if text == "auto":
        raise DomainError("alpha 'auto' must be resolved by the caller")
    sign = 1.0
    if text.startswith("exp(-i") and text.endswith(")"):
        sign = -1.0
        text = "exp(i" + text[6:]
    if text.startswith("exp(i") and text.endswith(")"):
        inner = text[5:-1].lstrip("*")
        num, _, den = inner.partition("/")
        if "pi" in num:
            pre = num.partition("pi")[0].rstrip("*")
            coeff = {"": 1.0, "+": 1.0, "-": -1.0}.get(pre)
            factor = math.pi * (coeff if coeff is not None else float(pre))
        else:
            factor = float(num) if num else 1.0
        angle = factor / float(den) if den else factor
        return complex(np.exp(1j * sign * angle))
    return complex(text)


def texture_sweep(
    p: ssh.SSHParams,
    n_samples: int,
    prep: PrepConfig | None = None,
    meas: MeasConfig | None = None,
) -> list[TextureSample]:
    return [measure_texture(k, p, prep, meas) for k in k_grid(n_samples)]


def winding_from_phases(phis) -> WindingResult:
    """Winding number from ordered complex angles over a closed k-loop.

    phi is defined modulo pi (it comes from an arctangent), so each real
    increment is wrapped into (-pi/2, pi/2] by adding integer multiples of
    pi; the imaginary parts telescope to zero over a closed loop and are
    reported as a diagnostic.
    """
    phis = np.asarray(phis, dtype=complex)
    n = len(phis)
    if n < 16:
        raise DomainError("need at least 16 samples for phase unwrapping")
    diffs = np.roll(phis, -1) - phis  # includes the wrap-around step
    re = diffs.real
    wrapped = re - math.pi * np.ceil(re / math.pi - 0.5)
    if np.any(np.abs(np.abs(wrapped) - math.pi / 2) < 1e-12):
        raise AmbiguousBranchError(
            "a wrapped phase step hit +-pi/2; increase the sampling density"
        )
    value = float(wrapped.sum() / (2 * math.pi))
    residual_im = float(diffs.imag.sum())
    return WindingResult(value=value, n_samples=n, method="measured", residual_im=residual_im)


def measure_winding(
    p: ssh.SSHParams,
    n_samples: int,
    prep: PrepConfig | None = None,
    meas: MeasConfig | None = None,
) -> tuple[WindingResult, list[TextureSample]]:
    samples = texture_sweep(p, n_samples, prep, meas)
    result = winding_from_phases([s.phi for s in samples])
    return result, samples


def _arg_winding(values: np.ndarray) -> float:
    """Closed-loop winding of a complex sequence by minimal-angle steps."""
    scale = max(np.abs(values).max(), 1.0)
    if np.any(np.abs(values) < 1e-12 * scale):
        raise ExceptionalPointError("loop passes through the origin")
    args = np.angle(values)
    steps = np.roll(args, -1) - args
    steps -= 2 * math.pi * np.round(steps / (2 * math.pi))
    w = steps.sum() / (2 * math.pi)
    if abs(w - round(w)) > 1e-9:
        raise NumericalError(f"arg accumulation not integer: {w!r}")
    return float(round(w))


def winding_oracle(p: ssh.SSHParams, n_samples: int) -> WindingResult:
    """Independent winding oracle: (wind(dx + i dy) - wind(dx - i dy)) / 2."""
    ds = [ssh.d_vector(k, p) for k in k_grid(n_samples)]
    q_plus = np.array([d.dx + 1j * d.dy for d in ds])
    q_minus = np.array([d.dx - 1j * d.dy for d in ds])
    value = (_arg_winding(q_plus) - _arg_winding(q_minus)) / 2
    return WindingResult(value=value, n_samples=n_samples, method="oracle", residual_im=0.0)


def winding_sweep(
    t1_values,
    delta: float,
    bc: str,
    n_samples: int,
    prep: PrepConfig | None = None,
    meas: MeasConfig | None = None,
) -> list[dict]:
    """Full pipeline per t1; per-point failures are recorded, not fatal."""
    rows = []
    for t1 in t1_values:
        row = {"t1": float(t1), "w_measured": None, "w_oracle": None,
               "w_expected": None, "error": ""}
        try:
            p = ssh.SSHParams(t1=float(t1), delta=delta, bc=bc)
            row["w_oracle"] = winding_oracle(p, n_samples).value
            row["w_expected"] = ssh.expected_winding(p)
            row["w_measured"] = measure_winding(p, n_samples, prep, meas)[0].value
        except Exception as exc:  # record and continue the sweep
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


# -- file export -------------------------------------------------------------


def write_texture_csv(path, samples: list[TextureSample], header: str | None = None):
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write("k,re_nx,im_nx,re_ny,im_ny,re_nz,im_nz,re_phi,im_phi,overlap_mag,mode\n")
        for s in samples:
            nums = [s.k, s.nx.real, s.nx.imag, s.ny.real, s.ny.imag,
                    s.nz.real, s.nz.imag, s.phi.real, s.phi.imag, s.overlap_mag]
            fh.write(",".join(f"{x:.17e}" for x in nums) + f",{s.mode}\n")


def write_winding_json(path, p: ssh.SSHParams, result: WindingResult,
                       oracle: WindingResult | None = None,
                       expected: float | None = None,
                       config: dict | None = None):
    payload = {
        "params": {"t1": p.t1, "delta": p.delta, "t2": p.t2, "bc": p.bc},
        "N": result.n_samples,
        "mode": result.method,
        "value": result.value,
        "residual_im": result.residual_im,
        "oracle_value": oracle.value if oracle else None,
        "expected_value": expected,
    }
    if config:
        payload["config"] = config
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
