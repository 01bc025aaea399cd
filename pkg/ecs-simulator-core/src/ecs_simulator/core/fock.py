"""Truncated Fock-space amplitudes and the primitives every other module builds on.

States are dense numpy arrays indexed by photon number, ``amps[n]`` for one mode and
``amps[m, n]`` for the two output modes ``c`` and ``d``. Containers are immutable: the
arrays are copied on construction and marked read-only.
"""

from collections.abc import Callable
from functools import lru_cache
from typing import Annotated, Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator
from scipy.special import gammaln

from ecs_simulator.core.errors import DimensionError, DomainError, TruncationError

DEFAULT_CUTOFF = 30
DEFAULT_TAIL_TOL = 1e-10
MAX_ADAPTIVE_CUTOFF = 240

DUMP_SIGNIFICANT_DIGITS = 17

type ComplexArray = npt.NDArray[np.complex128]
type RealArray = npt.NDArray[np.float64]


def _frozen(array: npt.NDArray[Any]) -> npt.NDArray[Any]:
    array.flags.writeable = False
    return array


def _as_amplitudes(ndim: int) -> Callable[[Any], ComplexArray]:
    def validate(value: Any) -> ComplexArray:  # pyright: ignore[reportAny]
        array: ComplexArray = np.array(value, dtype=np.complex128)

        if array.ndim != ndim:
            msg = f"Expected a {ndim}-dimensional amplitude array, got shape {array.shape}."
            raise ValueError(msg)

        if array.size == 0:
            msg = "Amplitude arrays need at least the vacuum entry."
            raise ValueError(msg)

        if ndim == 2 and array.shape[0] != array.shape[1]:  # noqa: PLR2004
            msg = f"Two-mode amplitudes must be square, got shape {array.shape}."
            raise ValueError(msg)

        if not np.all(np.isfinite(array)):
            msg = "Amplitudes must be finite."
            raise ValueError(msg)

        return _frozen(array)

    return validate


def _as_probabilities(value: Any) -> RealArray:  # pyright: ignore[reportAny]
    array: RealArray = np.array(value, dtype=np.float64)

    if array.ndim != 2:  # noqa: PLR2004
        msg = f"Expected a 2-dimensional probability table, got shape {array.shape}."
        raise ValueError(msg)

    if not np.all(np.isfinite(array)):
        msg = "Probabilities must be finite."
        raise ValueError(msg)

    if np.any(array < -1e-15):  # noqa: PLR2004
        msg = "Probabilities must be nonnegative."
        raise ValueError(msg)

    if array.sum() > 1 + 1e-9:  # noqa: PLR2004
        msg = f"Probabilities sum to {array.sum()!r}, which exceeds 1."
        raise ValueError(msg)

    return _frozen(np.clip(array, 0.0, None))


def _as_real_grid(value: Any) -> RealArray:  # pyright: ignore[reportAny]
    array: RealArray = np.array(value, dtype=np.float64)

    if array.ndim != 2 or not np.all(np.isfinite(array)):  # noqa: PLR2004
        msg = "Expected a finite 2-dimensional table."
        raise ValueError(msg)

    return _frozen(array)


def _complex_to_pairs(array: ComplexArray) -> list[Any]:
    return np.stack([array.real, array.imag], axis=-1).tolist()


ModeArray = Annotated[ComplexArray, PlainValidator(_as_amplitudes(1)), PlainSerializer(_complex_to_pairs, when_used="json")]
GridArray = Annotated[ComplexArray, PlainValidator(_as_amplitudes(2)), PlainSerializer(_complex_to_pairs, when_used="json")]
ProbabilityTable = Annotated[RealArray, PlainValidator(_as_probabilities), PlainSerializer(lambda a: a.tolist(), when_used="json")]  # pyright: ignore[reportUnknownLambdaType, reportUnknownMemberType]
RealGrid = Annotated[RealArray, PlainValidator(_as_real_grid), PlainSerializer(lambda a: a.tolist(), when_used="json")]  # pyright: ignore[reportUnknownLambdaType, reportUnknownMemberType]


class ModeAmplitudes(BaseModel):
    """A single-mode pure state truncated at photon number ``cutoff``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amps: ModeArray = Field(description="Complex amplitude for every photon number 0..cutoff.")
    normalized: bool = Field(default=False, description="Whether the amplitudes were rescaled to unit norm.")

    @property
    def cutoff(self) -> int:
        return self.amps.shape[0] - 1


class TwoModeAmplitudes(BaseModel):
    """A pure state of the output modes ``c`` (rows) and ``d`` (columns)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amps: GridArray = Field(description="Complex amplitude for every pair (N_c, N_d) on the truncated grid.")
    normalized: bool = Field(default=False, description="Whether the amplitudes were rescaled to unit norm.")

    @property
    def cutoff(self) -> int:
        return self.amps.shape[0] - 1


class JointPND(BaseModel):
    """Joint photon-number distribution ``P[m, n]`` of modes ``c`` and ``d``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: ProbabilityTable = Field(description="Probability of m photons in mode c and n photons in mode d.")

    @property
    def cutoff(self) -> int:
        return self.probs.shape[0] - 1

    def total(self) -> float:
        return float(self.probs.sum())

    def get(self, m: int, n: int) -> float:
        """The probability at (m, n), zero outside the grid."""
        rows, cols = self.probs.shape
        if 0 <= m < rows and 0 <= n < cols:
            return float(self.probs[m, n])
        return 0.0


type AnyAmplitudes = ModeAmplitudes | TwoModeAmplitudes


@lru_cache(maxsize=64)
def log_factorials(cutoff: int) -> RealArray:
    """``ln(n!)`` for n in 0..cutoff, cached per cutoff."""
    return _frozen(gammaln(np.arange(cutoff + 1, dtype=np.float64) + 1.0))


def log_factorial(n: int) -> float:
    """Natural logarithm of ``n!``, finite far beyond the float overflow of ``n!`` itself."""
    if n < 0:
        msg = f"log_factorial is defined for n >= 0, got {n}."
        raise DomainError(msg)

    return float(gammaln(n + 1.0))


def _require_same_cutoff(first: AnyAmplitudes, second: AnyAmplitudes) -> None:
    if first.cutoff != second.cutoff:
        msg = f"Cutoff mismatch: {first.cutoff} != {second.cutoff}."
        raise DimensionError(msg)


def fock_state(n: int, cutoff: int = DEFAULT_CUTOFF) -> ModeAmplitudes:
    if not 0 <= n <= cutoff:
        msg = f"Fock index {n} is outside the truncated space 0..{cutoff}."
        raise DimensionError(msg)

    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[n] = 1.0
    return ModeAmplitudes(amps=amps, normalized=True)


def fock_state2(m: int, n: int, cutoff: int = DEFAULT_CUTOFF) -> TwoModeAmplitudes:
    if not (0 <= m <= cutoff and 0 <= n <= cutoff):
        msg = f"Fock index ({m}, {n}) is outside the truncated space 0..{cutoff}."
        raise DimensionError(msg)

    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    amps[m, n] = 1.0
    return TwoModeAmplitudes(amps=amps, normalized=True)


def inner_product(u: ModeAmplitudes, v: ModeAmplitudes) -> complex:
    """``<u|v>``, conjugating the first argument."""
    _require_same_cutoff(u, v)
    return complex(np.vdot(u.amps, v.amps))


def inner_product2(a: TwoModeAmplitudes, b: TwoModeAmplitudes) -> complex:
    """``<A|B>`` over the two-mode grid, conjugating the first argument."""
    _require_same_cutoff(a, b)
    return complex(np.vdot(a.amps, b.amps))


def tensor_product(u: ModeAmplitudes, v: ModeAmplitudes) -> TwoModeAmplitudes:
    _require_same_cutoff(u, v)
    return TwoModeAmplitudes(amps=np.outer(u.amps, v.amps), normalized=u.normalized and v.normalized)


def norm_squared(state: AnyAmplitudes) -> float:
    return float(np.sum(np.abs(state.amps) ** 2))


def tail_mass(state: AnyAmplitudes) -> float:
    """Probability discarded by the truncation, ``1 - <psi|psi>``."""
    return 1.0 - norm_squared(state)


def renormalize[S: (ModeAmplitudes, TwoModeAmplitudes)](state: S) -> S:
    total = norm_squared(state)

    if total <= 0.0:
        msg = "Cannot renormalize a state with zero norm."
        raise DomainError(msg)

    return type(state)(amps=state.amps / np.sqrt(total), normalized=True)


def photon_number_distribution(state: ModeAmplitudes) -> RealArray:
    return _frozen(np.abs(state.amps) ** 2)


def adaptive_cutoff[S: (ModeAmplitudes, TwoModeAmplitudes)](
    build: Callable[[int], S],
    cutoff: int = DEFAULT_CUTOFF,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_cutoff: int = MAX_ADAPTIVE_CUTOFF,
) -> S:
    """Build the state, doubling the cutoff until its tail mass drops below ``tail_tol``."""
    current = max(cutoff, 1)

    while True:
        state = build(current)
        mass = tail_mass(state)

        if mass < tail_tol:
            return state

        if current * 2 > max_cutoff:
            raise TruncationError(tail_mass=mass, tail_tol=tail_tol, cutoff=current)

        current *= 2


def trim_cutoff[S: (ModeAmplitudes, TwoModeAmplitudes)](state: S, tail_tol: float = DEFAULT_TAIL_TOL) -> S:
    """The state cut back to the smallest cutoff that drops at most ``tail_tol`` more probability."""
    probabilities = np.abs(state.amps) ** 2
    total = float(probabilities.sum())

    if probabilities.ndim == 1:
        kept = np.cumsum(probabilities)
    else:
        kept = np.diagonal(np.cumsum(np.cumsum(probabilities, axis=0), axis=1))

    cutoff = int(np.argmax(total - kept <= tail_tol))
    index = (slice(0, cutoff + 1),) * probabilities.ndim
    return type(state)(amps=state.amps[index], normalized=False)


def dump_state(state: AnyAmplitudes) -> str:
    """Serialize to the plain-text dump: a header line, then ``n re im`` or ``m n re im`` lines."""
    digits = DUMP_SIGNIFICANT_DIGITS
    modes = 1 if isinstance(state, ModeAmplitudes) else 2
    lines: list[str] = [f"# cutoff {state.cutoff} modes {modes}"]

    for index, amplitude in np.ndenumerate(state.amps):
        coordinates = " ".join(str(i) for i in index)
        lines.append(f"{coordinates} {amplitude.real:.{digits}g} {amplitude.imag:.{digits}g}")

    return "\n".join(lines) + "\n"


def load_state(text: str) -> AnyAmplitudes:
    """Parse the plain-text dump produced by :func:`dump_state`."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]

    if not lines or not lines[0].startswith("#"):
        msg = "State dump is missing its '# cutoff <N> modes <1|2>' header."
        raise ValueError(msg)

    header = lines[0].lstrip("#").split()
    fields = dict(zip(header[::2], header[1::2], strict=True))
    cutoff = int(fields["cutoff"])
    modes = int(fields.get("modes", "1"))

    shape = (cutoff + 1,) * modes
    amps = np.zeros(shape, dtype=np.complex128)

    for line in lines[1:]:
        parts = line.split()
        index = tuple(int(part) for part in parts[:modes])
        amps[index] = complex(float(parts[modes]), float(parts[modes + 1]))

    if modes == 1:
        return ModeAmplitudes(amps=amps)

    return TwoModeAmplitudes(amps=amps)

