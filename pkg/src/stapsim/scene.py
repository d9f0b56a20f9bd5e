"""Radar scene synthesis: steering vectors, interference covariance, snapshots.

The sensor is a side-looking uniform linear array of ``num_elements`` antennas
collecting ``num_pulses`` pulses per coherent processing interval.  A
space-time snapshot stacks the per-pulse spatial samples of one range gate
into a single length ``M = num_pulses * num_elements`` complex vector (pulse
index slow, element index fast).  Interference is the sum of a ring of ground
clutter patches, spatially correlated temporally white jammers, and white
thermal noise.  Snapshots are drawn by colouring standard circular complex
Gaussians with the Cholesky factor of the total covariance.
"""

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0

# Number of clutter patches in the azimuth ring.  181 patches over the open
# interval (-90, 90) degrees keeps adjacent patches ~1 degree apart for the
# default array and over-samples the clutter rank by an order of magnitude.
DEFAULT_CLUTTER_PATCHES = 181


@dataclass
class RadarScenario:
    """Physical and system parameters needed to synthesise the interference.

    Attributes:
        carrier_frequency: carrier in Hz.
        prf: pulse repetition frequency in Hz.
        platform_velocity: platform ground speed in m/s.
        platform_height: platform altitude in m (carried for completeness;
            the flat clutter-ring model does not depend on it).
        num_elements: array elements.
        num_pulses: pulses per coherent processing interval.
        cnr_db: clutter-to-noise ratio per element and pulse, dB.
            ``-inf`` disables clutter.
        jnr_db: jammer-to-noise ratio per element, dB, applied per jammer.
        jammer_azimuths: jammer azimuths in degrees, each inside (-90, 90).
        noise_power: thermal noise power per element (linear reference level).
        target_azimuth: look azimuth in degrees.
        target_normalized_doppler: look Doppler in cycles/pulse.
        element_spacing: element spacing in m; defaults to half a wavelength.
    """

    carrier_frequency: float = 450e6
    prf: float = 300.0
    platform_velocity: float = 50.0
    platform_height: float = 9000.0
    num_elements: int = 8
    num_pulses: int = 8
    cnr_db: float = 40.0
    jnr_db: float = 30.0
    jammer_azimuths: tuple = (-45.0, 60.0)
    noise_power: float = 1.0
    target_azimuth: float = 0.0
    target_normalized_doppler: float = 0.25
    element_spacing: float | None = None

    def __post_init__(self):
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be positive")
        if self.prf <= 0:
            raise ValueError("prf must be positive")
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ValueError("num_elements must be a positive integer")
        if int(self.num_pulses) != self.num_pulses or self.num_pulses < 1:
            raise ValueError("num_pulses must be a positive integer")
        self.num_elements = int(self.num_elements)
        self.num_pulses = int(self.num_pulses)
        if self.noise_power <= 0:
            raise ValueError("noise_power must be positive")
        if self.element_spacing is None:
            self.element_spacing = self.wavelength / 2.0
        if self.element_spacing <= 0:
            raise ValueError("element_spacing must be positive")
        self.jammer_azimuths = tuple(float(a) for a in self.jammer_azimuths)
        for az in self.jammer_azimuths:
            if not -90.0 < az < 90.0:
                raise ValueError(f"jammer azimuth {az} outside (-90, 90) degrees")
        if not -90.0 < self.target_azimuth < 90.0:
            raise ValueError("target_azimuth outside (-90, 90) degrees")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def dim(self) -> int:
        """Full space-time dimension (pulses times elements)."""
        return self.num_elements * self.num_pulses

    @property
    def ridge_slope(self) -> float:
        """Clutter ridge slope 2*v / (d*prf); 1.0 for the default geometry."""
        return 2.0 * self.platform_velocity / (self.element_spacing * self.prf)


@dataclass
class SteeringVector:
    """Unit-norm space-time response at one azimuth/Doppler look direction."""

    entries: np.ndarray
    look_azimuth: float
    look_doppler: float


@dataclass
class CovarianceSet:
    """Clutter, jammer, noise and total covariance with a coloring factor.

    ``coloring_factor`` is lower triangular with
    ``coloring_factor @ coloring_factor.conj().T == total``.
    """

    clutter: np.ndarray
    jammer: np.ndarray
    noise: np.ndarray
    total: np.ndarray
    coloring_factor: np.ndarray

    @property
    def dim(self) -> int:
        return self.total.shape[0]


@dataclass
class Snapshot:
    """One space-time data vector plus the hypothesis it was drawn under."""

    data: np.ndarray
    hypothesis: str
    target_gain: complex


def spatial_steering(scenario: RadarScenario, azimuth: float) -> np.ndarray:
    """Array response to a far-field source at ``azimuth`` degrees.

    Entry n is exp(j*2*pi*(d/lambda)*n*sin(azimuth)).  Azimuth must lie in
    the open interval (-90, 90).
    """
    if not -90.0 < azimuth < 90.0:
        raise ValueError(f"azimuth {azimuth} outside the open interval (-90, 90)")
    phase = (
        2.0
        * np.pi
        * (scenario.element_spacing / scenario.wavelength)
        * np.sin(np.deg2rad(azimuth))
    )
    return np.exp(1j * phase * np.arange(scenario.num_elements))


def temporal_steering(scenario: RadarScenario, normalized_doppler: float) -> np.ndarray:
    """Pulse-to-pulse response at ``normalized_doppler`` cycles per pulse."""
    return np.exp(2j * np.pi * normalized_doppler * np.arange(scenario.num_pulses))


def space_time_steering(
    scenario: RadarScenario, azimuth: float, normalized_doppler: float
) -> SteeringVector:
    """Unit-norm Kronecker product of the temporal and spatial responses."""
    vec = np.kron(
        temporal_steering(scenario, normalized_doppler),
        spatial_steering(scenario, azimuth),
    )
    vec /= np.linalg.norm(vec)
    return SteeringVector(entries=vec, look_azimuth=azimuth, look_doppler=normalized_doppler)


def target_steering(scenario: RadarScenario) -> SteeringVector:
    """Steering vector at the scenario's configured target look direction."""
    return space_time_steering(
        scenario, scenario.target_azimuth, scenario.target_normalized_doppler
    )


def clutter_covariance(
    scenario: RadarScenario, num_patches: int = DEFAULT_CLUTTER_PATCHES
) -> np.ndarray:
    """Covariance of a ring of uncorrelated ground clutter patches.

    Patches are uniformly spaced in azimuth over (-90, 90) degrees; each
    contributes an unnormalized space-time steering vector whose Doppler
    follows the clutter ridge.  Patch power is uniform and scaled so that
    trace(clutter) / trace(noise) matches ``cnr_db``.
    """
    dim = scenario.dim
    if np.isneginf(scenario.cnr_db):
        return np.zeros((dim, dim), dtype=complex)
    doppler_per_sin = scenario.ridge_slope * (
        scenario.element_spacing / scenario.wavelength
    )
    azimuths = -90.0 + (np.arange(num_patches) + 0.5) * (180.0 / num_patches)
    patches = np.empty((num_patches, dim), dtype=complex)
    for row, azimuth in enumerate(azimuths):
        doppler = doppler_per_sin * np.sin(np.deg2rad(azimuth))
        patches[row] = np.kron(
            temporal_steering(scenario, doppler),
            spatial_steering(scenario, azimuth),
        )
    cov = patches.T @ patches.conj()
    cov = (cov + cov.conj().T) / 2.0
    target_trace = 10.0 ** (scenario.cnr_db / 10.0) * scenario.noise_power * dim
    cov *= target_trace / np.trace(cov).real
    return cov


def jammer_covariance(scenario: RadarScenario) -> np.ndarray:
    """Covariance of broadband barrage jammers.

    Each jammer is spatially correlated (rank-one in the element dimension)
    and white pulse to pulse, with per-element power set by ``jnr_db``.
    """
    dim = scenario.dim
    cov = np.zeros((dim, dim), dtype=complex)
    power = 10.0 ** (scenario.jnr_db / 10.0) * scenario.noise_power
    for azimuth in scenario.jammer_azimuths:
        response = spatial_steering(scenario, azimuth)
        spatial = np.outer(response, response.conj())
        cov += power * np.kron(np.eye(scenario.num_pulses), spatial)
    return cov


def assemble_covariance(scenario: RadarScenario) -> CovarianceSet:
    """Build the clutter + jammer + noise covariance set with its Cholesky factor."""
    clutter = clutter_covariance(scenario)
    jammer = jammer_covariance(scenario)
    noise = scenario.noise_power * np.eye(scenario.dim)
    total = clutter + jammer + noise
    try:
        coloring = np.linalg.cholesky(total)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "total covariance is not positive definite; check noise_power"
        ) from exc
    return CovarianceSet(
        clutter=clutter,
        jammer=jammer,
        noise=noise,
        total=total,
        coloring_factor=coloring,
    )


def draw_snapshot(
    cov: CovarianceSet,
    hypothesis: str,
    target_gain: complex,
    steering: SteeringVector,
    rng: np.random.Generator,
) -> Snapshot:
    """Draw one snapshot: colored interference plus, under H1, the target.

    The interference is ``coloring_factor @ u`` with u standard circular
    complex Gaussian (real and imaginary parts each of variance 1/2).
    """
    if hypothesis not in ("H0", "H1"):
        raise ValueError(f"hypothesis must be 'H0' or 'H1', got {hypothesis!r}")
    dim = cov.dim
    u = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2.0)
    interference = cov.coloring_factor @ u
    if hypothesis == "H1":
        data = target_gain * steering.entries + interference
        gain = complex(target_gain)
    else:
        data = interference
        gain = 0.0 + 0.0j
    return Snapshot(data=data, hypothesis=hypothesis, target_gain=gain)


def draw_interference(
    cov: CovarianceSet, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``count`` target-free snapshots at once; rows are snapshots."""
    dim = cov.dim
    u = (
        rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    ) / np.sqrt(2.0)
    return u @ cov.coloring_factor.T
