"""Procedural multi-domain clip generator.

Real videos are smooth renders of drifting texture blobs behind a
centered elliptical face proxy. Fake videos start from the same render
and inject inter-frame inconsistencies on a localized patch of the face
region: brightness/contrast jumps, geometry jitter, or a mixture. Each
domain id stands for one generation method; unknown-method domains are
built only by mixing the artifact parameters of two or more known
domains plus a novel jitter term.

Everything is deterministic given (spec.seed, dataset seed, video_id).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError


class Family(enum.Enum):
    FACIAL_REENACTMENT = "facial_reenactment"
    IDENTITY_SWAP = "identity_swap"
    UNKNOWN = "unknown"


class Label(enum.IntEnum):
    REAL = 0
    FAKE = 1


@dataclass(frozen=True)
class ArtifactParams:
    """Magnitudes of the injected inter-frame inconsistencies."""

    patch_fraction: float = 0.25
    brightness_jump: float = 0.0
    contrast_jump: float = 0.0
    geometry_jitter: float = 0.0  # pixels
    temporal_rate: float = 0.5  # fraction of frame pairs carrying an inconsistency

    def validate(self) -> None:
        if not 0.0 < self.patch_fraction <= 1.0:
            raise DataError(f"patch_fraction must be in (0, 1], got {self.patch_fraction}")
        if not 0.0 <= self.temporal_rate <= 1.0:
            raise DataError(f"temporal_rate must be in [0, 1], got {self.temporal_rate}")
        for name in ("brightness_jump", "contrast_jump", "geometry_jitter"):
            if getattr(self, name) < 0:
                raise DataError(f"{name} must be non-negative")

    def is_degenerate(self) -> bool:
        mags = (self.brightness_jump, self.contrast_jump, self.geometry_jitter)
        return self.temporal_rate == 0.0 or all(m == 0.0 for m in mags)

    def blend(self, other: "ArtifactParams", lam: float) -> "ArtifactParams":
        mix = lambda a, b: lam * a + (1.0 - lam) * b
        return ArtifactParams(
            patch_fraction=mix(self.patch_fraction, other.patch_fraction),
            brightness_jump=mix(self.brightness_jump, other.brightness_jump),
            contrast_jump=mix(self.contrast_jump, other.contrast_jump),
            geometry_jitter=mix(self.geometry_jitter, other.geometry_jitter),
            temporal_rate=max(self.temporal_rate, other.temporal_rate),
        )


@dataclass(frozen=True)
class SceneStyle:
    """Real-video dynamics, varied per domain so detectors key on the
    domain's own notion of 'smooth'."""

    motion_speed: float = 0.30  # blob drift in px/frame
    flicker: float = 0.0  # global lighting oscillation amplitude
    texture_scale: float = 1.0


@dataclass(frozen=True)
class DomainSpec:
    id: str
    family: Family
    artifact: ArtifactParams
    seed: int
    style: SceneStyle = SceneStyle()
    # canonical face-relative patch anchor (dy, dx) in face-radius units;
    # each generation method marks its own region, jittered per video
    patch_anchor: tuple = None
    components: tuple = ()  # (ArtifactParams, anchor) of the mixed known domains
    novel_jitter: float = 0.0
    temporal_only: bool = False

    def __post_init__(self):
        self.artifact.validate()
        if self.family is Family.UNKNOWN and len(self.components) < 2:
            raise DataError("unknown-method domains must mix at least two known artifact parameter sets")
        if self.seed < 0:
            raise DataError("domain seed must be non-negative")


def make_unknown_domain(
    domain_id: str,
    parents: list,
    novel_jitter: float,
    seed: int,
    style: SceneStyle = SceneStyle(),
) -> DomainSpec:
    """Mixture domain standing in for fakes of unknown provenance."""
    if len(parents) < 2:
        raise DataError("need at least two parent domains to mix")
    for p in parents:
        if p.family is Family.UNKNOWN:
            raise DataError(f"parent {p.id!r} must come from a known family")
    return DomainSpec(
        id=domain_id,
        family=Family.UNKNOWN,
        artifact=parents[0].artifact,
        seed=seed,
        style=style,
        components=tuple((p.artifact, p.patch_anchor) for p in parents),
        novel_jitter=novel_jitter,
    )


def temporal_only_domain(domain_id: str, seed: int, style: SceneStyle = SceneStyle()) -> DomainSpec:
    """Control domain whose only fake signal is temporal.

    Fake videos are non-consecutive resamples of a smooth render, so
    every fake frame is individually a valid real frame and per-frame
    statistics match the real class exactly. This is an experimental
    extension, not one of the standard artifact domains.
    """
    return DomainSpec(
        id=domain_id,
        family=Family.IDENTITY_SWAP,
        artifact=ArtifactParams(temporal_rate=1.0),
        seed=seed,
        style=style,
        temporal_only=True,
    )


@dataclass
class VideoSample:
    frames: np.ndarray  # [T, H, W, 3] float32 in [0, 1]
    label: Label
    domain_id: str
    video_id: int


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple
    val: tuple
    test: tuple
    shots: tuple = ()


# ---------------------------------------------------------------------------
# rendering


def _video_rng(spec: DomainSpec, seed: int, video_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([spec.seed, seed, video_id]))


def render_real(rng: np.random.Generator, n_frames: int, size: int, style: SceneStyle):
    """Smooth procedural video plus the face-ellipse geometry used by the
    artifact injector. Returns (frames [T,H,W,3], face geometry dict)."""
    h = w = size
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)

    # background: per-channel gradient plus drifting blobs
    base = rng.uniform(0.25, 0.55, size=3)
    gx = rng.uniform(-0.25, 0.25, size=3)
    gy = rng.uniform(-0.25, 0.25, size=3)
    nb = 3
    b_pos = rng.uniform(0, size, size=(nb, 2))
    b_vel = rng.uniform(-1, 1, size=(nb, 2))
    b_vel *= style.motion_speed / np.maximum(1e-9, np.linalg.norm(b_vel, axis=1))[:, None]
    b_sig = rng.uniform(0.12, 0.30, size=nb) * size
    b_amp = rng.uniform(-0.20, 0.20, size=(nb, 3))

    # face proxy: soft ellipse with sinusoidal texture and dark feature blobs
    cy = h * (0.5 + rng.uniform(-0.03, 0.03))
    cx = w * (0.5 + rng.uniform(-0.03, 0.03))
    ry = h * rng.uniform(0.30, 0.38)
    rx = w * rng.uniform(0.26, 0.34)
    f_vel = rng.uniform(-1, 1, size=2)
    f_vel *= 0.3 * style.motion_speed / max(1e-9, np.linalg.norm(f_vel))
    skin = rng.uniform(0.45, 0.75, size=3)
    k1 = rng.uniform(0.2, 0.5, size=2) * style.texture_scale
    k2 = rng.uniform(0.5, 1.0, size=2) * style.texture_scale
    ph1, ph2 = rng.uniform(0, 2 * np.pi, size=2)
    om1, om2 = rng.uniform(0.05, 0.15, size=2)
    feat_off = np.array([[-0.35, -0.45], [-0.35, 0.45], [0.45, 0.0]])  # eyes, mouth
    feat_amp = np.array([-0.22, -0.22, -0.15])
    feat_sig = np.array([0.16, 0.16, 0.28])

    light_phase = rng.uniform(0, 2 * np.pi)
    light_period = rng.uniform(8, 16)

    frames = np.empty((n_frames, h, w, 3), dtype=np.float32)
    for t in range(n_frames):
        img = np.empty((h, w, 3))
        for c in range(3):
            img[:, :, c] = base[c] + gx[c] * xs / w + gy[c] * ys / h
        for k in range(nb):
            py, px = b_pos[k] + b_vel[k] * t
            g = np.exp(-((ys - py) ** 2 + (xs - px) ** 2) / (2 * b_sig[k] ** 2))
            img += g[:, :, None] * b_amp[k]

        fy, fx = cy + f_vel[0] * t, cx + f_vel[1] * t
        e = ((ys - fy) / ry) ** 2 + ((xs - fx) / rx) ** 2
        mask = 1.0 / (1.0 + np.exp(12.0 * (e - 1.0)))
        tex = (
            0.10 * np.sin(k1[0] * xs + k1[1] * ys + ph1 + om1 * t)
            + 0.07 * np.sin(k2[0] * xs + k2[1] * ys + ph2 + om2 * t)
        )
        face = np.empty((h, w, 3))
        for c in range(3):
            face[:, :, c] = skin[c] + tex
        for j in range(3):
            py = fy + feat_off[j, 0] * ry
            px = fx + feat_off[j, 1] * rx
            sig = feat_sig[j] * rx
            g = np.exp(-((ys - py) ** 2 + (xs - px) ** 2) / (2 * sig ** 2))
            face += (feat_amp[j] * g)[:, :, None]

        img = img * (1 - mask[:, :, None]) + face * mask[:, :, None]
        light = 1.0 + style.flicker * np.sin(2 * np.pi * t / light_period + light_phase)
        frames[t] = np.clip(img * light, 0.0, 1.0).astype(np.float32)

    geom = {"cy": cy, "cx": cx, "ry": ry, "rx": rx}
    return frames, geom


def _artifact_patch(rng, geom, size, params: ArtifactParams, family: Family, anchor=None):
    """Rectangle inside the face proxy.

    Each generation method marks a canonical face-relative region
    (anchor, jittered per video). Without an anchor, reenactment-family
    artifacts sit in the lower (mouth) region, swap-family anywhere on
    the face.
    """
    area = params.patch_fraction * (2 * geom["ry"]) * (2 * geom["rx"]) * 0.5
    aspect = rng.uniform(0.8, 1.25)
    ph = int(round(np.sqrt(area * aspect)))
    pw = int(round(np.sqrt(area / aspect)))
    ph, pw = max(2, min(ph, size - 2)), max(2, min(pw, size - 2))
    if anchor is not None:
        oy = anchor[0] + rng.uniform(-0.08, 0.08)
        ox = anchor[1] + rng.uniform(-0.08, 0.08)
    elif family is Family.FACIAL_REENACTMENT:
        oy = rng.uniform(0.15, 0.5)
        ox = rng.uniform(-0.4, 0.4)
    else:
        oy = rng.uniform(-0.5, 0.5)
        ox = rng.uniform(-0.4, 0.4)
    py = int(round(geom["cy"] + oy * geom["ry"] - ph / 2))
    px = int(round(geom["cx"] + ox * geom["rx"] - pw / 2))
    py = min(max(py, 1), size - ph - 1)
    px = min(max(px, 1), size - pw - 1)
    return py, px, ph, pw


def _flip_pairs(rng, n_frames: int, rate: float):
    """Indices t of frame pairs (t-1, t) that carry an inconsistency.

    Flips are spread at jittered regular intervals so every clip-length
    window of a fake video sees at least one when the rate is moderate.
    """
    n_pairs = n_frames - 1
    n_flips = max(1, int(round(rate * n_pairs)))
    n_flips = min(n_flips, n_pairs)
    spacing = n_pairs / n_flips
    flips = []
    for k in range(n_flips):
        base = (k + 0.5) * spacing
        t = int(round(base + rng.uniform(-0.4, 0.4) * spacing))
        flips.append(min(max(t, 1), n_frames - 1))
    return sorted(set(flips))


def inject_artifacts(
    frames: np.ndarray, params: ArtifactParams, rng, geom, family: Family, anchor=None
) -> np.ndarray:
    """Apply patch-local inconsistencies to a real rendering."""
    out = frames.copy()
    n_frames, size = frames.shape[0], frames.shape[1]
    py, px, ph, pw = _artifact_patch(rng, geom, size, params, family, anchor)
    flips = _flip_pairs(rng, n_frames, params.temporal_rate) if params.temporal_rate > 0 else []

    active = False
    seg = _draw_segment(rng, params, size, ph, pw)
    flipset = set(flips)
    for t in range(n_frames):
        if t in flipset:
            active = not active
            if active:
                seg = _draw_segment(rng, params, size, ph, pw)
        if not active:
            continue
        dy, dx, bsign, csign = seg
        sy = min(max(py + dy, 0), size - ph)
        sx = min(max(px + dx, 0), size - pw)
        patch = frames[t, sy:sy + ph, sx:sx + pw, :].copy()
        if params.brightness_jump > 0:
            patch = patch * (1.0 + bsign * params.brightness_jump)
        if params.contrast_jump > 0:
            m = patch.mean()
            factor = 1.0 + params.contrast_jump if csign > 0 else 1.0 / (1.0 + params.contrast_jump)
            patch = m + factor * (patch - m)
        out[t, py:py + ph, px:px + pw, :] = np.clip(patch, 0.0, 1.0)
    return out


def _draw_segment(rng, params: ArtifactParams, size: int, ph: int, pw: int):
    jit = int(np.ceil(params.geometry_jitter))
    dy = int(rng.integers(-jit, jit + 1)) if jit > 0 else 0
    dx = int(rng.integers(-jit, jit + 1)) if jit > 0 else 0
    if jit > 0 and dy == 0 and dx == 0:
        dy = jit  # a geometry event must actually move the patch
    bsign = 1.0 if rng.random() < 0.5 else -1.0
    csign = 1.0 if rng.random() < 0.5 else -1.0
    return dy, dx, bsign, csign


def _resample_indices(rng, n_frames: int, budget: int):
    gaps = rng.integers(2, 5, size=n_frames - 1)
    idx = np.concatenate([[0], np.cumsum(gaps)])
    if idx[-1] >= budget:
        idx = (idx * (budget - 1) // idx[-1]).astype(idx.dtype)
    return idx


def generate_video(spec: DomainSpec, seed: int, video_id: int, n_frames: int, size: int) -> VideoSample:
    """Videos come in twin pairs: the fake with id 2k+1 is a manipulated
    version of the real scene rendered for id 2k, mirroring how the
    benchmark corpora pair originals with their manipulations. Global
    appearance therefore carries no label information."""
    label = Label.FAKE if video_id % 2 else Label.REAL
    scene_id = video_id - (video_id % 2)
    scene_rng = _video_rng(spec, seed, scene_id)
    artifact_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, seed, video_id, 1]))

    if spec.temporal_only:
        budget = 3 * n_frames
        long_frames, _ = render_real(scene_rng, budget, size, spec.style)
        if label is Label.REAL:
            frames = long_frames[:n_frames].copy()
        else:
            idx = _resample_indices(artifact_rng, n_frames, budget)
            frames = long_frames[idx].copy()
        return VideoSample(frames, label, spec.id, video_id)

    frames, geom = render_real(scene_rng, n_frames, size, spec.style)
    if label is Label.FAKE:
        params, anchor = spec.artifact, spec.patch_anchor
        if spec.family is Family.UNKNOWN:
            i, j = artifact_rng.choice(len(spec.components), size=2, replace=False)
            lam = artifact_rng.uniform(0.25, 0.75)
            (pa, anchor_a), (pb, _) = spec.components[i], spec.components[j]
            params = pa.blend(pb, lam)
            params = replace(params, geometry_jitter=params.geometry_jitter + spec.novel_jitter)
            anchor = anchor_a
        frames = inject_artifacts(frames, params, artifact_rng, geom, spec.family, anchor)
    return VideoSample(frames, label, spec.id, video_id)


def generate_domain(spec: DomainSpec, n_videos: int, frames_per_video: int, seed: int, size: int = 32):
    """Half real, half fake; labels alternate with video id so contiguous
    id blocks stay balanced."""
    if n_videos % 2:
        raise DataError(f"n_videos must be even, got {n_videos}")
    if not spec.temporal_only and spec.artifact.is_degenerate() and spec.family is not Family.UNKNOWN:
        warnings.warn(f"domain {spec.id!r}: degenerate artifact parameters; fakes equal the real rendering")
    return [generate_video(spec, seed, vid, frames_per_video, size) for vid in range(n_videos)]


# ---------------------------------------------------------------------------
# clips, splits, augmentation


def sample_clips(video: VideoSample, clips_per_video: int = 16, clip_len: int = 5) -> list:
    """Consecutive-frame windows with evenly spaced, strictly increasing starts."""
    n = video.frames.shape[0]
    if clips_per_video < 1:
        raise DataError("clips_per_video must be >= 1")
    if n < clip_len or n - clip_len + 1 < clips_per_video:
        raise DataError(
            f"video {video.video_id} too short: {n} frames cannot yield "
            f"{clips_per_video} distinct windows of {clip_len}"
        )
    if clips_per_video == 1:
        starts = np.array([0])
    else:
        starts = np.round(np.linspace(0, n - clip_len, clips_per_video)).astype(int)
    return [video.frames[s:s + clip_len] for s in starts]


def make_splits(n_videos: int, ratios=(750, 125, 125), shots: int = 10) -> DatasetSplit:
    """Contiguous-by-id split: first block train, then val, rest test.

    Ratios are normalized to n_videos; shot videos for transfer learning
    come from the front of the train block.
    """
    if n_videos < 8:
        raise DataError(f"need at least 8 videos to split, got {n_videos}")
    total = sum(ratios)
    n_train = max(1, int(n_videos * ratios[0] // total))
    n_val = max(1, int(n_videos * ratios[1] // total))
    if n_train + n_val >= n_videos:
        raise DataError(f"ratios {ratios} leave no test videos for n={n_videos}")
    train = tuple(range(0, n_train))
    val = tuple(range(n_train, n_train + n_val))
    test = tuple(range(n_train + n_val, n_videos))
    if shots > n_train:
        raise DataError(f"shots={shots} exceeds the train block ({n_train})")
    return DatasetSplit(train=train, val=val, test=test, shots=train[:shots])


@dataclass(frozen=True)
class AugmentConfig:
    brightness: float = 0.30  # multiplicative, +/-
    channel_shift: float = 50.0 / 255.0  # additive per channel, +/-
    zoom: float = 0.20  # +/-
    rotation: float = 30.0  # degrees, +/-
    hflip_prob: float = 0.5


def augment(clip: np.ndarray, config: AugmentConfig, rng: np.random.Generator) -> np.ndarray:
    """One shared random draw per clip; every frame gets the same transform
    so the temporal signal survives. Output is clamped to [0, 1]."""
    theta = np.deg2rad(rng.uniform(-config.rotation, config.rotation)) if config.rotation else 0.0
    scale = 1.0 + (rng.uniform(-config.zoom, config.zoom) if config.zoom else 0.0)
    flip = rng.random() < config.hflip_prob
    bright = 1.0 + (rng.uniform(-config.brightness, config.brightness) if config.brightness else 0.0)
    shift = (
        rng.uniform(-config.channel_shift, config.channel_shift, size=3)
        if config.channel_shift
        else np.zeros(3)
    )

    out = clip.astype(np.float32)
    if theta != 0.0 or scale != 1.0:
        out = _affine_nearest(out, theta, scale)
    if flip:
        out = out[:, :, ::-1, :]
    out = out * bright + shift.astype(np.float32)
    return np.clip(out, 0.0, 1.0)


def _affine_nearest(clip: np.ndarray, theta: float, scale: float) -> np.ndarray:
    """Rotate/zoom about the frame center with nearest-neighbor sampling
    and edge clamping. Identity parameters reproduce the input exactly."""
    t, h, w, c = clip.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    # inverse map: output pixel -> source pixel
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    dy, dx = ys - cy, xs - cx
    sy = (cos_t * dy - sin_t * dx) / scale + cy
    sx = (sin_t * dy + cos_t * dx) / scale + cx
    iy = np.clip(np.rint(sy).astype(int), 0, h - 1)
    ix = np.clip(np.rint(sx).astype(int), 0, w - 1)
    return clip[:, iy, ix, :]


# ---------------------------------------------------------------------------
# dataset container


class DomainDataset:
    """One domain's videos plus split bookkeeping and clip extraction."""

    def __init__(self, spec: DomainSpec, videos: list, split: DatasetSplit, clips_per_video: int, clip_len: int):
        self.spec = spec
        self.videos = videos
        self.split = split
        self.clips_per_video = clips_per_video
        self.clip_len = clip_len

    @classmethod
    def generate(
        cls,
        spec: DomainSpec,
        n_videos: int,
        frames_per_video: int,
        seed: int,
        size: int = 32,
        clips_per_video: int = 16,
        clip_len: int = 5,
        ratios=(750, 125, 125),
        shots: int = 10,
    ) -> "DomainDataset":
        videos = generate_domain(spec, n_videos, frames_per_video, seed, size)
        split = make_splits(n_videos, ratios=ratios, shots=shots)
        return cls(spec, videos, split, clips_per_video, clip_len)

    @property
    def id(self) -> str:
        return self.spec.id

    def clips_for(self, video_ids) -> tuple:
        """(clips [M, T, H, W, 3], labels [M], video_ids [M]) for the given videos."""
        clips, labels, vids = [], [], []
        for vid in video_ids:
            video = self.videos[vid]
            for clip in sample_clips(video, self.clips_per_video, self.clip_len):
                clips.append(clip)
                labels.append(float(video.label))
                vids.append(vid)
        return np.stack(clips), np.asarray(labels, dtype=np.float32), np.asarray(vids)

    def train_clips(self):
        return self.clips_for(self.split.train)

    def val_clips(self):
        return self.clips_for(self.split.val)

    def test_clips(self):
        return self.clips_for(self.split.test)

    def shot_clips(self, shots: int):
        pool = self.split.shots
        if shots > len(pool):
            raise DataError(f"shots={shots} exceeds the domain's shot pool ({len(pool)})")
        return self.clips_for(pool[:shots])


# ---------------------------------------------------------------------------
# benchmark presets


def default_domain_specs() -> list:
    """Five known-method domains (two facial-reenactment, three identity-swap)
    plus one unknown mixture domain.

    Each method has its own artifact type, canonical face region, and
    real-video dynamics, so single-domain detectors key on domain-local
    cues and transfer poorly across methods.
    """
    fr_a = DomainSpec(
        "fr_glow",
        Family.FACIAL_REENACTMENT,
        ArtifactParams(patch_fraction=0.25, brightness_jump=0.70, temporal_rate=0.60),
        seed=101,
        style=SceneStyle(motion_speed=0.25),
        patch_anchor=(0.0, 0.0),  # nose/center
    )
    fr_b = DomainSpec(
        "fr_warp",
        Family.FACIAL_REENACTMENT,
        ArtifactParams(patch_fraction=0.28, geometry_jitter=2.5, temporal_rate=0.55),
        seed=102,
        style=SceneStyle(motion_speed=0.35, texture_scale=1.4),
        patch_anchor=(0.45, 0.0),  # mouth
    )
    is_a = DomainSpec(
        "is_flash",
        Family.IDENTITY_SWAP,
        ArtifactParams(patch_fraction=0.35, contrast_jump=1.3, temporal_rate=0.50),
        seed=103,
        style=SceneStyle(motion_speed=0.45, flicker=0.02),
        patch_anchor=(-0.05, -0.40),  # left cheek
    )
    is_b = DomainSpec(
        "is_shear",
        Family.IDENTITY_SWAP,
        ArtifactParams(patch_fraction=0.30, brightness_jump=0.35, geometry_jitter=1.5, temporal_rate=0.45),
        seed=104,
        style=SceneStyle(motion_speed=0.55, texture_scale=0.7),
        patch_anchor=(-0.45, 0.05),  # forehead
    )
    is_c = DomainSpec(
        "is_tint",
        Family.IDENTITY_SWAP,
        ArtifactParams(patch_fraction=0.28, brightness_jump=0.35, contrast_jump=0.70, temporal_rate=0.60),
        seed=105,
        style=SceneStyle(motion_speed=0.30, flicker=0.03),
        patch_anchor=(-0.05, 0.40),  # right cheek
    )
    wild = make_unknown_domain(
        "wild_mix",
        [fr_a, is_a, is_b],
        novel_jitter=1.0,
        seed=106,
        style=SceneStyle(motion_speed=0.40, flicker=0.01),
    )
    return [fr_a, fr_b, is_a, is_b, is_c, wild]


def max_interframe_delta(frames: np.ndarray) -> float:
    """Largest mean absolute per-pixel change between consecutive frames."""
    if frames.shape[0] < 2:
        return 0.0
    deltas = np.abs(np.diff(frames.astype(np.float64), axis=0)).mean(axis=(1, 2, 3))
    return float(deltas.max())


def delta_threshold_accuracy(videos: list) -> float:
    """Best accuracy of a single threshold on max_interframe_delta.

    Used to certify that the temporal signal alone separates the labels.
    """
    stats = np.array([max_interframe_delta(v.frames) for v in videos])
    labels = np.array([int(v.label) for v in videos])
    order = np.argsort(stats)
    best = max(labels.mean(), 1 - labels.mean())
    for cut in (stats[order][1:] + stats[order][:-1]) / 2.0:
        pred = (stats > cut).astype(int)
        best = max(best, float((pred == labels).mean()))
    return float(best)
