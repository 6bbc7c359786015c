"""Quantum-jump unraveling and trajectory-level entropy production.

Two samplers share one record type:

* ``ExactJumpSampler`` -- for models whose jump operators map a common
  eigenbasis of ``H`` and ``rho_ss`` onto itself (the diamond machine). The
  unraveling is then a continuous-time Markov chain and is sampled exactly by
  competing exponential waiting times.
* ``KrausSampler`` -- first-order Kraus stepping with a fixed ``dt`` for any
  model. Entropy is accumulated from the literal forward/reverse step
  probabilities.

Inverse temperatures are dimensionless (units of ``1/omega0``). Reversed
jump operators are ``sqrt(w) K^+ sqrt(w)^-1`` with ``w = exp(-beta H/omega0)``;
``w`` is never normalized, so negative ``beta`` is fine. The reverse protocol
starts from the steady-state weights, so the boundary term averages to zero.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import (
    BoundaryWeightError,
    InconsistentEnsembleError,
    MissingBetaError,
    NonFiniteBetaError,
    TimestepError,
)
from .lindblad import ABSORPTION, EMISSION, NEUTRAL

__all__ = [
    "KrausSet",
    "JumpEvent",
    "TrajectoryRecord",
    "EnsembleStats",
    "kraus_set",
    "reversed_kraus",
    "infer_betas",
    "ExactJumpSampler",
    "KrausSampler",
    "sample_trajectory",
    "stochastic_entropy",
    "ensemble_estimators",
    "run_ensemble",
    "trajectory_seed",
    "write_trajectory_dump",
    "read_trajectory_dump",
    "MAX_RATE_DT",
]

MAX_RATE_DT = 0.05
_BASIS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausSet:
    dt: float
    no_jump: np.ndarray
    jumps: tuple  # (label, direction, K)
    completeness_defect: float
    reversed_no_jump: np.ndarray | None = None
    reversed: tuple | None = None  # K-tilde aligned with ``jumps``


@dataclass(frozen=True)
class JumpEvent:
    time: float
    label: str
    direction: str
    dQ: float


@dataclass
class TrajectoryRecord:
    t0: float
    tN: float
    initial_index: int
    final_index: int
    events: tuple = ()
    dS_boundary: float = 0.0
    dS_conditional: float = 0.0
    dS_total: float = 0.0
    jump_counts: dict = field(default_factory=dict)
    method: str = "exact"

    @property
    def duration(self):
        return self.tN - self.t0


@dataclass(frozen=True)
class EnsembleStats:
    n: int
    duration: float
    mean_dS: float
    se_dS: float
    mean_exp_neg_dS: float
    se_exp_neg_dS: float
    rate_estimate: float
    se_rate: float
    mean_dS_boundary: float = 0.0
    mean_dS_conditional: float = 0.0
    mean_jump_counts: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# Kraus operators


def kraus_set(sys, dt):
    """First-order Kraus operators of ``sys`` for a time step ``dt``."""
    dt = float(dt)
    if not dt > 0:
        raise TimestepError("dt must be positive")
    if dt * sys.max_rate >= MAX_RATE_DT:
        raise TimestepError(
            f"dt * max_rate = {dt * sys.max_rate:.3g} >= {MAX_RATE_DT}; first-order unraveling invalid"
        )
    d = sys.dimension
    eye = np.eye(d)
    heff = sys.hamiltonian.astype(complex)
    jumps = []
    for ch in sys.channels:
        heff = heff - 0.5j * ch.rate * ch.jump.conj().T @ ch.jump
        if ch.rate > 0:
            jumps.append((ch.label, ch.direction, math.sqrt(ch.rate * dt) * ch.jump))
    k0 = eye - 1j * dt * heff
    total = k0.conj().T @ k0 + sum((k.conj().T @ k for _, _, k in jumps), np.zeros((d, d)))
    defect = float(np.linalg.norm(total - eye))
    return KrausSet(dt=dt, no_jump=k0, jumps=tuple(jumps), completeness_defect=defect)


def _sqrt_weight(h, beta, omega0):
    """``exp(-beta H / (2 omega0))`` and its inverse, shifted to the mean energy."""
    w, v = np.linalg.eigh(h)
    e = (w - w.mean()) / omega0
    return (v * np.exp(-0.5 * beta * e)) @ v.conj().T, (v * np.exp(0.5 * beta * e)) @ v.conj().T


def _beta_for(betas, label, direction):
    if label in betas:
        b = float(betas[label])
    elif direction == NEUTRAL:
        b = 0.0
    else:
        raise MissingBetaError(f"no beta for bath {label!r}")
    return b


def reversed_kraus(kraus, betas, h, omega0=1.0):
    """Attach reversed operators ``K~ = sqrt(w) K^+ sqrt(w)^-1`` and ``K~0 = K0^+``.

    ``K^+`` is proportional to the opposite jump of the same bath; using the
    adjoint of the forward operator gives the forward/reverse probability
    ratio ``exp(-beta dQ / omega0)`` for every jump between energy levels.
    """
    rev = []
    for label, direction, k in kraus.jumps:
        b = _beta_for(betas, label, direction)
        if not math.isfinite(b):
            raise NonFiniteBetaError(f"bath {label!r} has beta={b}; reversed operator undefined")
        sq, sq_inv = _sqrt_weight(h, b, omega0)
        rev.append(sq @ k.conj().T @ sq_inv)
    return KrausSet(
        dt=kraus.dt,
        no_jump=kraus.no_jump,
        jumps=kraus.jumps,
        completeness_defect=kraus.completeness_defect,
        reversed_no_jump=kraus.no_jump.conj().T,
        reversed=tuple(rev),
    )


def infer_betas(sys):
    """Effective ``beta = ln(rate_emission / rate_absorption)`` for each bath label.

    Only labels with both an emission and an absorption channel whose jump
    operators are mutually adjoint are included.
    """
    out = {}
    for label in sys.labels:
        chans = sys.channels_for(label)
        em = [c for c in chans if c.direction == EMISSION]
        ab = [c for c in chans if c.direction == ABSORPTION]
        if len(em) != 1 or len(ab) != 1:
            continue
        if not np.allclose(em[0].jump, ab[0].jump.conj().T, atol=1e-12):
            continue
        ge, ga = em[0].rate, ab[0].rate
        if ga == 0:
            out[label] = math.inf
        elif ge == 0:
            out[label] = -math.inf
        else:
            out[label] = math.log(ge / ga)
    return out


def _jump_entropy(beta, dq, omega0):
    if dq == 0.0:
        return 0.0
    return -beta * dq / omega0


def trajectory_seed(base_seed, index):
    """Independent RNG stream for trajectory ``index`` of an ensemble."""
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(index),))


def _rng(seed):
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


# --------------------------------------------------------------------------
# exact sampler


def _common_basis(rho, h, channels):
    """Orthonormal basis diagonalizing ``rho``, ``H`` and every ``L^+ L``."""
    d = rho.shape[0]
    m = rho.astype(complex).copy()
    hn = np.linalg.norm(h)
    if hn > 0:
        m = m + (math.sqrt(2) / 7) * h / hn
    for k, ch in enumerate(channels):
        a = ch.jump.conj().T @ ch.jump
        an = np.linalg.norm(a)
        if an > 0:
            m = m + (math.sqrt(3 + k) / (11 + 3 * k)) * a / an
    _, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return v if v.shape == (d, d) else None


def _offdiag(a):
    return float(np.max(np.abs(a - np.diag(np.diag(a))), initial=0.0))


class ExactJumpSampler:
    """Continuous-time Markov jump sampler for jump-diagonal models.

    Raises ``ValueError`` at construction when no common eigenbasis of
    ``H``, ``rho_ss`` and the jump operators exists.
    """

    method = "exact"

    def __init__(self, sys, steady, betas=None, omega0=1.0):
        rho = getattr(steady, "rho", steady)
        self.omega0 = float(omega0)
        self.betas = dict(infer_betas(sys) if betas is None else betas)
        channels = [ch for ch in sys.channels if ch.rate > 0]
        v = _common_basis(rho, sys.hamiltonian, channels)
        scale = max(1.0, float(np.max(np.abs(sys.hamiltonian))))
        rb = v.conj().T @ rho @ v
        hb = v.conj().T @ sys.hamiltonian @ v
        if _offdiag(rb) > _BASIS_TOL or _offdiag(hb) > _BASIS_TOL * scale:
            raise ValueError("H and rho_ss share no eigenbasis; use KrausSampler")
        for ch in channels:
            a = v.conj().T @ (ch.jump.conj().T @ ch.jump) @ v
            if _offdiag(a) > _BASIS_TOL * max(1.0, float(np.max(np.abs(a)))):
                raise ValueError(f"channel {ch.label!r} mixes basis states; use KrausSampler")
        d = rho.shape[0]
        self.basis = v
        self.energies = np.diag(hb).real.copy()
        w = np.clip(np.diag(rb).real, 0.0, None)
        self.weights = w / w.sum()
        self._cum_weights = np.cumsum(self.weights)
        self.labels = [ch.label for ch in channels]
        self.directions = [ch.direction for ch in channels]
        # per source state: cumulative rates, targets, channel index, dQ, dS
        table = [[] for _ in range(d)]
        for k, ch in enumerate(channels):
            lb = v.conj().T @ ch.jump @ v
            amp2 = np.abs(lb) ** 2
            tol = 1e-20 * max(1.0, amp2.max())
            beta = _beta_for(self.betas, ch.label, ch.direction)
            for i in range(d):
                nz = np.nonzero(amp2[:, i] > tol)[0]
                if len(nz) > 1:
                    raise ValueError(f"channel {ch.label!r} is not jump-diagonal; use KrausSampler")
                if len(nz) == 1:
                    j = int(nz[0])
                    dq = float(self.energies[j] - self.energies[i])
                    table[i].append((ch.rate * float(amp2[j, i]), j, k, dq, _jump_entropy(beta, dq, self.omega0)))
        self._escape = []
        self._cum = []
        self._moves = []
        for i in range(d):
            rates = [t[0] for t in table[i]]
            self._escape.append(math.fsum(rates))
            self._cum.append(list(np.cumsum(rates)))
            self._moves.append([t[1:] for t in table[i]])

    def _draw_initial(self, rng):
        i = int(np.searchsorted(self._cum_weights, rng.random() * self._cum_weights[-1], side="right"))
        return min(i, len(self.weights) - 1)

    def sample(self, duration, seed, t0=0.0, keep_events=True):
        rng = _rng(seed)
        i0 = self._draw_initial(rng)
        i = i0
        t = float(t0)
        tn = float(t0) + float(duration)
        events = []
        counts = {}
        ds_cond = 0.0
        buf = rng.random(64)
        pos = 0
        while True:
            lam = self._escape[i]
            if lam <= 0.0:
                break
            if pos + 2 > len(buf):
                buf = rng.random(256)
                pos = 0
            u1, u2 = buf[pos], buf[pos + 1]
            pos += 2
            t += -math.log1p(-u1) / lam
            if t > tn:
                break
            cum = self._cum[i]
            x = u2 * lam
            n = 0
            while n < len(cum) - 1 and cum[n] <= x:
                n += 1
            j, k, dq, ds = self._moves[i][n]
            ds_cond += ds
            key = (self.labels[k], self.directions[k])
            counts[key] = counts.get(key, 0) + 1
            if keep_events:
                events.append(JumpEvent(t, self.labels[k], self.directions[k], dq))
            i = j
        ds_b = _boundary(self.weights, i0, i)
        return TrajectoryRecord(
            t0=float(t0),
            tN=tn,
            initial_index=i0,
            final_index=i,
            events=tuple(events),
            dS_boundary=ds_b,
            dS_conditional=ds_cond,
            dS_total=ds_b + ds_cond,
            jump_counts=counts,
            method=self.method,
        )


def _boundary(weights, i0, i_n):
    p0, pn = weights[i0], weights[i_n]
    if pn <= 0.0 or p0 <= 0.0:
        raise BoundaryWeightError(f"zero steady-state weight at index {i0 if p0 <= 0 else i_n}")
    return float(math.log(p0) - math.log(pn))


# --------------------------------------------------------------------------
# fixed-dt sampler


class KrausSampler:
    """Fixed-``dt`` Kraus stepping on pure states, for any model.

    Trajectories start in an eigenvector of ``rho_ss`` drawn with its
    eigenvalue as probability. The boundary term uses
    ``<psi_N| rho_ss |psi_N>`` as reverse-protocol weight; ``final_index`` is
    the steady-state eigenvector with the largest overlap.
    """

    method = "kraus"

    def __init__(self, sys, steady, dt, betas=None, omega0=1.0):
        rho = getattr(steady, "rho", steady)
        self.omega0 = float(omega0)
        self.betas = dict(infer_betas(sys) if betas is None else betas)
        ks = reversed_kraus(kraus_set(sys, dt), self.betas, sys.hamiltonian, omega0)
        self.kraus = ks
        self.dt = ks.dt
        self.rho = rho
        self.hamiltonian = sys.hamiltonian
        w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        w = np.clip(w, 0.0, None)
        self.weights = w / w.sum()
        self.eigvecs = v
        self._cum_weights = np.cumsum(self.weights)
        self.ops = np.stack([ks.no_jump] + [k for _, _, k in ks.jumps])
        self.rev_ops = np.stack([ks.reversed_no_jump] + list(ks.reversed))
        self.labels = [None] + [lb for lb, _, _ in ks.jumps]
        self.directions = [None] + [dr for _, dr, _ in ks.jumps]

    def sample(self, duration, seed, t0=0.0, keep_events=True):
        return self.sample_batch(duration, [seed], t0=t0, keep_events=keep_events)[0]

    def sample_batch(self, duration, seeds, t0=0.0, keep_events=True):
        """Run one trajectory per seed in lockstep; results match ``sample``."""
        n_steps = int(math.floor(float(duration) / self.dt + 1e-9))
        b = len(seeds)
        rngs = [_rng(s) for s in seeds]
        init = np.array(
            [min(int(np.searchsorted(self._cum_weights, r.random() * self._cum_weights[-1], side="right")),
                 len(self.weights) - 1) for r in rngs]
        )
        u = np.stack([r.random(n_steps) for r in rngs]) if n_steps else np.zeros((b, 0))
        psi = self.eigvecs[:, init].T.astype(complex)  # (b, d)
        ds_cond = np.zeros(b)
        e_prev = np.einsum("bi,ij,bj->b", psi.conj(), self.hamiltonian, psi).real
        events = [[] for _ in range(b)]
        counts = [{} for _ in range(b)]
        rows = np.arange(b)
        for step in range(n_steps):
            out = np.einsum("kij,bj->kbi", self.ops, psi)
            p = np.einsum("kbi,kbi->kb", out.conj(), out).real
            p_tot = p.sum(axis=0)
            cum = np.cumsum(p, axis=0) / p_tot
            choice = np.minimum((cum < u[:, step][None, :]).sum(axis=0), len(self.ops) - 1)
            new = out[choice, rows]
            pf = p[choice, rows] / p_tot
            new = new / np.sqrt(p[choice, rows])[:, None]
            rev = np.einsum("bij,bj->bi", self.rev_ops[choice], new)
            pr = np.einsum("bi,bi->b", rev.conj(), rev).real
            ds_cond += np.log(pf) - np.log(pr)
            psi = new
            jumped = np.nonzero(choice > 0)[0]
            if len(jumped):
                e_new = np.einsum("bi,ij,bj->b", psi[jumped].conj(), self.hamiltonian, psi[jumped]).real
                for idx, jb in enumerate(jumped):
                    k = int(choice[jb])
                    key = (self.labels[k], self.directions[k])
                    counts[jb][key] = counts[jb].get(key, 0) + 1
                    if keep_events:
                        t = t0 + (step + 1) * self.dt
                        events[jb].append(JumpEvent(t, self.labels[k], self.directions[k],
                                                    float(e_new[idx] - e_prev[jb])))
                e_prev[jumped] = e_new
        records = []
        for n in range(b):
            overlaps = np.abs(self.eigvecs.conj().T @ psi[n]) ** 2
            fin = int(np.argmax(overlaps))
            p_rev = float(np.real(psi[n].conj() @ self.rho @ psi[n]))
            p0 = float(self.weights[init[n]])
            if p_rev <= 0.0 or p0 <= 0.0:
                raise BoundaryWeightError("zero steady-state weight at a trajectory boundary")
            ds_b = math.log(p0) - math.log(p_rev)
            records.append(
                TrajectoryRecord(
                    t0=float(t0),
                    tN=float(t0) + float(duration),
                    initial_index=int(init[n]),
                    final_index=fin,
                    events=tuple(events[n]),
                    dS_boundary=ds_b,
                    dS_conditional=float(ds_cond[n]),
                    dS_total=ds_b + float(ds_cond[n]),
                    jump_counts=counts[n],
                    method=self.method,
                )
            )
        return records


def sample_trajectory(sys, rho_ss, duration, seed, betas=None, omega0=1.0, dt=None, method="auto"):
    """Sample one trajectory of ``sys`` started from its steady state.

    ``method="auto"`` uses the exact jump sampler when the model is
    jump-diagonal and otherwise Kraus stepping with ``dt`` (default
    ``1e-3 / max_rate``).
    """
    if method in ("auto", "exact"):
        try:
            return ExactJumpSampler(sys, rho_ss, betas, omega0).sample(duration, seed)
        except ValueError:
            if method == "exact":
                raise
    if dt is None:
        dt = 1e-3 / max(sys.max_rate, 1e-300)
    return KrausSampler(sys, rho_ss, dt, betas, omega0).sample(duration, seed)


def stochastic_entropy(record, pss_weights, betas, omega0=1.0):
    """Boundary plus conditional entropy of a jump-diagonal trajectory.

    Stores both terms on ``record`` and returns their sum.
    """
    if not record.events and record.jump_counts:
        raise ValueError("record was sampled without events; entropy cannot be recomputed")
    ds_b = _boundary(np.asarray(pss_weights, dtype=float), record.initial_index, record.final_index)
    ds_c = 0.0
    for ev in record.events:
        ds_c += _jump_entropy(_beta_for(betas, ev.label, ev.direction), ev.dQ, omega0)
    record.dS_boundary = ds_b
    record.dS_conditional = ds_c
    record.dS_total = ds_b + ds_c
    return record.dS_total


# --------------------------------------------------------------------------
# ensembles


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def ensemble_estimators(records):
    """Second-law and fluctuation-theorem estimators over independent records."""
    records = list(records)
    if len(records) < 2:
        raise InconsistentEnsembleError("need at least two trajectories")
    t0, tn = records[0].t0, records[0].tN
    if any(r.t0 != t0 or r.tN != tn for r in records):
        raise InconsistentEnsembleError("records span different time windows")
    if len({r.method for r in records}) > 1:
        raise InconsistentEnsembleError("records come from different samplers")
    ds = np.array([r.dS_total for r in records])
    m, se = _mean_se(ds)
    me, see = _mean_se(np.exp(-ds))
    keys = sorted({k for r in records for k in r.jump_counts}, key=str)
    mean_counts = {k: float(np.mean([r.jump_counts.get(k, 0) for r in records])) for k in keys}
    dur = tn - t0
    return EnsembleStats(
        n=len(records),
        duration=dur,
        mean_dS=m,
        se_dS=se,
        mean_exp_neg_dS=me,
        se_exp_neg_dS=see,
        rate_estimate=m / dur if dur > 0 else 0.0,
        se_rate=se / dur if dur > 0 else 0.0,
        mean_dS_boundary=float(np.mean([r.dS_boundary for r in records])),
        mean_dS_conditional=float(np.mean([r.dS_conditional for r in records])),
        mean_jump_counts=mean_counts,
    )


def _run_chunk(args):
    sampler, duration, base_seed, indices, keep_events = args
    seeds = [trajectory_seed(base_seed, i) for i in indices]
    if isinstance(sampler, KrausSampler):
        return sampler.sample_batch(duration, seeds, keep_events=keep_events)
    return [sampler.sample(duration, s, keep_events=keep_events) for s in seeds]


def run_ensemble(sampler, duration, n, base_seed=0, workers=1, keep_events=False, chunk=512):
    """Sample ``n`` trajectories; record ``i`` depends only on ``(base_seed, i)``.

    Output order is the trajectory index regardless of ``workers``.
    """
    chunks = [list(range(a, min(a + chunk, n))) for a in range(0, n, chunk)]
    tasks = [(sampler, duration, base_seed, c, keep_events) for c in chunks]
    if workers and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    return [r for part in parts for r in part]


# --------------------------------------------------------------------------
# dump format

_DUMP_FIELDS = ["kind", "trajectory", "time", "label", "direction", "dQ", "dS_boundary", "dS_conditional"]


def write_trajectory_dump(records, fh):
    """Write one ``event`` row per jump and one ``summary`` row per trajectory."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(_DUMP_FIELDS)
    for n, r in enumerate(records):
        for ev in r.events:
            w.writerow(["event", n, repr(ev.time), ev.label, ev.direction, repr(ev.dQ), "", ""])
        w.writerow(["summary", n, "", "", "", "", repr(r.dS_boundary), repr(r.dS_conditional)])


def read_trajectory_dump(fh):
    """Parse a dump into ``{trajectory: {"events": [...], "dS_boundary", "dS_conditional"}}``."""
    out = {}
    for row in csv.DictReader(fh):
        n = int(row["trajectory"])
        entry = out.setdefault(n, {"events": []})
        if row["kind"] == "event":
            entry["events"].append(
                JumpEvent(float(row["time"]), row["label"], row["direction"], float(row["dQ"]))
            )
        elif row["kind"] == "summary":
            entry["dS_boundary"] = float(row["dS_boundary"])
            entry["dS_conditional"] = float(row["dS_conditional"])
        else:
            raise ValueError(f"unknown dump row kind {row['kind']!r}")
    return out
