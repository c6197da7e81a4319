"""Preference-alignment mathematics: segmented reward, GAE, PPO-CLIP losses.

The reward is sparse: zero at every decoding step except end-of-sequence,
where it is the token-F1 improvement of the answer produced from refined
context over the answer produced from the original context. Advantages come
from Generalized Advantage Estimation; the policy objective is the clipped
probability-ratio surrogate. ``train_toy_policy`` exercises the whole stack
on a tabular contextual bandit.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, NegativeEntropy, NonFinite, PreconditionViolation
from .metrics import token_f1


@dataclass(frozen=True)
class PpoConfig:
    epsilon: float = 0.2
    gamma: float = 1.0
    lambda_gae: float = 0.95
    entropy_coef: float = 0.01
    value_coef: float = 1.0

    def __post_init__(self):
        if not (0 < self.epsilon < 1):
            raise PreconditionViolation("epsilon must be in (0, 1)")
        if not (0 < self.gamma <= 1) or not (0 < self.lambda_gae <= 1):
            raise PreconditionViolation("gamma and lambda_gae must be in (0, 1]")


@dataclass(frozen=True)
class RewardInputs:
    a_pred: str
    a_ori: str
    golden: tuple[str, ...]

    def __post_init__(self):
        if not self.golden:
            raise PreconditionViolation("golden answers must be non-empty")


@dataclass
class Trajectory:
    """One decoding episode: T rewards/ratios/entropies, T+1 value estimates.

    Rewards are end-of-sequence only: every entry before the last must be 0.
    """

    rewards: list[float]
    values: list[float]
    ratios: list[float] = field(default_factory=list)
    entropies: list[float] = field(default_factory=list)

    def __post_init__(self):
        T = len(self.rewards)
        if T == 0:
            raise PreconditionViolation("trajectory must have at least one step")
        if len(self.values) != T + 1:
            raise LengthMismatch(f"need {T + 1} values for {T} rewards, got {len(self.values)}")
        if not self.ratios:
            self.ratios = [1.0] * T
        if not self.entropies:
            self.entropies = [0.0] * T
        if len(self.ratios) != T or len(self.entropies) != T:
            raise LengthMismatch("ratios and entropies must have one entry per step")
        if any(r != 0.0 for r in self.rewards[:-1]):
            raise PreconditionViolation("reward must be zero before end of sequence")

    @property
    def length(self) -> int:
        return len(self.rewards)


def step_reward(inputs: RewardInputs, is_eof: bool) -> float:
    """0 before end-of-sequence; at EOF, F1(a_pred) - F1(a_ori) against golds."""
    if not is_eof:
        return 0.0
    return token_f1(inputs.a_pred, inputs.golden) - token_f1(inputs.a_ori, inputs.golden)


def compute_gae(traj: Trajectory, cfg: PpoConfig) -> list[float]:
    """Backward-recursion GAE: A_t = delta_t + gamma * lambda * A_{t+1}."""
    T = traj.length
    advantages = [0.0] * T
    next_adv = 0.0
    for t in range(T - 1, -1, -1):
        delta = traj.rewards[t] + cfg.gamma * traj.values[t + 1] - traj.values[t]
        next_adv = delta + cfg.gamma * cfg.lambda_gae * next_adv
        advantages[t] = next_adv
    return advantages


def ppo_clip_loss(ratios: Sequence[float], advantages: Sequence[float], cfg: PpoConfig) -> float:
    """Mean clipped surrogate objective (to be maximized)."""
    if len(ratios) != len(advantages):
        raise LengthMismatch("ratios and advantages must have equal length")
    if not ratios:
        raise PreconditionViolation("need at least one step")
    lo, hi = 1.0 - cfg.epsilon, 1.0 + cfg.epsilon
    total = 0.0
    for r, adv in zip(ratios, advantages):
        clipped = min(max(r, lo), hi)
        total += min(r * adv, clipped * adv)
    return total / len(ratios)


def value_loss(values_pred: Sequence[float], returns: Sequence[float]) -> float:
    """Mean squared error between predicted and target returns."""
    if len(values_pred) != len(returns):
        raise LengthMismatch("values and returns must have equal length")
    if not values_pred:
        raise PreconditionViolation("need at least one step")
    return sum((v - r) ** 2 for v, r in zip(values_pred, returns)) / len(values_pred)


def value_targets(traj: Trajectory, advantages: Sequence[float], mode: str = "gae_return") -> list[float]:
    """Critic regression targets.

    ``gae_return`` fits V to the advantage-corrected return A_t + V(s_t);
    ``reward`` fits V to the raw per-step reward, which with an
    end-of-sequence-only reward is degenerate at intermediate steps but is
    kept selectable as the literal formulation.
    """
    if mode == "gae_return":
        return [adv + v for adv, v in zip(advantages, traj.values[:-1])]
    if mode == "reward":
        return list(traj.rewards)
    raise PreconditionViolation(f"unknown value-target mode {mode!r}")


def entropy_bonus(entropies: Sequence[float]) -> float:
    """Mean policy entropy; rejects negative entries."""
    if not entropies:
        raise PreconditionViolation("need at least one entropy value")
    if any(h < 0 for h in entropies):
        raise NegativeEntropy("entropy values must be non-negative")
    return sum(entropies) / len(entropies)


def total_objective(clip: float, vf: float, bonus: float, cfg: PpoConfig) -> float:
    """clip - value_coef * vf + entropy_coef * bonus (maximize)."""
    for name, v in (("clip", clip), ("vf", vf), ("bonus", bonus)):
        if not math.isfinite(v):
            raise NonFinite(f"{name} term is not finite: {v!r}")
    return clip - cfg.value_coef * vf + cfg.entropy_coef * bonus


@dataclass(frozen=True)
class BanditSpec:
    """Contextual bandit with one rewarded arm per context.

    Arms double as answer strings so the segmented reward path is exercised:
    pulling the right arm makes F1(a_pred, golden) = 1 and the baseline
    answer never matches, giving reward 1; any other arm gives reward 0.
    With ``zero_reward`` the golden answer matches no arm, so every reward
    is 0 through the same code path.
    """

    n_arms: int = 5
    n_contexts: int = 3
    zero_reward: bool = False

    def __post_init__(self):
        if self.n_arms < 2 or self.n_contexts < 1:
            raise PreconditionViolation("need at least 2 arms and 1 context")

    def arm_name(self, arm: int) -> str:
        return f"arm{arm}"

    def correct_arm(self, context: int) -> int:
        return context % self.n_arms

    def golden(self, context: int) -> str:
        if self.zero_reward:
            return "nothing matches this"
        return self.arm_name(self.correct_arm(context))


@dataclass
class TraceRow:
    epoch: int
    mean_reward: float
    p_correct: float
    clip_term: float
    vf_term: float
    entropy_term: float

    def as_csv_row(self) -> list:
        return [self.epoch, self.mean_reward, self.p_correct,
                self.clip_term, self.vf_term, self.entropy_term]


TRACE_HEADER = ["epoch", "mean_reward", "p_correct", "clip_term", "vf_term", "entropy_term"]


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def _log(p: np.ndarray) -> np.ndarray:
    return np.log(np.clip(p, 1e-300, None))


def train_toy_policy(
    env: BanditSpec,
    cfg: PpoConfig,
    seed: int,
    updates: int = 2000,
    batch_size: int = 16,
    epochs: int = 4,
    lr_policy: float = 0.2,
    lr_value: float = 0.1,
    trace_every: int = 10,
    value_target: str = "gae_return",
) -> list[TraceRow]:
    """PPO on a tabular softmax policy over the bandit; deterministic per seed.

    Each update samples a batch of single-step episodes from the frozen
    policy, computes GAE advantages, then takes ``epochs`` analytic gradient
    steps on the clipped objective plus entropy bonus (policy) and the
    squared value error (critic). The probability ratio drifts away from 1
    across epochs, so the clip actually binds.
    """
    rng = np.random.default_rng(seed)
    theta = np.zeros((env.n_contexts, env.n_arms))
    values = np.zeros(env.n_contexts)
    trace: list[TraceRow] = []

    for update in range(updates):
        old_probs = np.array([_softmax(theta[c]) for c in range(env.n_contexts)])

        contexts = rng.integers(0, env.n_contexts, size=batch_size)
        episodes = []
        for c in contexts:
            a = int(rng.choice(env.n_arms, p=old_probs[c]))
            reward = step_reward(
                RewardInputs(a_pred=env.arm_name(a), a_ori="none", golden=(env.golden(c),)),
                is_eof=True,
            )
            traj = Trajectory(rewards=[reward], values=[float(values[c]), 0.0])
            adv = compute_gae(traj, cfg)[0]
            target = value_targets(traj, [adv], value_target)[0]
            episodes.append((int(c), a, reward, adv, target))

        ratios: list[float] = []
        advs: list[float] = []
        ents: list[float] = []
        for _ in range(epochs):
            theta_grad = np.zeros_like(theta)
            value_grad = np.zeros_like(values)
            ratios, advs, ents = [], [], []
            for c, a, reward, adv, ret in episodes:
                probs = _softmax(theta[c])
                ratio = float(probs[a] / old_probs[c][a])
                ratios.append(ratio)
                advs.append(adv)
                entropy = float(-(probs * _log(probs)).sum())
                ents.append(entropy)
                # clipped-surrogate gradient: zero once the ratio saturates the clip
                unclipped = ratio * adv
                clipped = min(max(ratio, 1 - cfg.epsilon), 1 + cfg.epsilon) * adv
                if unclipped <= clipped or abs(ratio - 1.0) <= cfg.epsilon:
                    onehot = np.zeros(env.n_arms)
                    onehot[a] = 1.0
                    theta_grad[c] += adv * ratio * (onehot - probs)
                theta_grad[c] += cfg.entropy_coef * (-probs * (_log(probs) + entropy))
                value_grad[c] += 2.0 * (values[c] - ret)
            theta += lr_policy * theta_grad / batch_size
            values -= lr_value * cfg.value_coef * value_grad / batch_size

        if update % trace_every == 0 or update == updates - 1:
            clip_term = ppo_clip_loss(ratios, advs, cfg)
            vf_term = value_loss(
                [float(values[c]) for c, *_ in episodes], [ret for *_, ret in episodes]
            )
            ent_term = entropy_bonus(ents)
            p_correct = float(
                np.mean([_softmax(theta[c])[env.correct_arm(c)] for c in range(env.n_contexts)])
            )
            trace.append(
                TraceRow(
                    epoch=update,
                    mean_reward=float(np.mean([e[2] for e in episodes])),
                    p_correct=p_correct,
                    clip_term=clip_term,
                    vf_term=vf_term,
                    entropy_term=ent_term,
                )
            )
    return trace
