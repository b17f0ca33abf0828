"""Small dense policy/value network with masked action sampling (numpy)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASKED_LOGIT = -1e9


@dataclass
class PolicySnapshot:
    parameters: dict[str, np.ndarray]
    training_step: int


def masked_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Softmax over legal actions only; masked entries get exactly zero."""
    z = np.where(mask, logits, MASKED_LOGIT)
    z = z - z.max(axis=-1, keepdims=True)
    p = np.exp(z) * mask
    return p / p.sum(axis=-1, keepdims=True)


def masked_entropy(probs: np.ndarray) -> np.ndarray:
    """Shannon entropy in nats over the legal support (0 log 0 = 0)."""
    safe = np.where(probs > 0, probs, 1.0)
    return -(probs * np.log(safe)).sum(axis=-1)


class PolicyValueNet:
    """Two hidden tanh layers shared by a masked-softmax policy head and a
    scalar value head. Observation scalars are expected pre-normalised."""

    def __init__(self, obs_dim: int, n_actions: int, hidden: tuple[int, int], rng: np.random.Generator):
        h1, h2 = hidden
        self.obs_dim = obs_dim
        self.n_actions = n_actions
        scale = lambda n_in: 1.0 / np.sqrt(n_in)
        self.params = {
            "W1": rng.normal(0, scale(obs_dim), (obs_dim, h1)),
            "b1": np.zeros(h1),
            "W2": rng.normal(0, scale(h1), (h1, h2)),
            "b2": np.zeros(h2),
            "Wp": rng.normal(0, 0.01, (h2, n_actions)),
            "bp": np.zeros(n_actions),
            "Wv": rng.normal(0, scale(h2), (h2, 1)),
            "bv": np.zeros(1),
        }
        # Adam state
        self._m = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._v = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._t = 0

    def forward(self, obs: np.ndarray, mask: np.ndarray):
        p = self.params
        h1 = np.tanh(obs @ p["W1"] + p["b1"])
        h2 = np.tanh(h1 @ p["W2"] + p["b2"])
        logits = h2 @ p["Wp"] + p["bp"]
        values = (h2 @ p["Wv"] + p["bv"])[..., 0]
        probs = masked_softmax(logits, mask)
        return probs, values, (obs, h1, h2)

    def act(self, obs: np.ndarray, mask: np.ndarray, rng: np.random.Generator):
        """Sample one action. Returns (action, log_prob, value, entropy)."""
        probs, values, _ = self.forward(obs[None, :], mask[None, :])
        p = probs[0]
        action = int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))
        action = min(action, self.n_actions - 1)
        if p[action] == 0.0:  # numerical guard; never samples a masked action
            action = int(np.argmax(p))
        return action, float(np.log(p[action])), float(values[0]), float(masked_entropy(p[None, :])[0])

    def snapshot(self, training_step: int) -> PolicySnapshot:
        return PolicySnapshot(
            parameters={k: v.copy() for k, v in self.params.items()},
            training_step=training_step,
        )

    def ppo_update(
        self,
        obs: np.ndarray,
        masks: np.ndarray,
        actions: np.ndarray,
        old_logp: np.ndarray,
        advantages: np.ndarray,
        returns: np.ndarray,
        clip: float,
        vf_coef: float,
        ent_coef: float,
        lr: float,
    ) -> tuple[float, float]:
        """One clipped-surrogate minibatch step. Returns (policy_loss, value_loss)."""
        p = self.params
        n = obs.shape[0]
        probs, values, (x, h1, h2) = self.forward(obs, masks)
        idx = np.arange(n)
        p_a = probs[idx, actions]
        logp = np.log(np.maximum(p_a, 1e-12))
        ratio = np.exp(logp - old_logp)
        surr1 = ratio * advantages
        surr2 = np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantages
        policy_loss = -float(np.mean(np.minimum(surr1, surr2)))
        value_err = values - returns
        value_loss = float(np.mean(value_err**2))

        # d(policy loss)/d logp: zero where the clipped branch is active
        active = (surr1 <= surr2).astype(np.float64)
        dlogp = -(ratio * advantages * active) / n
        # logp gradient through the masked softmax
        dlogits = probs * (-dlogp[:, None])
        dlogits[idx, actions] += dlogp
        # entropy bonus: dH/dlogit_j = -p_j (log p_j + H)
        safe_log = np.log(np.where(probs > 0, probs, 1.0))
        ent = -(probs * safe_log).sum(axis=-1, keepdims=True)
        dlogits += (ent_coef / n) * probs * (safe_log + ent)
        dvalues = (2.0 * vf_coef / n) * value_err

        grads = {}
        grads["Wp"] = h2.T @ dlogits
        grads["bp"] = dlogits.sum(axis=0)
        grads["Wv"] = h2.T @ dvalues[:, None]
        grads["bv"] = np.array([dvalues.sum()])
        dh2 = dlogits @ p["Wp"].T + dvalues[:, None] @ p["Wv"].T
        dh2 *= 1.0 - h2**2
        grads["W2"] = h1.T @ dh2
        grads["b2"] = dh2.sum(axis=0)
        dh1 = dh2 @ p["W2"].T
        dh1 *= 1.0 - h1**2
        grads["W1"] = x.T @ dh1
        grads["b1"] = dh1.sum(axis=0)

        self._adam_step(grads, lr)
        return policy_loss, value_loss

    def _adam_step(self, grads: dict[str, np.ndarray], lr: float, b1=0.9, b2=0.999, eps=1e-8):
        self._t += 1
        for k, g in grads.items():
            self._m[k] = b1 * self._m[k] + (1 - b1) * g
            self._v[k] = b2 * self._v[k] + (1 - b2) * g * g
            m_hat = self._m[k] / (1 - b1**self._t)
            v_hat = self._v[k] / (1 - b2**self._t)
            self.params[k] -= lr * m_hat / (np.sqrt(v_hat) + eps)
