"""Central finite differences against the tape's analytic gradients."""

from __future__ import annotations

import numpy as np

from tsflab.numkit import backward

FD_STEP = 1e-4
REL_FLOOR = 1e-6


def analytic_grads(loss_fn, params):
    for p in params:
        p.grad = None
    out = loss_fn()
    backward(out)
    return [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params]


def numeric_grads(loss_fn, params, h: float = FD_STEP):
    """Fourth-order central stencil: (-f(+2h) + 8 f(+h) - 8 f(-h) + f(-2h)) / 12h."""
    out = []
    for p in params:
        g = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            vals = []
            for k in (2, 1, -1, -2):
                flat[i] = orig + k * h
                vals.append(float(loss_fn().data))
            flat[i] = orig
            g.reshape(-1)[i] = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h)
        out.append(g)
    return out


def max_rel_error(loss_fn, params, h: float = FD_STEP) -> float:
    """Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over all entries."""
    ana = analytic_grads(loss_fn, params)
    num = numeric_grads(loss_fn, params, h)
    worst = 0.0
    for a, n in zip(ana, num):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), REL_FLOOR)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


# ---------------------------------------------------------------------------
# end-to-end cases on the tiny model (L=64, P=S=16, M=16, one layer)
# ---------------------------------------------------------------------------

TINY = dict(M=16, layers=1, heads=2, P=16, S=16, L=64, H=8, vocab_size=24, context=12, d_principal=8)


def _tiny_batch(seed: int, B: int = 2):
    from tsflab.forecaster import revin_normalize

    rng = np.random.default_rng(seed)
    t = np.arange(64 + 8)
    raw = np.sin(t[None, :] / 5.0 + rng.uniform(0, 6, size=(B, 1))) * rng.uniform(1, 3, size=(B, 1)) + rng.normal(0, 0.2, size=(B, 72))
    x_norm, stats = revin_normalize(raw[:, :64])
    y_norm = (raw[:, 64:] - stats.mean) / stats.std
    return x_norm, y_norm


def end_to_end_cases(seed: int = 0):
    """(name, loss_fn, trainable params) for every trainer mode and path."""
    from tsflab.forecaster import ForecastModel, ModelConfig, trainer_mask
    from tsflab.numkit import ops

    rng = np.random.default_rng(seed)
    x, y = _tiny_batch(seed)
    N = 5
    prompt = np.array([[0, 0, 5, 7, 9, 3, 2], [4, 8, 2, 2, 11, 6, 1]])
    cases = []

    def add(name, cfg_changes, prompt_ids=None, force_paths=None, perturb_lora=False):
        cfg = ModelConfig(**{**TINY, **cfg_changes})
        model = ForecastModel(cfg, seed=seed)
        trainer_mask(model)
        if perturb_lora:
            for block in model.backbone.blocks:
                for ad in (block.attn.lora_q, block.attn.lora_v):
                    ad.B.data = rng.normal(0, 0.3, size=ad.B.shape)
        params = model.trainable_parameters()

        def loss():
            out = model.forward_normalized(x, prompt_ids, force_paths=force_paths)
            return ops.mse_loss(out.pred, y)

        cases.append((name, loss, params))

    add("full+prompt", dict(prompt_len=7), prompt_ids=prompt)
    add("without_llm", dict(backbone_variant="without_llm"))
    add("pre_alignment", dict(alignment="pre", prompt_len=7), prompt_ids=prompt)
    add("pe_ln", dict(trainer_mode="pe_ln", prompt_len=7), prompt_ids=prompt)
    add("lora", dict(trainer_mode="lora(2)", prompt_len=7), prompt_ids=prompt, perturb_lora=True)
    paths = np.array([[1, 0, 1, 1, 0], [0, 1, 1, 0, 1]])
    add("routed", dict(routing=True, prompt_len=7), prompt_ids=prompt, force_paths=paths)
    assert paths.shape[1] == N
    return cases
