"""Differentiable primitives over ComplexTensor.

Every op computes its value with plain numpy and, when a GradTape is
active, records a closure implementing the exact adjoint of the split-real
computation (re and im treated as independent real arguments).

Shape discipline is strict: no broadcasting anywhere. Mismatches raise
ShapeError naming both shapes. Backward closures may return None for a
plane to signal an exact zero contribution.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import ComplexTensor, ShapeError
from .tape import active_tape

__all__ = [
    "add", "sub", "mul", "complex_elementwise", "scale", "conj", "real",
    "reshape", "permute", "concat", "index0", "matmul", "bmm", "add_row",
    "sum_all", "mean_axis", "crelu", "softmax_last", "cavgpool_last",
    "flatten_parts", "tokens_from_complex", "cconv2d",
    "cbatchnorm_train", "cbatchnorm_eval", "cross_entropy_logits",
    "BatchStats",
]


def _wrap(re, im=None):
    # Adopt freshly computed planes without the constructor's defensive copy.
    t = object.__new__(ComplexTensor)
    re = np.asarray(re)
    im = np.zeros_like(re) if im is None else np.asarray(im)
    if im.dtype != re.dtype:
        im = im.astype(re.dtype)
    if re.shape != im.shape:
        raise ShapeError(f"re shape {re.shape} != im shape {im.shape}")
    if any(n <= 0 for n in re.shape):
        raise ShapeError(f"zero or negative extent in shape {re.shape}")
    for plane in (re, im):
        try:
            plane.flags.writeable = False
        except ValueError:
            pass
    object.__setattr__(t, "re", re)
    object.__setattr__(t, "im", im)
    object.__setattr__(t, "shape", re.shape)
    return t


def _record(op, out, inputs, backward_fn):
    tape = active_tape()
    if tape is not None:
        tape.record(op, out, inputs, backward_fn)
    return out


def _same_shape(op, a, b):
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape {a.shape} does not match shape {b.shape}")


def _mm(g, m):
    return None if g is None else g @ m


def _addn(*terms):
    acc = None
    for t in terms:
        if t is None:
            continue
        acc = t if acc is None else acc + t
    return acc


def _neg(g):
    return None if g is None else -g


# ---------------------------------------------------------------------------
# elementwise
# ---------------------------------------------------------------------------

def add(a, b):
    _same_shape("add", a, b)
    out = _wrap(a.re + b.re, a.im + b.im)

    def bwd(gre, gim):
        return ((gre, gim), (gre, gim))

    return _record("add", out, (a, b), bwd)


def sub(a, b):
    _same_shape("sub", a, b)
    out = _wrap(a.re - b.re, a.im - b.im)

    def bwd(gre, gim):
        return ((gre, gim), (_neg(gre), _neg(gim)))

    return _record("sub", out, (a, b), bwd)


def mul(a, b):
    """Elementwise complex product: (c+jd)(a+jb) = ca-db + j(cb+da)."""
    _same_shape("mul", a, b)
    ar, ai, br, bi = a.re, a.im, b.re, b.im
    out = _wrap(ar * br - ai * bi, ar * bi + ai * br)

    def bwd(gre, gim):
        da_re = _addn(None if gre is None else gre * br, None if gim is None else gim * bi)
        da_im = _addn(None if gre is None else -gre * bi, None if gim is None else gim * br)
        db_re = _addn(None if gre is None else gre * ar, None if gim is None else gim * ai)
        db_im = _addn(None if gre is None else -gre * ai, None if gim is None else gim * ar)
        return ((da_re, da_im), (db_re, db_im))

    return _record("mul", out, (a, b), bwd)


def complex_elementwise(a, b, op):
    """Dispatch one of the elementwise primitives by name: add, sub, mul."""
    table = {"add": add, "sub": sub, "mul": mul}
    if op not in table:
        raise ValueError(f"unknown elementwise op {op!r}; expected one of {sorted(table)}")
    return table[op](a, b)


def scale(a, s):
    """Multiply by a fixed Python scalar (real or complex); s is not a leaf."""
    s = complex(s)
    sr, si = s.real, s.imag
    out = _wrap(sr * a.re - si * a.im, sr * a.im + si * a.re)

    def bwd(gre, gim):
        dre = _addn(None if gre is None else sr * gre, None if gim is None else si * gim)
        dim = _addn(None if gre is None else -si * gre, None if gim is None else sr * gim)
        return ((dre, dim),)

    return _record("scale", out, (a,), bwd)


def conj(a):
    out = _wrap(a.re, -a.im)

    def bwd(gre, gim):
        return ((gre, _neg(gim)),)

    return _record("conj", out, (a,), bwd)


def real(a):
    """Keep the real plane, zero the imaginary plane."""
    out = _wrap(a.re, np.zeros_like(a.re))

    def bwd(gre, gim):
        return ((gre, None),)

    return _record("real", out, (a,), bwd)


# ---------------------------------------------------------------------------
# structure
# ---------------------------------------------------------------------------

def reshape(a, shape):
    shape = tuple(int(n) for n in shape)
    if any(n <= 0 for n in shape):
        raise ShapeError(f"reshape: zero or negative extent in {shape}")
    if int(np.prod(shape, dtype=np.int64)) != a.size:
        raise ShapeError(f"reshape: cannot reshape {a.shape} into {shape}")
    out = _wrap(a.re.reshape(shape), a.im.reshape(shape))
    old = a.shape

    def bwd(gre, gim):
        return ((None if gre is None else gre.reshape(old),
                 None if gim is None else gim.reshape(old)),)

    return _record("reshape", out, (a,), bwd)


def permute(a, axes):
    axes = tuple(axes)
    if sorted(axes) != list(range(a.ndim)):
        raise ShapeError(f"permute: axes {axes} is not a permutation of rank {a.ndim}")
    inv = np.argsort(axes)
    out = _wrap(a.re.transpose(axes), a.im.transpose(axes))

    def bwd(gre, gim):
        return ((None if gre is None else gre.transpose(inv),
                 None if gim is None else gim.transpose(inv)),)

    return _record("permute", out, (a,), bwd)


def concat(tensors, axis):
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat: need at least one tensor")
    for t in tensors[1:]:
        if t.ndim != tensors[0].ndim:
            raise ShapeError(f"concat: rank mismatch {tensors[0].shape} vs {t.shape}")
    out = _wrap(
        np.concatenate([t.re for t in tensors], axis=axis),
        np.concatenate([t.im for t in tensors], axis=axis),
    )
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]

    def bwd(gre, gim):
        parts_re = [None] * len(sizes) if gre is None else np.split(gre, bounds, axis=axis)
        parts_im = [None] * len(sizes) if gim is None else np.split(gim, bounds, axis=axis)
        return tuple((r, i) for r, i in zip(parts_re, parts_im))

    return _record("concat", out, tuple(tensors), bwd)


def index0(a, i):
    """Select one slice along axis 0 (drops the axis)."""
    if a.ndim < 1:
        raise ShapeError("index0: scalar has no axis 0")
    if not 0 <= i < a.shape[0]:
        raise ShapeError(f"index0: index {i} out of range for extent {a.shape[0]}")
    out = _wrap(a.re[i].copy(), a.im[i].copy())
    full = a.shape
    dtype = a.dtype

    def bwd(gre, gim):
        def scatter(g):
            if g is None:
                return None
            buf = np.zeros(full, dtype=dtype)
            buf[i] = g
            return buf
        return ((scatter(gre), scatter(gim)),)

    return _record("index0", out, (a,), bwd)


def flatten_parts(a):
    """Per-row realification: (B, ...) -> (B, 2K) rows [vec(re); vec(im)]."""
    if a.ndim < 2:
        raise ShapeError(f"flatten_parts: need rank >= 2, got shape {a.shape}")
    b = a.shape[0]
    k = a.size // b
    out_re = np.concatenate([a.re.reshape(b, k), a.im.reshape(b, k)], axis=1)
    out = _wrap(out_re, np.zeros_like(out_re))
    inner = a.shape[1:]

    def bwd(gre, gim):
        # out.im is constant zero, so gim never reaches the input
        if gre is None:
            return ((None, None),)
        return ((gre[:, :k].reshape((b,) + inner), gre[:, k:].reshape((b,) + inner)),)

    return _record("flatten_parts", out, (a,), bwd)


def tokens_from_complex(f):
    """Feature map (C, L) -> real token matrix (L, 2C), re block then im block."""
    if f.ndim != 2:
        raise ShapeError(f"tokens_from_complex: need rank 2, got shape {f.shape}")
    c = f.shape[0]
    out_re = np.concatenate([f.re.T, f.im.T], axis=1)
    out = _wrap(out_re, np.zeros_like(out_re))

    def bwd(gre, gim):
        if gre is None:
            return ((None, None),)
        return ((np.ascontiguousarray(gre[:, :c].T), np.ascontiguousarray(gre[:, c:].T)),)

    return _record("tokens_from_complex", out, (f,), bwd)


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

def matmul(a, b):
    """Complex matrix product of rank-2 tensors: (n,k) @ (k,m)."""
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul: need rank-2 operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner extents differ, {a.shape} @ {b.shape}")
    ar, ai, br, bi = a.re, a.im, b.re, b.im
    out = _wrap(ar @ br - ai @ bi, ar @ bi + ai @ br)

    def bwd(gre, gim):
        da_re = _addn(_mm(gre, br.T), _mm(gim, bi.T))
        da_im = _addn(_neg(_mm(gre, bi.T)), _mm(gim, br.T))
        db_re = _addn(None if gre is None else ar.T @ gre, None if gim is None else ai.T @ gim)
        db_im = _addn(None if gre is None else -(ai.T @ gre), None if gim is None else ar.T @ gim)
        return ((da_re, da_im), (db_re, db_im))

    return _record("matmul", out, (a, b), bwd)


def bmm(a, b):
    """Batched complex matmul: (g, n, k) @ (g, k, m) -> (g, n, m)."""
    if a.ndim != 3 or b.ndim != 3:
        raise ShapeError(f"bmm: need rank-3 operands, got {a.shape} and {b.shape}")
    if a.shape[0] != b.shape[0] or a.shape[2] != b.shape[1]:
        raise ShapeError(f"bmm: incompatible shapes {a.shape} @ {b.shape}")
    ar, ai, br, bi = a.re, a.im, b.re, b.im
    out = _wrap(ar @ br - ai @ bi, ar @ bi + ai @ br)
    bT = (0, 2, 1)

    def bwd(gre, gim):
        brt, bit = br.transpose(bT), bi.transpose(bT)
        art, ait = ar.transpose(bT), ai.transpose(bT)
        da_re = _addn(_mm(gre, brt), _mm(gim, bit))
        da_im = _addn(_neg(_mm(gre, bit)), _mm(gim, brt))
        db_re = _addn(None if gre is None else art @ gre, None if gim is None else ait @ gim)
        db_im = _addn(None if gre is None else -(ait @ gre), None if gim is None else art @ gim)
        return ((da_re, da_im), (db_re, db_im))

    return _record("bmm", out, (a, b), bwd)


def add_row(x, b):
    """Add a length-D row vector to every row of a (N, D) tensor."""
    if x.ndim != 2 or b.ndim != 1 or b.shape[0] != x.shape[1]:
        raise ShapeError(f"add_row: shapes {x.shape} and {b.shape} are incompatible")
    out = _wrap(x.re + b.re[None, :], x.im + b.im[None, :])

    def bwd(gre, gim):
        db_re = None if gre is None else gre.sum(axis=0)
        db_im = None if gim is None else gim.sum(axis=0)
        return ((gre, gim), (db_re, db_im))

    return _record("add_row", out, (x, b), bwd)


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------

def sum_all(a):
    """Sum every element down to a complex scalar."""
    out = _wrap(np.asarray(a.re.sum()), np.asarray(a.im.sum()))
    shp = a.shape
    dtype = a.dtype

    def bwd(gre, gim):
        def spread(g):
            return None if g is None else np.full(shp, g, dtype=dtype)
        return ((spread(gre), spread(gim)),)

    return _record("sum_all", out, (a,), bwd)


def mean_axis(a, axis):
    """Arithmetic mean along one axis, applied to each plane."""
    if not 0 <= axis < a.ndim:
        raise ShapeError(f"mean_axis: axis {axis} out of range for shape {a.shape}")
    n = a.shape[axis]
    out = _wrap(a.re.mean(axis=axis), a.im.mean(axis=axis))

    def bwd(gre, gim):
        def spread(g):
            if g is None:
                return None
            return np.repeat(np.expand_dims(g / n, axis), n, axis=axis)
        return ((spread(gre), spread(gim)),)

    return _record("mean_axis", out, (a,), bwd)


# ---------------------------------------------------------------------------
# nonlinearities
# ---------------------------------------------------------------------------

def crelu(a):
    """Pass z through iff both Re{z} >= 0 and Im{z} >= 0, else 0.

    Subgradient at the boundary: 1 for the passing branch, 0 otherwise,
    matching the real-ReLU convention applied componentwise.
    """
    mask = (a.re >= 0) & (a.im >= 0)
    out = _wrap(np.where(mask, a.re, 0.0), np.where(mask, a.im, 0.0))

    def bwd(gre, gim):
        return ((None if gre is None else gre * mask,
                 None if gim is None else gim * mask),)

    return _record("crelu", out, (a,), bwd)


def softmax_last(a):
    """Row softmax over the last axis of the real plane; output im is zero.

    Max-subtraction keeps the exponentials bounded, so any finite input
    yields finite, normalized rows.
    """
    x = a.re
    p = np.exp(x - x.max(axis=-1, keepdims=True))
    p = p / p.sum(axis=-1, keepdims=True)
    out = _wrap(p, np.zeros_like(p))

    def bwd(gre, gim):
        # function of re only; im receives an exact zero gradient
        if gre is None:
            return ((None, None),)
        inner = (gre * p).sum(axis=-1, keepdims=True)
        return ((p * (gre - inner), None),)

    return _record("softmax_last", out, (a,), bwd)


# ---------------------------------------------------------------------------
# pooling
# ---------------------------------------------------------------------------

def cavgpool_last(a, window):
    """Non-overlapping window means along the last axis, per plane.

    A trailing remainder that does not fill a window is dropped; the
    resulting length is part of the declared shape contract.
    """
    if window < 1:
        raise ShapeError(f"cavgpool: window must be >= 1, got {window}")
    if a.ndim < 1:
        raise ShapeError("cavgpool: scalar input")
    length = a.shape[-1]
    blocks = length // window
    if blocks < 1:
        raise ShapeError(f"cavgpool: window {window} exceeds axis length {length}")
    lead = a.shape[:-1]
    core = lead + (blocks, window)

    def pool(plane):
        return plane[..., : blocks * window].reshape(core).mean(axis=-1)

    out = _wrap(pool(a.re), pool(a.im))
    full = a.shape
    dtype = a.dtype

    def bwd(gre, gim):
        def spread(g):
            if g is None:
                return None
            buf = np.zeros(full, dtype=dtype)
            buf[..., : blocks * window] = np.repeat(
                np.expand_dims(g / window, -1), window, axis=-1
            ).reshape(lead + (blocks * window,))
            return buf
        return ((spread(gre), spread(gim)),)

    return _record("cavgpool", out, (a,), bwd)


# ---------------------------------------------------------------------------
# convolution
# ---------------------------------------------------------------------------

def _im2col(plane, kh, kw, sh, sw):
    b, c = plane.shape[:2]
    v = sliding_window_view(plane, (kh, kw), axis=(2, 3))[:, :, ::sh, ::sw]
    ho, wo = v.shape[2], v.shape[3]
    cols = v.transpose(0, 1, 4, 5, 2, 3).reshape(b, c * kh * kw, ho * wo)
    return np.ascontiguousarray(cols), ho, wo


def _col2im(dcols, xshape, kh, kw, sh, sw, ho, wo):
    b, c, h, w = xshape
    d = dcols.reshape(b, c, kh, kw, ho, wo)
    buf = np.zeros(xshape, dtype=dcols.dtype)
    for i in range(kh):
        for j in range(kw):
            buf[:, :, i : i + sh * ho : sh, j : j + sw * wo : sw] += d[:, :, i, j]
    return buf


def cconv2d(x, kernels, bias, stride=(1, 1)):
    """Valid complex cross-correlation with per-output-channel bias.

    x: (B, C_in, H, W); kernels: (C_out, C_in, kh, kw); bias: (C_out,).
    Every multiply-accumulate is the complex product ca-db + j(cb+da).
    """
    if x.ndim != 4:
        raise ShapeError(f"cconv2d: input must be (B, C, H, W), got {x.shape}")
    if kernels.ndim != 4:
        raise ShapeError(f"cconv2d: kernels must be (C_out, C_in, kh, kw), got {kernels.shape}")
    if bias.ndim != 1 or bias.shape[0] != kernels.shape[0]:
        raise ShapeError(f"cconv2d: bias shape {bias.shape} != (C_out,) = ({kernels.shape[0]},)")
    b, cin, h, w = x.shape
    cout, kcin, kh, kw = kernels.shape
    if kcin != cin:
        raise ShapeError(f"cconv2d: input channels {cin} != kernel channels {kcin}")
    sh, sw = stride
    if sh < 1 or sw < 1:
        raise ShapeError(f"cconv2d: stride must be >= 1, got {stride}")
    if kh > h or kw > w:
        raise ShapeError(
            f"cconv2d: kernel shape {kernels.shape} larger than input shape {x.shape}"
        )

    cols_r, ho, wo = _im2col(x.re, kh, kw, sh, sw)
    cols_i, _, _ = _im2col(x.im, kh, kw, sh, sw)
    kr = kernels.re.reshape(cout, -1)
    ki = kernels.im.reshape(cout, -1)

    out_r = kr @ cols_r - ki @ cols_i + bias.re[:, None]
    out_i = kr @ cols_i + ki @ cols_r + bias.im[:, None]
    out = _wrap(out_r.reshape(b, cout, ho, wo), out_i.reshape(b, cout, ho, wo))

    xshape = x.shape
    kshape = kernels.shape

    def bwd(gre, gim):
        gr = None if gre is None else gre.reshape(b, cout, ho * wo)
        gi = None if gim is None else gim.reshape(b, cout, ho * wo)

        def pair_sum(g1, m1, g2, m2):
            # sum over batch of g @ m^T, contracted as ('bop,bkp->ok')
            acc = None
            if g1 is not None:
                acc = np.einsum("bop,bkp->ok", g1, m1)
            if g2 is not None:
                term = np.einsum("bop,bkp->ok", g2, m2)
                acc = term if acc is None else acc + term
            return acc

        dk_re = pair_sum(gr, cols_r, gi, cols_i)
        neg = pair_sum(gr, cols_i, None, None)
        dk_im = _addn(None if neg is None else -neg, pair_sum(gi, cols_r, None, None))
        dk_re = None if dk_re is None else dk_re.reshape(kshape)
        dk_im = None if dk_im is None else dk_im.reshape(kshape)

        dcols_r = _addn(None if gr is None else kr.T @ gr,
                        None if gi is None else ki.T @ gi)
        dcols_i = _addn(None if gr is None else -(ki.T @ gr),
                        None if gi is None else kr.T @ gi)
        dx_re = None if dcols_r is None else _col2im(dcols_r, xshape, kh, kw, sh, sw, ho, wo)
        dx_im = None if dcols_i is None else _col2im(dcols_i, xshape, kh, kw, sh, sw, ho, wo)

        db_re = None if gr is None else gr.sum(axis=(0, 2))
        db_im = None if gi is None else gi.sum(axis=(0, 2))
        return ((dx_re, dx_im), (dk_re, dk_im), (db_re, db_im))

    return _record("cconv2d", out, (x, kernels, bias), bwd)


# ---------------------------------------------------------------------------
# batch normalization
# ---------------------------------------------------------------------------

class BatchStats:
    """Per-channel batch statistics of one normalization pass (plain arrays)."""

    __slots__ = ("mean_re", "var_re", "mean_im", "var_im")

    def __init__(self, mean_re, var_re, mean_im, var_im):
        self.mean_re = mean_re
        self.var_re = var_re
        self.mean_im = mean_im
        self.var_im = var_im


def _bn_axes(x):
    if x.ndim < 2:
        raise ShapeError(f"batchnorm: need (B, C, ...) input, got shape {x.shape}")
    return (0,) + tuple(range(2, x.ndim))


def _bn_param_shape(x, gamma, beta):
    c = x.shape[1]
    for name, p in (("gamma", gamma), ("beta", beta)):
        if p.shape != (c,):
            raise ShapeError(f"batchnorm: {name} shape {p.shape} != ({c},)")
    return (1, c) + (1,) * (x.ndim - 2)


def cbatchnorm_train(x, gamma, beta, eps=1e-5):
    """Train-mode complex batch norm: each plane normalized independently.

    Normalizes re and im per channel by biased batch statistics over all
    non-channel axes, then applies the per-plane affine (gamma, beta).
    Returns (output, BatchStats) so the caller can update running buffers.
    """
    axes = _bn_axes(x)
    if x.shape[0] < 2:
        raise ShapeError(f"batchnorm train mode needs batch >= 2, got {x.shape[0]}")
    pshape = _bn_param_shape(x, gamma, beta)
    n = 1
    for ax in axes:
        n *= x.shape[ax]

    planes = {}
    for part, q, g, bta in (("re", x.re, gamma.re, beta.re), ("im", x.im, gamma.im, beta.im)):
        mu = q.mean(axis=axes, keepdims=True)
        var = q.var(axis=axes, keepdims=True)
        inv = 1.0 / np.sqrt(var + eps)
        xhat = (q - mu) * inv
        planes[part] = (xhat * g.reshape(pshape) + bta.reshape(pshape), xhat, inv, mu, var)

    out = _wrap(planes["re"][0], planes["im"][0])
    stats = BatchStats(
        planes["re"][3].reshape(-1), planes["re"][4].reshape(-1),
        planes["im"][3].reshape(-1), planes["im"][4].reshape(-1),
    )

    def bwd(gre, gim):
        dx = [None, None]
        dgamma = [None, None]
        dbeta = [None, None]
        for slot, (g, part, gam) in enumerate(
            ((gre, "re", gamma.re), (gim, "im", gamma.im))
        ):
            if g is None:
                continue
            _, xhat, inv, _, _ = planes[part]
            dbeta[slot] = g.sum(axis=axes)
            dgamma[slot] = (g * xhat).sum(axis=axes)
            gm = g.mean(axis=axes, keepdims=True)
            gxm = (g * xhat).mean(axis=axes, keepdims=True)
            dx[slot] = gam.reshape(pshape) * inv * (g - gm - xhat * gxm)
        return ((dx[0], dx[1]), (dgamma[0], dgamma[1]), (dbeta[0], dbeta[1]))

    return _record("cbatchnorm_train", out, (x, gamma, beta), bwd), stats


def cbatchnorm_eval(x, gamma, beta, running_mean, running_var, eps=1e-5):
    """Eval-mode complex batch norm using frozen running statistics.

    running_mean/running_var pack the per-plane statistics as (re, im).
    """
    axes = _bn_axes(x)
    del axes
    pshape = _bn_param_shape(x, gamma, beta)
    c = x.shape[1]
    for name, t in (("running_mean", running_mean), ("running_var", running_var)):
        if t.shape != (c,):
            raise ShapeError(f"batchnorm: {name} shape {t.shape} != ({c},)")

    inv_re = (1.0 / np.sqrt(running_var.re + eps)).reshape(pshape)
    inv_im = (1.0 / np.sqrt(running_var.im + eps)).reshape(pshape)
    xhat_re = (x.re - running_mean.re.reshape(pshape)) * inv_re
    xhat_im = (x.im - running_mean.im.reshape(pshape)) * inv_im
    out = _wrap(
        xhat_re * gamma.re.reshape(pshape) + beta.re.reshape(pshape),
        xhat_im * gamma.im.reshape(pshape) + beta.im.reshape(pshape),
    )
    red = (0,) + tuple(range(2, x.ndim))

    def bwd(gre, gim):
        dx_re = None if gre is None else gre * gamma.re.reshape(pshape) * inv_re
        dx_im = None if gim is None else gim * gamma.im.reshape(pshape) * inv_im
        dg_re = None if gre is None else (gre * xhat_re).sum(axis=red)
        dg_im = None if gim is None else (gim * xhat_im).sum(axis=red)
        db_re = None if gre is None else gre.sum(axis=red)
        db_im = None if gim is None else gim.sum(axis=red)
        return ((dx_re, dx_im), (dg_re, dg_im), (db_re, db_im))

    return _record("cbatchnorm_eval", out, (x, gamma, beta), bwd)


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------

def cross_entropy_logits(logits, target):
    """Cross-entropy of softmax(logits) against a fixed target distribution.

    logits: rank-1 ComplexTensor (C,), real plane used; target: plain
    length-C array summing to 1. Computed through a max-shifted
    log-softmax, which equals -sum(target * log(softmax)) exactly but
    never overflows. Output is a real scalar.
    """
    if logits.ndim != 1:
        raise ShapeError(f"cross_entropy_logits: logits must be rank 1, got {logits.shape}")
    target = np.asarray(target, dtype=logits.dtype)
    if target.shape != logits.shape:
        raise ShapeError(f"cross_entropy_logits: target shape {target.shape} != {logits.shape}")
    x = logits.re
    if not np.all(np.isfinite(x)):
        raise ValueError("cross_entropy_logits: non-finite logits")
    m = x.max()
    z = x - m
    logsumexp = np.log(np.exp(z).sum())
    logp = z - logsumexp
    value = -(target * logp).sum()
    out = _wrap(np.asarray(value), np.zeros(()))
    p = np.exp(logp)
    tsum = target.sum()

    def bwd(gre, gim):
        if gre is None:
            return ((None, None),)
        return ((float(gre) * (p * tsum - target), None),)

    return _record("cross_entropy_logits", out, (logits,), bwd)
