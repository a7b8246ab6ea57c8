"""Tensor construction, elementwise contracts, and tape backward behavior."""

import numpy as np
import pytest

from cvradar.ctensor import ComplexTensor, GradTape, ShapeError, TapeError, ops


def rand_ct(rng, shape, scale=1.0):
    return ComplexTensor(scale * rng.standard_normal(shape), scale * rng.standard_normal(shape))


def abs2_loss(t):
    return ops.real(ops.sum_all(ops.mul(t, ops.conj(t))))


class TestConstruction:
    def test_plane_shape_mismatch(self):
        with pytest.raises(ShapeError):
            ComplexTensor(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_zero_extent_rejected(self):
        with pytest.raises(ShapeError):
            ComplexTensor(np.zeros((2, 0)), np.zeros((2, 0)))

    def test_scalar_shape_allowed(self):
        t = ComplexTensor.scalar(1 + 2j)
        assert t.shape == ()
        assert t.size == 1

    def test_immutable(self):
        t = ComplexTensor([1.0, 2.0])
        with pytest.raises(AttributeError):
            t.re = np.zeros(2)
        with pytest.raises(ValueError):
            t.re[0] = 5.0

    def test_default_im_is_zero(self):
        t = ComplexTensor([1.0, 2.0])
        assert np.array_equal(t.im, np.zeros(2))


class TestElementwise:
    def test_mul_hand_value(self):
        # (1+j)(2+3j): ca-db + j(cb+da) with k=1+j, x=2+3j gives 2-3 + j(3+2)
        out = ops.mul(ComplexTensor.scalar(1 + 1j), ComplexTensor.scalar(2 + 3j))
        assert out.item() == (-1 + 5j)

    def test_mul_identity(self):
        rng = np.random.default_rng(7)
        z = rand_ct(rng, (4, 5))
        one = ComplexTensor(np.ones((4, 5)), np.zeros((4, 5)))
        assert ops.mul(z, one).allclose(z, rtol=0, atol=0)

    def test_add_inverse(self):
        a = ComplexTensor.scalar(1 + 2j)
        b = ComplexTensor.scalar(-1 - 2j)
        assert ops.add(a, b).item() == 0j

    def test_shape_mismatch_names_both(self):
        a = ComplexTensor(np.zeros((2, 3)))
        b = ComplexTensor(np.zeros((4,)))
        with pytest.raises(ShapeError) as ei:
            ops.add(a, b)
        msg = str(ei.value)
        assert "(2, 3)" in msg and "(4,)" in msg

    def test_dispatcher(self):
        a = ComplexTensor.scalar(2 + 1j)
        b = ComplexTensor.scalar(1 + 1j)
        assert ops.complex_elementwise(a, b, "sub").item() == (1 + 0j)
        with pytest.raises(ValueError):
            ops.complex_elementwise(a, b, "div")

    def test_mul_distributes(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = rand_ct(rng, (3, 4))
            b = rand_ct(rng, (3, 4))
            c = rand_ct(rng, (3, 4))
            lhs = ops.mul(a, ops.add(b, c))
            rhs = ops.add(ops.mul(a, b), ops.mul(a, c))
            assert lhs.allclose(rhs, rtol=0, atol=1e-12)


class TestBackward:
    def test_sum_of_re_gradient(self):
        rng = np.random.default_rng(3)
        x = rand_ct(rng, (2, 3))
        with GradTape() as tape:
            tape.watch(x)
            loss = ops.real(ops.sum_all(ops.real(x)))
        g = tape.backward(loss)[x]
        assert np.array_equal(g.re, np.ones((2, 3)))
        assert np.array_equal(g.im, np.zeros((2, 3)))

    def test_abs2_gradient(self):
        z = ComplexTensor.scalar(3 + 4j)
        with GradTape() as tape:
            tape.watch(z)
            loss = abs2_loss(z)
        g = tape.backward(loss)[z]
        assert float(g.re) == pytest.approx(6.0, abs=1e-12)
        assert float(g.im) == pytest.approx(8.0, abs=1e-12)

    def test_gradient_shapes_match_leaves(self):
        rng = np.random.default_rng(5)
        x = rand_ct(rng, (2, 3, 4))
        w = rand_ct(rng, (4,))
        with GradTape() as tape:
            tape.watch(x)
            tape.watch(w)
            loss = abs2_loss(ops.mul(x, ops.reshape(ops.concat([w] * 6, 0), (2, 3, 4))))
        grads = tape.backward(loss)
        assert grads[x].shape == (2, 3, 4)
        assert grads[w].shape == (4,)

    def test_unused_leaf_gets_zeros(self):
        x = ComplexTensor([1.0, 2.0])
        unused = ComplexTensor([5.0])
        with GradTape() as tape:
            tape.watch(x)
            tape.watch(unused)
            loss = ops.real(ops.sum_all(x))
        g = tape.backward(loss)[unused]
        assert np.array_equal(g.re, np.zeros(1))
        assert np.array_equal(g.im, np.zeros(1))

    def test_repeated_backward_bit_identical(self):
        rng = np.random.default_rng(9)
        x = rand_ct(rng, (4, 4))
        y = rand_ct(rng, (4, 4))
        with GradTape() as tape:
            tape.watch(x)
            tape.watch(y)
            loss = abs2_loss(ops.matmul(ops.crelu(x), y))
        g1 = tape.backward(loss)
        g2 = tape.backward(loss)
        for leaf in (x, y):
            assert np.array_equal(g1[leaf].re, g2[leaf].re)
            assert np.array_equal(g1[leaf].im, g2[leaf].im)

    def test_loss_must_be_scalar(self):
        x = ComplexTensor([1.0, 2.0])
        with GradTape() as tape:
            tape.watch(x)
            out = ops.crelu(x)
        with pytest.raises(TapeError):
            tape.backward(out)

    def test_loss_must_be_on_tape(self):
        x = ComplexTensor([1.0])
        with GradTape() as tape:
            tape.watch(x)
            ops.crelu(x)
        stray = ComplexTensor.scalar(1.0)
        with pytest.raises(TapeError):
            tape.backward(stray)

    def test_loss_must_be_real(self):
        x = ComplexTensor.scalar(1 + 1j)
        with GradTape() as tape:
            tape.watch(x)
            loss = ops.sum_all(x)
        with pytest.raises(TapeError):
            tape.backward(loss)

    def test_tapes_do_not_nest(self):
        with GradTape():
            with pytest.raises(TapeError):
                with GradTape():
                    pass

    def test_no_recording_outside_tape(self):
        tape = GradTape()
        with tape:
            pass
        before = len(tape)
        ops.add(ComplexTensor([1.0]), ComplexTensor([2.0]))
        assert len(tape) == before
