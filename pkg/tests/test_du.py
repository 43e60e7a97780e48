import numpy as np
import pytest

from unitarity import (
    OrthogonalityError,
    MixedUnitaryForm,
    as_mixed_unitary,
    canonicalize,
    compose,
    du,
    du_bounds,
    du_exact_mixed_unitary,
    du_optimize,
    haar_unitary,
    identity_channel,
    process_fidelity,
    random_channel,
    standard_channel,
    unitary_channel,
)
from unitarity.channels import PAULI_X, PAULI_Y, PAULI_Z, KrausChannel

from helpers import qubit_du_oracle, random_mixed_unitary_channel, remix_kraus


class TestExactPath:
    def test_depolarizing(self):
        mu = as_mixed_unitary(canonicalize(standard_channel("depolarizing", 0.2)))
        res = du_exact_mixed_unitary(mu)
        assert res.value == pytest.approx(0.85, abs=1e-12)
        assert res.method == "exact_mixed_unitary"

    def test_bit_flip_half(self):
        mu = as_mixed_unitary(canonicalize(standard_channel("bit_flip", 0.5)))
        res = du_exact_mixed_unitary(mu)
        assert res.value == pytest.approx(0.5, abs=1e-12)

    def test_single_unitary(self):
        u = haar_unitary(2, np.random.default_rng(0))
        mu = as_mixed_unitary(canonicalize(unitary_channel(u)))
        assert du_exact_mixed_unitary(mu).value == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_orthogonal(self):
        # I and a nearby rotation are far from orthogonal
        theta = 0.1
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]],
            dtype=complex,
        )
        mu = MixedUnitaryForm(
            dim=2,
            unitaries=(np.eye(2, dtype=complex), rot),
            coefficients=np.array([np.sqrt(0.5), np.sqrt(0.5)]),
        )
        with pytest.raises(OrthogonalityError):
            du_exact_mixed_unitary(mu)

    def test_witness_reproduces_value(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            ch = random_mixed_unitary_channel(rng)
            res = du_exact_mixed_unitary(as_mixed_unitary(canonicalize(ch)))
            assert abs(process_fidelity(ch, res.witness) - res.value) <= 1e-9


class TestBounds:
    def test_amplitude_damping(self):
        rep = du_bounds(canonicalize(standard_channel("amplitude_damping", 0.36)))
        assert rep.lb1 == pytest.approx(0.81, abs=1e-12)
        assert rep.lb2 == pytest.approx(0.81, abs=1e-12)
        assert rep.lb1_simplified == pytest.approx(0.81, abs=1e-12)
        assert rep.ub == pytest.approx(0.90, abs=1e-12)
        # singular values {1, 0.8} and {0.6, 0}, hand-computed from A†A
        assert np.allclose(rep.singular_values[0], [1.0, 0.8])
        assert np.allclose(rep.singular_values[1], [0.6, 0.0])

    def test_unitary_channel_all_one(self):
        u = haar_unitary(2, np.random.default_rng(2))
        rep = du_bounds(canonicalize(unitary_channel(u)))
        for value in (rep.lb1, rep.lb1_simplified, rep.lb2, rep.ub):
            assert value == pytest.approx(1.0, abs=1e-9)

    def test_fully_depolarizing(self):
        # canonical operators are the four Paulis / 2; each has
        # (P/2)†(P/2) = I/4 so singular values are (1/2, 1/2) and nuclear
        # norm 1, oracle-checked below; ub = 4 * 1 / 4 = 1, lb1 = 1/4
        ck = canonicalize(standard_channel("depolarizing", 1.0))
        for f in ck.ops:
            gram_eigs = np.linalg.eigvalsh(f.conj().T @ f)
            assert np.allclose(np.sqrt(gram_eigs), [0.5, 0.5])
        rep = du_bounds(ck)
        assert rep.ub == pytest.approx(1.0, abs=1e-12)
        assert rep.lb1 == pytest.approx(0.25, abs=1e-12)
        assert rep.lb2 == pytest.approx(0.25, abs=1e-12)

    def test_bound_ordering_random(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            ck = canonicalize(random_channel(2, int(rng.integers(1, 5)), rng))
            rep = du_bounds(ck)
            assert rep.lb1_simplified <= rep.lb1 + 1e-12
            assert max(rep.lb1, rep.lb2) <= rep.ub + 1e-9
            assert rep.ub <= 1.0 + 1e-12

    def test_witnesses_are_unitary(self):
        rep = du_bounds(canonicalize(standard_channel("amplitude_damping", 0.7)))
        for w in (rep.witness_lb1, rep.witness_lb2):
            assert np.linalg.norm(w.conj().T @ w - np.eye(2)) <= 1e-9


class TestOptimizer:
    def test_amplitude_damping(self):
        ch = standard_channel("amplitude_damping", 0.36)
        res = du_optimize(ch, restarts=8, rng=np.random.default_rng(4))
        assert res.method == "numerical_optimizer"
        assert res.value == pytest.approx(0.81, abs=1e-9)
        # nearest unitary is the identity up to a global phase
        assert abs(np.trace(res.witness)) == pytest.approx(2.0, abs=1e-6)
        assert res.converged

    def test_depolarizing(self):
        res = du_optimize(standard_channel("depolarizing", 0.2), restarts=8,
                          rng=np.random.default_rng(5))
        assert res.value == pytest.approx(0.85, abs=1e-9)

    def test_matches_exact_on_mixed_unitary(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            ch = random_mixed_unitary_channel(rng)
            exact = du_exact_mixed_unitary(as_mixed_unitary(canonicalize(ch)))
            opt = du_optimize(ch, restarts=4, rng=rng)
            assert abs(exact.value - opt.value) < 1e-6

    def test_matches_closed_form_oracle(self):
        # independent check: qubit DU reduces to a 4x4 real symmetric
        # eigenproblem; the ascent must reach that optimum
        rng = np.random.default_rng(7)
        for _ in range(50):
            ch = random_channel(2, int(rng.integers(2, 5)), rng)
            oracle, _ = qubit_du_oracle(ch.kraus)
            opt = du_optimize(ch, restarts=8, rng=rng)
            assert opt.value == pytest.approx(oracle, abs=1e-9)

    def test_objective_trace_monotone(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            ch = random_channel(2, 4, rng)
            res = du_optimize(ch, restarts=4, rng=rng, trace=True)
            seq = np.array(res.objective_trace)
            assert np.all(np.diff(seq) >= -1e-12 * np.maximum(1.0, seq[:-1]))

    def test_witness_reproduces_value(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            ch = random_channel(2, 2, rng)
            res = du_optimize(ch, restarts=4, rng=rng)
            assert abs(process_fidelity(ch, res.witness) - res.value) <= 1e-9

    def test_deterministic_default_rng(self):
        ch = standard_channel("amplitude_damping", 0.5)
        a = du_optimize(ch)
        b = du_optimize(ch)
        assert a.value == b.value
        assert np.array_equal(a.witness, b.witness)

    def test_rejects_invalid_channel(self):
        from unitarity import ChannelValidationError

        with pytest.raises(ChannelValidationError):
            du_optimize(KrausChannel(2, (0.9 * np.eye(2),)))


class TestDispatcher:
    def test_identity(self):
        res, rep = du(identity_channel(2))
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.method == "exact_mixed_unitary"
        assert rep.ub == pytest.approx(1.0, abs=1e-12)

    def test_amplitude_damping(self):
        res, rep = du(standard_channel("amplitude_damping", 0.36), restarts=8)
        assert res.method == "numerical_optimizer"
        assert res.value == pytest.approx(0.81, abs=1e-9)
        assert rep.lb1 == pytest.approx(0.81, abs=1e-12)
        assert rep.ub == pytest.approx(0.90, abs=1e-12)

    def test_fully_depolarizing(self):
        res, _ = du(standard_channel("depolarizing", 1.0))
        assert res.value == pytest.approx(0.25, abs=1e-9)
        assert res.method == "exact_mixed_unitary"

    def test_sandwich_and_range(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            ch = random_channel(2, int(rng.integers(1, 5)), rng)
            res, rep = du(ch, restarts=4, rng=rng)
            assert max(rep.lb1, rep.lb2) - 1e-9 <= res.value <= rep.ub + 1e-9
            assert 0.25 - 1e-9 <= res.value <= 1.0 + 1e-9

    def test_kraus_representation_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            ch = random_channel(2, 2, rng)
            base, _ = du(ch, restarts=8, rng=rng)
            remixed, _ = du(remix_kraus(ch, rng, extra=2), restarts=8, rng=rng)
            assert abs(base.value - remixed.value) <= 1e-8

    def test_unitary_composition_invariance(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            ch = random_channel(2, 2, rng)
            u = unitary_channel(haar_unitary(2, rng))
            base, _ = du(ch, restarts=8, rng=rng)
            pre, _ = du(compose(ch, u), restarts=8, rng=rng)
            post, _ = du(compose(u, ch), restarts=8, rng=rng)
            assert abs(base.value - pre.value) <= 1e-8
            assert abs(base.value - post.value) <= 1e-8

    def test_monotone_under_post_composition(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            e = random_channel(2, 2, rng)
            f = random_channel(2, 2, rng)
            du_e, _ = du(e, restarts=4, rng=rng)
            du_fe, _ = du(compose(f, e), restarts=4, rng=rng)
            assert du_fe.value <= du_e.value + 1e-8

    def test_table_closed_forms(self):
        from unitarity import closed_form_du

        rng = np.random.default_rng(14)
        for kind in ("depolarizing", "bit_flip", "phase_flip", "amplitude_damping"):
            for p in rng.uniform(0.0, 1.0, 12):
                res, _ = du(standard_channel(kind, float(p)), restarts=4)
                assert abs(res.value - closed_form_du(kind, float(p))) <= 1e-9


class TestPauliChannelEdge:
    def test_equal_weight_xy_mixture(self):
        # 0.5 X + 0.5 Y mixture: degenerate canonical weights, still exact
        ch = KrausChannel(2, (np.sqrt(0.5) * PAULI_X, np.sqrt(0.5) * PAULI_Y))
        res, rep = du(ch)
        assert res.value == pytest.approx(0.5, abs=1e-9)
        oracle, _ = qubit_du_oracle(ch.kraus)
        assert oracle == pytest.approx(0.5, abs=1e-12)

    def test_dephasing_projectors(self):
        # {|0><0|, |1><1|}: not mixed-unitary; the optimum aligns with Z
        # diagonals giving exactly 1/2
        ch = KrausChannel(
            2,
            (
                np.array([[1, 0], [0, 0]], dtype=complex),
                np.array([[0, 0], [0, 1]], dtype=complex),
            ),
        )
        res, rep = du(ch, restarts=8)
        assert res.method == "numerical_optimizer"
        assert res.value == pytest.approx(0.5, abs=1e-9)
        assert rep.ub == pytest.approx(0.5, abs=1e-12)

    def test_paulis_are_fixed_points_not_traps(self):
        # fully depolarizing: every unitary scores exactly 1/4
        ch = standard_channel("depolarizing", 1.0)
        rng = np.random.default_rng(15)
        for _ in range(5):
            u = haar_unitary(2, rng)
            assert process_fidelity(ch, u) == pytest.approx(0.25, abs=1e-12)
        oracle, _ = qubit_du_oracle(ch.kraus)
        assert oracle == pytest.approx(0.25, abs=1e-12)

    def test_optimizer_handles_pauli_z_mixture(self):
        ch = KrausChannel(2, (np.sqrt(0.7) * PAULI_Z, np.sqrt(0.3) * np.eye(2, dtype=complex)))
        res, _ = du(ch)
        assert res.value == pytest.approx(0.7, abs=1e-9)
