"""Ring-machine tests: parser, frozen classical runs, and the differential
check of the one-head unitary against direct table execution."""

import numpy as np
import pytest

from qthue import qrm


HALTING = ["bounce", "flip", "shuttle", "stamp", "turn"]


def tm(name: str) -> qrm.Tm:
    return qrm.parse_tm(qrm.EXAMPLES[name])


def test_render_round_trip():
    for name in sorted(qrm.EXAMPLES):
        text = tm(name).render()
        assert qrm.parse_tm(text).render() == text


def test_invalid_table_rejected():
    machine = qrm.parse_tm(qrm.EXAMPLE_INVALID)
    problems = machine.validate()
    assert "state mid is entered from both directions" in problems
    assert "state mid is entered writing the same symbol twice" in problems
    with pytest.raises(ValueError, match="not runnable"):
        qrm.run_ring(machine, 4)


def test_syntax_errors_raise():
    with pytest.raises(qrm.TmFormatError):
        qrm.parse_tm("states: a b\ndelta: a,_ -> _,right,b\n")
    with pytest.raises(qrm.TmFormatError):
        qrm.parse_tm("states: a b\nalphabet: _\ndelta: nonsense\n")


def test_stamp_run():
    r = qrm.run_ring(tm("stamp"), 5)
    assert r.halted and not r.capped
    assert r.tape == ["1", "1", "1", "_", "_"]
    assert r.halted_cell == 2
    assert r.state == "stop"
    assert (r.executions, r.applications) == (3, 3)
    assert r.accept_overlap == 0.0


def test_bounce_run():
    # walks right, turns, walks back; the reversal costs idle applications
    r = qrm.run_ring(tm("bounce"), 4)
    assert r.tape == ["b", "a", "_", "_"]
    assert r.halted_cell == 0
    assert (r.executions, r.applications) == (3, 6)


def test_shuttle_run():
    r = qrm.run_ring(tm("shuttle"), 4)
    assert r.tape == ["z", "x", "_", "z"]
    assert r.halted_cell == 0
    assert (r.executions, r.applications) == (5, 13)


def test_orbit_caps():
    r = qrm.run_ring(tm("orbit"), 4, max_applications=40)
    assert r.capped and not r.halted
    assert r.applications == 40


def test_input_layout():
    assert qrm.input_layout(5, [1, 0, 1]) == [0, 1, 0, 1, 0]
    assert qrm.input_layout(4, []) == [0, 0, 0, 0]
    with pytest.raises(ValueError):
        qrm.input_layout(3, [1, 1, 1])


def test_bits_length_checked():
    with pytest.raises(ValueError):
        qrm.run_ring(tm("flip"), 4, bits=[1, 0])


def test_flip_accepts_odd_parity():
    machine = tm("flip")
    r = qrm.run_ring(machine, 4, bits=qrm.input_layout(4, [1]))
    assert r.halted
    assert r.accept_overlap == pytest.approx(1.0)
    r = qrm.run_ring(machine, 4, bits=qrm.input_layout(4, []))
    assert r.accept_overlap == pytest.approx(0.0)


def test_state_vector_norm_and_trace():
    r = qrm.run_ring(tm("turn"), 4, collect_trace=True)
    assert np.linalg.norm(r.psi) == pytest.approx(1.0)
    # the trace keeps only applications whose window held the head
    assert len(r.trace) == r.executions
    assert r.sweeps == pytest.approx(r.applications / 4)


def test_head_unitary_is_classical_permutation():
    h = qrm.HeadUnitary(tm("flip"))
    assert len(h.cell_states()) == 40
    h.assert_classical_permutation()
    m = h.matrix()
    assert m.shape == (6400, 6400)
    np.testing.assert_allclose(m @ m.conj().T, np.eye(6400), atol=1e-12)


@pytest.mark.parametrize("name", HALTING)
def test_differential_small(name):
    d = qrm.differential_test(tm(name), 4)
    assert d["match"], d


def test_differential_sweep():
    # every halting example, rings of 4..8 cells, three input patterns
    count = 0
    for name in HALTING:
        machine = tm(name)
        for n in range(4, 9):
            for bits in (None, [1], [1, 0, 1][: n - 1]):
                layout = None if bits is None else qrm.input_layout(n, bits)
                d = qrm.differential_test(machine, n, bits=layout)
                assert d["match"], (name, n, bits, d)
                assert d["psi_diff"] <= 1e-12
                count += 1
    assert count == 75


def test_differential_reports_mismatch_fields():
    d = qrm.differential_test(tm("orbit"), 4, max_steps=30)
    assert not d["match"]
    assert not d["checks"]["both_halted"]


def test_run_report_is_json():
    import json
    r = qrm.run_ring(tm("stamp"), 4)
    rep = json.loads(qrm.run_report(r).splitlines()[0])
    assert rep["state"] == "stop"
    assert rep["applications"] == r.applications
