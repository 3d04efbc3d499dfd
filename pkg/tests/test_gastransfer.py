import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aerobot.errors import ValidationError
from aerobot.gastransfer import (ActuatorState, CommandKind, TransferCommand,
                                 TransferDeviceSpec, apply_transfer,
                                 load_commands, pump_flow, poppet_flow,
                                 serialize_commands, vent_flow)


@pytest.fixture
def spec():
    return TransferDeviceSpec(pump_vdot=1.667e-4, vent_cd=0.6, vent_d=0.007,
                              poppet_cd=0.6, poppet_d=0.095)


class TestPumpFlow:
    def test_hand_value(self, spec):
        assert pump_flow(0.16, spec) == pytest.approx(2.667e-5, rel=1e-3)

    def test_off(self, spec):
        assert pump_flow(0.16, spec, on=False) == 0.0

    def test_linear_in_density(self, spec):
        assert pump_flow(0.32, spec) == pytest.approx(2 * pump_flow(0.16, spec))


class TestVentFlow:
    def test_no_pressure_difference(self, spec):
        assert vent_flow(1.0, 90_000.0, 90_000.0, spec) == 0.0

    def test_hand_value(self, spec):
        got = vent_flow(1.0, 100_000.0, 90_000.0, spec)
        assert got == pytest.approx(3.27e-3, rel=2e-3)

    def test_sqrt_scaling(self, spec):
        one = vent_flow(1.0, 100_000.0, 90_000.0, spec)
        four = vent_flow(1.0, 130_000.0, 90_000.0, spec)
        assert four == pytest.approx(2 * one, rel=1e-12)

    def test_no_reverse_flow(self, spec):
        assert vent_flow(1.0, 80_000.0, 90_000.0, spec) == 0.0

    def test_closed(self, spec):
        assert vent_flow(1.0, 100_000.0, 90_000.0, spec, open_=False) == 0.0


class TestPoppet:
    def test_flow_positive_when_pressurized(self, spec):
        assert poppet_flow(0.15, 90_100.0, 90_000.0, spec) > 0.0
        assert poppet_flow(0.15, 90_000.0, 90_000.0, spec) == 0.0


class TestApplyTransfer:
    def test_cancellation(self):
        m_sp, m_zp, lost, clamped = apply_transfer(1.0, 5.0, 1e-4, 1e-4, 0.0, 10.0)
        assert (m_sp, m_zp, lost) == (1.0, 5.0, 0.0)
        assert not clamped

    def test_pump_conserves_total(self):
        m_sp, m_zp, lost, _ = apply_transfer(1.0, 5.0, 2.667e-5, 0.0, 0.0, 10.0)
        assert m_sp == pytest.approx(1.0 + 2.667e-4, rel=1e-12)
        assert m_zp == pytest.approx(5.0 - 2.667e-4, rel=1e-12)
        assert m_sp + m_zp == pytest.approx(6.0, abs=1e-15)

    def test_poppet_moves_mass_to_lost(self):
        m_sp, m_zp, lost, _ = apply_transfer(1.0, 5.0, 0.0, 0.0, 1e-3, 10.0)
        assert m_sp == 1.0
        assert m_zp == pytest.approx(5.0 - 1e-2)
        assert lost == pytest.approx(1e-2)

    def test_clamp_at_floor(self):
        # vent would drain the reservoir below its floor within the step
        m_sp, m_zp, lost, clamped = apply_transfer(
            0.02, 5.0, 0.0, 1e-3, 0.0, 20.0, floor_sp=0.01)
        assert clamped
        assert m_sp == pytest.approx(0.01)
        assert m_sp + m_zp + lost == pytest.approx(5.02, abs=1e-15)

    def test_bad_dt(self):
        with pytest.raises(ValidationError):
            apply_transfer(1.0, 5.0, 0.0, 0.0, 0.0, 0.0)

    @given(st.floats(0, 1e-3), st.floats(0, 1e-3), st.floats(0.1, 10.0))
    @settings(max_examples=60, deadline=None)
    def test_closed_system_conservation(self, pump, vent, dt):
        m_sp, m_zp, lost, _ = apply_transfer(1.0, 5.0, pump, vent, 0.0, dt,
                                             floor_sp=0.01, floor_zp=0.05)
        assert lost == 0.0
        assert m_sp + m_zp == pytest.approx(6.0, rel=1e-12)

    def test_long_run_ledger(self):
        m_sp, m_zp, lost = 1.3, 6.6, 0.0
        for k in range(100_000):
            pump = 2.7e-5 if k % 3 else 0.0
            vent = 9.0e-4 if k % 7 == 0 else 0.0
            m_sp, m_zp, lost, _ = apply_transfer(m_sp, m_zp, pump, vent, 0.0, 0.5,
                                                 floor_sp=0.013, floor_zp=0.066)
        assert m_sp + m_zp + lost == pytest.approx(7.9, rel=1e-9)


class TestTimeline:
    def test_round_trip(self):
        cmds = [TransferCommand(10.0, CommandKind.VENT_OPEN),
                TransferCommand(70.0, CommandKind.VENT_CLOSE),
                TransferCommand(400.0, CommandKind.PUMP_ON)]
        assert load_commands(serialize_commands(cmds)) == cmds

    def test_unordered_rejected(self):
        with pytest.raises(ValidationError):
            load_commands("t_s,action\n10.0,vent_open\n5.0,vent_close\n")

    def test_unknown_action(self):
        with pytest.raises(ValidationError):
            load_commands("t_s,action\n10.0,warp_drive\n")

    def test_actuator_latching(self):
        st_ = ActuatorState()
        st_.apply(TransferCommand(0.0, CommandKind.PUMP_ON))
        st_.apply(TransferCommand(1.0, CommandKind.VENT_OPEN))
        assert st_.pump_on and st_.vent_open and not st_.poppet_open
        st_.apply(TransferCommand(2.0, CommandKind.PUMP_OFF))
        st_.apply(TransferCommand(3.0, CommandKind.POPPET_OPEN))
        assert not st_.pump_on and st_.poppet_open
