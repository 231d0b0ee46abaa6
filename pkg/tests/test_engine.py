"""Kernel semantics: dispatch order, clock discipline, replication end."""

import pytest

from crossdock_sim.engine import (END_REPLICATION, Simulation, SimulationError,
                                  TraceEvent, Tracer)


def test_events_dispatch_in_time_order():
    sim = Simulation(length=100.0)
    seen = []
    for t in (5.0, 1.0, 3.0):
        sim.schedule(t, "arrival", f"at-{t:g}", lambda t=t: seen.append(t))
    sim.run()
    assert seen == [1.0, 3.0, 5.0]
    assert sim.clock == 100.0


def test_simultaneous_events_dispatch_in_insertion_order():
    sim = Simulation(length=10.0)
    seen = []
    for tag in ("first", "second", "third"):
        sim.schedule(2.0, "arrival", tag, lambda tag=tag: seen.append(tag))
    sim.run()
    assert seen == ["first", "second", "third"]


def test_actions_can_schedule_followups():
    sim = Simulation(length=50.0)
    times = []

    def hop():
        times.append(sim.clock)
        if sim.clock < 30.0:
            sim.schedule_after(10.0, "arrival", "hopper", hop)

    sim.schedule(0.0, "arrival", "hopper", hop)
    sim.run()
    assert times == [0.0, 10.0, 20.0, 30.0]


def test_scheduling_in_the_past_is_an_error():
    sim = Simulation(length=10.0)
    sim.schedule(5.0, "arrival", "a", lambda: None)
    assert sim.next_event() is not None
    with pytest.raises(SimulationError, match="clock is already"):
        sim.schedule(4.0, "arrival", "b", lambda: None)


def test_events_past_the_length_never_dispatch():
    sim = Simulation(length=10.0)
    seen = []
    sim.schedule(9.0, "arrival", "in", lambda: seen.append("in"))
    sim.schedule(11.0, "arrival", "out", lambda: seen.append("out"))
    sim.run()
    assert seen == ["in"]
    assert sim.clock == 10.0
    assert sim.pending == 1  # the undispatched event stays on the list


def test_event_exactly_at_the_length_dispatches():
    sim = Simulation(length=10.0)
    seen = []
    sim.schedule(10.0, "arrival", "edge", lambda: seen.append("edge"))
    sim.run()
    assert seen == ["edge"]


def test_clock_rests_at_length_when_list_drains_early():
    sim = Simulation(length=100.0)
    sim.schedule(7.0, "arrival", "only", lambda: None)
    sim.run()
    assert sim.clock == 100.0


def test_invalid_length_rejected():
    with pytest.raises(ValueError):
        Simulation(length=0.0)
    with pytest.raises(ValueError):
        Simulation(length=-5.0)


def test_next_event_returns_the_dispatched_record():
    sim = Simulation(length=10.0)
    sim.schedule(3.0, "arrival", "x", lambda: None)
    record = sim.next_event()
    assert (record.time, record.kind, record.subject) == (3.0, "arrival", "x")
    assert sim.next_event() is None
    assert sim.next_event() is None  # idempotent after the end


def test_trace_is_stamped_with_the_current_clock():
    tracer = Tracer()
    sim = Simulation(length=10.0, tracer=tracer)
    sim.schedule(4.0, "arrival", "o", lambda: sim.trace("arrival", "o", "note"))
    sim.run()
    kinds = [(ev.time, ev.kind) for ev in tracer.events]
    assert kinds == [(4.0, "arrival"), (10.0, END_REPLICATION)]


def test_end_replication_traced_exactly_once():
    tracer = Tracer()
    sim = Simulation(length=5.0, tracer=tracer)
    sim.run()
    sim.run()
    ends = [ev for ev in tracer.events if ev.kind == END_REPLICATION]
    assert len(ends) == 1
    assert ends[0].time == 5.0


def test_tracing_without_a_tracer_is_a_no_op():
    sim = Simulation(length=5.0)
    sim.trace("arrival", "x", "ignored")
    sim.run()


def test_trace_line_format():
    ev = TraceEvent(12.5, "start-service", "Skilled.P1", "order-3 type=MIR")
    assert ev.line() == "12.500000\tstart-service\tSkilled.P1\torder-3 type=MIR"
