"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines on a green run.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from pathlib import Path

from agentacl import (
    ActiveSnapshot,
    ApiGate,
    DifferenceEngine,
    Permission,
    PermissionStore,
    check_access,
    parse_rvs,
    render_rvs,
    replay_audit,
    validate_rvs,
)
from agentacl.casestudies import (
    game_page,
    game_web_config,
    install_case_studies,
    outlook_page,
    outlook_web_config,
)
from agentacl.gate import unmet_pairs
from agentacl.model import new_permission_id
from agentacl.web import DomSnapshot, compute_mask, evaluate_rvss, number_to_month, parse_rvss
from agentacl.web.rvss import MONTH_NAMES
from conftest import (
    CALENDAR_UNIVERSE,
    GAME_UNIVERSE,
    concrete,
    concrete_interval,
    concrete_union,
)

GOLDENS = Path(__file__).parent / "goldens"


def fresh_gate(audit_path=None):
    engine = DifferenceEngine()
    store = PermissionStore(engine, audit_path)
    gate = ApiGate(engine, store)
    install_case_studies(engine, gate)
    return engine, store, gate


def unmet(decision):
    return [(render_rvs(r), a) for r, a in unmet_pairs(decision.check)]


def run_game_scenarios(gate, store):
    """Tic-tac-toe replay: deny, grant read, allow/deny, grant write, allow."""
    first = gate.intercept("tictactoe", "get_games", {})
    assert first.outcome == "deny"
    assert unmet(first) == [("Game:GameId(?)", "read")]

    store.add_permission("tictactoe", "GameId(?)", "read")
    second = gate.intercept("tictactoe", "get_games", {})
    assert second.outcome == "allow"

    third = gate.intercept("tictactoe", "delete_game", {"game_id": 7})
    assert third.outcome == "deny"
    assert unmet(third) == [("Game:GameId(7)", "write")]

    store.add_permission("tictactoe", "GameId(?)", "write")
    fourth = gate.intercept("tictactoe", "delete_game", {"game_id": 7})
    assert fourth.outcome == "allow"


def run_flight_scenarios(gate, store):
    """Flight-booking replay: scenarios A, B, and C in order."""
    june = {"start_date": "2026-06-01", "end_date": "2026-06-30"}
    july = {"start_date": "2026-07-01", "end_date": "2026-07-31"}

    # A: June read denied, granted, retried successfully
    a1 = gate.intercept("calendar", "check_availability", june)
    assert a1.outcome == "deny"
    assert unmet(a1) == [("Calendar:Year(2026)::Month(June)", "read")]
    store.add_permission("calendar", "Year(2026)::Month(June)", "read")
    a2 = gate.intercept("calendar", "check_availability", june)
    assert a2.outcome == "allow"

    # B: July read blocked by scope; create blocked by action
    b1 = gate.intercept("calendar", "check_availability", july)
    assert b1.outcome == "deny"
    assert unmet(b1) == [("Calendar:Year(2026)::Month(July)", "read")]
    b2 = gate.intercept("calendar", "add_event", {"start_date": "2026-06-29"})
    assert b2.outcome == "deny"
    assert unmet(b2) == [("Calendar:Year(2026)::Month(June)::Day(29)", "create")]

    # C: flight search allowed under a flight-read grant; booking denied
    # until the specific create grant; wallet read denied
    store.add_permission("expedia", "Destination(?)::Flight(?)", "read")
    c1 = gate.intercept("expedia", "search_flights", {"from": "SEA", "to": "SLC"})
    assert c1.outcome == "allow"
    c2 = gate.intercept("expedia", "book_flight", {"flight": "DL 1847"})
    assert c2.outcome == "deny"
    assert unmet(c2) == [("Travel:Destination(?)::Flight(DL 1847)", "create")]
    store.add_permission("expedia", "Destination(?)::Flight(DL 1847)", "create")
    c3 = gate.intercept("expedia", "book_flight", {"flight": "DL 1847"})
    assert c3.outcome == "allow"
    c4 = gate.intercept("wallet", "get_credit_cards", {})
    assert c4.outcome == "deny"
    assert unmet(c4) == [("Wallet:CreditCard(?)", "read")]


def test_scenario_replays_game():
    engine, store, gate = fresh_gate()
    start = time.perf_counter()
    run_game_scenarios(gate, store)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"game scenario took {elapsed:.3f}s"
    print("\nACCEPTANCE scenario-replays-game: PASS")


def test_flight_booking_replays():
    engine, store, gate = fresh_gate()
    start = time.perf_counter()
    run_flight_scenarios(gate, store)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"flight scenarios took {elapsed:.3f}s"
    print("\nACCEPTANCE flight-booking-replays: PASS")


def test_difference_engine_oracle_equivalence():
    engine, store, gate = fresh_gate()
    import conftest

    engine.add_forest(
        "unixcal",
        __import__("agentacl").load_forest(conftest.INTERVAL_FOREST_JSON),
    )
    start = time.perf_counter()
    violations = 0

    def resolved(app, text):
        return validate_rvs(parse_rvs(text), engine.forest(app))

    # enums: exhaustive pairs over both finite universes
    game_forms = [f"GameId({i})" for i in range(1, 6)] + ["GameId(?)"]
    cal_forms = (
        ["Year(2026)"]
        + [f"Year(2026)::Month({m})" for m in MONTH_NAMES]
        + ["Year(2026)::Month(?)"]
    )
    for app, forms, universe in (
        ("tictactoe", game_forms, GAME_UNIVERSE),
        ("calendar", cal_forms, CALENDAR_UNIVERSE),
    ):
        for n_text, h_text in itertools.product(forms, forms):
            need = resolved(app, n_text)
            have = resolved(app, h_text)
            result = engine.resolve(app, need, have)
            inside = concrete_union(result, universe) <= concrete(need, universe)
            oracle_empty = not (concrete(need, universe) - concrete(have, universe))
            if not inside or (not result) != oracle_empty:
                violations += 1

    # intervals: 10^4 random samples, exact equality with the integer oracle
    rng = random.Random(2026)
    for _ in range(10_000):
        nlo = rng.randrange(0, 999)
        nhi = rng.randrange(nlo, 1000)
        if rng.random() < 0.1:
            h_text = "Interval(?)"
            have_set = frozenset(range(0, 1000))
        else:
            hlo = rng.randrange(0, 999)
            hhi = rng.randrange(hlo, 1000)
            h_text = f"Interval({hlo}-{hhi})"
            have_set = frozenset(range(hlo, hhi))
        need = resolved("unixcal", f"Interval({nlo}-{nhi})")
        have = resolved("unixcal", h_text)
        result = engine.resolve("unixcal", need, have)
        got = frozenset()
        for spec in result:
            got |= concrete_interval(spec)
        if got != frozenset(range(nlo, nhi)) - have_set:
            violations += 1

    elapsed = time.perf_counter() - start
    assert violations == 0
    assert elapsed < 30.0, f"oracle equivalence took {elapsed:.1f}s"
    print("\nACCEPTANCE difference-oracle-equivalence: PASS "
          f"({elapsed:.1f}s, 0 violations)")


def test_algorithm_one_properties():
    engine, store, gate = fresh_gate()
    import conftest

    engine.add_forest(
        "unixcal",
        __import__("agentacl").load_forest(conftest.INTERVAL_FOREST_JSON),
    )

    def mk_perm(app, text, action):
        return Permission(
            id=new_permission_id(),
            rvs=validate_rvs(parse_rvs(text), engine.forest(app)),
            action=action,
        )

    def oracle(app, kind, needs, grants):
        for spec, action in needs:
            if kind == "interval":
                need_set = concrete_interval(spec)
                covered = frozenset()
                for g in grants:
                    if g.action == action:
                        covered |= concrete_interval(g.rvs)
            else:
                universe = GAME_UNIVERSE if kind == "game" else CALENDAR_UNIVERSE
                need_set = concrete(spec, universe)
                covered = concrete_union(
                    [g.rvs for g in grants if g.action == action], universe
                )
            if not need_set <= covered:
                return "denied"
        return "granted"

    rng = random.Random(99)
    months = list(MONTH_NAMES)
    cases = 0
    violations = 0
    start = time.perf_counter()
    while cases < 10_000:
        kind = rng.choice(["game", "calendar", "interval"])
        if kind == "game":
            app, actions = "tictactoe", ("read", "write")
            pool = [f"GameId({i})" for i in range(1, 6)] + ["GameId(?)"]
            need_pool = pool
        elif kind == "calendar":
            app, actions = "calendar", ("read", "write", "create")
            pool = (
                ["Year(2026)"]
                + [f"Year(2026)::Month({m})" for m in months]
                + ["Year(2026)::Month(?)"]
            )
            need_pool = pool
        else:
            app, actions = "unixcal", ("read",)

            # non-empty ranges only: an empty need ([x,x)) is degenerate --
            # the algorithm starts from {Need} and can only empty it by
            # subtraction, so with zero grants it denies where pure set
            # semantics would vacuously grant
            def rand_interval():
                lo = rng.randrange(0, 999)
                return f"Interval({lo}-{rng.randrange(lo + 1, 1001)})"

            pool = [rand_interval() for _ in range(8)] + ["Interval(?)"]
            need_pool = pool[:-1]
        grants = [
            mk_perm(app, rng.choice(pool), rng.choice(actions))
            for _ in range(rng.randrange(0, 5))
        ]
        needs = [
            (validate_rvs(parse_rvs(rng.choice(need_pool)), engine.forest(app)), rng.choice(actions))
            for _ in range(rng.randrange(1, 3))
        ]
        snap = ActiveSnapshot(tuple(grants), cases)
        decision = check_access(engine, app, needs, snap).decision
        if decision != oracle(app, kind, needs, grants):
            violations += 1
        for ordering in itertools.permutations(grants):
            if (
                check_access(engine, app, needs, ActiveSnapshot(ordering, cases)).decision
                != decision
            ):
                violations += 1
                break
        if decision == "granted":
            extra = grants + [mk_perm(app, rng.choice(pool), rng.choice(actions))]
            if (
                check_access(engine, app, needs, ActiveSnapshot(tuple(extra), cases)).decision
                != "granted"
            ):
                violations += 1
        cases += 1
    elapsed = time.perf_counter() - start
    assert cases >= 10_000
    assert violations == 0
    print(f"\nACCEPTANCE algorithm-one-properties: PASS ({cases} cases, "
          f"0 violations, {elapsed:.1f}s)")


def _sorted_plan(engine, store, app, config, dom):
    plan = compute_mask(engine, app, config, dom, store.capture_snapshot(app))
    return json.dumps(plan.to_json(), sort_keys=True, indent=2) + "\n"


def test_web_masking_goldens():
    engine, store, gate = fresh_gate()
    config = game_web_config()
    page = game_page()
    assert _sorted_plan(engine, store, "tictactoe", config, page) == (
        GOLDENS / "game_mask_no_grants.json"
    ).read_text()
    store.add_permission("tictactoe", "GameId(?)", "read")
    assert _sorted_plan(engine, store, "tictactoe", config, page) == (
        GOLDENS / "game_mask_read_only.json"
    ).read_text()
    store.add_permission("tictactoe", "GameId(?)", "write")
    assert _sorted_plan(engine, store, "tictactoe", config, page) == (
        GOLDENS / "game_mask_read_write.json"
    ).read_text()

    _, outlook_config = outlook_web_config()
    assert _sorted_plan(engine, store, "calendar", outlook_config, outlook_page()) == (
        GOLDENS / "calendar_mask_no_grants.json"
    ).read_text()
    store.add_permission("calendar", "Year(2026)::Month(June)", "read")
    june_plan = _sorted_plan(engine, store, "calendar", outlook_config, outlook_page())
    assert june_plan == (GOLDENS / "calendar_mask_june_read.json").read_text()
    # grid visible, Save and New event still blocked
    blocked_paths = [b["path"] for b in json.loads(june_plan)["blocked"]]
    assert "0/1/1/0" not in blocked_paths  # week grid
    assert "0/1/1/1/4" in blocked_paths  # Save
    assert "0/1/0/2/0" in blocked_paths  # New event
    print("\nACCEPTANCE web-masking-goldens: PASS")


def test_data_template_evaluation():
    assert number_to_month("06") == "June"
    template = parse_rvss(
        "Year($data{input[aria-label='Start date']}{split_slash}[2]@value)"
        "::Month($data{input[aria-label='Start date']}{split_slash}[0](number_to_month)@value)"
        "::Day($data{input[aria-label='Start date']}{split_slash}[1]@value)"
    )
    spec = evaluate_rvss(template, outlook_page())
    assert render_rvs(spec) == "Year(2026)::Month(June)::Day(29)"

    # missing start-date input: the dependent Save selector fails closed
    engine, store, gate = fresh_gate()
    for action in ("read", "write", "create"):
        store.add_permission("calendar", "Year(?)", action)
    html = "<html><body><span>Save</span></body></html>"
    _, config = outlook_web_config()
    plan = compute_mask(
        engine, "calendar", config, DomSnapshot.parse(html),
        store.capture_snapshot("calendar"),
    )
    [blocked] = plan.blocked
    assert blocked.reasons[0].error is not None
    print("\nACCEPTANCE data-template-evaluation: PASS")


def test_redundancy_detection_order_dependence():
    engine, store, gate = fresh_gate()
    year, warnings = store.add_permission("calendar", "Year(2026)", "read")
    assert warnings == []
    _, warnings = store.add_permission("calendar", "Year(2026)::Month(October)", "read")
    assert [w.id for w in warnings] == [year.id]

    engine2, store2, _ = fresh_gate()
    _, warnings = store2.add_permission("calendar", "Year(2026)::Month(October)", "read")
    assert warnings == []
    _, warnings = store2.add_permission("calendar", "Year(2026)", "read")
    assert warnings == []  # both coexist unflagged
    assert len(store2.permissions("calendar")) == 2
    print("\nACCEPTANCE redundancy-detection: PASS")


def test_audit_replay_zero_divergences(tmp_path):
    audit_path = tmp_path / "audit.ndjson"
    engine, store, gate = fresh_gate(audit_path)
    run_game_scenarios(gate, store)
    run_flight_scenarios(gate, store)
    # exercise yolo so auto-deploy records replay too
    store.set_mode("wallet", "yolo")
    assert gate.intercept("wallet", "get_credit_card", {"card": "GoldPlus"}).outcome == "deny"
    assert gate.intercept("wallet", "get_credit_card", {"card": "GoldPlus"}).outcome == "allow"
    store.close()

    report = replay_audit(engine, audit_path)
    assert report.accesses >= 12
    assert report.ok, report.divergences
    print(f"\nACCEPTANCE audit-replay: PASS ({report.records} records, "
          f"{report.accesses} accesses, 0 divergences)")


def test_mode_behavior():
    june = {"start_date": "2026-06-01", "end_date": "2026-06-30"}

    # ask: the message names every remaining pair
    engine, store, gate = fresh_gate()
    store.set_mode("calendar", "ask")
    decision = gate.intercept("calendar", "check_availability", june)
    assert decision.directive.ask_message == (
        "Access denied. Ask the user to grant: read on Calendar:Year(2026)::Month(June)"
    )

    # infer: suggests exactly the remaining set, deploys nothing
    engine, store, gate = fresh_gate()
    store.set_mode("calendar", "infer")
    decision = gate.intercept("calendar", "check_availability", june)
    assert [
        (render_rvs(r), a) for r, a in decision.directive.suggested_permissions
    ] == [("Calendar:Year(2026)::Month(June)", "read")]
    assert store.permissions("calendar") == []

    # yolo: deploys, logs perm_auto_deployed, single retry allows
    engine, store, gate = fresh_gate()
    store.set_mode("calendar", "yolo")
    decision = gate.intercept("calendar", "check_availability", june)
    assert decision.outcome == "deny" and decision.directive.retry is True
    assert len(store.query_audit(kind="perm_auto_deployed")) == 1
    retry = gate.intercept("calendar", "check_availability", june)
    assert retry.outcome == "allow"
    print("\nACCEPTANCE mode-behavior: PASS")
