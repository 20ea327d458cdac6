import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from lpwanplan.regulation import (
    OutOfBandError,
    ProfileParseError,
    ProfileValidationError,
    TransmissionEvent,
    TransmissionSchedule,
    applicable_power_limit,
    builtin_profiles,
    check_schedule,
    duty_cycle,
    get_profile,
    load_profiles,
    load_schedule,
)
from lpwanplan.regulation.compliance import max_window_on_time
from lpwanplan.regulation.profiles import for_variant

from compliance_golden import GOLDEN, eu_hourly

Ev = TransmissionEvent


def sched(events, **kw):
    return TransmissionSchedule(tuple(events), **kw)


# Every cell of the regulatory table, transcribed by hand. None marks "-".
REGULATION_CELLS = {
    "US": dict(bands=[(902, 928)], power={"hop>50": 30, "default": 24},
               hop_tiers=[((0, 250, False), 50), ((250, 500, True), 25)], hop_bw=500,
               spurious=54, band_duty=[],
               channel_duty=[((0, 250), 2, 20), ((250, 500), 4, 10)],
               methods=None, listen=None, csl=None, toff=None, tx_on=None, cumulative=None),
    "EU": dict(bands=[(863, 875.6)], power={(869.4, 869.6): 27, "default": 14},
               hop_tiers=None, hop_bw=None, spurious=66,
               band_duty=[((863, 868), 0.1, 3600), ((865, 868), 1, 3600),
                          ((868.7, 869.2), 0.1, 3600), ((869.4, 869.6), 10, 3600),
                          ((870, 875.6), 1, 3600)],
               channel_duty=[], methods={"LBT", "AFA"}, listen={"*": 160}, csl="n.a.",
               toff={"*": 100}, tx_on={"single": 1, "dialogue": 4},
               cumulative=({"*": 100}, 200)),
    "CN": dict(bands=[(779, 787)], power={"default": 10}, hop_tiers=None, hop_bw=None,
               spurious=66, band_duty=[], channel_duty=[], methods=None, listen=None,
               csl=None, toff=None, tx_on=None, cumulative=None),
    "JP": dict(bands=[(915.9, 916.9), (920.5, 929.7)], power={"default": 16},
               hop_tiers=None, hop_bw=None, spurious=66, band_duty=[], channel_duty=[],
               methods=set(), listen={"SCS": 128, "LCS": 5000}, csl=-80,
               toff={"SCS": 2, "LCS": 50}, tx_on={"SCS": 0.4, "LCS": 4},
               cumulative=({"SCS": 360}, None)),
    "IN": dict(bands=[(865, 867)], power={"default": 30}, hop_tiers=None, hop_bw=None,
               spurious=66, band_duty=[((865, 867), 1, 3600)], channel_duty=[],
               methods=None, listen=None, csl=None, toff=None,
               tx_on={"single": 1, "dialogue": 4}, cumulative=({"*": 100}, 200)),
    "BR": dict(bands=[(902, 907.5), (915, 928)], power={"hop>50": 30, "default": 24},
               hop_tiers=[((0, 250, False), 50), ((250, 500, True), 35)], hop_bw=500,
               spurious=54, band_duty=[],
               channel_duty=[((0, 250), 2, 20), ((250, 500), 4, 10)],
               methods=None, listen=None, csl=None, toff=None, tx_on=None, cumulative=None),
    "CA": dict(bands=[(902, 928)], power={"hop>50": 30, "default": 24},
               hop_tiers=[((0, 250, False), 50), ((250, 500, True), 25)], hop_bw=500,
               spurious=54, band_duty=[],
               channel_duty=[((0, 250), 2, 20), ((250, 500), 4, 10)],
               methods=None, listen=None, csl=None, toff=None, tx_on=None, cumulative=None),
}


def mhz(iv):
    return (iv.lo / 1e6, iv.hi / 1e6)


@pytest.mark.parametrize("region", sorted(REGULATION_CELLS))
def test_table3_recoverable(region):
    want = REGULATION_CELLS[region]
    p = get_profile(region)
    assert [mhz(b) for b in p.bands] == want["bands"]
    power = {}
    for t in p.power_tiers:
        if t.unconditional:
            power["default"] = t.limit_dbm
        elif t.sub_band is not None:
            power[mhz(t.sub_band)] = t.limit_dbm
        else:
            power[f"hop>{t.hop_channels_gt}"] = t.limit_dbm
    assert power == want["power"]
    if want["hop_tiers"] is None:
        assert p.hopping is None
    else:
        got = [((t.bandwidth.lo / 1e3, t.bandwidth.hi / 1e3, t.bandwidth.upper_inclusive),
                t.min_channels) for t in p.hopping.tiers]
        assert got == want["hop_tiers"]
        assert p.hopping.max_hop_channel_bandwidth_hz == want["hop_bw"] * 1000
    assert p.spurious_limit_dbuv_m == want["spurious"]
    assert [(mhz(r.sub_band), r.max_duty * 100, r.period_us / 1e6)
            for r in p.band_duty_rules] == [
        (band, pytest.approx(pct), period) for band, pct, period in want["band_duty"]]
    assert [((r.bandwidth.lo / 1e3, r.bandwidth.hi / 1e3), r.max_duty * 100, r.period_us / 1e6)
            for r in p.channel_duty_rules] == want["channel_duty"]
    if want["methods"] is None:
        assert p.polite is None
    else:
        assert p.polite.methods == want["methods"]
        assert p.polite.min_listen_window_us == want["listen"]
        csl = p.polite.carrier_sense_level_dbm
        assert (csl if csl is not None else "n.a.") == want["csl"]
        assert {k: v / 1e3 for k, v in p.polite.min_off_time_us.items()} == want["toff"]
    if want["tx_on"] is None:
        assert p.tx_on is None
    else:
        assert {k: v / 1e6 for k, v in p.tx_on.max_continuous_on_us.items()} == want["tx_on"]
        per_hour, slice_khz = want["cumulative"]
        assert {k: v / 1e6 for k, v in p.tx_on.cumulative_on_us_per_hour.items()} == per_hour
        got_slice = p.tx_on.cumulative_slice_hz
        assert (None if got_slice is None else got_slice / 1e3) == slice_khz


def test_jp_scs_off_time_condition():
    jp = get_profile("JP")
    assert jp.polite.min_off_applies_above_on_us == {"SCS": 6000}


class TestLoad:
    def test_seven_markets(self):
        assert [p.region_id for p in builtin_profiles()] == ["US", "EU", "CN", "JP", "IN", "BR", "CA"]

    def test_us_example(self):
        us = get_profile("us")
        assert mhz(us.bands[0]) == (902, 928)
        assert us.spurious_limit_dbuv_m == 54

    def test_jp_csl(self):
        assert get_profile("JP").polite.carrier_sense_level_dbm == -80

    def test_empty(self):
        assert load_profiles({}) == []
        assert load_profiles({"profiles": []}) == []
        assert load_profiles(io.StringIO("")) == []

    def test_round_trip(self):
        docs = [p.to_dict() for p in builtin_profiles()]
        assert load_profiles({"profiles": docs}) == builtin_profiles()

    def test_file(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"profiles": [get_profile("CN").to_dict()]}))
        (cn,) = load_profiles(str(path))
        assert cn == get_profile("CN")

    def test_missing_field_named(self):
        doc = dict(get_profile("CN").to_dict())
        del doc["power_tiers"]
        with pytest.raises(ProfileParseError, match="power_tiers"):
            load_profiles({"profiles": [doc]})

    def test_bad_json(self):
        with pytest.raises(ProfileParseError, match="invalid JSON"):
            load_profiles(io.StringIO("{nope"))

    def test_csl_key_required(self):
        doc = json.loads(json.dumps(get_profile("EU").to_dict()))
        del doc["polite"]["carrier_sense_level_dbm"]
        with pytest.raises(ProfileParseError, match="carrier_sense_level_dbm"):
            load_profiles([doc])

    @pytest.mark.parametrize("mutate, match", [
        (lambda d: d.update(bands_mhz=[[250, 400]]), "300-1000"),
        (lambda d: d.update(bands_mhz=[[870, 863]]), "below"),
        (lambda d: d["band_duty_rules"][0].update(max_duty_percent=0), "duty"),
        (lambda d: d["band_duty_rules"][0].update(max_duty_percent=120), "duty"),
        (lambda d: d["band_duty_rules"][0].update(period_s=0), "period"),
        (lambda d: d["power_tiers"][1].update(limit_dbm=40), "limit"),
        (lambda d: d["power_tiers"][0]["condition"].update(sub_band_mhz=[880, 890]), "outside"),
    ])
    def test_validation(self, mutate, match):
        doc = json.loads(json.dumps(get_profile("EU").to_dict()))
        mutate(doc)
        with pytest.raises(ProfileValidationError, match=match):
            load_profiles([doc])


class TestPowerLimit:
    def test_examples(self):
        us, eu = get_profile("US"), get_profile("EU")
        assert applicable_power_limit(us, 915, 60) == 30
        assert applicable_power_limit(us, 915, 40) == 24
        assert applicable_power_limit(us, 915, 50) == 24
        assert applicable_power_limit(eu, 869.5, 1) == 27
        assert applicable_power_limit(eu, 868.1, 1) == 14

    def test_sub_band_edges(self):
        eu = get_profile("EU")
        assert applicable_power_limit(eu, 869.4, 1) == 27
        assert applicable_power_limit(eu, 869.6, 1) == 14

    def test_out_of_band(self):
        with pytest.raises(OutOfBandError):
            applicable_power_limit(get_profile("JP"), 918, 1)
        with pytest.raises(OutOfBandError):
            applicable_power_limit(get_profile("EU"), 875.6, 1)


class TestDutyCycle:
    def test_examples(self):
        assert duty_cycle([Ev(0, 36, 868.1, 125, 14)], 3600) == 0.01
        assert duty_cycle([], 3600) == 0
        two = [Ev(0, 18, 868.1, 125, 14), Ev(28, 18, 868.1, 125, 14)]
        assert duty_cycle(two, 3600) == 0.01

    def test_sliding_not_calendar(self):
        # straddles the 3600 s mark: calendar windows would see half each
        evs = [Ev(3590, 10, 868.1, 125, 14), Ev(3600, 10, 868.3, 125, 14)]
        assert duty_cycle(evs, 20) == 1.0
        assert duty_cycle(evs, 40) == 0.5

    def test_pro_rata(self):
        assert duty_cycle([Ev(0, 10, 868.1, 125, 14), Ev(25, 10, 868.1, 125, 14)], 20) == 0.5

    def test_sub_band_filter(self):
        evs = [Ev(0, 36, 866, 125, 14), Ev(100, 36, 870.5, 125, 14)]
        assert duty_cycle(evs, 3600, (865, 868)) == 0.01
        assert duty_cycle(evs, 3600, (868, 870)) == 0
        assert duty_cycle(evs, 3600) == 0.02

    def test_bad_window(self):
        with pytest.raises(ValueError):
            duty_cycle([], 0)


def brute_on(intervals, w):
    best = 0
    for t in range(min(s for s, _ in intervals) - w, max(e for _, e in intervals) + 1):
        best = max(best, sum(max(0, min(e, t + w) - max(s, t)) for s, e in intervals))
    return best


interval_lists = st.lists(
    st.tuples(st.integers(0, 200), st.integers(1, 30)).map(lambda p: (p[0], p[0] + p[1])),
    min_size=1, max_size=8,
)


@settings(max_examples=60, deadline=None)
@given(interval_lists, st.integers(1, 80))
def test_window_matches_brute_force(intervals, w):
    assert max_window_on_time(intervals, w) == brute_on(intervals, w)


def event_lists():
    return st.lists(
        st.tuples(st.integers(0, 20_000), st.integers(1, 500)),
        min_size=1, max_size=15, unique_by=lambda t: t[0],
    ).map(lambda xs: [Ev(s / 10, d / 100, 868.1 + 0.2 * (i % 3), 125, 14)
                      for i, (s, d) in enumerate(sorted(xs))])


@settings(max_examples=60, deadline=None)
@given(event_lists(), st.sampled_from([0.5, 0.25, 0.2, 1.0]), st.integers(0, 4000))
def test_pro_rata_scaling(events, k, extra):
    # exact once the window spans the whole schedule
    window = max(e.start_s + e.duration_s for e in events) + extra
    scaled = [Ev(e.start_s, e.duration_s * k, e.center_mhz, e.bandwidth_khz, e.power_dbm)
              for e in events]
    assert duty_cycle(scaled, window) == pytest.approx(k * duty_cycle(events, window), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(event_lists(), st.integers(1, 4000))
def test_monotone_adding_events(events, window):
    for i in range(1, len(events)):
        assert duty_cycle(events[:i], window) <= duty_cycle(events[:i + 1], window)


@settings(max_examples=60, deadline=None)
@given(event_lists(), st.integers(0, 5000))
def test_monotone_enlarging_window(events, extra):
    span = max(e.start_s + e.duration_s for e in events) - events[0].start_s
    w = span + 1
    assert duty_cycle(events, w + extra) <= duty_cycle(events, w)


class TestSchedule:
    def test_unsorted(self):
        with pytest.raises(ValueError, match="sorted"):
            sched([Ev(5, 1, 868.1, 125, 14), Ev(0, 1, 868.1, 125, 14)])

    def test_overlap_same_center(self):
        with pytest.raises(ValueError, match="overlap"):
            sched([Ev(0, 2, 868.1, 125, 14), Ev(1, 1, 868.1, 125, 14)])
        sched([Ev(0, 2, 868.1, 125, 14), Ev(1, 1, 868.3, 125, 14)])

    def test_event_invariants(self):
        with pytest.raises(ValueError):
            Ev(0, 0, 868.1, 125, 14)
        with pytest.raises(ValueError):
            Ev(0, 1, 868.1, 0, 14)

    def test_json_round_trip(self):
        s = sched([Ev(0, 0.1, 921, 125, 13)], channel_count=3, variant="LCS")
        assert load_schedule(json.loads(json.dumps(s.to_dict()))) == s
        assert load_schedule([{"start_s": 0, "duration_s": 1, "center_mhz": 915,
                               "bandwidth_khz": 125, "power_dbm": 20}]).channel_count == 1


@pytest.mark.parametrize("name, region, schedule, overall, rules", GOLDEN,
                         ids=[g[0] for g in GOLDEN])
def test_golden(name, region, schedule, overall, rules):
    report = check_schedule(get_profile(region), schedule)
    assert report.overall == overall
    for rule, verdict in rules.items():
        assert report.get(rule).verdict == verdict, report.get(rule)


def test_golden_covers_every_region():
    assert {g[1] for g in GOLDEN} == set(REGULATION_CELLS)


@pytest.mark.parametrize("region", sorted(REGULATION_CELLS))
def test_empty_schedule_passes(region):
    assert check_schedule(get_profile(region), sched([])).overall == "pass"


def test_example_measurements():
    report = check_schedule(get_profile("EU"), eu_hourly())
    assert report.get("band_duty[869.4-869.6 MHz]").measured == pytest.approx(0.5)
    assert report.get("min_off_time").measured == pytest.approx(99_500)
    us = check_schedule(get_profile("US"), sched([Ev(0, 0.5, 915, 125, 20)]))
    assert us.get("channel_duty[0-250 kHz]").measured == pytest.approx(2.5)


def test_informational_rules():
    eu = check_schedule(get_profile("EU"), sched([]))
    cs = eu.get("carrier_sense")
    assert cs.verdict == "not-applicable" and "not defined" in cs.note
    jp = check_schedule(get_profile("JP"), sched([]))
    assert jp.get("carrier_sense").limit == -80
    assert jp.get("listen_window").limit == 128
    assert eu.get("spurious_emission").limit == 66


def test_variant_default_and_unknown():
    assert check_schedule(get_profile("JP"), sched([])).variant == "SCS"
    assert check_schedule(get_profile("US"), sched([])).variant is None
    with pytest.raises(ValueError, match="variant"):
        check_schedule(get_profile("JP"), sched([], variant="XYZ"))


def test_for_variant_wildcard():
    assert for_variant({"*": 5}, "single") == 5
    assert for_variant({"SCS": 1}, "LCS") is None


def test_deterministic_bytes():
    a = check_schedule(get_profile("EU"), eu_hourly()).to_json()
    b = check_schedule(get_profile("EU"), eu_hourly()).to_json()
    assert a == b
    assert json.loads(a)["overall"] == "pass"
