import math

import pytest

from rydcool import units
from rydcool.constants import EA0_IN_DEBYE
from rydcool.errors import SchemaError
from rydcool.scenario import load_scenario, parse_scenario

MINIMAL_CHAIN = """\
kind: swap-chain
name: single
parameters:
  N: 1
  omega_over_G: 50
"""


def test_minimal_swap_chain():
    sc = parse_scenario(MINIMAL_CHAIN)
    assert sc.kind == "swap-chain"
    assert sc.parameters["N"] == [1]
    assert sc.parameters["omega_over_G"] == [50.0]
    assert sc.parameters["initial"] == "thermal"
    assert sc.output_path == "single.csv"
    assert len(sc.source_hash) == 64


@pytest.mark.parametrize(
    "text,want",
    [
        ("25 kHz", 25.0),
        ("2pi*25 kHz", 25.0),
        ("2π×25 kHz", 25.0),
        ("1.5 MHz", 1500.0),
        ("500 Hz", 0.5),
        ("314.1592653589793 krad/s", 50.0),
        ("2pi*50 krad/s", 50.0),
        (12.5, 12.5),
        ({"value": 25, "unit": "kHz", "two_pi": True}, 25.0),
    ],
)
def test_frequency_units(text, want):
    assert units.frequency(text) == pytest.approx(want, rel=1e-12)


def test_other_quantities():
    assert units.length("800 nm") == pytest.approx(0.8)
    assert units.dipole("3000 ea0") == pytest.approx(3000 * EA0_IN_DEBYE)
    assert units.magnetic_field("1 T") == pytest.approx(1000.0)
    assert units.angle("90 deg") == pytest.approx(math.pi / 2)
    assert units.dispersion(6)("-3062 kHz um^6") == pytest.approx(-3062.0)
    assert units.dispersion(6)("2pi*-3062 kHz um^6") == pytest.approx(-3062.0)


@pytest.mark.parametrize(
    "parser,value",
    [
        (units.frequency, "3 um"),
        (units.length, "2pi*1 um"),
        (units.dimensionless, "5 kHz"),
        (units.dispersion(6), "5 kHz um^3"),
        (units.frequency, True),
        (units.frequency, "fast"),
    ],
)
def test_unit_errors(parser, value):
    with pytest.raises(units.UnitError):
        parser(value)


def test_missing_gamma_r_is_named():
    text = """\
kind: range
parameters:
  rows:
    - {label: x, G_ref: 10 kHz, power: 8}
"""
    with pytest.raises(SchemaError) as exc:
        parse_scenario(text)
    assert "gamma_r" in str(exc.value)
    assert exc.value.line == 4


def test_unknown_key_has_position():
    text = "kind: fidelity\nparameters:\n  a2: 0.5\n  n: 20\n  epsilon: 0.05\n  bogus: 1\n"
    with pytest.raises(SchemaError) as exc:
        parse_scenario(text)
    assert exc.value.field == "parameters.bogus"
    assert (exc.value.line, exc.value.column) == (6, 3)


def test_bad_unit_reports_field_and_line():
    text = "kind: hyperfine\nparameters:\n  molecule: NaCs\n  B: 5 kHz\n"
    with pytest.raises(SchemaError) as exc:
        parse_scenario(text)
    assert exc.value.field == "parameters.B"
    assert exc.value.line == 4


@pytest.mark.parametrize(
    "text",
    [
        "kind: [unclosed\n",
        "- just\n- a list\n",
        "kind: teleport\nparameters: {}\n",
        "kind: fidelity\n",
        "kind: fidelity\nparameters:\n  a2: 0.5\n  n: 20\n",
        "kind: swap-chain\nparameters:\n  N: 1.5\n  omega_over_G: 50\n",
        "kind: swap-chain\nparameters:\n  N: 1\n  omega_over_G: 50\n  initial: fock\n",
        "kind: expand\nparameters: {}\n",
        "kind: fidelity\noutput: ../escape.csv\nparameters: {a2: 0.5, n: 20, epsilon: 0.1}\n",
        "kind: interactions\nparameters:\n  channels:\n    - {label: a, N: 2, Ntilde: 3, J: 1/2, Jtilde: 1/2}\n",
    ],
)
def test_schema_rejections(text):
    with pytest.raises(SchemaError):
        parse_scenario(text)


def test_missing_file():
    with pytest.raises(SchemaError):
        load_scenario("/nonexistent/scenario.yaml")


def test_half_integer_fields():
    text = """\
kind: interactions
parameters:
  channels:
    - {label: a, N: 2, Ntilde: 3, J: 1/2, Jtilde: 3/2, c6: -100 kHz um^6}
  theta: 90 deg
"""
    sc = parse_scenario(text)
    ch = sc.parameters["channels"][0]
    assert str(ch["Jtilde"]) == "3/2"
    assert sc.parameters["theta"] == pytest.approx(math.pi / 2)
