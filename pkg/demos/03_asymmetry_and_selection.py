"""
Channel asymmetry and max-min relay selection
=============================================

The gain NOMA offers over orthogonal schemes grows with how unequal the
multiplexed channels are.  The relay asymmetry metric multiplies the uplink
and downlink degrees of asymmetry; above 3 the network is considered
NOMA-favorable.  On a diamond network, a max-min baseline picks the single
relay with the best bottleneck hop, and validation warns when that choice
fights the NOMA decoding plan.
"""

from noma_relay import (
    NOMA_FAVORABLE_THRESHOLD,
    degree_of_asymmetry,
    make_scenario,
    maxmin_select,
    relay_asymmetry,
    validate,
)

print("degree of asymmetry (strong var / weak var):")
print(f"  (10, 1) -> {degree_of_asymmetry(10.0, 1.0):.1f}")
print(f"  (9, 3)  -> {degree_of_asymmetry(9.0, 3.0):.1f}")

print("\nrelay asymmetry = uplink degree * downlink degree:")
for vars_ in ((9.0, 3.0, 10.0, 2.0), (9.0, 3.8, 10.0, 5.0), (4.0, 4.0, 6.0, 6.0)):
    a = relay_asymmetry(*vars_)
    tag = "NOMA-favorable" if a > NOMA_FAVORABLE_THRESHOLD else "not flagged"
    print(f"  {vars_} -> {a:.2f} ({tag})")

# diamond: two relays, one message per path, max-min keeps the better bottleneck
settings = [
    {"SR1": 1.0, "SR2": 10.0, "R1U": 9.0, "R2U": 2.0},
    {"SR1": 1.0, "SR2": 10.0, "R1U": 2.0, "R2U": 9.0},
]
print("\nmax-min relay selection on the diamond:")
for vars_ in settings:
    k = maxmin_select([vars_["SR1"], vars_["SR2"]], [vars_["R1U"], vars_["R2U"]])
    bottlenecks = (min(vars_["SR1"], vars_["R1U"]), min(vars_["SR2"], vars_["R2U"]))
    print(f"  {vars_} -> relay {k} (bottlenecks {bottlenecks})")

# the structural validator ties the pieces together
spec = make_scenario("diamond", settings[0])
result = validate(spec)
print(f"\nvalidate(default diamond plans): ok={result.ok}")
for issue in result.issues:
    print(f"  [{issue.severity}] {issue.code}: {issue.message}")

bad = make_scenario("diamond", settings[0], decoding_plans=(("x1", "x2"), ("x2", "x1")))
result = validate(bad)
print(f"validate(mismatched-manner plans): ok={result.ok}")
for issue in result.issues:
    print(f"  [{issue.severity}] {issue.code}: {issue.message}")
