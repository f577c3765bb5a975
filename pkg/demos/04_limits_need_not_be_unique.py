"""Several statistical limits at once.

In the max space, delta(x, y) = max(x, y), so a point's self-distance is the
point itself.  The sequence 1/n sits within eps of its self-distance for
every candidate y once 1/n drops below y, and the target 0 is reached in the
usual way.  All three candidates pass.
"""

from metriclike import parse_spec, stat_limit_candidates

spec = parse_spec(
    """
    space max
    piece otherwise -> 1/n
    """
)
for y, rep in stat_limit_candidates(spec, [0, 1, "7/2"]).items():
    counts = [o.violation_count for o in rep.outcomes]
    print(f"candidate {y}: {rep.verdict}; violations per eps {counts}")
