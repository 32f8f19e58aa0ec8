"""
Delta tables against the unperturbed baseline
=============================================

Feeding published R@1 scores for two models as fixtures and rendering the
score table plus the drop-vs-baseline table. Drops are computed at the
emitted one-decimal precision (baseline - task), in absolute points and as
a percentage of the baseline.
"""

from capbench.report import RunComparison, delta_table, emit, emit_deltas
from capbench.retrieval import MetricsReport


def fixture(task, direction, r1):
    return MetricsReport(task, direction, r1, r1, r1, 1.0, 1.0, 1000)


fit = RunComparison("FiT")
for task, r1 in [("original", 26.1), ("act_removal", 22.8),
                 ("obj_attr_removal", 5.2), ("syn_removal", 20.0)]:
    fit.add(fixture(task, "t2v", r1))

dicosa = RunComparison("DiCoSA")
for task, r1 in [("original", 47.9), ("act_removal", 41.3),
                 ("obj_attr_removal", 9.1), ("syn_removal", 38.3)]:
    dicosa.add(fixture(task, "t2v", r1))

print(emit([fit, dicosa], "markdown"))
print(emit_deltas([fit, dicosa], "markdown"))

for comp in (fit, dicosa):
    for entry in delta_table(comp):
        if entry.task_id == "obj_attr_removal":
            print(
                f"{comp.label}: removing objects & attributes costs "
                f"{entry.absolute_drop:.1f} points ({entry.relative_drop:.1f}% of baseline)"
            )
