import pandas as pd
from modules.core.models.flow_field import FlowField
from modules.flow.models.warp_loss_report import WarpLossReport


class FlowRefinementResult(object):
    """
    Refined flow plus the loss trace of the minimization, one entry per accepted iterate.
    """

    flow: FlowField
    trace: list[tuple[int, WarpLossReport]]

    def __init__(self, flow: FlowField, trace: list[tuple[int, WarpLossReport]]):
        """
        Initializes the Flow Refinement Result.

        Args:
            flow (FlowField): The estimated flow.
            trace (list[tuple[int, WarpLossReport]]): (pyramid level, report) per iterate,
                starting with the initial flow of each level.
        """
        self.flow = flow
        self.trace = trace

    def __str__(self):
        last = self.trace[-1][1] if self.trace else None
        return f"FlowRefinementResult({self.flow}, iterates={len(self.trace)}, final={last})"

    def trace_frame(self) -> pd.DataFrame:
        """
        Loss trace as a table with columns level, iteration, data_term, tv_term, total.
        """
        rows = []
        iteration_per_level: dict[int, int] = {}
        for level, report in self.trace:
            iteration = iteration_per_level.get(level, 0)
            iteration_per_level[level] = iteration + 1
            rows.append({"level": level, "iteration": iteration, **report.as_dict()})
        return pd.DataFrame(rows, columns=["level", "iteration", "data_term", "tv_term", "total"])
