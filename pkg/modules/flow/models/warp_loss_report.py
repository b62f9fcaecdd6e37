import logging


class WarpLossReport(object):
    """
    Parts of the unsupervised warping loss: data term, total variation and their weighted sum.
    """

    data_term: float
    tv_term: float
    lambda1: float
    total: float

    def __init__(self, data_term: float, tv_term: float, lambda1: float):
        """
        Initializes the Warp Loss Report. ``total`` is data_term + lambda1 * tv_term.
        """
        self.data_term = float(data_term)
        self.tv_term = float(tv_term)
        self.lambda1 = float(lambda1)
        self.total = self.data_term + self.lambda1 * self.tv_term

    def __str__(self):
        return f"WarpLossReport(data={self.data_term:.6g}, tv={self.tv_term:.6g}, total={self.total:.6g})"

    def __add__(self, other: "WarpLossReport") -> "WarpLossReport":
        if self.lambda1 != other.lambda1:
            logging.error(f"Cannot add warp losses with different lambda1: {self.lambda1} vs {other.lambda1}")
            raise ValueError("Cannot add warp losses with different lambda1")
        return WarpLossReport(self.data_term + other.data_term, self.tv_term + other.tv_term, self.lambda1)

    def as_dict(self) -> dict:
        return {"data_term": self.data_term, "tv_term": self.tv_term, "total": self.total}
