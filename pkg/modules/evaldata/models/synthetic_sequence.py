from modules.core.models.flow_field import FlowField
from modules.core.models.image_sequence import ImageSequence
from modules.enums.shift_regime import ShiftRegime


class SyntheticSequence(object):
    """
    LR sequence generated from a known HR source, with its true flows F_{i->0} (one per frame,
    zero for the reference) and the shift regime that produced it.
    """

    sequence: ImageSequence
    flows: list[FlowField]
    shift_regime: ShiftRegime
    alpha: int

    def __init__(self, sequence: ImageSequence, flows: list[FlowField], shift_regime: ShiftRegime, alpha: int):
        """
        Initializes the Synthetic Sequence.
        """
        self.sequence = sequence
        self.flows = flows
        self.shift_regime = shift_regime
        self.alpha = alpha

    def __str__(self):
        return f"SyntheticSequence({self.sequence}, alpha={self.alpha}, regime={self.shift_regime.value['name']})"

    @property
    def exact_recovery(self) -> bool:
        return ShiftRegime.is_exact(self.shift_regime)

    def metadata(self) -> dict:
        return {
            "alpha": self.alpha,
            "shift_regime": self.shift_regime.value["name"],
            "exact_recovery": self.exact_recovery,
        }
