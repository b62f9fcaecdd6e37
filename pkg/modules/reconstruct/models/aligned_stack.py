import logging
from modules.core.models.image_grid import ImageGrid
from modules.enums.alignment_mode import AlignmentMode


class AlignedStack(object):
    """
    Motion-compensated HR frames {J^H_i} with their splat weight maps and the bicubic-upsampled reference.
    """

    frames: list[ImageGrid]
    weights: list[ImageGrid]
    reference_upsampled: ImageGrid
    offsets: list[int]
    alignment: AlignmentMode

    def __init__(
        self,
        frames: list[ImageGrid],
        weights: list[ImageGrid],
        reference_upsampled: ImageGrid,
        offsets: list[int],
        alignment: AlignmentMode = AlignmentMode.SPMC,
    ):
        """
        Initializes the Aligned Stack.

        Args:
            frames (list[ImageGrid]): HR frames J^H_i.
            weights (list[ImageGrid]): Non-negative HR weight maps, one per frame.
            reference_upsampled (ImageGrid): Bicubic x alpha of the LR reference.
            offsets (list[int]): Temporal offset of each frame relative to the reference (0 for it).
            alignment (AlignmentMode): The backend that produced the stack.
        """
        if not frames:
            logging.error("An aligned stack needs at least one frame")
            raise ValueError("An aligned stack needs at least one frame")
        if not (len(frames) == len(weights) == len(offsets)):
            logging.error(f"Stack lists differ in length: {len(frames)} frames, {len(weights)} weights, {len(offsets)} offsets")
            raise ValueError(f"Stack lists differ in length: {len(frames)} frames, {len(weights)} weights, {len(offsets)} offsets")
        for grid in frames + weights:
            if not grid.same_shape(reference_upsampled):
                logging.error(f"Stack grid {grid.shape} differs from {reference_upsampled.shape}")
                raise ValueError(f"Stack grid {grid.shape} differs from {reference_upsampled.shape}")
        if any(weight.data.min() < 0.0 for weight in weights):
            logging.error("Stack weights must be non-negative")
            raise ValueError("Stack weights must be non-negative")

        self.frames = list(frames)
        self.weights = list(weights)
        self.reference_upsampled = reference_upsampled
        self.offsets = list(offsets)
        self.alignment = alignment

    def __str__(self):
        return f"AlignedStack({len(self.frames)} frames of {self.width}x{self.height}, {self.alignment.value['name']})"

    def __len__(self):
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.reference_upsampled.width

    @property
    def height(self) -> int:
        return self.reference_upsampled.height

    def temporal_order(self) -> list[int]:
        """
        Positions ordered reference first, then by increasing |offset| (negative first on ties).
        """
        return sorted(range(len(self.frames)), key=lambda i: (abs(self.offsets[i]), self.offsets[i]))

    def subset(self, positions: list[int]) -> "AlignedStack":
        return AlignedStack(
            [self.frames[i] for i in positions],
            [self.weights[i] for i in positions],
            self.reference_upsampled,
            [self.offsets[i] for i in positions],
            self.alignment,
        )
