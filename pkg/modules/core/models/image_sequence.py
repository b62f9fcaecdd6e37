import logging
from modules.core.models.image_grid import ImageGrid


class ImageSequence(object):
    """
    Ordered, co-registered LR frames with a designated reference frame.
    """

    frames: list[ImageGrid]
    reference_index: int

    def __init__(self, frames: list[ImageGrid], reference_index: int = 0):
        """
        Initializes the Image Sequence.
        """
        if not frames:
            logging.error("A sequence needs at least one frame")
            raise ValueError("A sequence needs at least one frame")
        if any(not frame.same_shape(frames[0]) for frame in frames):
            logging.error("All frames of a sequence must share dimensions")
            raise ValueError("All frames of a sequence must share dimensions")
        if not 0 <= reference_index < len(frames):
            logging.error(f"Reference index {reference_index} out of range for {len(frames)} frames")
            raise ValueError(f"Reference index {reference_index} out of range for {len(frames)} frames")

        self.frames = list(frames)
        self.reference_index = reference_index

    def __str__(self):
        first = self.frames[0]
        return f"ImageSequence({len(self.frames)} frames of {first.width}x{first.height}, reference={self.reference_index})"

    def __len__(self):
        return len(self.frames)

    @property
    def reference(self) -> ImageGrid:
        return self.frames[self.reference_index]

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def offset_of(self, index: int) -> int:
        """
        Temporal offset of frame ``index`` relative to the reference frame.
        """
        return index - self.reference_index

    def temporal_order(self) -> list[int]:
        """
        Frame indices ordered reference first, then by increasing |offset| (negative offsets first on ties).
        """
        return sorted(range(len(self.frames)), key=lambda i: (abs(self.offset_of(i)), self.offset_of(i)))

    def subset(self, indices: list[int]) -> "ImageSequence":
        """
        Sub-sequence of the given frame indices; the reference must be included.
        """
        if self.reference_index not in indices:
            logging.error("A sub-sequence must keep the reference frame")
            raise ValueError("A sub-sequence must keep the reference frame")
        return ImageSequence([self.frames[i] for i in indices], indices.index(self.reference_index))
