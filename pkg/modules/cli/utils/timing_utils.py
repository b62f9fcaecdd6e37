import time
import logging
from datetime import datetime


class TimingUtils:
    """
    Run timing for the manifests: a monotonic start mark, the wall-clock start and the duration.
    """

    @staticmethod
    def start() -> tuple[float, str]:
        """
        Returns:
            tuple[float, str]: (perf_counter mark, local start time as ISO 8601 with seconds precision).
        """
        return time.perf_counter(), datetime.now().isoformat(timespec="seconds")

    @staticmethod
    def elapsed_since(started: float) -> float:
        return max(time.perf_counter() - started, 0.0)

    @staticmethod
    def format_duration(seconds: float) -> str:
        """
        Formats a duration as ISO 8601 (e.g. 3723.25 -> "PT1H2M3.250S"). Zero hours and minutes are
        dropped; the seconds part is always written with millisecond precision.
        """
        if seconds < 0:
            logging.error(f"Negative duration: {seconds}")
            raise ValueError(f"Negative duration: {seconds}")

        millis = int(round(seconds * 1000))
        hours, millis = divmod(millis, 3_600_000)
        minutes, millis = divmod(millis, 60_000)

        text = "PT"
        if hours:
            text += f"{hours}H"
        if minutes:
            text += f"{minutes}M"
        return text + f"{millis / 1000:.3f}S"
