import logging
import constants.configs as configs


class LoggerService:
    """
    Service class to handle Logs.
    """

    @staticmethod
    def init(file_to_log: str = configs.LOG_FILE, level: str = configs.LOG_LEVEL):
        """
        Initialize the logging system. Logs go to stderr and, unless ``file_to_log`` is empty, to a
        file, so the ``key=value`` lines the commands print on stdout stay machine-readable.
        numpy/scipy warnings are routed into the log as well.

        Args:
            file_to_log (str): Log file path; "" disables the file handler.
            level (str): Logging level name (e.g. "INFO", "DEBUG").

        Raises:
            ValueError: If ``level`` is not a logging level name.
        """
        numeric_level = LoggerService.parse_level(level)
        if not logging.getLogger().hasHandlers():
            handlers: list[logging.Handler] = [logging.StreamHandler()]
            if file_to_log:
                handlers.insert(0, logging.FileHandler(file_to_log, encoding="utf-8"))
            logging.basicConfig(
                level=numeric_level,
                format="%(asctime)s - %(module)s - %(levelname)s - %(message)s",
                handlers=handlers,
            )
            logging.captureWarnings(True)
            logging.info(">---< Logging System Initialized >---<")

    @staticmethod
    def parse_level(level: str) -> int:
        numeric_level = logging.getLevelName(level.upper())
        if not isinstance(numeric_level, int):
            raise ValueError(f"Unknown log level: {level}")
        return numeric_level

    @staticmethod
    def log_and_return(value, key_label: str):
        """
        Logs the given value and returns it.

        Args:
            value (any): The value to log and return.
            key_label (str): The label for the value.

        Example:
            psnr_db = LoggerService.log_and_return(MetricsService.psnr(a, b), "psnr")
        """
        logging.info(f"{key_label}: {value}")
        return value
