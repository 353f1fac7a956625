from Bebop.Utils.Config import Settings, settings
from Bebop.Utils.errors import BebopError
from Bebop.Utils.Log import get_logger, setup_logger

__all__ = ["Settings", "settings", "BebopError", "get_logger", "setup_logger"]
