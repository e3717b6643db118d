"""Version information for tensorbridge."""

__version__ = "0.3.0"
__version_info__ = (0, 3, 0)  # Version sous forme de tuple (major, minor, patch)
__license__ = "MIT"
