"""Exception hierarchy shared by all lunarsim modules."""


class LunarSimError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(LunarSimError, ValueError):
    """Invalid scene, scenario or trajectory configuration.

    ``field`` holds the dotted path of the offending entry when known.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class GridFormatError(LunarSimError, ValueError):
    """A raster file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = str(path)
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class GridStructureError(GridFormatError):
    """Header and body of a raster file disagree on dimensions."""


class RenderError(LunarSimError, RuntimeError):
    """Rendering failed (also raised for a failing sequence frame)."""

    def __init__(self, message, frame=None):
        self.frame = frame
        if frame is not None:
            message = f"frame {frame}: {message}"
        super().__init__(message)
