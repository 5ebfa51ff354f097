"""Exception types shared across modules."""

__all__ = ["ConfigurationError", "EllipticityError", "BlowUpError"]


class ConfigurationError(ValueError):
    """A configuration violates a structural constraint."""


class EllipticityError(RuntimeError):
    """The diffusion coefficient dropped below its positivity floor."""

    def __init__(self, time, location, value, floor):
        self.time = time
        self.location = location
        self.value = value
        self.floor = floor
        super().__init__(
            "ellipticity lost at t=%.6g: min A(f(u)) = %.3g <= floor %.3g "
            "at grid point %s" % (time, value, floor, (location,)))


class BlowUpError(RuntimeError):
    """The solution exceeded the configured sup-norm cap."""

    def __init__(self, time, location, value, cap):
        self.time = time
        self.location = location
        self.value = value
        self.cap = cap
        super().__init__(
            "solution blow-up at t=%.6g: |u| reached %.3g > cap %.3g at grid "
            "point %s" % (time, value, cap, (location,)))
