"""Unit-group index criteria and prime-density experiments for totally real
biquadratic fields Q(sqrt(p), sqrt(d))."""

__version__ = "0.1.0"
