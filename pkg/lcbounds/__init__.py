"""Sharp anti-concentration bounds for log-concave laws on the line and the integers."""

__version__ = '0.1.0'
