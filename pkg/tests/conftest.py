"""Shared pytest configuration: a calmer hypothesis profile."""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "nfunc",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.filter_too_much],
)
settings.load_profile("nfunc")
