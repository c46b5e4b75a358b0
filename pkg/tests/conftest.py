"""Suite-wide configuration: a deterministic hypothesis profile.

Property tests here drive numerics whose cost is dominated by FFTs, so the
per-example deadline is disabled and the example budget kept moderate;
``derandomize`` keeps every run of the suite byte-for-byte repeatable,
matching the determinism the package promises for its own artifacts.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "chlab",
    deadline=None,
    max_examples=50,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("chlab")
