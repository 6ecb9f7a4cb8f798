from hypothesis import HealthCheck, settings

settings.register_profile(
    "circle_derivs",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("circle_derivs")
