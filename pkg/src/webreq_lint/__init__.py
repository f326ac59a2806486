"""Static analyzer for jQuery web API requests with Swagger 2.0 conformance checking."""

__version__ = "0.1.0"
