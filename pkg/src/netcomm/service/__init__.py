"""HTTP service exposing graph analysis over JSON."""

from netcomm.service.app import create_app

__all__ = ["create_app"]
