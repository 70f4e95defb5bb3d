"""Snowflake groups: presentations, normal forms and van Kampen diagram builders."""
from __future__ import annotations

__version__ = "0.1.0"
