"""CLI interface for RIQ."""
