"""Third-party libraries and extracted code."""
