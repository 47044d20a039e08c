"""tagmatch service layer.

Dataset construction, the three matchers and their training loop, built on
top of ``libs.graph_match``.
"""

__all__: list[str] = []
