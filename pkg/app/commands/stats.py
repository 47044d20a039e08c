"""``stats``: dataset statistics of a pairs file."""

from typing import TextIO

from app.config import RunConfig
from libs.graph_match.concept_graph import load_concept_graph
from services.dataset import dataset_stats, read_pairs

from .common import optional_path, require_path


def run(cfg: RunConfig, out: TextIO) -> None:
    pairs = read_pairs(require_path(cfg, "pairs"))
    g = load_concept_graph(require_path(cfg, "concept_edges"), optional_path(cfg, "concept_nodes"))
    out.write(dataset_stats(pairs, g).format())
