"""Tools package: graph generators and file I/O."""

from tools.graph_generators import GraphFamily, WeightPolicy, generate, generate_instance
from tools.instance_io import read_instance, read_solution, write_instance, write_solution

__all__ = [
    "GraphFamily",
    "WeightPolicy",
    "generate",
    "generate_instance",
    "read_instance",
    "read_solution",
    "write_instance",
    "write_solution",
]
