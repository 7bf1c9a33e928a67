from ._coorbit import CoorbitEmbedding, Group, Projection, __version__, random_unit_windows

__all__ = ["CoorbitEmbedding", "Group", "Projection", "random_unit_windows", "__version__"]
