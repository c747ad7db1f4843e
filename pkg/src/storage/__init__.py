"""File persistence for keys, caches, tensors and reports."""

from .artifact_store import ArtifactStore

__all__ = ["ArtifactStore"]
