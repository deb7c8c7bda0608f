"""One-dimensional interior-boundary-condition (IBC) models."""
