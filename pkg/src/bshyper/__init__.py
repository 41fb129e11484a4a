"""Exact predimension calculus for finite weighted hypergraphs."""
