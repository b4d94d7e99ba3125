"""
Identification of macro causal effects in cluster directed mixed graphs.

What follows here is a quick tour of the code.

Overview
========

A cluster directed mixed graph (C-DMG) summarizes a causal system whose
variables are grouped into clusters. It may contain cycles and
self-loops, since one directed or bidirected edge between two clusters
stands for at least one such edge between their members. The question
answered here is whether the effect of intervening on some clusters is
determined by the observational distribution in every acyclic directed
mixed graph (ADMG) that the C-DMG could summarize.

Modules
=======

The bottom layer is L{graph}, with the L{MixedGraph} type shared by
ADMGs and C-DMGs, and L{ClusterSpec} for what is known about the
members of each cluster. L{separation} decides d-separation on both
kinds of graphs, and L{mutilation} removes the edges into or out of
intervened vertices.

On top of that, L{docalc} checks the side conditions of the rules of
the do-calculus, L{hedge} searches for hedges in the SC-projection, and
L{identify} combines both into a verdict: an estimand written in the
terms of L{estimand}, a hedge, or a report that the search gave up.

L{oracle} and L{scm} provide ground truth for small graphs by
enumerating compatible ADMGs and by exact inference in discrete
structural causal models.

Entry Point
===========

L{main} parses the command line and runs one of the subcommands in
L{command}. Graphs are read from a small text format, see L{dsl}, and
results are printed as text or JSON by L{report}.
"""
