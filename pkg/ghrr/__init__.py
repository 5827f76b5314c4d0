"""
Generalized holographic reduced representations: hypervectors of unitary matrices,
with FHRR as the m=1 case, plus the experiment CLI built on them.
"""
