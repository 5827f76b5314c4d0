"""
GHRR tests.
"""
