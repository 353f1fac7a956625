"""
Bebop - fixed-width binary serialization, schema compiler and RPC
"""

__version__ = "0.1.0"
__author__ = "Bebop Team"
__description__ = "Fixed-width binary serialization with a schema compiler and RPC runtime"
