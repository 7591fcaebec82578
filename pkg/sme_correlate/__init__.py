"""
SME Correlate - exact signal correlation functions for continuously monitored quantum systems.
"""

__version__ = "1.0.0"
