"""
Utility modules for the bearing fault detector: configuration, errors and logging.
"""
