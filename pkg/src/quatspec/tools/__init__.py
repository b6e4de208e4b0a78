"""
Command-line tools for quatspec
"""
