"""
Initialize test package
"""