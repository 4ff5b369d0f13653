# Staircase Utilities
